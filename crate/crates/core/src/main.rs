use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use rindler_fock::entanglement::{negativity_curve, uniform_grid, NegativityCurve};
use rindler_fock::output::{curve_csv, report_csv, report_json};
use rindler_fock::presets::{
    from_coefficients, toy_entropy, toy_tripartite_negativity, StatePreset, DEFAULT_STATE_SEED,
};
use rindler_fock::rindler::{FieldSpec, JointStateSpec, UnruhWeights};
use rindler_fock::survey::{
    histogram_grid, survey_full, survey_monte_carlo, OrderingPermutation, SurveyReport,
    DEFAULT_GRID_POINTS, DEFAULT_MC_SAMPLES, DEFAULT_QUANTUM,
};
use rindler_fock::FockError;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Fock(FockError::EnumerationRefused { .. }) => 2,
            _ => 1,
        }
    }
}

/// Operator-ordering dependence of fermionic entanglement under acceleration.
#[derive(Debug, Parser)]
#[command(name = "rindler-fock", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two- and three-mode examples evaluated in both orderings.
    Toy,
    /// Negativity curve of one or more orderings, one CSV each.
    Curve {
        #[command(flatten)]
        common: Common,
        /// Comma-separated mode labels; repeat for several curves.
        #[arg(long)]
        ordering: Vec<String>,
        /// Output directory; curves go to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive classification of all orderings.
    Survey {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Classification of uniformly sampled orderings.
    McSurvey {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_SEED)]
        seed: u64,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Reproduction presets; runs all of them when none is named.
    Figures {
        preset: Option<Figure>,
        /// Output directory.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    GrassmannFig2,
    DiracSinglet,
    Spin32Hist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// grassmann, dirac or spin:<s>
    #[arg(long, default_value = "dirac")]
    field: String,
    /// singlet, no-pair or generic
    #[arg(long, default_value = "singlet")]
    state: String,
    /// Seed of the generic-coefficient states.
    #[arg(long, default_value_t = DEFAULT_STATE_SEED)]
    state_seed: u64,
    /// Alice's weight P; used with --coeffs.
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    p: f64,
    /// Explicit branch coefficients (4 for grassmann, 8 for dirac); overrides --state.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    coeffs: Option<Vec<f64>>,
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    qr: f64,
    /// Number of uniform grid points on [0, π/4].
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_QUANTUM)]
    quantum: f64,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

struct Setup {
    field: FieldSpec,
    spec: JointStateSpec,
    state: String,
    weights: UnruhWeights,
    grid: Vec<f64>,
}

impl Common {
    fn setup(&self) -> Result<Setup, CliError> {
        let field = FieldSpec::parse(&self.field)?;
        let (spec, state) = match &self.coeffs {
            Some(c) => (from_coefficients(&field, self.p, c)?, "coefficients".to_owned()),
            None => {
                let preset = StatePreset::parse(&self.state)?;
                (preset.build(&field, self.state_seed)?, preset.name().to_owned())
            }
        };
        if self.grid < 2 {
            return Err(CliError::Usage("--grid needs at least 2 points".into()));
        }
        Ok(Setup {
            field,
            spec,
            state,
            weights: UnruhWeights::from_qr(self.qr)?,
            grid: uniform_grid(self.grid),
        })
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_owned(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn render(report: &SurveyReport, state: &str, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => report_json(report, Some(state))?,
        Format::Csv => report_csv(report)?,
    })
}

fn curve_for(setup: &Setup, ordering: &OrderingPermutation) -> Result<NegativityCurve, CliError> {
    Ok(negativity_curve(
        &setup.spec,
        &setup.field,
        setup.weights,
        &ordering.to_ordering(&setup.field)?,
        &setup.grid,
    )?)
}

fn parse_ordering(field: &FieldSpec, text: &str) -> Result<OrderingPermutation, CliError> {
    // Alice is always leftmost, so a leading "A" is optional
    let text = text.strip_prefix("A,").unwrap_or(text);
    Ok(OrderingPermutation::parse_labels(field, text)?)
}

fn run_toy() -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str("two modes, state ½(|00⟩+|01⟩+|10⟩+|11⟩)\n");
    for ordering in ["ab", "ba"] {
        out.push_str(&format!("  ordering {ordering}: entropy {:.6}\n", toy_entropy(ordering)?));
    }
    out.push_str("three modes, state ½(|100⟩+|010⟩+|101⟩+|011⟩), c traced out\n");
    for ordering in ["abc", "acb"] {
        out.push_str(&format!(
            "  ordering {ordering}: negativity {:.6}\n",
            toy_tripartite_negativity(ordering)?
        ));
    }
    emit(None, &out)
}

fn run_curve(common: &Common, orderings: &[String], out: Option<&Path>) -> Result<(), CliError> {
    let setup = common.setup()?;
    let orderings = if orderings.is_empty() {
        vec![
            OrderingPermutation::identity(setup.field.rindler_mode_count()),
            OrderingPermutation::physical(&setup.field),
        ]
    } else {
        orderings
            .iter()
            .map(|o| parse_ordering(&setup.field, o))
            .collect::<Result<_, _>>()?
    };
    for (k, ordering) in orderings.iter().enumerate() {
        let csv = curve_csv(&curve_for(&setup, ordering)?);
        match out {
            Some(dir) => {
                let path = dir.join(format!("curve-{}.csv", k + 1));
                write_file(&path, &csv)?;
                println!("{}: {}", path.display(), ordering.labels(&setup.field)?.join(","));
            }
            None => {
                if k > 0 {
                    println!();
                }
                println!("# {}", ordering.labels(&setup.field)?.join(","));
                print!("{csv}");
            }
        }
    }
    Ok(())
}

fn run_figure(figure: Figure, dir: &Path, samples: usize, seed: u64) -> Result<(), CliError> {
    let q = UnruhWeights::from_qr(FRAC_1_SQRT_2)?;
    let grid = uniform_grid(DEFAULT_GRID_POINTS);
    match figure {
        Figure::GrassmannFig2 => {
            let field = FieldSpec::grassmann();
            let spec = StatePreset::Singlet.build(&field, DEFAULT_STATE_SEED)?;
            let named = [
                ("canonical", OrderingPermutation::identity(field.rindler_mode_count())),
                ("physical", OrderingPermutation::physical(&field)),
            ];
            for (name, ordering) in named {
                let curve =
                    negativity_curve(&spec, &field, q, &ordering.to_ordering(&field)?, &grid)?;
                write_file(&dir.join(format!("grassmann-fig2-{name}.csv")), &curve_csv(&curve))?;
            }
        }
        Figure::DiracSinglet => {
            let field = FieldSpec::dirac();
            let spec = StatePreset::Singlet.build(&field, DEFAULT_STATE_SEED)?;
            let report = survey_full(&spec, &field, q, &grid, DEFAULT_QUANTUM)?;
            write_file(&dir.join("dirac-singlet.json"), &report_json(&report, Some("singlet"))?)?;
            for (rank, class) in report.classes.iter().enumerate() {
                let path = dir.join(format!("dirac-singlet-class-{}.csv", rank + 1));
                write_file(&path, &curve_csv(&class.curve))?;
            }
        }
        Figure::Spin32Hist => {
            let field = FieldSpec::spin(3)?;
            let spec = StatePreset::Singlet.build(&field, DEFAULT_STATE_SEED)?;
            let report =
                survey_monte_carlo(&spec, &field, q, &histogram_grid(), DEFAULT_QUANTUM, samples, seed)?;
            write_file(&dir.join("spin32-hist.csv"), &report_csv(&report)?)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Toy => run_toy(),
        Command::Curve {
            common,
            ordering,
            out,
        } => run_curve(&common, &ordering, out.as_deref()),
        Command::Survey { common, report } => {
            let s = common.setup()?;
            let r = survey_full(&s.spec, &s.field, s.weights, &s.grid, common.quantum)?;
            emit(report.out.as_deref(), &render(&r, &s.state, report.format)?)
        }
        Command::McSurvey {
            common,
            samples,
            seed,
            report,
        } => {
            let s = common.setup()?;
            let r = survey_monte_carlo(
                &s.spec,
                &s.field,
                s.weights,
                &s.grid,
                common.quantum,
                samples,
                seed,
            )?;
            emit(report.out.as_deref(), &render(&r, &s.state, report.format)?)
        }
        Command::Figures {
            preset,
            out,
            samples,
            seed,
        } => {
            let presets = match preset {
                Some(p) => vec![p],
                None => vec![Figure::GrassmannFig2, Figure::DiracSinglet, Figure::Spin32Hist],
            };
            for p in presets {
                run_figure(p, &out, samples, seed)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
