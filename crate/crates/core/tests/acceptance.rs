//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so that every line reaches the
//! terminal under `cargo test`.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rindler_fock::entanglement::{
    negativity, negativity_curve, partial_trace, uniform_grid, DensityMatrix, PartitionSpec,
};
use rindler_fock::fock::{
    expectation, FermionOp, ModeId, ModeOrdering, OccupationKey, Region, Sector, SparseState,
};
use rindler_fock::output::{report_csv, report_json};
use rindler_fock::presets::{
    dirac_singlet, generic, grassmann_bell, singlet, toy_entropy, toy_tripartite_negativity,
    DEFAULT_STATE_SEED,
};
use rindler_fock::rindler::{
    apply_linear, build_joint_state, build_sector_vacuum, unruh_annihilator, FieldSpec,
    SqueezeParameter, UnruhWeights,
};
use rindler_fock::survey::{
    histogram_grid, survey_full, survey_monte_carlo, OrderingPermutation, SurveyReport,
    DEFAULT_QUANTUM,
};

const MC_SAMPLES: usize = 200_000;
const MC_SEED: u64 = 2011;
/// Upper slack on the physical Dirac endpoint above its limit of 1/4.
const ENDPOINT_SLACK: f64 = 1e-6;

struct Verdict {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.failures.push(what.clone());
        }
        self.notes.push(what);
    }

    fn timed(&mut self, elapsed: Duration, limit: Duration) {
        self.check(
            elapsed < limit,
            format!("runtime {:.1}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()),
        );
    }

    fn report(&self, id: u32, title: &str) -> bool {
        let ok = self.failures.is_empty();
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} criterion {id} ({title}): {}", self.notes.join("; "));
        if !ok {
            println!("     failed: {}", self.failures.join("; "));
        }
        ok
    }
}

fn half() -> UnruhWeights {
    UnruhWeights::from_qr(FRAC_1_SQRT_2).unwrap()
}

fn one() -> UnruhWeights {
    UnruhWeights::from_qr(1.0).unwrap()
}

fn populations(report: &SurveyReport) -> Vec<u64> {
    report.classes.iter().map(|c| c.population).collect()
}

/// Smallest class endpoint in the report, for the survival check.
fn min_endpoint(report: &SurveyReport) -> f64 {
    report
        .classes
        .iter()
        .map(|c| c.curve.endpoint())
        .fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let product = toy_entropy("ab").unwrap();
    let entangled = toy_entropy("ba").unwrap();
    v.check(product.abs() <= 1e-10, format!("entropy(ab) = {product:.3e}"));
    v.check((entangled - 1.0).abs() <= 1e-10, format!("entropy(ba) = {entangled:.12}"));
    v.timed(start.elapsed(), Duration::from_secs(1));
    v
}

fn criterion_2() -> Verdict {
    let mut v = Verdict::new();
    let abc = toy_tripartite_negativity("abc").unwrap();
    let acb = toy_tripartite_negativity("acb").unwrap();
    v.check((abc - 0.5).abs() <= 1e-10, format!("N(abc) = {abc:.12}"));
    v.check(acb.abs() <= 1e-10, format!("N(acb) = {acb:.3e}"));
    v
}

fn criterion_3() -> Verdict {
    let mut v = Verdict::new();
    let cases = common::all_cases();
    let worst = cases
        .iter()
        .map(|(name, case)| (common::deviation(case), name))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    v.check(
        worst.0 <= 1e-12,
        format!("{} states, worst deviation {:.2e} ({})", cases.len(), worst.0, worst.1),
    );
    v
}

fn criterion_4() -> Verdict {
    let mut v = Verdict::new();
    let fields = [FieldSpec::grassmann(), FieldSpec::dirac(), FieldSpec::spin(3).unwrap()];
    let grid = uniform_grid(9);
    let mut worst = 0.0f64;
    let mut applied = 0;
    for field in &fields {
        for &r in &grid {
            let sq = SqueezeParameter::new(r).unwrap();
            for sector in [Sector::Right, Sector::Left] {
                let vac = build_sector_vacuum(field, sq, sector);
                for sigma in field.spins() {
                    let op = unruh_annihilator(field, sigma, sector, sq).unwrap();
                    worst = worst.max(apply_linear(&op, &vac).unwrap().norm_sqr().sqrt());
                    applied += 1;
                }
            }
        }
    }
    v.check(worst <= 1e-12, format!("{applied} applications, worst norm {worst:.2e}"));
    v
}

/// Grassmann curves of the two reference orderings plus both surveys.
fn criterion_5(survival: &mut Vec<(String, f64)>) -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let field = FieldSpec::grassmann();
    let spec = grassmann_bell();
    let grid = uniform_grid(33);
    let curve = |perm: &OrderingPermutation| {
        negativity_curve(&spec, &field, half(), &perm.to_ordering(&field).unwrap(), &grid).unwrap()
    };

    let canonical = curve(&OrderingPermutation::parse_labels(&field, "c†I,d†II,d†I,c†II").unwrap());
    let monotone = canonical.values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    v.check(
        monotone,
        format!(
            "canonical nonincreasing {:.6} → {:.6}",
            canonical.values[0],
            canonical.endpoint()
        ),
    );

    let physical = curve(&OrderingPermutation::parse_labels(&field, "c†I,d†I,d†II,c†II").unwrap());
    let (k_min, &min) = physical
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let r_min = grid[k_min];
    v.check(r_min <= FRAC_PI_8 + 1e-12, format!("physical minimum {min:.6} at r = {r_min:.5} (π/8 = {FRAC_PI_8:.5})"));
    let rises = physical.values[k_min..].windows(2).all(|w| w[1] >= w[0] - 1e-12)
        && physical.endpoint() > min;
    v.check(rises, format!("physical rises after its minimum to {:.6}", physical.endpoint()));

    let full = survey_full(&spec, &field, half(), &grid, DEFAULT_QUANTUM).unwrap();
    v.check(full.classes.len() == 2, format!("q_R=1/√2: {} classes {:?}", full.classes.len(), populations(&full)));
    let unit = survey_full(&spec, &field, one(), &grid, DEFAULT_QUANTUM).unwrap();
    v.check(unit.classes.len() == 1, format!("q_R=1: {} classes", unit.classes.len()));
    survival.push(("grassmann q_R=1/√2".into(), min_endpoint(&full)));
    survival.push(("grassmann q_R=1".into(), min_endpoint(&unit)));
    v.timed(start.elapsed(), Duration::from_secs(10));
    v
}

fn criterion_6(survival: &mut Vec<(String, f64)>) -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let grid = uniform_grid(33);
    let report = survey_full(&dirac_singlet(), &FieldSpec::dirac(), half(), &grid, DEFAULT_QUANTUM)
        .unwrap();
    let elapsed = start.elapsed();
    let pops = populations(&report);
    v.check(report.classes.len() == 6, format!("{} classes {pops:?}", report.classes.len()));
    v.check(pops.iter().min() == Some(&4032), "minimum population 4032");
    v.check(pops.iter().max() == Some(&9408), "maximum population 9408");
    v.check(report.population_total() == 40320, format!("{} orderings", report.population_total()));

    let phys = &report.physical_curve.values;
    let end = report.physical_curve.endpoint();
    v.check(
        (0.25 - 1e-10..0.25 + ENDPOINT_SLACK).contains(&end),
        format!("physical endpoint {end:.12}"),
    );
    v.check(phys.iter().all(|&x| x >= 0.25 - 1e-10), "physical curve ≥ 1/4 on the grid");
    let approach = phys[phys.len() - 4..phys.len() - 1].iter().all(|&x| x > 0.25);
    v.check(approach, "physical curve above 1/4 just before π/4");

    let extremal = report
        .classes
        .iter()
        .map(|c| c.curve.endpoint())
        .fold(f64::INFINITY, f64::min);
    v.check((extremal - 0.1398).abs() <= 5e-4, format!("extremal endpoint {extremal:.6}"));
    survival.push(("dirac singlet".into(), min_endpoint(&report)));
    v.timed(elapsed, Duration::from_secs(300));
    v
}

fn criterion_7(survival: &mut Vec<(String, f64)>) -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let field = FieldSpec::dirac();
    let grid = uniform_grid(33);
    let no_pair = generic(&field, DEFAULT_STATE_SEED, false).unwrap();
    let full = generic(&field, DEFAULT_STATE_SEED, true).unwrap();
    let runs = [
        ("no-pair q_R=1/√2", &no_pair, half(), 64),
        ("no-pair q_R=1", &no_pair, one(), 2),
        ("generic q_R=1/√2", &full, half(), 778),
    ];
    for (name, spec, q, want) in runs {
        let report = survey_full(spec, &field, q, &grid, DEFAULT_QUANTUM).unwrap();
        let got = report.classes.len();
        v.check(got == want, format!("{name}: {got} classes (expected {want})"));
        survival.push((format!("dirac {name}"), min_endpoint(&report)));
    }
    v.check(true, format!("state seed {DEFAULT_STATE_SEED}"));
    v.timed(start.elapsed(), Duration::from_secs(900));
    v
}

fn criterion_8(survival: &mut Vec<(String, f64)>) -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let field = FieldSpec::spin(3).unwrap();
    let report = survey_monte_carlo(
        &singlet(&field),
        &field,
        half(),
        &histogram_grid(),
        DEFAULT_QUANTUM,
        MC_SAMPLES,
        MC_SEED,
    )
    .unwrap();
    let pops = populations(&report);
    v.check(report.population_total() == MC_SAMPLES as u64, format!("{MC_SAMPLES} samples, seed {MC_SEED}"));
    v.check(true, format!("{} classes, top {:?}", pops.len(), &pops[..pops.len().min(6)]));
    let third = pops.get(2).copied().unwrap_or(0);
    let dominant = pops.len() >= 2 && pops[1] >= 2 * third;
    v.check(dominant, format!("second class {} vs 2 × third {}", pops.get(1).copied().unwrap_or(0), 2 * third));

    // plateaus: runs of consecutive ranks sharing one population
    let mut runs = Vec::new();
    let mut k = 0;
    while k < pops.len() {
        let len = pops[k..].iter().take_while(|&&p| p == pops[k]).count();
        if len >= 3 {
            runs.push((pops[k], len));
        }
        k += len;
    }
    let in_runs: usize = runs.iter().map(|r| r.1).sum();
    v.check(
        runs.len() >= 3 && 2 * in_runs >= pops.len(),
        format!("{} plateaus of length ≥ 3 holding {in_runs} classes", runs.len()),
    );
    survival.push(("spin-3/2 sample".into(), min_endpoint(&report)));
    v.check(true, format!("{:.0}s", start.elapsed().as_secs_f64()));
    v
}

fn random_state(rng: &mut ChaCha8Rng, ord: &ModeOrdering) -> SparseState {
    let terms = (0..1u32 << ord.len()).map(|k| {
        (OccupationKey(k), Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    });
    SparseState::from_terms(ord.clone(), terms).unwrap()
}

fn toy(n: usize) -> (Vec<ModeId>, ModeOrdering) {
    let modes: Vec<ModeId> = ('a'..).take(n).map(ModeId::Toy).collect();
    let ord = ModeOrdering::new(modes.clone()).unwrap();
    (modes, ord)
}

fn shuffled(rng: &mut ChaCha8Rng, modes: &[ModeId]) -> ModeOrdering {
    let mut m = modes.to_vec();
    m.shuffle(rng);
    ModeOrdering::new(m).unwrap()
}

fn dense_op(ord: &ModeOrdering, op: &FermionOp) -> DMatrix<Complex64> {
    let d = 1usize << ord.len();
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        let ket = SparseState::basis(ord.clone(), OccupationKey(col as u32));
        for (k, a) in ket.apply_op(op).unwrap().terms() {
            m[(k.0 as usize, col)] = a;
        }
    }
    m
}

fn max_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Worst violation of `{a_i, a†_j} = δ_ij`, `{a_i, a_j} = 0` on up to six modes.
fn anticommutator_error() -> f64 {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        let (modes, ord) = toy(n);
        let a: Vec<_> = modes.iter().map(|m| dense_op(&ord, &FermionOp::annihilate(*m))).collect();
        let ad: Vec<_> = modes.iter().map(|m| dense_op(&ord, &FermionOp::create(*m))).collect();
        let id = DMatrix::<Complex64>::identity(1 << n, 1 << n);
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { id.clone() } else { id.scale(0.0) };
                worst = worst
                    .max(max_norm(&(&a[i] * &ad[j] + &ad[j] * &a[i] - delta)))
                    .max(max_norm(&(&a[i] * &a[j] + &a[j] * &a[i])));
            }
        }
    }
    worst
}

/// Worst deviation of `reorder(reorder(ψ, π), id)` from `ψ`.
fn round_trip_error(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        let (modes, ord) = toy(n);
        for _ in 0..20 {
            let psi = random_state(rng, &ord);
            let target = shuffled(rng, &modes);
            let back = psi.reorder_basis(&target).unwrap().reorder_basis(&ord).unwrap();
            worst = worst.max(back.max_abs_diff(&psi).unwrap());
        }
    }
    worst
}

/// Worst change of `⟨ψ|O|ψ⟩` for random operator strings under reordering.
fn expectation_error(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        let (modes, ord) = toy(n);
        for _ in 0..20 {
            let psi = random_state(rng, &ord);
            let ops: Vec<FermionOp> = (0..rng.random_range(1..5))
                .map(|_| FermionOp { mode: modes[rng.random_range(0..n)], dagger: rng.random() })
                .collect();
            let target = shuffled(rng, &modes);
            let before = expectation(&psi, &ops).unwrap();
            let after = expectation(&psi.reorder_basis(&target).unwrap(), &ops).unwrap();
            worst = worst.max((before - after).norm());
        }
    }
    worst
}

/// Applies a permutation of the region-I factors to a reduced density
/// matrix (bit 0 Alice, bits above region I), a local unitary on Bob's side.
fn permute_region_one(rho: &DensityMatrix, perm: &[usize]) -> DensityMatrix {
    let dense = rho.to_dense();
    let map = |idx: usize| {
        let mut out = idx & 1;
        for (from, &to) in perm.iter().enumerate() {
            out |= (idx >> (from + 1) & 1) << (to + 1);
        }
        out
    };
    let mut out = DMatrix::zeros(dense.nrows(), dense.ncols());
    for i in 0..dense.nrows() {
        for j in 0..dense.ncols() {
            out[(map(i), map(j))] = dense[(i, j)];
        }
    }
    DensityMatrix::from_dense(out, perm.len()).unwrap()
}

/// Worst change of a negativity curve when region-I factors are permuted.
fn local_unitary_error(rng: &mut ChaCha8Rng) -> f64 {
    let field = FieldSpec::dirac();
    let spec = generic(&field, DEFAULT_STATE_SEED, true).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let mut p: Vec<u8> = (0..field.rindler_mode_count() as u8).collect();
        p.shuffle(rng);
        let ordering = OrderingPermutation::new(p).unwrap().to_ordering(&field).unwrap();
        let part = PartitionSpec::alice_vs_region_one(&ordering).unwrap();
        let kept = ordering.modes().iter().filter(|m| m.region() == Some(Region::I)).count();
        let mut perm: Vec<usize> = (0..kept).collect();
        perm.shuffle(rng);
        for r in uniform_grid(9) {
            let psi = build_joint_state(&spec, &field, half(), SqueezeParameter::new(r).unwrap())
                .unwrap()
                .reorder_basis(&ordering)
                .unwrap();
            let rho = partial_trace(&psi, &part).unwrap();
            worst = worst.max((negativity(&rho) - negativity(&permute_region_one(&rho, &perm))).abs());
        }
    }
    worst
}

fn criterion_9(survival: &[(String, f64)]) -> Verdict {
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let e = anticommutator_error();
    v.check(e <= 1e-12, format!("anticommutators {e:.1e}"));
    let e = round_trip_error(&mut rng);
    v.check(e <= 1e-12, format!("round trip {e:.1e}"));
    let e = expectation_error(&mut rng);
    v.check(e <= 1e-12, format!("expectation values {e:.1e}"));
    let e = local_unitary_error(&mut rng);
    v.check(e <= 1e-12, format!("region-I permutations {e:.1e}"));
    for (name, end) in survival {
        v.check(*end > 0.0, format!("{name} min N(π/4) {end:.4}"));
    }
    v
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_rindler-fock"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn criterion_10() -> Verdict {
    let mut v = Verdict::new();
    let field = FieldSpec::dirac();
    let grid = uniform_grid(9);
    let lib = || {
        let report = survey_monte_carlo(&dirac_singlet(), &field, half(), &grid, DEFAULT_QUANTUM, 2000, 3)
            .unwrap();
        (report_json(&report, None).unwrap(), report_csv(&report))
    };
    v.check(lib() == lib(), "library json/csv");
    let runs: [&[&str]; 3] = [
        &["survey", "--field", "grassmann", "--format", "csv"],
        &["mc-survey", "--field", "dirac", "--samples", "500", "--seed", "4", "--grid", "9"],
        &["curve", "--field", "dirac", "--state", "generic"],
    ];
    for args in runs {
        v.check(run_cli(args) == run_cli(args), format!("`{}`", args.join(" ")));
    }
    v
}

fn main() -> ExitCode {
    let mut survival = Vec::new();
    let results = [
        criterion_1().report(1, "toy separability flip"),
        criterion_2().report(2, "tripartite trace ambiguity"),
        criterion_3().report(3, "golden states"),
        criterion_4().report(4, "vacuum annihilation"),
        criterion_5(&mut survival).report(5, "grassmann curves"),
        criterion_6(&mut survival).report(6, "dirac singlet survey"),
        criterion_7(&mut survival).report(7, "dirac generic surveys"),
        criterion_8(&mut survival).report(8, "spin-3/2 sample"),
        criterion_9(&survival).report(9, "property suites"),
        criterion_10().report(10, "determinism"),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
