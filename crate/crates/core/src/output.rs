//! CSV and JSON writers. Output is a pure function of its input, so repeated
//! runs with the same parameters produce identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::entanglement::NegativityCurve;
use crate::error::Result;
use crate::survey::{SurveyMode, SurveyReport};

/// `r,negativity` table, one row per grid point.
pub fn curve_csv(curve: &NegativityCurve) -> String {
    let mut out = String::from("r,negativity\n");
    for (r, v) in curve.grid.iter().zip(&curve.values) {
        writeln!(out, "{r},{v}").expect("writing to a string");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassJson {
    pub population: u64,
    pub is_physical: bool,
    pub curve: Vec<f64>,
    pub representative: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportJson {
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    pub qr: f64,
    pub grid: Vec<f64>,
    pub quantum: f64,
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<usize>,
    pub examined: u64,
    pub distinct_patterns: usize,
    pub classes: Vec<ClassJson>,
}

impl ReportJson {
    /// `state` names the preset the report was built from, if any.
    pub fn new(report: &SurveyReport, state: Option<&str>) -> Result<Self> {
        let (mode, seed, sample_size) = match report.mode {
            SurveyMode::Full => ("full", None, None),
            SurveyMode::MonteCarlo { samples, seed } => ("monte_carlo", Some(seed), Some(samples)),
            SurveyMode::Listed => ("listed", None, None),
        };
        let classes = report
            .classes
            .iter()
            .map(|c| {
                Ok(ClassJson {
                    population: c.population,
                    is_physical: c.contains_physical,
                    curve: c.curve.values.clone(),
                    representative: c.representative.labels(&report.field)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ReportJson {
            field: report.field.name(),
            state: state.map(str::to_owned),
            qr: report.weights.q_r.re,
            grid: report.grid.clone(),
            quantum: report.quantum,
            mode,
            seed,
            sample_size,
            examined: report.examined,
            distinct_patterns: report.distinct_patterns,
            classes,
        })
    }
}

pub fn report_json(report: &SurveyReport, state: Option<&str>) -> Result<String> {
    let json = ReportJson::new(report, state)?;
    let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
    text.push('\n');
    Ok(text)
}

/// Population table: `rank,population,is_physical,endpoint,representative`.
/// The representative is a space-separated label list.
pub fn report_csv(report: &SurveyReport) -> Result<String> {
    let mut out = String::from("rank,population,is_physical,endpoint,representative\n");
    for (rank, c) in report.classes.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{}",
            rank + 1,
            c.population,
            c.contains_physical,
            c.curve.endpoint(),
            c.representative.labels(&report.field)?.join(" ")
        )
        .expect("writing to a string");
    }
    Ok(out)
}
