use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Number of worst samples kept in a report.
pub const WORST_KEPT: usize = 10;

/// Inequality identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    LiYau,
    AronsonBenilan,
    EstebanVazquez,
    BenilanCrandall,
    HarnackHeat,
    HarnackPme,
    HarnackPdiff,
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::LiYau => "li_yau",
            Self::AronsonBenilan => "aronson_benilan",
            Self::EstebanVazquez => "esteban_vazquez",
            Self::BenilanCrandall => "benilan_crandall",
            Self::HarnackHeat => "harnack_heat",
            Self::HarnackPme => "harnack_pme",
            Self::HarnackPdiff => "harnack_pdiff",
        };
        f.write_str(s)
    }
}

/// One evaluated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub x: Vec<f64>,
    pub t: f64,
    /// Second point of a pair.
    pub x2: Option<Vec<f64>>,
    pub t2: Option<f64>,
    pub margin: f64,
    pub sharpness: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub inequality: Inequality,
    /// Samples whose margin was evaluated.
    pub samples: usize,
    /// Samples skipped because `u <= 0` (or the transform is undefined there).
    pub excluded: usize,
    /// Pairs whose bound carries a false validity flag; never violations.
    pub flagged: usize,
    /// Samples with margin `< -tolerance`.
    pub violations: usize,
    /// Samples with margin in `[-tolerance, 0)`.
    pub tolerated: usize,
    pub worst_margin: f64,
    pub sharpness: Option<SharpnessStats>,
    pub tolerance: f64,
    /// `c` of the grid tolerance `c (dx^2 + dt)`, when grid based.
    pub tolerance_constant: Option<f64>,
    /// False when the inequality yields no Harnack inequality.
    pub harnack_conclusion: bool,
    pub worst: Vec<SampleRecord>,
}

/// Per-sample outcome before reduction.
pub(crate) enum Outcome {
    Margin(SampleRecord),
    Excluded,
    Flagged,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Reduces per-sample outcomes in their original order.
    pub(crate) fn reduce(
        inequality: Inequality,
        outcomes: Vec<Outcome>,
        tolerance: f64,
        tolerance_constant: Option<f64>,
    ) -> Self {
        let mut report = Self {
            inequality,
            samples: 0,
            excluded: 0,
            flagged: 0,
            violations: 0,
            tolerated: 0,
            worst_margin: f64::INFINITY,
            sharpness: None,
            tolerance,
            tolerance_constant,
            harnack_conclusion: true,
            worst: Vec::new(),
        };
        let (mut s_min, mut s_max, mut s_sum, mut s_n) =
            (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for outcome in outcomes {
            let rec = match outcome {
                Outcome::Excluded => {
                    report.excluded += 1;
                    continue;
                }
                Outcome::Flagged => {
                    report.flagged += 1;
                    continue;
                }
                Outcome::Margin(rec) => rec,
            };
            report.samples += 1;
            let m = rec.margin;
            if m < -tolerance || m.is_nan() {
                report.violations += 1;
            } else if m < 0.0 {
                report.tolerated += 1;
            }
            if m < report.worst_margin || m.is_nan() {
                report.worst_margin = if m.is_nan() { f64::NEG_INFINITY } else { m };
            }
            if let Some(s) = rec.sharpness {
                s_min = s_min.min(s);
                s_max = s_max.max(s);
                s_sum += s;
                s_n += 1;
            }
            keep_worst(&mut report.worst, rec);
        }
        if s_n > 0 {
            report.sharpness = Some(SharpnessStats {
                min: s_min,
                mean: s_sum / s_n as f64,
                max: s_max,
            });
        }
        report
    }
}

fn keep_worst(worst: &mut Vec<SampleRecord>, rec: SampleRecord) {
    let key = |r: &SampleRecord| {
        if r.margin.is_nan() {
            f64::NEG_INFINITY
        } else {
            r.margin
        }
    };
    if worst.len() == WORST_KEPT && key(&rec) >= key(&worst[WORST_KEPT - 1]) {
        return;
    }
    let at = worst.partition_point(|r| key(r) <= key(&rec));
    worst.insert(at, rec);
    worst.truncate(WORST_KEPT);
}

/// CSV header of [`write_reports_csv`].
pub const REPORT_CSV_HEADER: [&str; 13] = [
    "inequality",
    "samples",
    "excluded",
    "flagged",
    "violations",
    "tolerated",
    "worst_margin",
    "tolerance",
    "tolerance_constant",
    "sharpness_min",
    "sharpness_mean",
    "sharpness_max",
    "harnack_conclusion",
];

/// One row per report.
pub fn write_reports_csv(path: &Path, reports: &[VerificationReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(REPORT_CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map(crate::compact).unwrap_or_default();
    for r in reports {
        w.write_record([
            r.inequality.to_string(),
            r.samples.to_string(),
            r.excluded.to_string(),
            r.flagged.to_string(),
            r.violations.to_string(),
            r.tolerated.to_string(),
            crate::compact(r.worst_margin),
            crate::compact(r.tolerance),
            opt(r.tolerance_constant),
            opt(r.sharpness.map(|s| s.min)),
            opt(r.sharpness.map(|s| s.mean)),
            opt(r.sharpness.map(|s| s.max)),
            r.harnack_conclusion.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Full reports, including the worst samples, as JSON.
pub fn write_reports_json(path: &Path, reports: &[VerificationReport]) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(reports)?)?;
    Ok(())
}
