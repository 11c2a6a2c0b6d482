use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::Grid;
use crate::real::Real;

/// Grid and truncation data embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub spacing: f64,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub version: String,
}

impl Metadata {
    pub fn new<T: Real>(grid: &Grid<T>, epsilon: Option<f64>, seed: Option<u64>) -> Self {
        Self {
            dim: grid.dim(),
            half_width: grid.half_width().to_f64_lossy(),
            points_per_axis: grid.points_per_axis(),
            spacing: grid.spacing().to_f64_lossy(),
            epsilon,
            seed,
            version: concat!("amalgam ", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }
}

/// One checked hypothesis and the numbers behind the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub detail: String,
    pub values: Vec<f64>,
}

impl Hypothesis {
    pub fn new(name: impl Into<String>, holds: bool, detail: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            holds,
            detail: detail.into(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub case: usize,
    pub label: String,
    pub lambda: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub violation: bool,
}

impl CaseRow {
    /// Ratio `lhs / rhs`, zero when both vanish; `lhs > 0 = rhs` is a violation.
    pub fn new(case: usize, label: impl Into<String>, lambda: Option<f64>, lhs: f64, rhs: f64) -> Self {
        let violation = rhs == 0.0 && lhs > 0.0 || !lhs.is_finite() || !rhs.is_finite();
        let ratio = if violation {
            f64::INFINITY
        } else if lhs == 0.0 {
            0.0
        } else {
            lhs / rhs
        };
        Self {
            case,
            label: label.into(),
            lambda,
            lhs,
            rhs,
            ratio,
            violation,
        }
    }
}

/// Max ratio of a rerun under a perturbed discretization and its relative
/// drift `|max' − max| / max` from the base run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub label: String,
    pub max_ratio: f64,
    pub delta: f64,
}

impl Stability {
    pub fn new(label: impl Into<String>, base: f64, max_ratio: f64) -> Self {
        let delta = if base == max_ratio {
            0.0
        } else {
            (max_ratio - base).abs() / base.abs()
        };
        Self {
            label: label.into(),
            max_ratio,
            delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub experiment: String,
    pub metadata: Metadata,
    pub hypotheses: Vec<Hypothesis>,
    pub cases: Vec<CaseRow>,
    pub max_ratio: f64,
    pub argmax_case: Option<usize>,
    pub violations: usize,
    pub stability: Vec<Stability>,
    /// Largest relative ratio change under `f → 2f` (with `λ → 2λ`).
    pub scale_deviation: Option<f64>,
}

impl RatioReport {
    pub fn new(experiment: impl Into<String>, metadata: Metadata, hypotheses: Vec<Hypothesis>, cases: Vec<CaseRow>) -> Self {
        let mut max_ratio = 0.0;
        let mut argmax_case = None;
        for (k, c) in cases.iter().enumerate() {
            if c.ratio > max_ratio || argmax_case.is_none() {
                max_ratio = c.ratio;
                argmax_case = Some(k);
            }
        }
        Self {
            experiment: experiment.into(),
            metadata,
            hypotheses,
            violations: cases.iter().filter(|c| c.violation).count(),
            cases,
            max_ratio,
            argmax_case,
            stability: Vec::new(),
            scale_deviation: None,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.cases.iter().all(|c| c.ratio.is_finite())
    }

    /// True when no case is flagged and every hypothesis holds.
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.hypotheses.iter().all(|h| h.holds)
    }

    /// Per-case rows: `case,label,lambda,lhs,rhs,ratio,violation`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for c in &self.cases {
            w.serialize(c)?;
        }
        w.flush()?;
        Ok(())
    }
}
