//! The JSON run configuration.
//!
//! ```json
//! {
//!   "grid": {"dim": 1, "half_width": 4, "points": 4096},
//!   "weights": {"w": {"kind": "power", "exponent": 0.5}},
//!   "family": {"radii": [0.125, 0.25, 0.5, 1, 2], "stride": 32, "shape": "ball"},
//!   "task": {"kind": "weights-profile", "weight": "w", "p": 2},
//!   "seed": 7,
//!   "output": {"json": "profile.json", "csv": "profile.csv"}
//! }
//! ```
//!
//! Functions are expressions in `x` (and `y` in the plane, `r = |(x, y)|`):
//! numbers, `pi`, `e`, `+ - * / ^`, `|…|`, `abs`, `log`, `exp`, `sqrt`, `sin`,
//! `cos`, `sign`, `step`, `min`, `max`, `pow`, `clip(e, lo, hi)`, `ind(a, b)`
//! for `χ_[a,b)` and `box(a, b, c, d)` for `χ_[a,b)×[c,d)`. `log` and
//! negative powers are clipped at `|x| = h/2`. Weights are referenced by
//! name; `unit` is always defined.

use std::collections::BTreeMap;

use amalgam::harness::{BumpParams, ExperimentSpec};
use amalgam::operators::Kernel;
use amalgam::{Grid64, Pairing, RegionFamily64, Shape, SpaceParams, Variant, Weight64, WeightSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub weights: BTreeMap<String, WeightSpec>,
    #[serde(default)]
    pub family: Option<FamilyConfig>,
    pub task: Task,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    /// The box is `[-half_width, half_width)^dim`.
    pub half_width: f64,
    /// Nodes per axis.
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub radii: Vec<f64>,
    #[serde(default = "default_stride")]
    pub stride: usize,
    pub shape: Shape,
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// File names inside `--out`; default `<task>.json` and `<task>.csv`.
    #[serde(default)]
    pub json: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
}

fn unit() -> String {
    "unit".into()
}

fn default_epsilon() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    WeightsProfile {
        weight: String,
        /// Also report the `A_p` characteristic.
        #[serde(default)]
        p: Option<f64>,
    },
    Norm {
        function: String,
        params: SpaceParams,
        variant: Variant,
        /// Inner weight `v` and measure weight `u`; `u = v = w` unless `v` is given.
        #[serde(default = "unit")]
        w: String,
        #[serde(default)]
        v: Option<String>,
        #[serde(default = "unit")]
        mu: String,
    },
    OperatorApply {
        kernel: Kernel,
        function: String,
        /// Truncation radius in units of the grid spacing.
        #[serde(default = "default_epsilon")]
        epsilon_h: f64,
        /// Commutator symbol `b`.
        #[serde(default)]
        symbol: Option<String>,
    },
    Verify {
        experiment: ExperimentSpec,
    },
    Holder {
        f: String,
        g: String,
        pairing: Pairing,
        #[serde(default)]
        weight: Option<String>,
    },
    Bump {
        u: String,
        v: String,
        params: BumpParams,
    },
    Bmo {
        b: String,
        center: [f64; 2],
        radius: f64,
        jmax: usize,
        #[serde(default = "one")]
        p: f64,
        #[serde(default = "unit")]
        weight: String,
    },
}

fn one() -> f64 {
    1.0
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::WeightsProfile { .. } => "weights-profile",
            Task::Norm { .. } => "norm",
            Task::OperatorApply { .. } => "operator-apply",
            Task::Verify { .. } => "verify",
            Task::Holder { .. } => "holder",
            Task::Bump { .. } => "bump",
            Task::Bmo { .. } => "bmo",
        }
    }
}

impl RunConfig {
    /// Parses `text`; schema errors carry `source:line:column`.
    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("{source}:{}:{}: {e}", e.line(), e.column())))
    }

    pub fn grid(&self) -> Result<Grid64, CliError> {
        Ok(Grid64::new(self.grid.dim, self.grid.half_width, self.grid.points)?)
    }

    pub fn weight_spec(&self, name: &str) -> Result<WeightSpec, CliError> {
        match self.weights.get(name) {
            Some(w) => Ok(w.clone()),
            None if name == "unit" => Ok(WeightSpec::unit()),
            None => Err(CliError::Config(format!("weight {name:?} is not defined in the weights block"))),
        }
    }

    pub fn weight(&self, name: &str, grid: Grid64) -> Result<Weight64, CliError> {
        Ok(self.weight_spec(name)?.build(grid)?)
    }

    pub fn family(&self, grid: &Grid64) -> Result<RegionFamily64, CliError> {
        let f = self
            .family
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("task {} needs a family block", self.task.name())))?;
        Ok(amalgam::region_family(grid, &f.radii, f.shape, f.stride)?)
    }
}
