//! Empirical checks of the boundedness theorems and auxiliary inequalities:
//! each one becomes a computable ratio over a seeded corpus of test functions.

mod checks;
mod corpus;
mod report;
mod theorem;

pub use checks::{
    bmo_lemma_check, bump_check, john_nirenberg_observable, sharp_domination_check, tail_bound_check,
    BmoLemmaRow, BmoLemmaTable, BumpMode, BumpParams, BumpReport, DominationReport, TailBound,
};
pub use corpus::{Corpus, CorpusSpec, Profile};
pub use report::{CaseRow, Hypothesis, Metadata, RatioReport, Stability};
pub use theorem::{theorem_experiment, ExperimentSpec, StabilityPlan, TheoremId};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Point, RegionFamily, Shape};
use crate::real::Real;

/// Outcome of a quantity tracked across grid refinements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plateau {
    /// Every step grows by less than 10%.
    Plateau,
    /// Grows by at least ×10 from first to last.
    Divergent,
    Indeterminate,
}

const PLATEAU_GROWTH: f64 = 0.10;
const DIVERGENT_FACTOR: f64 = 10.0;

/// Classifies `values` observed at successively refined grids.
pub fn classify(values: &[f64]) -> Plateau {
    if values.len() < 2 || values.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Plateau::Indeterminate;
    }
    if values.iter().any(|v| v.is_infinite()) {
        return Plateau::Divergent;
    }
    let first = values[0];
    let last = values[values.len() - 1];
    if first > 0.0 && last / first >= DIVERGENT_FACTOR {
        return Plateau::Divergent;
    }
    let flat = values.windows(2).all(|w| {
        if w[0] == 0.0 {
            w[1] == 0.0
        } else {
            (w[1] / w[0] - 1.0).abs() < PLATEAU_GROWTH
        }
    });
    if flat {
        Plateau::Plateau
    } else {
        Plateau::Indeterminate
    }
}

/// `quantity` evaluated on `grid` and `levels` successive refinements.
pub fn refinement_series<T: Real>(
    grid: Grid<T>,
    levels: u32,
    quantity: impl Fn(Grid<T>) -> Result<T>,
) -> Result<Vec<f64>> {
    (0..=levels)
        .map(|k| quantity(grid.refined_by(k)).map(T::to_f64_lossy))
        .collect()
}

/// Where the family centres sit, in physical units so that the same
/// family is used on every refinement of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Centers {
    /// Every node at distance a multiple of `spacing` from the box corner.
    Lattice { spacing: f64 },
    Points { points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub shape: Shape,
    pub radii: Vec<f64>,
    pub centers: Centers,
}

impl FamilySpec {
    pub fn lattice(shape: Shape, radii: Vec<f64>, spacing: f64) -> Self {
        Self {
            shape,
            radii,
            centers: Centers::Lattice { spacing },
        }
    }

    pub fn with_shape(&self, shape: Shape) -> Self {
        Self {
            shape,
            ..self.clone()
        }
    }

    pub fn build<T: Real>(&self, grid: &Grid<T>) -> Result<RegionFamily<T>> {
        let radii: Vec<T> = self.radii.iter().map(|&r| T::lit(r)).collect();
        match &self.centers {
            Centers::Lattice { spacing } => {
                let h = grid.spacing().to_f64_lossy();
                let stride = spacing / h;
                let rounded = stride.round();
                if !(rounded >= 1.0) || (stride - rounded).abs() > 1e-6 * stride {
                    return Err(Error::config(format!(
                        "center spacing {spacing} is not a positive multiple of the grid spacing {h}"
                    )));
                }
                crate::grid::region_family(grid, &radii, self.shape, rounded as usize)
            }
            Centers::Points { points } => {
                let centers: Vec<Point<T>> = points.iter().map(|p| [T::lit(p[0]), T::lit(p[1])]).collect();
                RegionFamily::with_centers(self.shape, centers, radii, T::one())
            }
        }
    }
}

/// Maps `f` over `items` on scoped threads; results come back in input order.
pub fn par_map<I: Sync, O: Send>(items: &[I], f: impl Fn(usize, &I) -> O + Sync) -> Vec<O> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(items.len().max(1));
    if workers <= 1 {
        return items.iter().enumerate().map(|(i, x)| f(i, x)).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                s.spawn(move || {
                    part.iter()
                        .enumerate()
                        .map(|(k, x)| f(c * chunk + k, x))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
