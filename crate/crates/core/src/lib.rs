//! Numerical laboratory for weighted amalgam spaces, Orlicz bumps and
//! θ-type Calderón–Zygmund operators with BMO commutators.
//!
//! Everything is generic over the scalar [`Real`] (`f32` or `f64`); the
//! `*64` aliases below are what most callers want.

pub mod error;
pub mod grid;
pub mod harness;
pub mod operators;
pub mod orlicz;
pub mod real;
pub mod spaces;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{
    dyadic_radii, integrate, region_family, DiscreteFunction, Expr, Grid, Integral, Point, Region,
    RegionFamily, Shape,
};
pub use harness::{theorem_experiment, Corpus, ExperimentSpec, RatioReport, TheoremId};
pub use operators::{apply_operator, maximal, Kernel, MaximalKind, ThetaModulus};
pub use orlicz::{holder_check, luxemburg_norm, HolderOutcome, Pairing, YoungFunction};
pub use real::Real;
pub use spaces::{
    amalgam_norm, bmo_norm, local_lp_norm, local_weak_lp_norm, region_mean, AmalgamSpec, AmalgamValue,
    SpaceParams, Variant,
};
pub use weights::{doubling_profile, muckenhoupt_characteristic, Weight, WeightProfile, WeightSpec};

pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type DiscreteFunction64 = DiscreteFunction<f64>;
pub type Region64 = Region<f64>;
pub type RegionFamily64 = RegionFamily<f64>;
pub type Weight64 = Weight<f64>;
