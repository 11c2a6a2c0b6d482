//! Weights and the Muckenhoupt machinery: `A_p` characteristics, doubling and
//! reverse doubling constants, and the comparison exponent of a weight.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integrate, DiscreteFunction, Grid, Region, RegionFamily, Shape};
use crate::real::Real;

/// Symbolic description of a weight, resampled on any grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { value: f64 },
    /// `max(|x - center|, h/2)^exponent`.
    Power {
        exponent: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// Any expression of the sampling language; must be positive on the grid.
    Expr { expr: String },
    Product { factors: Vec<WeightSpec> },
}

impl WeightSpec {
    pub fn unit() -> Self {
        WeightSpec::Constant { value: 1.0 }
    }

    pub fn power(exponent: f64) -> Self {
        WeightSpec::Power {
            exponent,
            center: [0.0, 0.0],
        }
    }

    pub fn build<T: Real>(&self, grid: Grid<T>) -> Result<Weight<T>> {
        let function = self.sample(grid)?;
        Weight::new(function, self.clone())
    }

    fn sample<T: Real>(&self, grid: Grid<T>) -> Result<DiscreteFunction<T>> {
        Ok(match self {
            WeightSpec::Constant { value } => DiscreteFunction::constant(grid, T::lit(*value)),
            WeightSpec::Power { exponent, center } => {
                let floor = grid.spacing() / T::lit(2.0);
                let a = T::lit(*exponent);
                let c = [T::lit(center[0]), T::lit(center[1])];
                DiscreteFunction::from_fn(grid, |p| {
                    let d = crate::grid::euclid(p, c).max(floor);
                    d.powf(a)
                })
            }
            WeightSpec::Expr { expr } => DiscreteFunction::sample(expr, grid)?,
            WeightSpec::Product { factors } => {
                let mut acc = DiscreteFunction::constant(grid, T::one());
                for f in factors {
                    acc = acc.mul(&f.sample(grid)?);
                }
                acc
            }
        })
    }
}

/// A strictly positive sampled function with its generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight<T> {
    function: DiscreteFunction<T>,
    spec: WeightSpec,
}

impl<T: Real> Weight<T> {
    pub fn new(function: DiscreteFunction<T>, spec: WeightSpec) -> Result<Self> {
        if let Some(i) = function.values().iter().position(|v| !(*v > T::zero())) {
            return Err(Error::domain(format!(
                "weight must be positive, got {} at node {i}",
                function.values()[i]
            )));
        }
        Ok(Self { function, spec })
    }

    pub fn unit(grid: Grid<T>) -> Self {
        Self {
            function: DiscreteFunction::constant(grid, T::one()),
            spec: WeightSpec::unit(),
        }
    }

    pub fn power(grid: Grid<T>, exponent: f64) -> Self {
        WeightSpec::power(exponent)
            .build(grid)
            .expect("power weights are positive")
    }

    pub fn function(&self) -> &DiscreteFunction<T> {
        &self.function
    }

    pub fn values(&self) -> &[T] {
        self.function.values()
    }

    pub fn grid(&self) -> &Grid<T> {
        self.function.grid()
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    /// `w(region) = ∫_region w`.
    pub fn mass(&self, region: &Region<T>) -> T {
        let one = DiscreteFunction::constant(*self.grid(), T::one());
        integrate(&one, region, Some(&self.function)).value
    }

    /// `c·w`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(
            self.function.scale(c),
            WeightSpec::Product {
                factors: vec![
                    WeightSpec::Constant {
                        value: c.to_f64_lossy(),
                    },
                    self.spec.clone(),
                ],
            },
        )
    }
}

fn region_sum<T: Real>(values: &[T], grid: &Grid<T>, region: &Region<T>) -> (T, usize) {
    let mut s = T::zero();
    let mut n = 0;
    for range in grid.region_ranges(region) {
        n += range.len();
        for v in &values[range] {
            s += *v;
        }
    }
    (s, n)
}

/// Largest `A_p` product over the family:
/// `avg_B w · (avg_B w^{-1/(p-1)})^{p-1}` for `p > 1` and
/// `avg_B w / min_B w` for `p = 1`. Regions without nodes are skipped.
///
/// This is a lower bound of the true characteristic (the family is finite).
pub fn muckenhoupt_characteristic<T: Real>(w: &Weight<T>, p: T, family: &RegionFamily<T>) -> Result<T> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::domain(format!("A_p needs finite p >= 1, got {p}")));
    }
    let grid = w.grid();
    let vals = w.values();
    let mut best = T::zero();
    let mut used = 0usize;
    if p == T::one() {
        for region in family.regions() {
            let mut s = T::zero();
            let mut n = 0usize;
            let mut min = T::infinity();
            for range in grid.region_ranges(&region) {
                n += range.len();
                for &v in &vals[range] {
                    s += v;
                    min = min.min(v);
                }
            }
            if n == 0 {
                warn!("A_1: region {region:?} holds no node, skipped");
                continue;
            }
            used += 1;
            best = best.max(s / T::from_usize_lossy(n) / min);
        }
    } else {
        let q = T::one() / (p - T::one());
        let dual: Vec<T> = vals.iter().map(|&v| v.powf(-q)).collect();
        for region in family.regions() {
            let (sw, n) = region_sum(vals, grid, &region);
            if n == 0 {
                warn!("A_p: region {region:?} holds no node, skipped");
                continue;
            }
            let (sd, _) = region_sum(&dual, grid, &region);
            let count = T::from_usize_lossy(n);
            used += 1;
            best = best.max((sw / count) * (sd / count).powf(p - T::one()));
        }
    }
    if used == 0 {
        return Err(Error::precondition("no region of the family meets the grid"));
    }
    Ok(best)
}

/// Doubling, reverse doubling and comparison data of a weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile<T> {
    /// `max_B w(2B)/w(B)`.
    pub doubling_constant: T,
    /// `min_B w(2B)/w(B)`.
    pub reverse_doubling_constant: T,
    /// Fitted `δ` in `w(E)/w(B) ≤ C (|E|/|B|)^δ`.
    pub comparison_exponent: T,
    /// Smallest `C` valid for the fitted `δ` on every sampled pair.
    pub comparison_constant: T,
    pub family: FamilySummary<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary<T> {
    pub shape: Shape,
    pub centers: usize,
    pub radii: Vec<T>,
    /// Regions whose double left the box and were not used for the doubling constants.
    pub skipped: usize,
}

pub fn doubling_profile<T: Real>(w: &Weight<T>, family: &RegionFamily<T>) -> Result<WeightProfile<T>> {
    if family.radii.len() < 2 {
        return Err(Error::precondition(
            "the comparison exponent needs at least two radii",
        ));
    }
    let grid = w.grid();
    let two = T::lit(2.0);
    let mut c_dbl = T::zero();
    let mut d_rev = T::infinity();
    let mut skipped = 0usize;

    // (mass, measure) for every centre × radius
    let mut table = Vec::with_capacity(family.centers.len());
    for &c in &family.centers {
        let mut row = Vec::with_capacity(family.radii.len());
        for &r in &family.radii {
            let region = Region::new(family.shape, c, r);
            row.push((w.mass(&region), grid.measure(&region)));
            let double = region.dilate(two);
            if !grid.contains_region(&double) {
                skipped += 1;
                continue;
            }
            let ratio = w.mass(&double) / w.mass(&region);
            c_dbl = c_dbl.max(ratio);
            d_rev = d_rev.min(ratio);
        }
        table.push(row);
    }
    if skipped > 0 {
        warn!("doubling profile: {skipped} region(s) whose double leaves the box were skipped");
    }
    if c_dbl == T::zero() {
        return Err(Error::precondition(
            "no region of the family has its double inside the box",
        ));
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in &table {
        for (i, &(wb, mb)) in row.iter().enumerate() {
            for &(we, me) in &row[..i] {
                if me > T::zero() && we > T::zero() {
                    xs.push((me / mb).ln());
                    ys.push((we / wb).ln());
                }
            }
        }
    }
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    if !(sxx > T::zero()) {
        return Err(Error::precondition(
            "nested regions have identical measures; cannot fit the comparison exponent",
        ));
    }
    let delta = sxy / sxx;
    let c_cmp = xs
        .iter()
        .zip(&ys)
        .fold(T::one(), |c, (&x, &y)| c.max((y - delta * x).exp()));

    Ok(WeightProfile {
        doubling_constant: c_dbl,
        reverse_doubling_constant: d_rev,
        comparison_exponent: delta,
        comparison_constant: c_cmp,
        family: FamilySummary {
            shape: family.shape,
            centers: family.centers.len(),
            radii: family.radii.clone(),
            skipped,
        },
    })
}
