//! Young functions, Luxemburg norms and generalized Hölder checks.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DiscreteFunction, Region};
use crate::real::Real;
use crate::weights::Weight;

/// A convex increasing `Y: [0,∞) → [0,∞)` with `Y(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum YoungFunction {
    /// `t^p`.
    Power { p: f64 },
    /// `t (1 + log⁺t)^κ`.
    Llogl { kappa: f64 },
    /// `e^t − 1`.
    Exp,
    /// `t^{p'} (1 + log⁺t)^{p'}`.
    Bump { p_prime: f64 },
    /// `Φ(t) = t (1 + log⁺t)`.
    Phi,
}

impl YoungFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            YoungFunction::Power { p } if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::config(format!("power Young function needs p >= 1, got {p}")))
            }
            YoungFunction::Llogl { kappa } if !(kappa >= 0.0 && kappa.is_finite()) => {
                Err(Error::config(format!("llogl needs kappa >= 0, got {kappa}")))
            }
            YoungFunction::Bump { p_prime } if !(p_prime >= 1.0 && p_prime.is_finite()) => Err(
                Error::config(format!("bump needs p' >= 1, got {p_prime}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn eval<T: Real>(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::domain(format!("Young functions live on t >= 0, got {t}")));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked<T: Real>(&self, t: T) -> T {
        match *self {
            YoungFunction::Power { p } => t.powf(T::lit(p)),
            YoungFunction::Llogl { kappa } => t * (T::one() + t.log_plus()).powf(T::lit(kappa)),
            YoungFunction::Exp => t.exp_m1(),
            YoungFunction::Bump { p_prime } => (t * (T::one() + t.log_plus())).powf(T::lit(p_prime)),
            YoungFunction::Phi => t * (T::one() + t.log_plus()),
        }
    }

    /// `Y⁻¹(y)` for `y ≥ 0`.
    pub fn inverse<T: Real>(&self, y: T) -> Result<T> {
        if !(y >= T::zero()) {
            return Err(Error::domain(format!("inverse Young function needs y >= 0, got {y}")));
        }
        Ok(match *self {
            YoungFunction::Power { p } => y.powf(T::one() / T::lit(p)),
            YoungFunction::Exp => y.ln_1p(),
            YoungFunction::Llogl { .. } | YoungFunction::Phi if y <= T::one() => y,
            YoungFunction::Bump { p_prime } => {
                let s = y.powf(T::one() / T::lit(p_prime));
                if s <= T::one() {
                    s
                } else {
                    YoungFunction::Phi.solve_above_one(s)
                }
            }
            _ => self.solve_above_one(y),
        })
    }

    /// Root of `Y(t) = y` for `y > 1` when `Y(t) ≥ t` on `[1,∞)`.
    fn solve_above_one<T: Real>(&self, y: T) -> T {
        let (mut lo, mut hi) = (T::one(), y);
        for _ in 0..200 {
            let mid = lo + (hi - lo) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval_unchecked(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Nonzero absolute values of `f` on `region` with their node masses, plus
/// the total mass of the region. Zero nodes only enter through the total
/// since every Young function vanishes at 0.
pub(crate) struct Samples<T> {
    values: Vec<T>,
    masses: Option<Vec<T>>,
    total: T,
    zeros: usize,
}

impl<T: Real> Samples<T> {
    pub(crate) fn collect(f: &DiscreteFunction<T>, region: &Region<T>, weight: Option<&Weight<T>>) -> Result<Self> {
        let grid = f.grid();
        if let Some(w) = weight {
            assert_eq!(w.grid(), grid, "weight lives on a different grid");
        }
        let mut values = Vec::new();
        let mut masses = weight.map(|_| Vec::new());
        let mut total = T::zero();
        let mut count = 0usize;
        for range in grid.region_ranges(region) {
            count += range.len();
            for i in range {
                let v = f.values()[i].abs();
                if let Some(w) = weight {
                    total += w.values()[i];
                }
                if v != T::zero() {
                    values.push(v);
                    if let (Some(m), Some(w)) = (masses.as_mut(), weight) {
                        m.push(w.values()[i]);
                    }
                }
            }
        }
        if count == 0 {
            return Err(Error::precondition(format!("region {region:?} holds no grid node")));
        }
        if weight.is_none() {
            total = T::from_usize_lossy(count);
        }
        Ok(Self {
            zeros: count - values.len(),
            values,
            masses,
            total,
        })
    }

    /// `avg g(|f|)` for `g` with `g(0) = 0`.
    pub(crate) fn average(&self, g: impl Fn(T) -> T) -> T {
        let s: T = match &self.masses {
            None => self.values.iter().map(|&v| g(v)).sum(),
            Some(m) => self.values.iter().zip(m).map(|(&v, &w)| g(v) * w).sum(),
        };
        s / self.total
    }
}

/// Luxemburg norm `inf{λ > 0 : avg_B Y(|f|/λ) ≤ 1}`, averaged with respect to
/// Lebesgue measure or, if given, the weight's measure.
pub fn luxemburg_norm<T: Real>(
    f: &DiscreteFunction<T>,
    young: &YoungFunction,
    region: &Region<T>,
    weight: Option<&Weight<T>>,
) -> Result<T> {
    young.validate()?;
    let samples = Samples::collect(f, region, weight)?;
    luxemburg_samples(&samples, young)
}

pub(crate) fn luxemburg_samples<T: Real>(s: &Samples<T>, young: &YoungFunction) -> Result<T> {
    let Some(&first) = s.values.first() else {
        return Ok(T::zero());
    };
    if s.zeros == 0 && s.values.iter().all(|&v| v == first) {
        return Ok(first / young.inverse(T::one())?);
    }
    let avg = |lambda: T| s.average(|v| young.eval_unchecked(v / lambda));
    let two = T::lit(2.0);
    let start = s.average(|v| v) + T::epsilon();
    let (mut lo, mut hi);
    if avg(start) <= T::one() {
        hi = start;
        lo = start / two;
        // avg Y(|f|/λ) → ∞ as λ → 0 since some |f| > 0
        while avg(lo) <= T::one() {
            hi = lo;
            lo = lo / two;
        }
    } else {
        lo = start;
        hi = start * two;
        let mut doublings = 1;
        while avg(hi) > T::one() {
            if doublings >= 64 {
                return Err(Error::Divergence(format!(
                    "Luxemburg bracket did not close after {doublings} doublings from {start}"
                )));
            }
            lo = hi;
            hi = hi * two;
            doublings += 1;
        }
    }
    let tol = T::lit(1e-10);
    while (hi - lo) > tol * hi {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if avg(mid) <= T::one() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Which generalized Hölder inequality to test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Pairing {
    /// `avg|fg| ≤ 2 ‖f‖_{L log L} ‖g‖_{exp L}`.
    LloglExp,
    /// The same pairing with `w`-averages; the constant is only observed.
    Weighted,
    /// `‖fg‖_C ≤ 2 ‖f‖_A ‖g‖_B` whenever `A⁻¹ B⁻¹ ≤ C⁻¹`.
    Oneil {
        a: YoungFunction,
        b: YoungFunction,
        c: YoungFunction,
    },
}

impl Pairing {
    pub fn name(&self) -> &'static str {
        match self {
            Pairing::LloglExp => "llogl-exp",
            Pairing::Weighted => "weighted",
            Pairing::Oneil { .. } => "oneil",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderOutcome<T> {
    pub lhs: T,
    pub rhs: T,
    /// `lhs / rhs`, zero when both vanish.
    pub ratio: T,
}

const LLOGL: YoungFunction = YoungFunction::Llogl { kappa: 1.0 };

/// Checks `A⁻¹(t) B⁻¹(t) ≤ C⁻¹(t)` at `t = 2^k`, `k = -20..=20`.
pub fn oneil_condition<T: Real>(a: &YoungFunction, b: &YoungFunction, c: &YoungFunction) -> Result<()> {
    for k in -20i32..=20 {
        let t = T::lit(2f64.powi(k));
        let l = a.inverse(t)? * b.inverse(t)?;
        let r = c.inverse(t)?;
        if l > r * (T::one() + T::lit(1e-9)) {
            return Err(Error::precondition(format!(
                "A^-1 B^-1 <= C^-1 fails at t = 2^{k}: {l} > {r}"
            )));
        }
    }
    Ok(())
}

pub fn holder_check<T: Real>(
    f: &DiscreteFunction<T>,
    g: &DiscreteFunction<T>,
    region: &Region<T>,
    pairing: &Pairing,
    weight: Option<&Weight<T>>,
) -> Result<HolderOutcome<T>> {
    let fg = f.mul(g);
    let (lhs, rhs) = match pairing {
        Pairing::LloglExp => {
            let lhs = Samples::collect(&fg, region, None)?.average(|v| v);
            let nf = luxemburg_norm(f, &LLOGL, region, None)?;
            let ng = luxemburg_norm(g, &YoungFunction::Exp, region, None)?;
            (lhs, T::lit(2.0) * nf * ng)
        }
        Pairing::Weighted => {
            let w = weight.ok_or_else(|| Error::config("weighted pairing needs a weight"))?;
            let lhs = Samples::collect(&fg, region, Some(w))?.average(|v| v);
            let nf = luxemburg_norm(f, &LLOGL, region, Some(w))?;
            let ng = luxemburg_norm(g, &YoungFunction::Exp, region, Some(w))?;
            (lhs, nf * ng)
        }
        Pairing::Oneil { a, b, c } => {
            oneil_condition::<T>(a, b, c)?;
            let lhs = luxemburg_norm(&fg, c, region, None)?;
            let na = luxemburg_norm(f, a, region, None)?;
            let nb = luxemburg_norm(g, b, region, None)?;
            (lhs, T::lit(2.0) * na * nb)
        }
    };
    let ratio = if rhs > T::zero() { lhs / rhs } else { T::zero() };
    Ok(HolderOutcome { lhs, rhs, ratio })
}

/// One CSV row of a Hölder sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderRow {
    pub pairing: String,
    pub region: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl HolderRow {
    pub fn new<T: Real>(pairing: &Pairing, region: usize, o: &HolderOutcome<T>) -> Self {
        Self {
            pairing: pairing.name().to_string(),
            region,
            lhs: o.lhs.to_f64_lossy(),
            rhs: o.rhs.to_f64_lossy(),
            ratio: o.ratio.to_f64_lossy(),
        }
    }
}

pub fn write_holder_csv<W: Write>(rows: &[HolderRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
