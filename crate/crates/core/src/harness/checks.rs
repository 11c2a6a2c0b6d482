use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integrate, DiscreteFunction, Region, RegionFamily, Shape};
use crate::operators::{apply_operator, maximal, Kernel, MaximalKind};
use crate::orlicz::{luxemburg_norm, YoungFunction};
use crate::real::Real;
use crate::spaces::{bmo_norm, region_mean};
use crate::weights::Weight;

/// Continuum measure of a region, ignoring the box.
fn analytic_measure<T: Real>(region: &Region<T>, dim: usize) -> T {
    let r = region.size;
    match region.shape {
        Shape::Ball if dim == 2 => T::PI() * r * r,
        _ => (T::lit(2.0) * r).powi(dim as i32),
    }
}

fn ratio<T: Real>(lhs: T, rhs: T) -> (f64, bool) {
    let (l, r) = (lhs.to_f64_lossy(), rhs.to_f64_lossy());
    if r == 0.0 {
        (if l > 0.0 { f64::INFINITY } else { 0.0 }, l > 0.0)
    } else {
        (l / r, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Number of dyadic annuli summed on the right.
    pub terms: usize,
    pub violation: bool,
}

/// `max_{x∈B} |T(f χ_{(2B)^c})(x)|` against `Σ_j avg_{2^{j+1}B} |f|`, summed
/// until `2^{j+1}B` covers the box. With a symbol `b` both sides carry the
/// factor `|b − b_B|`: the left side becomes `|T((b − b_B) f₂)|`.
pub fn tail_bound_check<T: Real>(
    kernel: &Kernel,
    f: &DiscreteFunction<T>,
    ball: &Region<T>,
    epsilon: T,
    symbol: Option<&DiscreteFunction<T>>,
) -> Result<TailBound> {
    let grid = *f.grid();
    if grid.count_in(ball) == 0 {
        return Err(Error::precondition(format!("{ball:?} holds no grid node")));
    }
    let two = T::lit(2.0);
    let double = ball.dilate(two);
    let f2 = f.restrict(|p| !double.contains(p));
    let (source, weight) = match symbol {
        None => (f2.clone(), f.abs()),
        Some(b) => {
            let mean = region_mean(b, ball, None)?;
            let dev = b.map(|v| v - mean);
            (dev.mul(&f2), dev.abs().mul(&f.abs()))
        }
    };
    let lhs = if source.is_zero() {
        T::zero()
    } else {
        let out = apply_operator(kernel, &source, epsilon, None)?;
        let mut m = T::zero();
        for range in grid.region_ranges(ball) {
            out.values()[range].iter().for_each(|v| m = m.max(v.abs()));
        }
        m
    };

    // distance from the centre to the farthest box corner
    let l = grid.half_width();
    let c = ball.center;
    let far: Vec<T> = (0..grid.dim()).map(|k| (c[k] + l).abs().max((l - c[k]).abs())).collect();
    let reach = match ball.shape {
        Shape::Ball => far.iter().map(|&d| d * d).sum::<T>().sqrt(),
        Shape::Cube => far.iter().fold(T::zero(), |a, &d| a.max(d)),
    };
    let mut rhs = T::zero();
    let mut terms = 0;
    let mut j = 1;
    loop {
        let big = ball.dilate(two.powi(j + 1));
        rhs += integrate(&weight, &big, None).value / analytic_measure(&big, grid.dim());
        terms += 1;
        if big.size >= reach {
            break;
        }
        j += 1;
    }
    let (r, violation) = ratio(lhs, rhs);
    Ok(TailBound {
        lhs: lhs.to_f64_lossy(),
        rhs: rhs.to_f64_lossy(),
        ratio: r,
        terms,
        violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmoLemmaRow {
    pub j: usize,
    /// `b_{2^{j+1}B} − b_B`.
    pub difference: f64,
    /// `|b_{2^{j+1}B} − b_B| / ((j + 1) ‖b‖_*)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmoLemmaTable {
    pub bmo_norm: f64,
    pub rows: Vec<BmoLemmaRow>,
    pub max_ratio: f64,
    /// `(∫_B |b − b_B|^p w)^{1/p} / (‖b‖_* w(B)^{1/p})`.
    pub weighted_ratio: f64,
}

/// Mean growth over dilates and the weighted oscillation bound for `b`;
/// `‖b‖_*` is taken over `family`.
pub fn bmo_lemma_check<T: Real>(
    b: &DiscreteFunction<T>,
    ball: &Region<T>,
    jmax: usize,
    p: f64,
    w: &Weight<T>,
    family: &RegionFamily<T>,
) -> Result<BmoLemmaTable> {
    if !(p >= 1.0) {
        return Err(Error::config(format!("p must be at least 1, got {p}")));
    }
    let grid = b.grid();
    let two = T::lit(2.0);
    if !grid.contains_region(&ball.dilate(two.powi(jmax as i32 + 1))) {
        return Err(Error::precondition(format!("2^{}B does not fit the box", jmax + 1)));
    }
    let norm = bmo_norm(b, family)?;
    let mean = region_mean(b, ball, None)?;
    let scaled = |x: T, k: T| -> f64 {
        let (r, _) = ratio(x, k * norm);
        r
    };
    let mut rows = Vec::with_capacity(jmax);
    for j in 1..=jmax {
        let d = region_mean(b, &ball.dilate(two.powi(j as i32 + 1)), None)? - mean;
        rows.push(BmoLemmaRow {
            j,
            difference: d.to_f64_lossy(),
            ratio: scaled(d.abs(), T::from_usize_lossy(j + 1)),
        });
    }
    let pt = T::lit(p);
    let dev = b.map(|v| (v - mean).abs().powf(pt));
    let num = integrate(&dev, ball, Some(w.function())).value.powf(T::one() / pt);
    let den = w.mass(ball).powf(T::one() / pt);
    Ok(BmoLemmaTable {
        bmo_norm: norm.to_f64_lossy(),
        max_ratio: rows.iter().fold(0.0, |m, r| m.max(r.ratio)),
        rows,
        weighted_ratio: scaled(num, den),
    })
}

/// `‖(b − b_B)/‖b‖_*‖_{exp L, B}`, the quantity bounded by John–Nirenberg.
pub fn john_nirenberg_observable<T: Real>(
    b: &DiscreteFunction<T>,
    region: &Region<T>,
    family: &RegionFamily<T>,
    w: Option<&Weight<T>>,
) -> Result<T> {
    let norm = bmo_norm(b, family)?;
    if norm == T::zero() {
        return Ok(T::zero());
    }
    let mean = region_mean(b, region, w)?;
    let g = b.map(|v| (v - mean) / norm);
    luxemburg_norm(&g, &YoungFunction::Exp, region, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    /// Max of `lhs/rhs` over nodes with `rhs > 0`.
    pub ratio: f64,
    pub argmax_node: Option<usize>,
    pub violations: usize,
}

/// Pointwise sharp-function domination. Without a symbol:
/// `M^♯_δ(Tf) ≤ C Mf`. With `(b, ε)`:
/// `M^♯_δ([b,T]f) ≤ C ‖b‖_* (M_ε(Tf) + M_{L log L} f)`, `0 < δ < ε < 1`.
pub fn sharp_domination_check<T: Real>(
    kernel: &Kernel,
    f: &DiscreteFunction<T>,
    epsilon: T,
    delta: f64,
    family: &RegionFamily<T>,
    commutator: Option<(&DiscreteFunction<T>, f64)>,
) -> Result<DominationReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::config(format!("delta must lie in (0, 1), got {delta}")));
    }
    let tf = apply_operator(kernel, f, epsilon, None)?;
    let (lhs, rhs) = match commutator {
        None => (
            maximal(&tf, MaximalKind::SharpDelta { delta }, family)?,
            maximal(f, MaximalKind::HardyLittlewood, family)?,
        ),
        Some((b, eps)) => {
            if !(delta < eps && eps < 1.0) {
                return Err(Error::config(format!("need delta < epsilon < 1, got {delta} and {eps}")));
            }
            let cf = apply_operator(kernel, f, epsilon, Some(b))?;
            let norm = bmo_norm(b, family)?;
            let me = maximal(&tf, MaximalKind::HardyLittlewoodDelta { delta: eps }, family)?;
            let ml = maximal(f, MaximalKind::Llogl, family)?;
            (
                maximal(&cf, MaximalKind::SharpDelta { delta }, family)?,
                me.add(&ml).scale(norm),
            )
        }
    };
    let mut out = DominationReport {
        ratio: 0.0,
        argmax_node: None,
        violations: 0,
    };
    for (i, (&l, &r)) in lhs.values().iter().zip(rhs.values()).enumerate() {
        let (q, bad) = ratio(l, r);
        if bad {
            out.violations += 1;
        } else if q > out.ratio {
            out.ratio = q;
            out.argmax_node = Some(i);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BumpMode {
    /// `(avg u)^{1/p} (avg v^{−p'/p})^{1/p'}`.
    Two,
    /// `(avg u^r)^{1/(rp)} (avg v^{−p'/p})^{1/p'}`.
    Power,
    /// `(avg u^r)^{1/(rp)} ‖v^{−1/p}‖_{A,Q}`.
    Orlicz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpParams {
    pub p: f64,
    #[serde(default = "default_r")]
    pub r: f64,
    pub mode: BumpMode,
    /// Orlicz mode only; defaults to `t^{p'}(1 + log⁺ t)^{p'}`.
    #[serde(default)]
    pub young: Option<YoungFunction>,
}

fn default_r() -> f64 {
    1.0
}

impl BumpParams {
    pub fn new(p: f64, r: f64, mode: BumpMode) -> Self {
        Self { p, r, mode, young: None }
    }

    pub fn p_dual(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::config(format!("bump conditions need 1 < p < inf, got {}", self.p)));
        }
        if self.mode != BumpMode::Two && !(self.r > 1.0) {
            return Err(Error::config(format!("power and Orlicz bumps need r > 1, got {}", self.r)));
        }
        if let Some(y) = &self.young {
            y.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpReport {
    pub max_value: f64,
    /// Family order, radius-major; `None` for regions without nodes.
    pub per_region: Vec<Option<f64>>,
}

/// The two-weight condition's left-hand product on every cube of `family`.
pub fn bump_check<T: Real>(
    u: &Weight<T>,
    v: &Weight<T>,
    params: &BumpParams,
    family: &RegionFamily<T>,
) -> Result<BumpReport> {
    params.validate()?;
    if family.shape != Shape::Cube {
        return Err(Error::config("bump conditions are stated over cubes"));
    }
    if u.grid() != v.grid() {
        return Err(Error::config("u and v live on different grids"));
    }
    let grid = u.grid();
    let p = T::lit(params.p);
    let pd = T::lit(params.p_dual());
    let r = T::lit(params.r);
    let young = params.young.unwrap_or(YoungFunction::Bump {
        p_prime: params.p_dual(),
    });
    let u_pow = match params.mode {
        BumpMode::Two => u.function().clone(),
        _ => u.function().map(|x| x.powf(r)),
    };
    let v_dual = v.function().map(|x| x.powf(-pd / p));
    let v_root = v.function().map(|x| x.powf(-T::one() / p));
    let avg = |g: &DiscreteFunction<T>, region: &Region<T>| -> T {
        let mut s = T::zero();
        let mut n = 0;
        for range in grid.region_ranges(region) {
            n += range.len();
            g.values()[range].iter().for_each(|&x| s += x);
        }
        s / T::from_usize_lossy(n)
    };
    let mut per_region = Vec::with_capacity(family.len());
    let mut max_value: f64 = 0.0;
    for region in family.regions() {
        if grid.count_in(&region) == 0 {
            per_region.push(None);
            continue;
        }
        let u_factor = match params.mode {
            BumpMode::Two => avg(&u_pow, &region).powf(T::one() / p),
            _ => avg(&u_pow, &region).powf(T::one() / (r * p)),
        };
        let v_factor = match params.mode {
            BumpMode::Orlicz => luxemburg_norm(&v_root, &young, &region, None)?,
            _ => avg(&v_dual, &region).powf(T::one() / pd),
        };
        let value = (u_factor * v_factor).to_f64_lossy();
        if !value.is_finite() {
            return Err(Error::Divergence(format!("bump average diverges on {region:?}")));
        }
        max_value = max_value.max(value);
        per_region.push(Some(value));
    }
    Ok(BumpReport { max_value, per_region })
}
