//! Local Lebesgue norms, BMO and the weighted amalgam scale
//! `(L^p, L^q)^α(v, u; μ)` with its weak and `L log L` members.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{integrate, DiscreteFunction, Grid, Point, Region, RegionFamily};
use crate::orlicz::{luxemburg_norm, YoungFunction};
use crate::real::Real;
use crate::weights::Weight;

/// Exponent triple `1 ≤ p ≤ α ≤ q ≤ ∞`. In JSON `q` may be `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceParams {
    pub p: f64,
    pub alpha: f64,
    #[serde(serialize_with = "ser_exponent", deserialize_with = "de_exponent")]
    pub q: f64,
}

fn ser_exponent<S: Serializer>(q: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if q.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*q)
    }
}

fn de_exponent<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }
    match Repr::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "∞") => Ok(f64::INFINITY),
        Repr::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
    }
}

impl SpaceParams {
    pub fn new(p: f64, alpha: f64, q: f64) -> Result<Self> {
        let s = Self { p, alpha, q };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { p, alpha, q } = *self;
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::config(format!("p must lie in [1, inf), got {p}")));
        }
        if !(alpha >= p && alpha.is_finite()) {
            return Err(Error::config(format!("need p <= alpha < inf, got p = {p}, alpha = {alpha}")));
        }
        if !(q >= alpha) {
            return Err(Error::config(format!("need alpha <= q, got alpha = {alpha}, q = {q}")));
        }
        Ok(())
    }

    /// Dual exponent `p'` (`∞` for `p = 1`).
    pub fn p_dual(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    fn inv_q(&self) -> f64 {
        if self.q.is_infinite() {
            0.0
        } else {
            1.0 / self.q
        }
    }

    /// `1/α − 1/p − 1/q`.
    pub fn inner_exponent(&self) -> f64 {
        1.0 / self.alpha - 1.0 / self.p - self.inv_q()
    }

    /// `1/α − 1/q`.
    pub fn outer_exponent(&self) -> f64 {
        1.0 / self.alpha - self.inv_q()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Strong,
    Weak,
    Llogl,
}

/// Everything that fixes an amalgam norm: exponents, the inner weight `v`,
/// the measure weight `u` (equal to `v` in the one-weight spaces), the outer
/// weight `μ` and the finite family realizing the suprema.
#[derive(Debug, Clone)]
pub struct AmalgamSpec<T> {
    pub params: SpaceParams,
    pub variant: Variant,
    pub inner_weight: Weight<T>,
    pub measure_weight: Weight<T>,
    pub outer_weight: Weight<T>,
    pub family: RegionFamily<T>,
}

impl<T: Real> AmalgamSpec<T> {
    /// One-weight space `(L^p, L^q)^α(w; μ)`.
    pub fn one_weight(
        params: SpaceParams,
        variant: Variant,
        w: Weight<T>,
        mu: Weight<T>,
        family: RegionFamily<T>,
    ) -> Self {
        Self {
            params,
            variant,
            inner_weight: w.clone(),
            measure_weight: w,
            outer_weight: mu,
            family,
        }
    }

    /// Unweighted space on `grid`.
    pub fn unweighted(params: SpaceParams, variant: Variant, grid: Grid<T>, family: RegionFamily<T>) -> Self {
        Self::one_weight(params, variant, Weight::unit(grid), Weight::unit(grid), family)
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let g = self.inner_weight.grid();
        if self.measure_weight.grid() != g || self.outer_weight.grid() != g {
            return Err(Error::config("amalgam weights live on different grids"));
        }
        Ok(())
    }
}

/// Value of an amalgam norm together with where the suprema were attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmalgamValue<T> {
    pub value: T,
    pub argmax_radius: T,
    /// Only meaningful for `q = ∞`, where the outer norm is a max over centres.
    pub argmax_center: Option<Point<T>>,
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::domain(format!("p must lie in [1, inf), got {p}")));
    }
    Ok(())
}

fn weight_values<'a, T: Real>(w: Option<&'a Weight<T>>) -> Option<&'a [T]> {
    w.map(|w| w.values())
}

/// `(∫_B |f|^p w)^{1/p}`.
pub fn local_lp_norm<T: Real>(
    f: &DiscreteFunction<T>,
    p: T,
    w: Option<&Weight<T>>,
    region: &Region<T>,
) -> Result<T> {
    check_p(p)?;
    let fp = f.map(|v| v.abs().powf(p));
    Ok(integrate(&fp, region, w.map(|w| w.function())).value.powf(T::one() / p))
}

fn lp_from_powers<T: Real>(powers: &[T], w: Option<&[T]>, grid: &Grid<T>, region: &Region<T>, p: T) -> T {
    let mut s = T::zero();
    for range in grid.region_ranges(region) {
        match w {
            None => powers[range].iter().for_each(|&v| s += v),
            Some(w) => powers[range.clone()].iter().zip(&w[range]).for_each(|(&v, &m)| s += v * m),
        }
    }
    (s * grid.cell_measure()).powf(T::one() / p)
}

/// `sup_λ λ·w({x ∈ B : |f(x)| > λ})^{1/p}`, evaluated exactly on the
/// discrete level sets as `max_k v_k · w({|f| ≥ v_k})^{1/p}`.
pub fn local_weak_lp_norm<T: Real>(
    f: &DiscreteFunction<T>,
    p: T,
    w: Option<&Weight<T>>,
    region: &Region<T>,
) -> Result<T> {
    check_p(p)?;
    Ok(weak_from_values(f.values(), weight_values(w), f.grid(), region, p))
}

fn weak_from_values<T: Real>(f: &[T], w: Option<&[T]>, grid: &Grid<T>, region: &Region<T>, p: T) -> T {
    let mut pairs: Vec<(T, T)> = Vec::new();
    for range in grid.region_ranges(region) {
        for i in range {
            let a = f[i].abs();
            if a > T::zero() {
                pairs.push((a, w.map_or(T::one(), |w| w[i])));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite values"));
    let h = grid.cell_measure();
    let inv_p = T::one() / p;
    let mut best = T::zero();
    let mut mass = T::zero();
    let mut k = 0;
    while k < pairs.len() {
        let level = pairs[k].0;
        while k < pairs.len() && pairs[k].0 == level {
            mass += pairs[k].1;
            k += 1;
        }
        best = best.max(level * (mass * h).powf(inv_p));
    }
    best
}

/// `b_B`, the (weighted) mean of `b` over `region`.
pub fn region_mean<T: Real>(b: &DiscreteFunction<T>, region: &Region<T>, w: Option<&Weight<T>>) -> Result<T> {
    let num = integrate(b, region, w.map(|w| w.function()));
    if num.is_empty() {
        return Err(Error::precondition(format!("region {region:?} holds no grid node")));
    }
    let den = match w {
        None => b.grid().measure(region),
        Some(w) => w.mass(region),
    };
    Ok(num.value / den)
}

/// `avg_B |b − b_B|`.
pub fn mean_oscillation<T: Real>(b: &DiscreteFunction<T>, region: &Region<T>) -> Result<T> {
    let mean = region_mean(b, region, None)?;
    let osc = b.map(|v| (v - mean).abs());
    region_mean(&osc, region, None)
}

/// `max_B avg_B |b − b_B|` over the family; regions without nodes are skipped.
pub fn bmo_norm<T: Real>(b: &DiscreteFunction<T>, family: &RegionFamily<T>) -> Result<T> {
    let mut best: Option<T> = None;
    for region in family.regions() {
        if b.grid().count_in(&region) == 0 {
            continue;
        }
        let o = mean_oscillation(b, &region)?;
        best = Some(best.map_or(o, |m| m.max(o)));
    }
    best.ok_or_else(|| Error::precondition("no region of the family meets the grid"))
}

/// The amalgam norm of `f` for the given spec; see [`AmalgamSpec`].
///
/// Regions are intersected with the box and the outer integral is truncated
/// to the centre grid, so values are lower bounds of the continuum norm.
pub fn amalgam_norm<T: Real>(f: &DiscreteFunction<T>, spec: &AmalgamSpec<T>) -> Result<AmalgamValue<T>> {
    spec.validate()?;
    let grid = *f.grid();
    if spec.inner_weight.grid() != &grid {
        return Err(Error::config("function and weights live on different grids"));
    }
    let params = spec.params;
    let p = T::lit(params.p);
    let (exponent, inner_p) = match spec.variant {
        Variant::Strong | Variant::Weak => (T::lit(params.inner_exponent()), p),
        Variant::Llogl => (T::lit(params.outer_exponent()), T::one()),
    };
    let v = spec.inner_weight.values();
    let u = spec.measure_weight.values();
    let mu = spec.outer_weight.values();
    let powers: Vec<T> = f.values().iter().map(|x| x.abs().powf(inner_p)).collect();
    let llogl = YoungFunction::Llogl { kappa: 1.0 };
    let h = grid.cell_measure();
    let q = params.q;

    let mut best = AmalgamValue {
        value: T::zero(),
        argmax_radius: spec.family.radii[0],
        argmax_center: None,
    };
    for &r in &spec.family.radii {
        let mut profile: Vec<(T, T, Point<T>)> = Vec::with_capacity(spec.family.centers.len());
        for region in spec.family.regions_at(r) {
            let ranges = grid.region_ranges(&region);
            if ranges.is_empty() {
                continue;
            }
            let inner = match spec.variant {
                Variant::Strong => lp_from_powers(&powers, Some(v), &grid, &region, p),
                Variant::Weak => weak_from_values(f.values(), Some(v), &grid, &region, p),
                Variant::Llogl => luxemburg_norm(f, &llogl, &region, Some(&spec.inner_weight))?,
            };
            let value = if inner == T::zero() {
                T::zero()
            } else {
                let mut ub = T::zero();
                for range in ranges {
                    u[range].iter().for_each(|&x| ub += x);
                }
                (ub * h).powf(exponent) * inner
            };
            let weight = mu[grid.nearest_node(region.center)];
            profile.push((value, weight, region.center));
        }
        let (value, center) = outer_norm(&profile, q, spec.family.center_measure);
        if value > best.value {
            best = AmalgamValue {
                value,
                argmax_radius: r,
                argmax_center: if q.is_infinite() { center } else { None },
            };
        }
    }
    Ok(best)
}

/// `(Σ value^q μ(y) dy)^{1/q}` or `max value` for `q = ∞`.
pub(crate) fn outer_norm<T: Real>(profile: &[(T, T, Point<T>)], q: f64, dy: T) -> (T, Option<Point<T>>) {
    let mut max = T::zero();
    let mut at = None;
    for &(v, _, c) in profile {
        if v > max {
            max = v;
            at = Some(c);
        }
    }
    if q.is_infinite() || max == T::zero() {
        return (max, at);
    }
    let qt = T::lit(q);
    let s: T = profile.iter().map(|&(v, m, _)| (v / max).powf(qt) * m * dy).sum();
    (max * s.powf(T::one() / qt), None)
}
