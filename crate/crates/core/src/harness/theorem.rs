use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::checks::{bump_check, BumpMode, BumpParams};
use super::corpus::{Corpus, CorpusSpec, Profile};
use super::report::{CaseRow, Hypothesis, Metadata, RatioReport, Stability};
use super::{classify, par_map, refinement_series, Centers, FamilySpec, Plateau};
use crate::error::{Error, Result};
use crate::grid::{DiscreteFunction, Grid, Point, Region, RegionFamily, Shape};
use crate::operators::{apply_operator, Kernel};
use crate::real::Real;
use crate::spaces::{
    amalgam_norm, bmo_norm, local_lp_norm, local_weak_lp_norm, outer_norm, AmalgamSpec, SpaceParams, Variant,
};
use crate::weights::{doubling_profile, muckenhoupt_characteristic, Weight, WeightSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// `T_θ` bounded on `(L^p, L^q)^α(w; μ)`.
    #[serde(rename = "2.1")]
    Strong,
    /// `T_θ : (L^1, L^q)^α(w; μ) → (WL^1, L^q)^α(w; μ)`.
    #[serde(rename = "2.2")]
    Weak,
    /// `[b, T_θ]` bounded on `(L^p, L^q)^α(w; μ)`.
    #[serde(rename = "2.3")]
    Commutator,
    /// Endpoint `L log L` level-set estimate for `[b, T_θ]`.
    #[serde(rename = "2.4")]
    Endpoint,
    /// Two-weight `L^p_v → WL^p_u` under a power bump.
    #[serde(rename = "5.1")]
    TwoWeight,
    /// Two-weight `L^p_v → WL^p_u` for `[b, T_θ]` under an Orlicz bump.
    #[serde(rename = "5.2")]
    TwoWeightCommutator,
    /// Two-weight amalgam version of 5.1.
    #[serde(rename = "5.3")]
    TwoWeightAmalgam,
    /// Two-weight amalgam version of 5.2.
    #[serde(rename = "5.4")]
    TwoWeightAmalgamCommutator,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::Strong,
        TheoremId::Weak,
        TheoremId::Commutator,
        TheoremId::Endpoint,
        TheoremId::TwoWeight,
        TheoremId::TwoWeightCommutator,
        TheoremId::TwoWeightAmalgam,
        TheoremId::TwoWeightAmalgamCommutator,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            TheoremId::Strong => "2.1",
            TheoremId::Weak => "2.2",
            TheoremId::Commutator => "2.3",
            TheoremId::Endpoint => "2.4",
            TheoremId::TwoWeight => "5.1",
            TheoremId::TwoWeightCommutator => "5.2",
            TheoremId::TwoWeightAmalgam => "5.3",
            TheoremId::TwoWeightAmalgamCommutator => "5.4",
        }
    }

    pub fn is_commutator(&self) -> bool {
        matches!(
            self,
            TheoremId::Commutator
                | TheoremId::Endpoint
                | TheoremId::TwoWeightCommutator
                | TheoremId::TwoWeightAmalgamCommutator
        )
    }

    fn is_two_weight(&self) -> bool {
        matches!(
            self,
            TheoremId::TwoWeight
                | TheoremId::TwoWeightCommutator
                | TheoremId::TwoWeightAmalgam
                | TheoremId::TwoWeightAmalgamCommutator
        )
    }

    /// Cubes for the two-weight statements, balls otherwise.
    pub fn shape(&self) -> Shape {
        if self.is_two_weight() {
            Shape::Cube
        } else {
            Shape::Ball
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::config(format!("unknown experiment {s:?}; expected one of 2.1-2.4, 5.1-5.4")))
    }
}

/// Which reruns feed the stability deltas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityPlan {
    /// Number of successive grid refinements (ε stays fixed in units of `h`).
    #[serde(default = "one")]
    pub refine: u32,
    #[serde(default = "yes")]
    pub halve_epsilon: bool,
    /// Rerun with the centre lattice spacing halved.
    #[serde(default)]
    pub densify_family: bool,
    /// Rerun with `f → 2f` (and `λ → 2λ`) and record the ratio deviation.
    #[serde(default = "yes")]
    pub scale_check: bool,
}

fn one() -> u32 {
    1
}

fn yes() -> bool {
    true
}

impl Default for StabilityPlan {
    fn default() -> Self {
        Self {
            refine: 1,
            halve_epsilon: true,
            densify_family: false,
            scale_check: true,
        }
    }
}

impl StabilityPlan {
    pub fn none() -> Self {
        Self {
            refine: 0,
            halve_epsilon: false,
            densify_family: false,
            scale_check: false,
        }
    }
}

/// A theorem instantiated on concrete exponents, weights, kernel and corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub theorem: TheoremId,
    /// Only `p` matters for 5.1 and 5.2.
    pub params: SpaceParams,
    pub kernel: Kernel,
    /// Truncation radius in units of the grid spacing.
    #[serde(default = "default_epsilon")]
    pub epsilon_h: f64,
    /// One-weight statements.
    #[serde(default = "WeightSpec::unit")]
    pub w: WeightSpec,
    /// Two-weight statements.
    #[serde(default = "WeightSpec::unit")]
    pub u: WeightSpec,
    #[serde(default = "WeightSpec::unit")]
    pub v: WeightSpec,
    #[serde(default = "WeightSpec::unit")]
    pub mu: WeightSpec,
    /// Expression for the BMO symbol of the commutator statements.
    #[serde(default)]
    pub symbol: Option<String>,
    /// Bump exponent `r > 1` of the two-weight statements.
    #[serde(default)]
    pub bump_r: Option<f64>,
    #[serde(default = "default_family")]
    pub family: FamilySpec,
    pub corpus: CorpusSpec,
    /// `λ = 2^k max|f|` for these `k` (endpoint statement only).
    #[serde(default = "default_lambdas")]
    pub lambda_exponents: Vec<i32>,
    #[serde(default)]
    pub stability: StabilityPlan,
}

fn default_epsilon() -> f64 {
    4.0
}

fn default_family() -> FamilySpec {
    FamilySpec::lattice(Shape::Ball, (-3..=3).map(|k| 2f64.powi(k)).collect(), 1.0 / 16.0)
}

fn default_lambdas() -> Vec<i32> {
    (-4..=4).collect()
}

impl ExperimentSpec {
    pub fn new(theorem: TheoremId, params: SpaceParams, kernel: Kernel, corpus: CorpusSpec) -> Self {
        Self {
            theorem,
            params,
            kernel,
            epsilon_h: default_epsilon(),
            w: WeightSpec::unit(),
            u: WeightSpec::unit(),
            v: WeightSpec::unit(),
            mu: WeightSpec::unit(),
            symbol: None,
            bump_r: None,
            family: default_family(),
            corpus,
            lambda_exponents: default_lambdas(),
            stability: StabilityPlan::default(),
        }
    }

    /// Exponent hypotheses; a violated one is returned as an error naming it.
    fn exponent_hypotheses(&self) -> Result<Vec<Hypothesis>> {
        let SpaceParams { p, alpha, q } = self.params;
        let mut checks: Vec<(&str, bool)> = Vec::new();
        match self.theorem {
            TheoremId::Weak | TheoremId::Endpoint => {
                checks.push(("p = 1", p == 1.0));
                checks.push(("1 ≤ α", alpha >= 1.0));
                checks.push(("α < q", alpha < q));
            }
            TheoremId::TwoWeight | TheoremId::TwoWeightCommutator => {
                checks.push(("1 < p < ∞", p > 1.0 && p.is_finite()));
            }
            _ => {
                checks.push(("1 < p", p > 1.0));
                checks.push(("p ≤ α", p <= alpha));
                checks.push(("α < q", alpha < q));
            }
        }
        let mut out = Vec::new();
        for (name, holds) in checks {
            if !holds {
                return Err(Error::Hypothesis(format!(
                    "theorem {} requires {name}; got p = {p}, α = {alpha}, q = {q}",
                    self.theorem
                )));
            }
            out.push(Hypothesis::new(name, true, format!("p = {p}, α = {alpha}, q = {q}"), vec![]));
        }
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if !(self.epsilon_h >= 2.0) {
            return Err(Error::config(format!("epsilon_h = {} is below 2", self.epsilon_h)));
        }
        if self.stability.halve_epsilon && self.epsilon_h < 4.0 {
            return Err(Error::config(format!(
                "halving epsilon_h = {} would go below 2; disable halve_epsilon or raise epsilon_h",
                self.epsilon_h
            )));
        }
        if self.corpus.size == 0 {
            return Err(Error::config("the corpus is empty"));
        }
        if self.theorem.is_commutator() && self.symbol.is_none() {
            return Err(Error::config(format!("theorem {} needs a symbol b", self.theorem)));
        }
        if self.theorem.is_two_weight() && !self.bump_r.is_some_and(|r| r > 1.0) {
            return Err(Error::config(format!("theorem {} needs bump_r > 1", self.theorem)));
        }
        if self.theorem == TheoremId::Endpoint && self.lambda_exponents.is_empty() {
            return Err(Error::config("the endpoint experiment needs at least one lambda"));
        }
        Ok(())
    }

    fn bump_params(&self) -> BumpParams {
        let mode = if self.theorem.is_commutator() {
            BumpMode::Orlicz
        } else {
            BumpMode::Power
        };
        BumpParams::new(self.params.p, self.bump_r.unwrap_or(1.0), mode)
    }
}

/// Everything an experiment needs on one grid.
struct Setup<T> {
    grid: Grid<T>,
    epsilon: T,
    family: RegionFamily<T>,
    w: Weight<T>,
    u: Weight<T>,
    v: Weight<T>,
    mu: Weight<T>,
    symbol: Option<DiscreteFunction<T>>,
}

impl<T: Real> Setup<T> {
    fn new(spec: &ExperimentSpec, grid: Grid<T>, epsilon_h: f64, family: &FamilySpec) -> Result<Self> {
        Ok(Self {
            grid,
            epsilon: T::lit(epsilon_h) * grid.spacing(),
            family: family.with_shape(spec.theorem.shape()).build(&grid)?,
            w: spec.w.build(grid)?,
            u: spec.u.build(grid)?,
            v: spec.v.build(grid)?,
            mu: spec.mu.build(grid)?,
            symbol: spec
                .symbol
                .as_deref()
                .map(|e| DiscreteFunction::sample(e, grid))
                .transpose()?,
        })
    }
}

fn profile_name(p: &Profile) -> &'static str {
    match p {
        Profile::Indicator { .. } => "indicator",
        Profile::Gaussian { .. } => "gaussian",
        Profile::Steps { .. } => "steps",
        Profile::Bump { .. } => "bump",
        Profile::LogBump { .. } => "log-bump",
    }
}

/// `Φ(t) = t (1 + log⁺ t)`.
fn phi<T: Real>(t: T) -> T {
    t * (T::one() + t.log_plus())
}

/// `sup_r ‖ w(B(y,r))^{1/α − 1 − 1/q} w({x ∈ B(y,r) : |g(x)| > λ}) ‖_{L^q_μ}`.
fn level_set_norm<T: Real>(g: &DiscreteFunction<T>, lambda: T, setup: &Setup<T>, params: &SpaceParams) -> T {
    let grid = &setup.grid;
    let e = T::lit(params.inner_exponent());
    let h = grid.cell_measure();
    let w = setup.w.values();
    let mu = setup.mu.values();
    let mut best = T::zero();
    for &r in &setup.family.radii {
        let mut profile: Vec<(T, T, Point<T>)> = Vec::with_capacity(setup.family.centers.len());
        for region in setup.family.regions_at(r) {
            let ranges = grid.region_ranges(&region);
            if ranges.is_empty() {
                continue;
            }
            let (mut mass, mut level) = (T::zero(), T::zero());
            for range in ranges {
                for i in range {
                    mass += w[i];
                    if g.values()[i].abs() > lambda {
                        level += w[i];
                    }
                }
            }
            let value = if level == T::zero() {
                T::zero()
            } else {
                (mass * h).powf(e) * level * h
            };
            profile.push((value, mu[grid.nearest_node(region.center)], region.center));
        }
        best = best.max(outer_norm(&profile, params.q, setup.family.center_measure).0);
    }
    best
}

fn chebyshev_ok<T: Real>(weak: T, strong: T) -> bool {
    weak <= strong * (T::one() + T::lit(1e-12))
}

/// Rows for corpus member `i`, with `f` multiplied by `scale`.
fn member_cases<T: Real>(
    spec: &ExperimentSpec,
    setup: &Setup<T>,
    corpus: &Corpus,
    i: usize,
    scale: T,
) -> Result<Vec<(String, Option<f64>, T, T, bool)>> {
    let f = corpus.sample(i, setup.grid, setup.epsilon.to_f64_lossy())?.scale(scale);
    let out = apply_operator(&spec.kernel, &f, setup.epsilon, setup.symbol.as_ref())?;
    let label = profile_name(&corpus.members[i]).to_string();
    let params = spec.params;
    let p = T::lit(params.p);
    let fam = setup.family.clone();
    let one = |variant, w: &Weight<T>| AmalgamSpec::one_weight(params, variant, w.clone(), setup.mu.clone(), fam.clone());
    let two = |variant, inner: &Weight<T>| AmalgamSpec {
        params,
        variant,
        inner_weight: inner.clone(),
        measure_weight: setup.u.clone(),
        outer_weight: setup.mu.clone(),
        family: fam.clone(),
    };
    let rows = match spec.theorem {
        TheoremId::Strong | TheoremId::Commutator => {
            let s = one(Variant::Strong, &setup.w);
            vec![(label, None, amalgam_norm(&out, &s)?.value, amalgam_norm(&f, &s)?.value, true)]
        }
        TheoremId::Weak => {
            let s = one(Variant::Strong, &setup.w);
            let weak = amalgam_norm(&out, &s.with_variant(Variant::Weak))?.value;
            let strong = amalgam_norm(&out, &s)?.value;
            vec![(label, None, weak, amalgam_norm(&f, &s)?.value, chebyshev_ok(weak, strong))]
        }
        TheoremId::TwoWeight | TheoremId::TwoWeightCommutator => {
            let l = setup.grid.half_width();
            let whole = Region::cube([T::zero(), T::zero()], l + l);
            let weak = local_weak_lp_norm(&out, p, Some(&setup.u), &whole)?;
            let strong = local_lp_norm(&out, p, Some(&setup.u), &whole)?;
            let rhs = local_lp_norm(&f, p, Some(&setup.v), &whole)?;
            vec![(label, None, weak, rhs, chebyshev_ok(weak, strong))]
        }
        TheoremId::TwoWeightAmalgam | TheoremId::TwoWeightAmalgamCommutator => {
            let lhs = two(Variant::Weak, &setup.u);
            let weak = amalgam_norm(&out, &lhs)?.value;
            let strong = amalgam_norm(&out, &lhs.with_variant(Variant::Strong))?.value;
            let rhs = amalgam_norm(&f, &two(Variant::Strong, &setup.v))?.value;
            vec![(label, None, weak, rhs, chebyshev_ok(weak, strong))]
        }
        TheoremId::Endpoint => {
            let top = f.max_abs();
            let llogl = one(Variant::Llogl, &setup.w);
            let mut rows = Vec::with_capacity(spec.lambda_exponents.len());
            for &k in &spec.lambda_exponents {
                let lambda = top * T::lit(2f64.powi(k));
                let lhs = level_set_norm(&out, lambda, setup, &params);
                let g = f.map(|x| phi(x.abs() / lambda));
                let rhs = amalgam_norm(&g, &llogl)?.value;
                rows.push((label.clone(), Some(lambda.to_f64_lossy()), lhs, rhs, true));
            }
            rows
        }
    };
    Ok(rows)
}

fn run_cases<T: Real>(spec: &ExperimentSpec, setup: &Setup<T>, corpus: &Corpus, scale: T) -> Result<Vec<CaseRow>> {
    let members: Vec<usize> = (0..corpus.len()).collect();
    let per_member = par_map(&members, |_, &i| member_cases(spec, setup, corpus, i, scale));
    let mut rows = Vec::new();
    for (i, member) in per_member.into_iter().enumerate() {
        for (label, lambda, lhs, rhs, consistent) in member? {
            let mut row = CaseRow::new(rows.len(), format!("{i}:{label}"), lambda, lhs.to_f64_lossy(), rhs.to_f64_lossy());
            row.violation |= !consistent;
            rows.push(row);
        }
    }
    Ok(rows)
}

fn max_ratio(rows: &[CaseRow]) -> f64 {
    rows.iter().fold(0.0, |m, r| m.max(r.ratio))
}

fn plateau_hypothesis(name: &str, values: Vec<f64>) -> Hypothesis {
    let verdict = classify(&values);
    Hypothesis::new(
        name,
        verdict == Plateau::Plateau,
        format!("{verdict:?} across two grid refinements").to_lowercase(),
        values,
    )
}

/// Weight, kernel, symbol and bump hypotheses, each tracked on the grid and
/// two refinements of it.
fn structural_hypotheses<T: Real>(spec: &ExperimentSpec, grid: Grid<T>) -> Result<Vec<Hypothesis>> {
    let shape = spec.theorem.shape();
    let fam = |g: &Grid<T>| spec.family.with_shape(shape).build(g);
    let mut out = Vec::new();

    if !spec.theorem.is_two_weight() {
        let p = spec.params.p;
        let name = if p == 1.0 { "w ∈ A_1".to_string() } else { format!("w ∈ A_{p}") };
        let values = refinement_series(grid, 2, |g| {
            muckenhoupt_characteristic(&spec.w.build(g)?, T::lit(p), &fam(&g)?)
        })?;
        out.push(plateau_hypothesis(&name, values));
    }
    if spec.theorem != TheoremId::TwoWeight && spec.theorem != TheoremId::TwoWeightCommutator {
        let values = refinement_series(grid, 2, |g| Ok(doubling_profile(&spec.mu.build(g)?, &fam(&g)?)?.doubling_constant))?;
        out.push(plateau_hypothesis("μ ∈ Δ₂", values));
    }
    if spec.theorem == TheoremId::TwoWeightAmalgam {
        let values = refinement_series(grid, 2, |g| Ok(doubling_profile(&spec.u.build(g)?, &fam(&g)?)?.doubling_constant))?;
        out.push(plateau_hypothesis("u ∈ Δ₂", values));
    }
    if spec.theorem == TheoremId::TwoWeightAmalgamCommutator {
        // A_∞ as the union of the A_p: accept the first p whose characteristic plateaus
        let mut last = None;
        for p in [2.0, 4.0, 8.0] {
            let values = refinement_series(grid, 2, |g| {
                muckenhoupt_characteristic(&spec.u.build(g)?, T::lit(p), &fam(&g)?)
            })?;
            let h = plateau_hypothesis(&format!("u ∈ A_∞ (via A_{p})"), values);
            let holds = h.holds;
            last = Some(h);
            if holds {
                break;
            }
        }
        out.extend(last);
    }

    let dini = spec.kernel.theta.dini_integrals();
    out.push(Hypothesis::new(
        "θ Dini",
        dini.is_dini(),
        "∫₀¹ θ(t)/t dt",
        dini.dini.into_iter().collect(),
    ));
    if spec.theorem.is_commutator() {
        out.push(Hypothesis::new(
            "θ log-Dini",
            dini.is_log_dini(),
            "∫₀¹ θ(t)|log t|/t dt",
            dini.log_dini.into_iter().collect(),
        ));
        let expr = spec.symbol.as_deref().unwrap_or_default();
        let values = refinement_series(grid, 2, |g| bmo_norm(&DiscreteFunction::sample(expr, g)?, &fam(&g)?))?;
        out.push(plateau_hypothesis("b ∈ BMO", values));
    }
    if spec.theorem.is_two_weight() {
        let params = spec.bump_params();
        let name = match params.mode {
            BumpMode::Orlicz => "Orlicz bump (u, v)",
            _ => "power bump (u, v)",
        };
        let cubes = spec.family.with_shape(Shape::Cube);
        let values = refinement_series(grid, 2, |g| {
            let report = bump_check(&spec.u.build(g)?, &spec.v.build(g)?, &params, &cubes.build(&g)?)?;
            Ok(T::lit(report.max_value))
        });
        match values {
            Ok(values) => out.push(plateau_hypothesis(name, values)),
            Err(Error::Divergence(msg)) => out.push(Hypothesis::new(name, false, msg, vec![])),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Runs the experiment for `spec.theorem` on `grid` and the reruns of
/// `spec.stability`. Refuses to run if a hypothesis fails.
pub fn theorem_experiment<T: Real>(spec: &ExperimentSpec, grid: Grid<T>) -> Result<RatioReport> {
    let mut hypotheses = spec.exponent_hypotheses()?;
    spec.validate()?;
    hypotheses.extend(structural_hypotheses(spec, grid)?);
    if let Some(h) = hypotheses.iter().find(|h| !h.holds) {
        return Err(Error::Hypothesis(format!(
            "theorem {} requires {}: {} ({:?})",
            spec.theorem, h.name, h.detail, h.values
        )));
    }

    let corpus = Corpus::from_spec(&spec.corpus, grid.half_width().to_f64_lossy())?;
    let base = Setup::new(spec, grid, spec.epsilon_h, &spec.family)?;
    let cases = run_cases(spec, &base, &corpus, T::one())?;
    let metadata = Metadata::new(&grid, Some(base.epsilon.to_f64_lossy()), Some(spec.corpus.seed));
    let mut report = RatioReport::new(format!("theorem-{}", spec.theorem), metadata, hypotheses, cases);

    let plan = spec.stability;
    if plan.scale_check {
        let scaled = run_cases(spec, &base, &corpus, T::lit(2.0))?;
        let dev = report
            .cases
            .iter()
            .zip(&scaled)
            .map(|(a, b)| {
                if a.ratio == b.ratio {
                    0.0
                } else {
                    (a.ratio - b.ratio).abs() / a.ratio.abs().max(b.ratio.abs())
                }
            })
            .fold(0.0, f64::max);
        report.scale_deviation = Some(dev);
    }
    for k in 1..=plan.refine {
        let setup = Setup::new(spec, grid.refined_by(k), spec.epsilon_h, &spec.family)?;
        let m = max_ratio(&run_cases(spec, &setup, &corpus, T::one())?);
        report.stability.push(Stability::new(format!("grid x{}", 1u32 << k), report.max_ratio, m));
    }
    if plan.halve_epsilon {
        let setup = Setup::new(spec, grid, spec.epsilon_h / 2.0, &spec.family)?;
        let m = max_ratio(&run_cases(spec, &setup, &corpus, T::one())?);
        report.stability.push(Stability::new("epsilon / 2", report.max_ratio, m));
    }
    if plan.densify_family {
        let dense = match &spec.family.centers {
            Centers::Lattice { spacing } => FamilySpec {
                centers: Centers::Lattice { spacing: spacing / 2.0 },
                ..spec.family.clone()
            },
            Centers::Points { .. } => {
                return Err(Error::config("family densification needs lattice centres"));
            }
        };
        let setup = Setup::new(spec, grid, spec.epsilon_h, &dense)?;
        let m = max_ratio(&run_cases(spec, &setup, &corpus, T::one())?);
        report.stability.push(Stability::new("family x2", report.max_ratio, m));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::ThetaModulus;

    fn small(theorem: TheoremId, params: SpaceParams) -> ExperimentSpec {
        let mut s = ExperimentSpec::new(theorem, params, Kernel::hilbert(), CorpusSpec::new(5, 5));
        s.family = FamilySpec::lattice(Shape::Ball, vec![0.25, 0.5, 1.0, 2.0, 4.0], 0.25);
        s.stability = StabilityPlan::none();
        s
    }

    fn grid() -> Grid<f64> {
        Grid::new(1, 4.0, 256).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.id().parse::<TheoremId>().unwrap(), t);
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(json, format!("\"{}\"", t.id()));
        }
        assert!("3.1".parse::<TheoremId>().is_err());
    }

    #[test]
    fn refuses_alpha_not_below_q() {
        let spec = small(TheoremId::Strong, SpaceParams::new(2.0, 4.0, 4.0).unwrap());
        match theorem_experiment(&spec, grid()) {
            Err(Error::Hypothesis(m)) => assert!(m.contains("α < q"), "{m}"),
            other => panic!("{other:?}"),
        }
        let spec = small(TheoremId::Weak, SpaceParams::new(2.0, 4.0, 8.0).unwrap());
        assert!(matches!(theorem_experiment(&spec, grid()), Err(Error::Hypothesis(m)) if m.contains("p = 1")));
    }

    #[test]
    fn refuses_weights_outside_the_class() {
        let mut spec = small(TheoremId::Strong, SpaceParams::new(2.0, 4.0, 8.0).unwrap());
        spec.w = WeightSpec::power(2.0);
        match theorem_experiment(&spec, grid()) {
            Err(Error::Hypothesis(m)) => assert!(m.contains("A_2"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_modulus_commutator_runs() {
        let mut spec = small(TheoremId::Commutator, SpaceParams::new(2.0, 4.0, 8.0).unwrap());
        spec.symbol = Some("log(abs(x))".into());
        spec.kernel.theta = ThetaModulus::Zero;
        // the zero modulus is trivially Dini, so the commutator experiment runs
        assert!(theorem_experiment(&spec, grid()).is_ok());
    }

    #[test]
    fn zero_kernel_gives_zero_ratios() {
        let mut spec = small(TheoremId::Strong, SpaceParams::new(2.0, 4.0, 8.0).unwrap());
        spec.kernel = Kernel::zero();
        let r = theorem_experiment(&spec, grid()).unwrap();
        assert!(r.cases.iter().all(|c| c.ratio == 0.0 && !c.violation));
        assert_eq!(r.max_ratio, 0.0);
    }

    #[test]
    fn strong_experiment_is_homogeneous() {
        let mut spec = small(TheoremId::Strong, SpaceParams::new(2.0, 4.0, 8.0).unwrap());
        spec.w = WeightSpec::power(0.5);
        spec.stability = StabilityPlan {
            refine: 1,
            halve_epsilon: true,
            densify_family: true,
            scale_check: true,
        };
        let r = theorem_experiment(&spec, grid()).unwrap();
        assert!(r.passed() && r.all_finite());
        assert!(r.scale_deviation.unwrap() < 1e-8);
        assert_eq!(r.stability.len(), 3);
        assert!(r.hypotheses.iter().any(|h| h.name == "w ∈ A_2"));
        assert_eq!(r.metadata.seed, Some(5));
    }

    #[test]
    fn weak_experiments_are_chebyshev_consistent() {
        let spec = small(TheoremId::Weak, SpaceParams::new(1.0, 2.0, 4.0).unwrap());
        let r = theorem_experiment(&spec, grid()).unwrap();
        assert_eq!(r.violations, 0);
        let mut spec = small(TheoremId::TwoWeightAmalgam, SpaceParams::new(2.0, 4.0, 8.0).unwrap());
        spec.bump_r = Some(1.5);
        let r = theorem_experiment(&spec, grid()).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.hypotheses.iter().any(|h| h.name == "u ∈ Δ₂"));
    }

    #[test]
    fn endpoint_sweeps_lambda() {
        let mut spec = small(TheoremId::Endpoint, SpaceParams::new(1.0, 1.0, 4.0).unwrap());
        spec.symbol = Some("log(abs(x))".into());
        spec.stability.scale_check = true;
        let r = theorem_experiment(&spec, grid()).unwrap();
        assert_eq!(r.cases.len(), 5 * 9);
        assert!(r.cases.iter().all(|c| c.lambda.is_some() && c.ratio.is_finite()));
        assert!(r.scale_deviation.unwrap() < 1e-6);
    }

    #[test]
    fn two_weight_needs_bump_exponent() {
        let spec = small(TheoremId::TwoWeight, SpaceParams::new(2.0, 2.0, 4.0).unwrap());
        assert!(matches!(theorem_experiment(&spec, grid()), Err(Error::Config(_))));
    }

    #[test]
    fn spec_defaults_from_json() {
        let spec: ExperimentSpec = serde_json::from_str(
            r#"{"theorem": "2.1", "params": {"p": 2, "alpha": 4, "q": 8},
                "kernel": {"kind": {"kind": "hilbert"}, "theta": {"kind": "power", "delta": 1}},
                "corpus": {"seed": 1, "size": 3}}"#,
        )
        .unwrap();
        assert_eq!(spec.epsilon_h, 4.0);
        assert_eq!(spec.lambda_exponents, (-4..=4).collect::<Vec<_>>());
        assert_eq!(spec.stability, StabilityPlan::default());
        let back: ExperimentSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
