use amalgam::harness::{
    bmo_lemma_check, bump_check, john_nirenberg_observable, theorem_experiment, Metadata, TheoremId,
};
use amalgam::operators::apply_operator;
use amalgam::orlicz::{write_holder_csv, HolderRow};
use amalgam::{
    amalgam_norm, doubling_profile, holder_check, muckenhoupt_characteristic, region_family, AmalgamSpec,
    DiscreteFunction64, Grid64, Pairing, Region64, RegionFamily64,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunConfig, Task};
use crate::CliError;

/// The subcommand as typed, checked against the configured task.
#[derive(Debug, Clone, PartialEq)]
pub enum Request {
    WeightsProfile,
    Norm,
    OperatorApply,
    Verify(String),
    Holder,
    Bump,
    Bmo,
}

impl Request {
    fn task_name(&self) -> &'static str {
        match self {
            Request::WeightsProfile => "weights-profile",
            Request::Norm => "norm",
            Request::OperatorApply => "operator-apply",
            Request::Verify(_) => "verify",
            Request::Holder => "holder",
            Request::Bump => "bump",
            Request::Bmo => "bmo",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub refine: Option<u32>,
    pub seed: Option<u64>,
}

pub struct Outcome {
    pub report: Value,
    pub csv: Option<Vec<u8>>,
    /// Why the run must exit with status 2, if it must.
    pub flagged: Option<String>,
}

#[derive(Serialize)]
struct RefinementRow {
    points_per_axis: usize,
    value: f64,
    /// Relative change from the previous row.
    delta: Option<f64>,
}

/// `value` on the configured grid and `levels` refinements; the family
/// stride doubles with each refinement so the centres stay put.
fn refinements(
    config: &RunConfig,
    levels: u32,
    value: impl Fn(Grid64, &RegionFamily64) -> Result<f64, CliError>,
) -> Result<Vec<RefinementRow>, CliError> {
    let base = config.grid()?;
    let mut rows: Vec<RefinementRow> = Vec::new();
    for k in 0..=levels {
        let grid = base.refined_by(k);
        let family = match &config.family {
            Some(f) => region_family(&grid, &f.radii, f.shape, f.stride << k)?,
            None => return Err(CliError::Config(format!("task {} needs a family block", config.task.name()))),
        };
        let v = value(grid, &family)?;
        let delta = rows.last().map(|r| if r.value == v { 0.0 } else { (v - r.value).abs() / r.value.abs() });
        rows.push(RefinementRow {
            points_per_axis: grid.points_per_axis(),
            value: v,
            delta,
        });
    }
    Ok(rows)
}

fn csv_bytes<S: Serialize>(rows: &[S]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn sample(expr: &str, grid: Grid64) -> Result<DiscreteFunction64, CliError> {
    Ok(DiscreteFunction64::sample(expr, grid)?)
}

fn wrap(task: &str, metadata: Metadata, result: impl Serialize) -> Result<Value, CliError> {
    Ok(json!({
        "task": task,
        "metadata": serde_json::to_value(metadata)?,
        "result": serde_json::to_value(result)?,
    }))
}

pub fn run(config: &RunConfig, request: &Request, options: &Options) -> Result<Outcome, CliError> {
    let task = config.task.name();
    if request.task_name() != task {
        return Err(CliError::Config(format!(
            "subcommand {} does not match the configured task {task}",
            request.task_name()
        )));
    }
    let grid = config.grid()?;
    let seed = options.seed.or(config.seed);
    let levels = options.refine.unwrap_or(0);
    let meta = |epsilon: Option<f64>| Metadata::new(&grid, epsilon, seed);

    match &config.task {
        Task::WeightsProfile { weight, p } => {
            let family = config.family(&grid)?;
            let w = config.weight(weight, grid)?;
            let profile = doubling_profile(&w, &family)?;
            let a_p = p.map(|p| muckenhoupt_characteristic(&w, p, &family)).transpose()?;
            let rows = refinements(config, levels, |g, fam| {
                let w = config.weight(weight, g)?;
                Ok(match p {
                    Some(p) => muckenhoupt_characteristic(&w, *p, fam)?,
                    None => doubling_profile(&w, fam)?.doubling_constant,
                })
            })?;
            let result = json!({ "profile": profile, "a_p": a_p, "refinements": rows });
            Ok(Outcome {
                report: wrap(task, meta(None), result)?,
                csv: Some(csv_bytes(&rows)?),
                flagged: None,
            })
        }
        Task::Norm { function, params, variant, w, v, mu } => {
            let spec_on = |g: Grid64, fam: &RegionFamily64| -> Result<AmalgamSpec<f64>, CliError> {
                let measure = config.weight(w, g)?;
                let inner = match v {
                    Some(v) => config.weight(v, g)?,
                    None => measure.clone(),
                };
                Ok(AmalgamSpec {
                    params: *params,
                    variant: *variant,
                    inner_weight: inner,
                    measure_weight: measure,
                    outer_weight: config.weight(mu, g)?,
                    family: fam.clone(),
                })
            };
            let family = config.family(&grid)?;
            let value = amalgam_norm(&sample(function, grid)?, &spec_on(grid, &family)?)?;
            let rows = refinements(config, levels, |g, fam| {
                Ok(amalgam_norm(&sample(function, g)?, &spec_on(g, fam)?)?.value)
            })?;
            let result = json!({
                "value": value.value,
                "argmax_radius": value.argmax_radius,
                "argmax_center_for_q_inf": value.argmax_center,
                "refinements": rows,
            });
            Ok(Outcome {
                report: wrap(task, meta(None), result)?,
                csv: Some(csv_bytes(&rows)?),
                flagged: None,
            })
        }
        Task::OperatorApply { kernel, function, epsilon_h, symbol } => {
            let eps = epsilon_h * grid.spacing();
            let f = sample(function, grid)?;
            let b = symbol.as_deref().map(|e| sample(e, grid)).transpose()?;
            let out = apply_operator(kernel, &f, eps, b.as_ref())?;
            let mut csv = Vec::new();
            out.write_csv(&mut csv)?;
            let result = json!({ "nodes": grid.len(), "max_abs": out.max_abs() });
            Ok(Outcome {
                report: wrap(task, meta(Some(eps)), result)?,
                csv: Some(csv),
                flagged: None,
            })
        }
        Task::Verify { experiment } => {
            let Request::Verify(id) = request else { unreachable!("checked above") };
            let wanted: TheoremId = id.parse()?;
            if wanted != experiment.theorem {
                return Err(CliError::Config(format!(
                    "verify {wanted} does not match the configured theorem {}",
                    experiment.theorem
                )));
            }
            let mut spec = experiment.clone();
            if let Some(s) = seed {
                spec.corpus.seed = s;
            }
            if let Some(k) = options.refine {
                spec.stability.refine = k;
            }
            let report = theorem_experiment(&spec, grid)?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            let flagged = (!report.passed()).then(|| {
                format!("{} flagged case(s) in experiment {}", report.violations, report.experiment)
            });
            Ok(Outcome {
                report: serde_json::to_value(&report)?,
                csv: Some(csv),
                flagged,
            })
        }
        Task::Holder { f, g, pairing, weight } => {
            let family = config.family(&grid)?;
            let fv = sample(f, grid)?;
            let gv = sample(g, grid)?;
            let w = weight.as_deref().map(|n| config.weight(n, grid)).transpose()?;
            let mut rows = Vec::new();
            for (k, region) in family.regions().enumerate() {
                if grid.count_in(&region) == 0 {
                    continue;
                }
                let o = holder_check(&fv, &gv, &region, pairing, w.as_ref())?;
                rows.push(HolderRow::new(pairing, k, &o));
            }
            // the weighted pairing has no stated constant
            let checked = *pairing != Pairing::Weighted;
            let violations = if checked {
                rows.iter().filter(|r| r.ratio > 1.0 + 1e-12).count()
            } else {
                0
            };
            let max_ratio = rows.iter().fold(0.0f64, |m, r| m.max(r.ratio));
            let mut csv = Vec::new();
            write_holder_csv(&rows, &mut csv)?;
            let result = json!({
                "pairing": pairing.name(),
                "regions": rows.len(),
                "max_ratio": max_ratio,
                "violations": violations,
            });
            Ok(Outcome {
                report: wrap(task, meta(None), result)?,
                csv: Some(csv),
                flagged: (violations > 0).then(|| format!("{violations} region(s) violate the Hölder bound")),
            })
        }
        Task::Bump { u, v, params } => {
            let family = config.family(&grid)?;
            let report = bump_check(&config.weight(u, grid)?, &config.weight(v, grid)?, params, &family)?;
            let rows = refinements(config, levels, |g, fam| {
                Ok(bump_check(&config.weight(u, g)?, &config.weight(v, g)?, params, fam)?.max_value)
            })?;
            #[derive(Serialize)]
            struct BumpRow {
                region: usize,
                radius: f64,
                x: f64,
                y: f64,
                value: Option<f64>,
            }
            let regions: Vec<Region64> = family.regions().collect();
            let detail: Vec<BumpRow> = regions
                .iter()
                .zip(&report.per_region)
                .enumerate()
                .map(|(k, (r, v))| BumpRow {
                    region: k,
                    radius: r.size,
                    x: r.center[0],
                    y: r.center[1],
                    value: *v,
                })
                .collect();
            let result = json!({ "max_value": report.max_value, "refinements": rows });
            Ok(Outcome {
                report: wrap(task, meta(None), result)?,
                csv: Some(csv_bytes(&detail)?),
                flagged: None,
            })
        }
        Task::Bmo { b, center, radius, jmax, p, weight } => {
            let family = config.family(&grid)?;
            let bv = sample(b, grid)?;
            let ball = Region64::ball(*center, *radius);
            let w = config.weight(weight, grid)?;
            let table = bmo_lemma_check(&bv, &ball, *jmax, *p, &w, &family)?;
            let jn = john_nirenberg_observable(&bv, &ball, &family, None)?;
            let rows = refinements(config, levels, |g, fam| Ok(amalgam::bmo_norm(&sample(b, g)?, fam)?))?;
            let result = json!({ "table": table, "john_nirenberg": jn, "refinements": rows });
            Ok(Outcome {
                report: wrap(task, meta(None), result)?,
                csv: Some(csv_bytes(&table.rows)?),
                flagged: None,
            })
        }
    }
}
