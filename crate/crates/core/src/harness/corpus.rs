use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DiscreteFunction, Grid};
use crate::real::Real;

/// A one-dimensional test profile; planar members are tensor products `p(x) p(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    /// `χ_[a, b)`.
    Indicator { a: f64, b: f64 },
    /// `exp(−(x − c)²/(2σ²))` cut off outside `|x − c| < cutoff`.
    Gaussian { center: f64, sigma: f64, cutoff: f64 },
    /// `values[k]` on `[edges[k], edges[k+1])`.
    Steps { edges: Vec<f64>, values: Vec<f64> },
    /// `exp(1 − 1/(1 − s²))`, `s = (x − c)/radius`, with peak 1.
    Bump { center: f64, radius: f64 },
    /// `log|x − c|` times the bump, with `|x − c|` clipped at `h/2`.
    LogBump { center: f64, radius: f64 },
}

impl Profile {
    pub fn eval(&self, x: f64, floor: f64) -> f64 {
        let bump = |c: f64, r: f64| {
            let s = (x - c) / r;
            if s.abs() < 1.0 {
                (1.0 - 1.0 / (1.0 - s * s)).exp()
            } else {
                0.0
            }
        };
        match self {
            Profile::Indicator { a, b } => f64::from(u8::from(*a <= x && x < *b)),
            Profile::Gaussian { center, sigma, cutoff } => {
                let d = x - center;
                if d.abs() < *cutoff {
                    (-d * d / (2.0 * sigma * sigma)).exp()
                } else {
                    0.0
                }
            }
            Profile::Steps { edges, values } => edges
                .windows(2)
                .zip(values)
                .find(|(e, _)| e[0] <= x && x < e[1])
                .map_or(0.0, |(_, v)| *v),
            Profile::Bump { center, radius } => bump(*center, *radius),
            Profile::LogBump { center, radius } => (x - center).abs().max(floor).ln() * bump(*center, *radius),
        }
    }

    /// Closed interval outside which the profile vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Profile::Indicator { a, b } => (*a, *b),
            Profile::Gaussian { center, cutoff, .. } => (center - cutoff, center + cutoff),
            Profile::Steps { edges, .. } => (edges[0], edges[edges.len() - 1]),
            Profile::Bump { center, radius } | Profile::LogBump { center, radius } => {
                (center - radius, center + radius)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub seed: u64,
    pub size: usize,
    /// Members vanish outside `[-support, support]`; defaults to half the box.
    #[serde(default)]
    pub support: Option<f64>,
}

impl CorpusSpec {
    pub fn new(seed: u64, size: usize) -> Self {
        Self {
            seed,
            size,
            support: None,
        }
    }
}

/// Seeded test functions standing in for "every f": kinds cycle through
/// indicator, truncated Gaussian, random-sign steps, bump and log-bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub seed: u64,
    pub support: f64,
    pub members: Vec<Profile>,
}

impl Corpus {
    pub fn generate(seed: u64, size: usize, support: f64) -> Result<Self> {
        if !(support > 0.0) {
            return Err(Error::config("corpus support must be positive"));
        }
        let s = support;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..size)
            .map(|i| match i % 5 {
                0 => {
                    let a = rng.gen_range(-s..s * 0.8);
                    let b = rng.gen_range(a + 0.1 * s..=s);
                    Profile::Indicator { a, b }
                }
                1 => {
                    let center = rng.gen_range(-s / 2.0..s / 2.0);
                    let sigma = rng.gen_range(0.05..0.25) * s;
                    let cutoff = (3.0 * sigma).min(s - center.abs());
                    Profile::Gaussian { center, sigma, cutoff }
                }
                2 => {
                    let k = rng.gen_range(2..=5);
                    let mut edges: Vec<f64> = (0..=k).map(|_| rng.gen_range(-s..s)).collect();
                    edges.sort_by(f64::total_cmp);
                    let values = (0..k)
                        .map(|_| {
                            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                            sign * rng.gen_range(0.5..1.5)
                        })
                        .collect();
                    Profile::Steps { edges, values }
                }
                3 => Profile::Bump {
                    center: rng.gen_range(-s / 2.0..s / 2.0),
                    radius: rng.gen_range(0.1..0.5) * s,
                },
                _ => Profile::LogBump {
                    center: rng.gen_range(-s / 2.0..s / 2.0),
                    radius: rng.gen_range(0.1..0.5) * s,
                },
            })
            .collect();
        Ok(Self {
            seed,
            support,
            members,
        })
    }

    /// Corpus for `spec` on a box of half width `half_width`.
    pub fn from_spec(spec: &CorpusSpec, half_width: f64) -> Result<Self> {
        Self::generate(spec.seed, spec.size, spec.support.unwrap_or(half_width / 2.0))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member `i` sampled on `grid`. Fails if the member vanishes on the grid
    /// or comes closer than `margin` to the box boundary.
    pub fn sample<T: Real>(&self, i: usize, grid: Grid<T>, margin: f64) -> Result<DiscreteFunction<T>> {
        let profile = &self.members[i];
        let l = grid.half_width().to_f64_lossy();
        let (a, b) = profile.support();
        if a < -l + margin || b > l - margin {
            return Err(Error::precondition(format!(
                "corpus member {i} supported on [{a}, {b}], closer than {margin} to the box boundary"
            )));
        }
        let floor = grid.spacing().to_f64_lossy() / 2.0;
        let dim = grid.dim();
        let f = DiscreteFunction::from_fn(grid, |p| {
            let mut v = profile.eval(p[0].to_f64_lossy(), floor);
            if dim == 2 {
                v *= profile.eval(p[1].to_f64_lossy(), floor);
            }
            T::lit(v)
        });
        if f.is_zero() {
            return Err(Error::precondition(format!("corpus member {i} vanishes on the grid")));
        }
        Ok(f)
    }
}
