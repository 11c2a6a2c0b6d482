use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Modulus of continuity controlling the kernel smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ThetaModulus {
    /// `t^δ`, `0 < δ ≤ 1`.
    Power { delta: f64 },
    /// `t / (1 + |log t|)^β`, `0 ≤ β ≤ 1`.
    Logdamped { beta: f64 },
    Zero,
}

/// `∫₀¹ θ(t)/t dt` and `∫₀¹ θ(t)|log t|/t dt`; `None` marks divergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiniIntegrals {
    pub dini: Option<f64>,
    pub log_dini: Option<f64>,
}

impl DiniIntegrals {
    pub fn is_dini(&self) -> bool {
        self.dini.is_some()
    }

    pub fn is_log_dini(&self) -> bool {
        self.log_dini.is_some()
    }
}

impl ThetaModulus {
    pub fn eval<T: Real>(&self, t: T) -> T {
        match *self {
            ThetaModulus::Power { delta } => t.powf(T::lit(delta)),
            ThetaModulus::Logdamped { beta } => {
                if t == T::zero() {
                    T::zero()
                } else {
                    t / (T::one() + t.ln().abs()).powf(T::lit(beta))
                }
            }
            ThetaModulus::Zero => T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ThetaModulus::Power { delta } if !(delta > 0.0 && delta <= 1.0) => {
                return Err(Error::config(format!("power modulus needs 0 < delta <= 1, got {delta}")))
            }
            ThetaModulus::Logdamped { beta } if !(0.0..=1.0).contains(&beta) => {
                return Err(Error::config(format!(
                    "logdamped modulus is non-decreasing only for 0 <= beta <= 1, got {beta}"
                )))
            }
            _ => {}
        }
        if !self.is_monotone() {
            return Err(Error::config(format!("{self:?} is not non-decreasing")));
        }
        Ok(())
    }

    /// Sampled check of non-negativity and monotonicity on `t = 2^{k/4}`, `|k| ≤ 160`.
    pub fn is_monotone(&self) -> bool {
        let vals: Vec<f64> = (-160..=160).map(|k| self.eval(2f64.powf(k as f64 / 4.0))).collect();
        vals.iter().all(|v| *v >= 0.0) && vals.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn dini_integrals(&self) -> DiniIntegrals {
        DiniIntegrals {
            dini: log_scale_integral(|s| self.eval(s.exp())),
            log_dini: log_scale_integral(|s| self.eval(s.exp()) * s.abs()),
        }
    }
}

const REL_TOL: f64 = 1e-6;
const DIVERGENCE: f64 = 1e12;
const MAX_PIECES: usize = 200_000;

/// `∫_{-∞}^0 g(s) ds` on the pieces `[-(k+1) log 2, -k log 2]`, i.e. the
/// dyadic subdivision `t ∈ [2^{-k-1}, 2^{-k}]` after `t = e^s`.
fn log_scale_integral(g: impl Fn(f64) -> f64) -> Option<f64> {
    let (nodes, weights) = gauss_legendre(16);
    let w = std::f64::consts::LN_2;
    let mut sum = 0.0;
    let mut prev = f64::NAN;
    for k in 0..MAX_PIECES {
        let (a, b) = (-((k + 1) as f64) * w, -(k as f64) * w);
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        let piece: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(x, wt)| wt * g(mid + half * x))
            .sum::<f64>()
            * half;
        sum += piece;
        if !sum.is_finite() || sum > DIVERGENCE {
            return None;
        }
        // geometric tail estimate from the last two pieces
        let ratio = piece / prev;
        prev = piece;
        if piece == 0.0 && k > 0 {
            return Some(sum);
        }
        if ratio.is_finite() && ratio < 1.0 {
            let tail = piece * ratio / (1.0 - ratio);
            if tail <= REL_TOL * sum.abs() {
                return Some(sum);
            }
        }
    }
    None
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
