use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::theta::ThetaModulus;
use crate::error::{Error, Result};
use crate::grid::{euclid, Point};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelKind {
    /// `1/(π(x − y))` on the line.
    Hilbert,
    /// `1/(x − y)`, the Hilbert kernel without its normalization.
    Cauchy,
    /// `(x_j − y_j) / (2π |x − y|³)` in the plane; `component` is 1 or 2.
    Riesz { component: usize },
    Zero,
}

/// A θ-type Calderón–Zygmund kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kernel {
    pub kind: KernelKind,
    pub theta: ThetaModulus,
}

impl Kernel {
    pub fn hilbert() -> Self {
        Self {
            kind: KernelKind::Hilbert,
            theta: ThetaModulus::Power { delta: 1.0 },
        }
    }

    pub fn cauchy() -> Self {
        Self {
            kind: KernelKind::Cauchy,
            theta: ThetaModulus::Power { delta: 1.0 },
        }
    }

    pub fn riesz(component: usize) -> Self {
        Self {
            kind: KernelKind::Riesz { component },
            theta: ThetaModulus::Power { delta: 1.0 },
        }
    }

    pub fn zero() -> Self {
        Self {
            kind: KernelKind::Zero,
            theta: ThetaModulus::Zero,
        }
    }

    /// Dimension the kernel lives in; `None` for the zero kernel.
    pub fn dim(&self) -> Option<usize> {
        match self.kind {
            KernelKind::Hilbert | KernelKind::Cauchy => Some(1),
            KernelKind::Riesz { .. } => Some(2),
            KernelKind::Zero => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let KernelKind::Riesz { component } = self.kind {
            if !(1..=2).contains(&component) {
                return Err(Error::config(format!("Riesz component must be 1 or 2, got {component}")));
            }
        }
        self.theta.validate()
    }

    pub fn eval<T: Real>(&self, x: Point<T>, y: Point<T>) -> T {
        match self.kind {
            KernelKind::Hilbert => T::one() / (T::PI() * (x[0] - y[0])),
            KernelKind::Cauchy => T::one() / (x[0] - y[0]),
            KernelKind::Riesz { component } => {
                let d = euclid(x, y);
                let j = component - 1;
                (x[j] - y[j]) / (T::lit(2.0) * T::PI() * d * d * d)
            }
            KernelKind::Zero => T::zero(),
        }
    }
}

/// How to draw the random pairs and triples for [`kernel_constants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlan {
    pub samples: usize,
    pub seed: u64,
    /// Points are drawn in `[-half_width, half_width)^dim`.
    pub half_width: f64,
    /// Smallest admissible `|x − y|` (at least twice the spacing).
    pub min_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    /// `max |K(x,y)| |x − y|^n`.
    pub size: f64,
    /// `max (|K(x,y) − K(z,y)| + |K(y,x) − K(y,z)|) |x − y|^n / θ(|x − z|/|x − y|)`.
    pub smoothness: f64,
    pub triples_used: usize,
    pub triples_skipped: usize,
}

/// Estimates the size and smoothness constants on random samples with
/// `|x − z| < |x − y|/2`.
pub fn kernel_constants(kernel: &Kernel, plan: &SamplePlan) -> Result<KernelConstants> {
    kernel.validate()?;
    if !(plan.half_width > 0.0 && plan.min_distance > 0.0 && plan.min_distance < plan.half_width) {
        return Err(Error::config("sample plan needs 0 < min_distance < half_width"));
    }
    let dim = kernel.dim().unwrap_or(1);
    let n = dim as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let l = plan.half_width;
    let draw = |rng: &mut ChaCha8Rng| -> Point<f64> {
        let mut p = [0.0; 2];
        for c in p.iter_mut().take(dim) {
            *c = rng.gen_range(-l..l);
        }
        p
    };
    let mut out = KernelConstants {
        size: 0.0,
        smoothness: 0.0,
        triples_used: 0,
        triples_skipped: 0,
    };
    let mut drawn = 0;
    while drawn < plan.samples {
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        let d = euclid(x, y);
        if d <= plan.min_distance {
            continue;
        }
        drawn += 1;
        let dn = d.powi(n);
        out.size = out.size.max(kernel.eval(x, y).abs() * dn);

        let rho = 0.5 * d * rng.gen_range(0.0..1.0f64);
        let z = if dim == 1 {
            let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            [x[0] + s * rho, 0.0]
        } else {
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            [x[0] + rho * a.cos(), x[1] + rho * a.sin()]
        };
        let theta = kernel.theta.eval(euclid(x, z) / d);
        if !(theta > 0.0) {
            out.triples_skipped += 1;
            continue;
        }
        let diff = (kernel.eval(x, y) - kernel.eval(z, y)).abs() + (kernel.eval(y, x) - kernel.eval(y, z)).abs();
        out.smoothness = out.smoothness.max(diff * dn / theta);
        out.triples_used += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(samples: usize) -> SamplePlan {
        SamplePlan {
            samples,
            seed: 7,
            half_width: 4.0,
            min_distance: 2.0 * 8.0 / 4096.0,
        }
    }

    #[test]
    fn cauchy_size_is_one() {
        let c = kernel_constants(&Kernel::cauchy(), &plan(2000)).unwrap();
        assert!((c.size - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cauchy_smoothness_approaches_four() {
        let c = kernel_constants(&Kernel::cauchy(), &plan(50_000)).unwrap();
        assert!(c.smoothness <= 4.0 && c.smoothness > 3.99, "{c:?}");
        let h = kernel_constants(&Kernel::hilbert(), &plan(50_000)).unwrap();
        assert!((h.smoothness * std::f64::consts::PI - c.smoothness).abs() < 1e-9);
    }

    #[test]
    fn zero_kernel_has_zero_constants() {
        let c = kernel_constants(&Kernel::zero(), &plan(100)).unwrap();
        assert_eq!((c.size, c.smoothness), (0.0, 0.0));
        assert_eq!(c.triples_skipped, 100);
    }

    #[test]
    fn riesz_constants_are_finite() {
        let c = kernel_constants(&Kernel::riesz(1), &plan(5000)).unwrap();
        assert!(c.size <= 1.0 / (2.0 * std::f64::consts::PI) + 1e-12);
        assert!(c.smoothness.is_finite() && c.smoothness > 0.0);
        assert!(Kernel::riesz(3).validate().is_err());
    }

    #[test]
    fn hilbert_is_antisymmetric() {
        let k = Kernel::hilbert();
        for (a, b) in [(0.3, -1.7), (2.0, 2.5), (-0.001, 0.002)] {
            assert_eq!(k.eval([a, 0.0], [b, 0.0]), -k.eval([b, 0.0], [a, 0.0]));
        }
    }
}
