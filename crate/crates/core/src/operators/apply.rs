use super::kernel::{Kernel, KernelKind};
use crate::error::{Error, Result};
use crate::grid::{euclid, DiscreteFunction, Grid};
use crate::real::Real;

/// Truncated singular integral
/// `T_ε f(x) = h^n Σ_{|x−z| > ε} K(x, z) f(z)`, or the commutator
/// `[b, T]_ε f(x) = h^n Σ_{|x−z| > ε} (b(x) − b(z)) K(x, z) f(z)` when a symbol is given.
///
/// Requires `ε ≥ 2h` and `f` supported at distance `≥ ε` from the box boundary.
pub fn apply_operator<T: Real>(
    kernel: &Kernel,
    f: &DiscreteFunction<T>,
    epsilon: T,
    symbol: Option<&DiscreteFunction<T>>,
) -> Result<DiscreteFunction<T>> {
    kernel.validate()?;
    let grid = *f.grid();
    let h = grid.spacing();
    if !(epsilon >= T::lit(2.0) * h) {
        return Err(Error::config(format!(
            "truncation epsilon = {epsilon} is below 2h = {}",
            T::lit(2.0) * h
        )));
    }
    if let Some(d) = kernel.dim() {
        if d != grid.dim() {
            return Err(Error::config(format!(
                "{:?} kernel lives in dimension {d}, grid has dimension {}",
                kernel.kind,
                grid.dim()
            )));
        }
    }
    if let Some(b) = symbol {
        if b.grid() != &grid {
            return Err(Error::config("commutator symbol lives on a different grid"));
        }
    }
    check_margin(f, epsilon)?;

    if kernel.kind == KernelKind::Zero {
        return Ok(DiscreteFunction::zeros(grid));
    }
    let support = f.support();
    let values = if grid.dim() == 1 {
        apply_1d(kernel, f.values(), &support, &grid, epsilon, symbol.map(|b| b.values()))
    } else {
        apply_2d(kernel, f.values(), &support, &grid, epsilon, symbol.map(|b| b.values()))
    };
    DiscreteFunction::new(grid, values)
}

fn check_margin<T: Real>(f: &DiscreteFunction<T>, epsilon: T) -> Result<()> {
    let grid = f.grid();
    let l = grid.half_width();
    for i in f.support() {
        let p = grid.point(i);
        for &c in &p[..grid.dim()] {
            if c + l < epsilon || l - c < epsilon {
                return Err(Error::precondition(format!(
                    "f is nonzero at node {i}, closer than epsilon = {epsilon} to the box boundary"
                )));
            }
        }
    }
    Ok(())
}

/// Offset table `K(d h, 0)` for `|d| < N`, zero inside the truncation.
fn apply_1d<T: Real>(
    kernel: &Kernel,
    f: &[T],
    support: &[usize],
    grid: &Grid<T>,
    epsilon: T,
    b: Option<&[T]>,
) -> Vec<T> {
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let table: Vec<T> = (0..2 * n - 1)
        .map(|k| {
            let d = T::from_usize_lossy(k) * h - T::from_usize_lossy(n - 1) * h;
            if d.abs() > epsilon {
                kernel.eval([d, T::zero()], [T::zero(), T::zero()])
            } else {
                T::zero()
            }
        })
        .collect();
    (0..n)
        .map(|i| {
            let mut s = T::zero();
            match b {
                None => {
                    for &j in support {
                        s += table[i + n - 1 - j] * f[j];
                    }
                }
                Some(b) => {
                    for &j in support {
                        s += (b[i] - b[j]) * table[i + n - 1 - j] * f[j];
                    }
                }
            }
            s * h
        })
        .collect()
}

fn apply_2d<T: Real>(
    kernel: &Kernel,
    f: &[T],
    support: &[usize],
    grid: &Grid<T>,
    epsilon: T,
    b: Option<&[T]>,
) -> Vec<T> {
    let cell = grid.cell_measure();
    (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            let mut s = T::zero();
            for &j in support {
                let z = grid.point(j);
                if euclid(x, z) > epsilon {
                    let k = kernel.eval(x, z) * f[j];
                    s += match b {
                        None => k,
                        Some(b) => (b[i] - b[j]) * k,
                    };
                }
            }
            s * cell
        })
        .collect()
}
