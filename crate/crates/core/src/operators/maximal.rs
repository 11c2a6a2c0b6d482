use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DiscreteFunction, Region, RegionFamily};
use crate::orlicz::{luxemburg_norm, YoungFunction};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaximalKind {
    /// `M f = sup_Q avg_Q |f|`.
    HardyLittlewood,
    /// `M^♯ f = sup_Q avg_Q |f − f_Q|`.
    Sharp,
    /// `M_δ f = [M(|f|^δ)]^{1/δ}`.
    HardyLittlewoodDelta { delta: f64 },
    /// `M^♯_δ f = [M^♯(|f|^δ)]^{1/δ}`.
    SharpDelta { delta: f64 },
    /// `sup_Q ‖f‖_{L log L, Q}`.
    Llogl,
}

/// The maximal function over the family: at each node, the max of the
/// region functional over the family regions containing it.
///
/// Every node must lie in some region of the family.
pub fn maximal<T: Real>(
    f: &DiscreteFunction<T>,
    kind: MaximalKind,
    family: &RegionFamily<T>,
) -> Result<DiscreteFunction<T>> {
    let (source, root) = match kind {
        MaximalKind::HardyLittlewoodDelta { delta } | MaximalKind::SharpDelta { delta } => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::config(format!("delta must lie in (0, 1), got {delta}")));
            }
            let d = T::lit(delta);
            (f.map(|v| v.abs().powf(d)), Some(T::one() / d))
        }
        _ => (f.abs(), None),
    };
    let grid = f.grid();
    let mut out = vec![T::zero(); grid.len()];
    let mut covered = vec![false; grid.len()];
    let llogl = YoungFunction::Llogl { kappa: 1.0 };
    for region in family.regions() {
        let ranges = grid.region_ranges(&region);
        if ranges.is_empty() {
            continue;
        }
        let value = match kind {
            MaximalKind::HardyLittlewood | MaximalKind::HardyLittlewoodDelta { .. } => average(&source, &region),
            MaximalKind::Sharp => oscillation(f, &region),
            MaximalKind::SharpDelta { .. } => oscillation(&source, &region),
            MaximalKind::Llogl => luxemburg_norm(f, &llogl, &region, None)?,
        };
        for range in ranges {
            for i in range {
                out[i] = out[i].max(value);
                covered[i] = true;
            }
        }
    }
    if let Some(i) = covered.iter().position(|c| !c) {
        return Err(Error::precondition(format!(
            "no region of the family contains node {i} at {:?}",
            grid.point(i)
        )));
    }
    if let Some(r) = root {
        out.iter_mut().for_each(|v| *v = v.powf(r));
    }
    DiscreteFunction::new(*grid, out)
}

fn average<T: Real>(f: &DiscreteFunction<T>, region: &Region<T>) -> T {
    let grid = f.grid();
    let mut s = T::zero();
    let mut n = 0;
    for range in grid.region_ranges(region) {
        n += range.len();
        f.values()[range].iter().for_each(|&v| s += v);
    }
    s / T::from_usize_lossy(n)
}

fn oscillation<T: Real>(f: &DiscreteFunction<T>, region: &Region<T>) -> T {
    let grid = f.grid();
    let mean = average(f, region);
    let mut s = T::zero();
    let mut n = 0;
    for range in grid.region_ranges(region) {
        n += range.len();
        f.values()[range].iter().for_each(|&v| s += (v - mean).abs());
    }
    s / T::from_usize_lossy(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{dyadic_radii, region_family, Grid, Shape};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize) -> (Grid<f64>, RegionFamily<f64>) {
        let g = Grid::new(1, 4.0, n).unwrap();
        let fam = region_family(&g, &dyadic_radii(-3, 3), Shape::Cube, 1).unwrap();
        (g, fam)
    }

    #[test]
    fn constants() {
        let (g, fam) = setup(128);
        let c = DiscreteFunction::constant(g, 2.5);
        let m = maximal(&c, MaximalKind::HardyLittlewood, &fam).unwrap();
        assert!(m.values().iter().all(|&v| (v - 2.5).abs() < 1e-14));
        let s = maximal(&c, MaximalKind::Sharp, &fam).unwrap();
        assert!(s.values().iter().all(|&v| v.abs() < 1e-14));
        let l = maximal(&c, MaximalKind::Llogl, &fam).unwrap();
        assert!(l.values().iter().all(|&v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn indicator_at_three() {
        // best interval through 3 is [-1, 3]: 1/2, approached from below on the grid
        let (g, fam) = setup(512);
        let f = DiscreteFunction::sample("ind(-1, 1)", g).unwrap();
        let m = maximal(&f, MaximalKind::HardyLittlewood, &fam).unwrap();
        let v = m.values()[g.nearest_node([3.0, 0.0])];
        assert!(v <= 0.5 && v > 0.5 - g.spacing(), "{v}");
    }

    #[test]
    fn uncovered_nodes_are_an_error() {
        let g = Grid::new(1, 4.0, 64).unwrap();
        let fam = RegionFamily::centered(Shape::Cube, [0.0, 0.0], vec![1.0]).unwrap();
        let f = DiscreteFunction::constant(g, 1.0);
        assert!(maximal(&f, MaximalKind::HardyLittlewood, &fam).is_err());
        let (_, full) = setup(64);
        assert!(maximal(&f, MaximalKind::SharpDelta { delta: 1.0 }, &full).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn orderings(seed in 0u64..1000, delta in 0.1f64..0.9) {
            let (g, fam) = setup(128);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(0.0..2.0)).collect();
            let bump: Vec<f64> = f.iter().map(|v| v + rng.gen_range(0.0..1.0)).collect();
            let f = DiscreteFunction::new(g, f).unwrap();
            let big = DiscreteFunction::new(g, bump).unwrap();
            let m = maximal(&f, MaximalKind::HardyLittlewood, &fam).unwrap();
            let md = maximal(&f, MaximalKind::HardyLittlewoodDelta { delta }, &fam).unwrap();
            let mb = maximal(&big, MaximalKind::HardyLittlewood, &fam).unwrap();
            let ml = maximal(&f, MaximalKind::Llogl, &fam).unwrap();
            for i in 0..g.len() {
                prop_assert!(md.values()[i] <= m.values()[i] * (1.0 + 1e-12));
                prop_assert!(m.values()[i] <= mb.values()[i]);
                prop_assert!(m.values()[i] <= ml.values()[i] * (1.0 + 1e-9));
            }
        }
    }
}
