//! Uniform grids on the box `[-L, L)^dim`, balls and cubes, region families
//! and the midpoint quadrature every other module is built on.

mod expr;
mod function;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

pub use expr::Expr;
pub use function::DiscreteFunction;

/// A point of the grid box. In dimension one the second coordinate is zero.
pub type Point<T> = [T; 2];

/// Uniform tensor grid with `points_per_axis` nodes per axis and spacing
/// `h = 2L / N`. Node `i` of an axis sits at `-L + i·h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    dim: usize,
    half_width: T,
    points_per_axis: usize,
    spacing: T,
}

impl<T: Real> Grid<T> {
    pub fn new(dim: usize, half_width: T, points_per_axis: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::config(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::config(format!("half width must be positive, got {half_width}")));
        }
        if points_per_axis < 2 || !points_per_axis.is_power_of_two() {
            return Err(Error::config(format!(
                "points per axis must be a power of two >= 2, got {points_per_axis}"
            )));
        }
        let spacing = T::lit(2.0) * half_width / T::from_usize_lossy(points_per_axis);
        Ok(Self {
            dim,
            half_width,
            points_per_axis,
            spacing,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Node spacing `h`.
    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// `h^dim`, the measure carried by one node.
    pub fn cell_measure(&self) -> T {
        self.spacing.powi(self.dim as i32)
    }

    /// Total node count `N^dim`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coordinate(&self, i: usize) -> T {
        -self.half_width + T::from_usize_lossy(i) * self.spacing
    }

    /// Coordinates of the node with linear index `idx` (x-fastest ordering in 2D).
    pub fn point(&self, idx: usize) -> Point<T> {
        match self.dim {
            1 => [self.coordinate(idx), T::zero()],
            _ => {
                let n = self.points_per_axis;
                [self.coordinate(idx % n), self.coordinate(idx / n)]
            }
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Point<T>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// The same box with twice as many nodes per axis.
    pub fn refined(&self) -> Self {
        Self::new(self.dim, self.half_width, self.points_per_axis * 2)
            .expect("refinement of a valid grid is valid")
    }

    /// Refines `levels` times.
    pub fn refined_by(&self, levels: u32) -> Self {
        (0..levels).fold(*self, |g, _| g.refined())
    }

    /// Axis indices `i` with `pred(x_i)` true, assuming `pred` holds on an
    /// interval of the axis contained in `[lo, hi]`.
    fn axis_span(&self, lo: T, hi: T, pred: impl Fn(T) -> bool) -> Range<usize> {
        let n = self.points_per_axis as isize;
        let to_index = |x: T| ((x + self.half_width) / self.spacing).to_f64_lossy();
        let mut a = (to_index(lo).floor() as isize - 1).clamp(0, n);
        let mut b = (to_index(hi).ceil() as isize + 2).clamp(0, n);
        while a < b && !pred(self.coordinate(a as usize)) {
            a += 1;
        }
        while b > a && !pred(self.coordinate((b - 1) as usize)) {
            b -= 1;
        }
        a as usize..b as usize
    }

    /// Linear-index ranges of the nodes inside `region`, in ascending order.
    pub fn region_ranges(&self, region: &Region<T>) -> Vec<Range<usize>> {
        let [cx, cy] = region.center;
        let r = region.size;
        match self.dim {
            1 => {
                let span = self.axis_span(cx - r, cx + r, |x| region.contains([x, T::zero()]));
                if span.is_empty() {
                    Vec::new()
                } else {
                    vec![span]
                }
            }
            _ => {
                let n = self.points_per_axis;
                // a row meets the region iff its point above the centre does
                let rows = self.axis_span(cy - r, cy + r, |y| region.contains([cx, y]));
                let mut out = Vec::with_capacity(rows.len());
                for j in rows {
                    let y = self.coordinate(j);
                    let span = self.axis_span(cx - r, cx + r, |x| region.contains([x, y]));
                    if !span.is_empty() {
                        out.push(j * n + span.start..j * n + span.end);
                    }
                }
                out
            }
        }
    }

    /// Number of nodes inside `region`.
    pub fn count_in(&self, region: &Region<T>) -> usize {
        self.region_ranges(region).iter().map(|r| r.len()).sum()
    }

    /// Discrete measure `h^dim · #(region ∩ grid)`.
    pub fn measure(&self, region: &Region<T>) -> T {
        T::from_usize_lossy(self.count_in(region)) * self.cell_measure()
    }

    /// True when every point of `region` lies inside the open box.
    pub fn contains_region(&self, region: &Region<T>) -> bool {
        let l = self.half_width;
        (0..self.dim).all(|k| region.center[k] - region.size >= -l && region.center[k] + region.size <= l)
    }

    /// Index of the node closest to `p`, clamped to the box.
    pub fn nearest_node(&self, p: Point<T>) -> usize {
        let n = self.points_per_axis as isize;
        let axis = |x: T| {
            let i = ((x + self.half_width) / self.spacing).round().to_f64_lossy() as isize;
            i.clamp(0, n - 1) as usize
        };
        match self.dim {
            1 => axis(p[0]),
            _ => axis(p[1]) * self.points_per_axis + axis(p[0]),
        }
    }

    /// Euclidean distance in the grid's dimension.
    pub fn distance(&self, a: Point<T>, b: Point<T>) -> T {
        euclid(a, b)
    }
}

#[inline]
pub(crate) fn euclid<T: Real>(a: Point<T>, b: Point<T>) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Ball,
    Cube,
}

/// An open ball `B(y, r)` or an open cube of half side `r` centred at `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region<T> {
    pub shape: Shape,
    pub center: Point<T>,
    pub size: T,
}

impl<T: Real> Region<T> {
    pub fn ball(center: Point<T>, radius: T) -> Self {
        Self {
            shape: Shape::Ball,
            center,
            size: radius,
        }
    }

    /// Cube with half side `half_side`, i.e. `Q(center, 2·half_side)`.
    pub fn cube(center: Point<T>, half_side: T) -> Self {
        Self {
            shape: Shape::Cube,
            center,
            size: half_side,
        }
    }

    pub fn new(shape: Shape, center: Point<T>, size: T) -> Self {
        Self { shape, center, size }
    }

    /// `λ·B`: same centre, size scaled by `lambda`.
    pub fn dilate(&self, lambda: T) -> Self {
        Self {
            size: self.size * lambda,
            ..*self
        }
    }

    #[inline]
    pub fn contains(&self, p: Point<T>) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        match self.shape {
            Shape::Ball => dx * dx + dy * dy < self.size * self.size,
            Shape::Cube => dx.abs() < self.size && dy.abs() < self.size,
        }
    }
}

/// Quadrature result together with the number of nodes that contributed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub nodes: usize,
}

impl<T> Integral<T> {
    /// The region held no grid node; `value` is zero.
    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }
}

/// Midpoint rule `h^dim · Σ f·w` over the nodes of `region`, summed in
/// ascending node order.
pub fn integrate<T: Real>(
    f: &DiscreteFunction<T>,
    region: &Region<T>,
    weight: Option<&DiscreteFunction<T>>,
) -> Integral<T> {
    let grid = f.grid();
    let values = f.values();
    let mut sum = T::zero();
    let mut nodes = 0;
    for range in grid.region_ranges(region) {
        nodes += range.len();
        match weight {
            Some(w) => {
                let wv = &w.values()[range.clone()];
                for (a, b) in values[range].iter().zip(wv) {
                    sum += *a * *b;
                }
            }
            None => {
                for a in &values[range] {
                    sum += *a;
                }
            }
        }
    }
    Integral {
        value: sum * grid.cell_measure(),
        nodes,
    }
}

/// A finite stand-in for "all balls (cubes)": every centre crossed with every radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFamily<T> {
    pub shape: Shape,
    pub centers: Vec<Point<T>>,
    pub radii: Vec<T>,
    /// Measure attached to each centre when integrating over the centre variable.
    pub center_measure: T,
}

/// Centres at every `stride`-th node (per axis), crossed with `radii`.
pub fn region_family<T: Real>(
    grid: &Grid<T>,
    radii: &[T],
    shape: Shape,
    stride: usize,
) -> Result<RegionFamily<T>> {
    check_radii(radii)?;
    if stride == 0 {
        return Err(Error::config("center stride must be at least 1"));
    }
    let n = grid.points_per_axis();
    let axis: Vec<T> = (0..n).step_by(stride).map(|i| grid.coordinate(i)).collect();
    let centers = match grid.dim() {
        1 => axis.iter().map(|&x| [x, T::zero()]).collect(),
        _ => axis
            .iter()
            .flat_map(|&y| axis.iter().map(move |&x| [x, y]))
            .collect(),
    };
    let step = grid.spacing() * T::from_usize_lossy(stride);
    Ok(RegionFamily {
        shape,
        centers,
        radii: radii.to_vec(),
        center_measure: step.powi(grid.dim() as i32),
    })
}

fn check_radii<T: Real>(radii: &[T]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::config("region family needs at least one radius"));
    }
    if radii.iter().any(|r| !(*r > T::zero()) || !r.is_finite()) {
        return Err(Error::config("radii must be positive and finite"));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config("radii must be strictly increasing"));
    }
    Ok(())
}

impl<T: Real> RegionFamily<T> {
    /// Family with explicitly chosen centres.
    pub fn with_centers(
        shape: Shape,
        centers: Vec<Point<T>>,
        radii: Vec<T>,
        center_measure: T,
    ) -> Result<Self> {
        check_radii(&radii)?;
        if centers.is_empty() {
            return Err(Error::config("region family needs at least one center"));
        }
        Ok(Self {
            shape,
            centers,
            radii,
            center_measure,
        })
    }

    /// Regions concentric at `center`.
    pub fn centered(shape: Shape, center: Point<T>, radii: Vec<T>) -> Result<Self> {
        Self::with_centers(shape, vec![center], radii, T::one())
    }

    pub fn len(&self) -> usize {
        self.centers.len() * self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All regions, radius-major.
    pub fn regions(&self) -> impl Iterator<Item = Region<T>> + '_ {
        self.radii.iter().flat_map(move |&r| {
            self.centers
                .iter()
                .map(move |&c| Region::new(self.shape, c, r))
        })
    }

    pub fn regions_at(&self, radius: T) -> impl Iterator<Item = Region<T>> + '_ {
        self.centers
            .iter()
            .map(move |&c| Region::new(self.shape, c, radius))
    }
}

/// `{2^k : k = lo..=hi}`.
pub fn dyadic_radii<T: Real>(lo: i32, hi: i32) -> Vec<T> {
    (lo..=hi).map(|k| T::lit(2.0).powi(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn make_grid_examples() {
        let g = Grid::new(1, 4.0, 8).unwrap();
        assert_eq!(g.spacing(), 1.0);
        let xs: Vec<f64> = g.points().map(|p| p[0]).collect();
        assert_eq!(xs, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);

        let g = Grid::new(1, 1.0, 2).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.points().map(|p| p[0]).collect::<Vec<_>>(), vec![-1.0, 0.0]);

        let g = Grid::new(2, 1.0, 4).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.point(5), [-0.5, -0.5]);
    }

    #[test]
    fn make_grid_rejects_bad_config() {
        assert!(Grid::<f64>::new(3, 1.0, 8).is_err());
        assert!(Grid::<f64>::new(1, 1.0, 12).is_err());
        assert!(Grid::<f64>::new(1, 1.0, 1).is_err());
        assert!(Grid::<f64>::new(1, -1.0, 8).is_err());
    }

    #[test]
    fn nodes_stay_inside_box() {
        for n in [2usize, 8, 64] {
            let g = Grid::new(1, 3.0_f64, n).unwrap();
            for p in g.points() {
                assert!(p[0] >= -3.0 && p[0] <= 3.0 - g.spacing() + 1e-12);
            }
        }
    }

    #[test]
    fn nearest_node_round_trips() {
        let g = Grid::new(2, 1.0, 8).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.nearest_node(g.point(i)), i);
        }
        assert_eq!(g.nearest_node([9.0, -9.0]), 7);
    }

    #[test]
    fn membership_is_strict() {
        let g = Grid::new(1, 4.0, 8).unwrap();
        let b = Region::ball([0.0, 0.0], 1.0);
        assert_eq!(g.region_ranges(&b), vec![4..5]);
        let b = Region::ball([0.5, 0.0], 1.0);
        assert_eq!(g.region_ranges(&b), vec![4..6]);
        let q = Region::cube([-4.0, 0.0], 2.0);
        assert_eq!(g.region_ranges(&q), vec![0..2]);
    }

    #[test]
    fn region_ranges_match_brute_force_2d() {
        let g = Grid::new(2, 2.0_f64, 16).unwrap();
        for region in [
            Region::ball([0.3, -0.4], 0.9),
            Region::cube([1.75, 1.0], 0.6),
            Region::ball([-2.0, -2.0], 1.3),
            Region::ball([0.0, 0.0], 5.0),
        ] {
            let brute: Vec<usize> = (0..g.len()).filter(|&i| region.contains(g.point(i))).collect();
            let fast: Vec<usize> = g.region_ranges(&region).into_iter().flatten().collect();
            assert_eq!(brute, fast);
        }
    }

    #[test]
    fn dilate_scales_size_only() {
        let b = Region::ball([1.0, 2.0], 0.5);
        let d = b.dilate(4.0);
        assert_eq!(d.center, b.center);
        assert_eq!(d.size, 2.0);
        assert_eq!(d.shape, Shape::Ball);
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::new(1, 2.0, 4096).unwrap();
        let h = g.spacing();
        let b = Region::ball([0.0, 0.0], 1.0);
        let one = DiscreteFunction::constant(g, 1.0);
        assert!(close(integrate(&one, &b, None).value, 2.0, 2.0 * h));
        let abs = DiscreteFunction::from_fn(g, |p| p[0].abs());
        assert!(close(integrate(&abs, &b, None).value, 1.0, 2.0 * h));
        let x = DiscreteFunction::from_fn(g, |p| p[0]);
        assert!(close(integrate(&x, &b, None).value, 0.0, h));
    }

    #[test]
    fn integrate_empty_region_is_flagged() {
        let g = Grid::new(1, 1.0, 8).unwrap();
        let one = DiscreteFunction::constant(g, 1.0);
        let far = Region::ball([10.0, 0.0], 1.0);
        let q = integrate(&one, &far, None);
        assert!(q.is_empty());
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn midpoint_rule_converges_at_first_order() {
        let exact = [2.0, 1.0, 0.0];
        let mut errs = Vec::new();
        for n in [256usize, 512, 1024, 2048] {
            let g: Grid<f64> = Grid::new(1, 2.0, n).unwrap();
            let b = Region::ball([0.0, 0.0], 1.0);
            let fs = [
                DiscreteFunction::constant(g, 1.0),
                DiscreteFunction::from_fn(g, |p: Point<f64>| p[0].abs()),
                DiscreteFunction::from_fn(g, |p| p[0]),
            ];
            let e: f64 = fs
                .iter()
                .zip(exact)
                .map(|(f, ex)| (integrate(f, &b, None).value - ex).abs())
                .sum();
            errs.push(e);
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 0.9, "observed order {order}");
        }
    }

    #[test]
    fn region_family_examples() {
        let g = Grid::new(1, 4.0, 8).unwrap();
        let fam = region_family(&g, &[1.0, 2.0], Shape::Ball, 1).unwrap();
        assert_eq!(fam.len(), 16);
        let fam = region_family(&g, &[1.0], Shape::Ball, 8).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.center_measure, 8.0);
        assert!(region_family::<f64>(&g, &[], Shape::Ball, 1).is_err());
        assert!(region_family(&g, &[2.0, 1.0], Shape::Ball, 1).is_err());
    }

    #[test]
    fn family_regions_meet_the_grid() {
        let g = Grid::new(2, 1.0_f64, 16).unwrap();
        let fam = region_family(&g, &dyadic_radii(-3, 0), Shape::Cube, 3).unwrap();
        assert!(fam.regions().all(|r| g.count_in(&r) > 0));
    }

    #[test]
    fn works_in_single_precision() {
        let g = Grid::<f32>::new(1, 2.0, 1024).unwrap();
        let one = DiscreteFunction::constant(g, 1.0f32);
        let v = integrate(&one, &Region::ball([0.0, 0.0], 1.0), None).value;
        assert!((v - 2.0).abs() < 4.0 * g.spacing());
    }
}
