use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Expr, Grid, Point};
use crate::error::{Error, Result};
use crate::real::Real;

/// One finite real per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunction<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    node: usize,
    x: f64,
    y: Option<f64>,
    value: f64,
}

impl<T: Real> DiscreteFunction<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid<T>, c: T) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    /// Samples a closure at every node. Non-finite results are a caller bug.
    pub fn from_fn(grid: Grid<T>, f: impl Fn(Point<T>) -> T) -> Self {
        let values: Vec<T> = grid.points().map(f).collect();
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { grid, values }
    }

    /// Samples an expression (see [`Expr`]) with singularities clipped at `h/2`.
    pub fn sample(expression: &str, grid: Grid<T>) -> Result<Self> {
        let expr = Expr::parse(expression)?;
        Self::sample_expr(&expr, grid)
    }

    pub fn sample_expr(expr: &Expr, grid: Grid<T>) -> Result<Self> {
        let floor = grid.spacing() / T::lit(2.0);
        let values = grid.points().map(|p| expr.eval(p, floor)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    /// Node-wise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.grid, other.grid, "functions live on different grids");
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    /// Zeroes the function at every node where `keep` is false.
    pub fn restrict(&self, keep: impl Fn(Point<T>) -> bool) -> Self {
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| if keep(self.grid.point(i)) { v } else { T::zero() })
                .collect(),
        }
    }

    /// Indices of the nonzero nodes, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != T::zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Writes `node,x[,y],value` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (i, &v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            w.serialize(CsvRow {
                node: i,
                x: p[0].to_f64_lossy(),
                y: (self.grid.dim() == 2).then(|| p[1].to_f64_lossy()),
                value: v.to_f64_lossy(),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads rows written by [`write_csv`](Self::write_csv) back onto `grid`.
    pub fn read_csv<R: Read>(grid: Grid<T>, input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut values = vec![T::zero(); grid.len()];
        let mut seen = vec![false; grid.len()];
        for row in rdr.deserialize() {
            let row: CsvRow = row?;
            if row.node >= grid.len() {
                return Err(Error::config(format!("node {} outside the grid", row.node)));
            }
            values[row.node] = T::lit(row.value);
            seen[row.node] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::config(format!("missing node {i}")));
        }
        Self::new(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sample_examples() {
        let g = Grid::new(1, 4.0, 8).unwrap();
        let c = DiscreteFunction::sample("3", g).unwrap();
        assert!(c.values().iter().all(|&v| v == 3.0));
        let ind = DiscreteFunction::sample("ind(0, 1)", g).unwrap();
        assert_eq!(ind.values(), &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let a = DiscreteFunction::sample("|x|", g).unwrap();
        assert_eq!(a.values()[1], 3.0);
    }

    #[test]
    fn sample_clips_log_at_half_spacing() {
        let g = Grid::new(1, 4.0, 8).unwrap();
        let f = DiscreteFunction::sample("log|x|", g).unwrap();
        assert_eq!(f.values()[4], 0.5f64.ln());
        assert_eq!(f.values()[5], 0.0);
    }

    #[test]
    fn sample_rejects_bad_input() {
        let g = Grid::new(1, 4.0, 8).unwrap();
        assert!(matches!(DiscreteFunction::sample("1 +", g), Err(Error::Parse { .. })));
        assert!(matches!(DiscreteFunction::sample("1/x", g), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn csv_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 16)) {
            let g = Grid::new(2, 1.0, 4).unwrap();
            let f = DiscreteFunction::new(g, values).unwrap();
            let mut buf = Vec::new();
            f.write_csv(&mut buf).unwrap();
            let back = DiscreteFunction::read_csv(g, buf.as_slice()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
