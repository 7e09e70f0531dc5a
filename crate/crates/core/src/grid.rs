//! Uniform 1-D grid on a truncated domain and nonnegative fields on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform symmetric grid on `[-L, L]` with Dirichlet-zero boundary.
///
/// Nodes are `x_i = -L + i*dx`, `i = 0..n`, with `dx = 2L/(n-1)`; the
/// node count is odd in all presets so that `x = 0` is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1d {
    half_extent: f64,
    n: usize,
}

impl Grid1d {
    pub fn new(half_extent: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::config("grid.N", format!("node count {n} < 3")));
        }
        if !(half_extent > 0.0) {
            return Err(Error::config("grid.L", format!("half extent {half_extent} must be > 0")));
        }
        Ok(Grid1d { half_extent, n })
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_extent / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.half_extent + i as f64 * self.dx()
    }

    /// Index of the node closest to `x` (clamped into the domain).
    pub fn nearest_node(&self, x: f64) -> usize {
        let t = (x + self.half_extent) / self.dx();
        let i = t.round();
        (i.max(0.0) as usize).min(self.n - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }
}

/// Nonnegative function values aligned to [`Grid1d`] nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1d,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid1d) -> Self {
        Field { grid, values: vec![0.0; grid.n()] }
    }

    pub fn from_fn(grid: Grid1d, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(|x| f(x).max(0.0)).collect();
        Field { grid, values }
    }

    pub fn from_values(grid: Grid1d, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::invalid(
                "Field::from_values",
                format!("{} values for a {}-node grid", values.len(), grid.n()),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("Field::from_values", "values must be finite and >= 0"));
        }
        Ok(Field { grid, values })
    }

    pub fn grid(&self) -> Grid1d {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Swap the backing storage with another equal-length vector
    /// (double buffering in steppers).
    pub(crate) fn swap_buffer(&mut self, other: &mut Vec<f64>) {
        debug_assert_eq!(other.len(), self.values.len());
        std::mem::swap(&mut self.values, other);
    }

    /// `dx`-weighted total mass `⟨field, 1⟩`.
    pub fn mass(&self) -> f64 {
        self.grid.dx() * self.values.iter().sum::<f64>()
    }

    /// Deposit a point atom as `mass/dx` at the nearest node, which
    /// preserves total mass exactly.
    pub fn deposit_atom(&mut self, x: f64, mass: f64) {
        let i = self.grid.nearest_node(x);
        self.values[i] += mass / self.grid.dx();
    }

    /// Field value at the node nearest to `x`.
    pub fn at(&self, x: f64) -> f64 {
        self.values[self.grid.nearest_node(x)]
    }

    /// `dx`-weighted inner product with another field on the same grid.
    pub fn inner(&self, other: &Field) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.grid.dx()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    pub fn iter_nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.grid.n()).map(move |i| (self.grid.node(i), self.values[i]))
    }
}
