use crate::error::{Error, Result};
use crate::reduce::pairwise_sum_indexed;

use super::Grid;

/// Real scalar field sampled at the nodes of a [`Grid`], row-major in `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::CorruptField(idx));
        }
        Ok(Self { grid, values })
    }

    /// Builds a field from already-validated values (internal operations).
    pub(crate) fn from_values(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_values(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self::from_values(grid, vec![c; grid.len()])
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.point(idx);
                f(x, y)
            })
            .collect();
        Self::from_values(grid, values)
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n() + j]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_values(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: f64, other: &ScalarField) -> Result<Self> {
        self.grid.same_as(&other.grid)?;
        Ok(Self::from_values(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + a * y)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.add_scaled(-1.0, other)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Trapezoidal integral over the box.
    pub fn integral(&self) -> f64 {
        pairwise_sum_indexed(self.values.len(), &|i| self.values[i]) * self.grid.cell_area()
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum_indexed(self.values.len(), &|i| self.values[i]) / self.values.len() as f64
    }

    /// `∫ f g` by the trapezoidal rule.
    pub fn inner(&self, other: &ScalarField) -> Result<f64> {
        self.grid.same_as(&other.grid)?;
        Ok(pairwise_sum_indexed(self.values.len(), &|i| self.values[i] * other.values[i])
            * self.grid.cell_area())
    }
}

/// Planar vector field with both components on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub u1: ScalarField,
    pub u2: ScalarField,
}

impl VectorField {
    pub fn new(u1: ScalarField, u2: ScalarField) -> Result<Self> {
        u1.grid().same_as(u2.grid())?;
        Ok(Self { u1, u2 })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            u1: ScalarField::zeros(grid),
            u2: ScalarField::zeros(grid),
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (a, b): (Vec<f64>, Vec<f64>) = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.point(idx);
                f(x, y)
            })
            .unzip();
        Self {
            u1: ScalarField::from_values(grid, a),
            u2: ScalarField::from_values(grid, b),
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        self.u1.grid()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            u1: self.u1.scaled(a),
            u2: self.u2.scaled(a),
        }
    }

    pub fn add_scaled(&self, a: f64, other: &VectorField) -> Result<Self> {
        Ok(Self {
            u1: self.u1.add_scaled(a, &other.u1)?,
            u2: self.u2.add_scaled(a, &other.u2)?,
        })
    }

    /// Pointwise magnitude `|u|`.
    pub fn magnitude(&self) -> ScalarField {
        let v = self
            .u1
            .values()
            .iter()
            .zip(self.u2.values())
            .map(|(a, b)| a.hypot(*b))
            .collect();
        ScalarField::from_values(*self.grid(), v)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.u1
            .values()
            .iter()
            .zip(self.u2.values())
            .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// `∫ u · v` by the trapezoidal rule.
    pub fn inner(&self, other: &VectorField) -> Result<f64> {
        self.grid().same_as(other.grid())?;
        let (a1, a2) = (self.u1.values(), self.u2.values());
        let (b1, b2) = (other.u1.values(), other.u2.values());
        Ok(pairwise_sum_indexed(a1.len(), &|i| a1[i] * b1[i] + a2[i] * b2[i])
            * self.grid().cell_area())
    }

    /// `‖u‖_{L²}` over the box.
    pub fn l2_norm(&self) -> f64 {
        self.inner(self).map(f64::sqrt).unwrap_or(0.0)
    }
}
