use crate::error::{Error, Result};

/// Uniform periodic grid on the box `[-L, L)^2` with `n` points per axis.
///
/// Node `(i, j)` sits at `(x_i, y_j) = (-L + i h, -L + j h)` with `h = 2L / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    box_half_width: f64,
}

impl Grid {
    pub fn new(n: usize, box_half_width: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n}; need a power of two >= 16"
            )));
        }
        if !(box_half_width > 0.0 && box_half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "box_half_width = {box_half_width}; need a positive finite value"
            )));
        }
        Ok(Self { n, box_half_width })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn box_half_width(&self) -> f64 {
        self.box_half_width
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.box_half_width / self.n as f64
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of node index `i` along either axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.box_half_width + i as f64 * self.spacing()
    }

    #[inline]
    pub fn point(&self, idx: usize) -> (f64, f64) {
        (self.coord(idx / self.n), self.coord(idx % self.n))
    }

    /// Fundamental wavenumber `π / L`.
    #[inline]
    pub fn k0(&self) -> f64 {
        std::f64::consts::PI / self.box_half_width
    }

    /// Signed mode index for FFT slot `a` (Nyquist reported as `+n/2`).
    #[inline]
    pub fn mode(&self, a: usize) -> i64 {
        if a <= self.n / 2 {
            a as i64
        } else {
            a as i64 - self.n as i64
        }
    }

    /// Physical wavenumber of FFT slot `a`.
    #[inline]
    pub fn wavenumber(&self, a: usize) -> f64 {
        self.mode(a) as f64 * self.k0()
    }

    /// Wavenumber used for odd derivatives: the Nyquist slot is dropped.
    #[inline]
    pub fn derivative_wavenumber(&self, a: usize) -> f64 {
        if a == self.n / 2 {
            0.0
        } else {
            self.wavenumber(a)
        }
    }

    /// Whether FFT slot `a` survives the 2/3 truncation.
    #[inline]
    pub fn keeps_mode(&self, a: usize) -> bool {
        3 * self.mode(a).unsigned_abs() as usize <= self.n
            && a != self.n / 2
    }

    /// Distance of node `idx` from the box boundary in the sup-metric,
    /// normalised by `L` (0 at the centre, approaching 1 at the edge).
    #[inline]
    pub fn sup_radius_fraction(&self, idx: usize) -> f64 {
        let (x, y) = self.point(idx);
        x.abs().max(y.abs()) / self.box_half_width
    }

    pub fn same_as(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "n = {} / L = {} vs n = {} / L = {}",
                self.n, self.box_half_width, other.n, other.box_half_width
            )))
        }
    }
}
