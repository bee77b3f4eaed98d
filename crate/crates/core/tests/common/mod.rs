#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use eustat_core::ensemble::Profile;
use eustat_core::radial::{build_sigma, StationaryField};
use eustat_core::spectral::{Grid, ScalarField};

/// Counter-rotating Gaussian pair with zero net circulation.
pub fn dipole(a: f64) -> Vec<Profile> {
    vec![
        Profile::Gaussian { amplitude: a, center: (0.0, 0.85), width: 0.2 },
        Profile::Gaussian { amplitude: -a, center: (0.0, -0.85), width: 0.2 },
    ]
}

/// `L = 2π`, `n = 256`, `Σ` of radius 1.
pub fn fine_sigma() -> Arc<StationaryField> {
    Arc::new(build_sigma(1.0, Grid::new(256, 2.0 * PI).unwrap()).unwrap())
}

pub fn sigma_on(n: usize, l: f64, r: f64) -> Arc<StationaryField> {
    Arc::new(build_sigma(r, Grid::new(n, l).unwrap()).unwrap())
}

/// Smooth periodic field on the box `[-π, π)²`.
pub fn periodic_smooth(grid: Grid) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| {
        x.sin() * y.sin() + 0.5 * (2.0 * x + y).cos() + 0.3 * (x - 3.0 * y).sin()
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            let dp = m as f64 * (z * p1 - p2) / (z * z - 1.0);
            let prev = z;
            z -= p1 / dp;
            if (z - prev).abs() < 1e-15 {
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                break;
            }
        }
    }
    (x, w)
}

/// `∫_a^b f` with `panels` Gauss-Legendre panels of the given order.
pub fn gauss_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = a + (b - a) * p as f64 / panels as f64;
        let hi = a + (b - a) * (p + 1) as f64 / panels as f64;
        for (xi, wi) in x.iter().zip(&w) {
            acc += 0.5 * (hi - lo) * wi * f(0.5 * (lo + hi) + 0.5 * (hi - lo) * xi);
        }
    }
    acc
}
