mod common;

use std::f64::consts::PI;

use common::gauss_panels;
use eustat_core::quadrature::integrate;
use eustat_core::radial::build_sigma;
use eustat_core::spectral::*;
use proptest::prelude::*;

/// Mean-zero field made of a few low modes with the given coefficients.
fn band_limited(grid: Grid, coefs: &[(i32, i32, f64, f64)]) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| {
        coefs
            .iter()
            .map(|&(kx, ky, a, b)| {
                let ph = kx as f64 * x + ky as f64 * y;
                a * ph.cos() + b * ph.sin()
            })
            .sum()
    })
}

fn mode() -> impl Strategy<Value = (i32, i32, f64, f64)> {
    (-10i32..=10, 1i32..=10, -1.0..1.0f64, -1.0..1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn biot_savart_roundtrip(coefs in prop::collection::vec(mode(), 1..8)) {
        let g = Grid::new(64, PI).unwrap();
        let w = band_limited(g, &coefs);
        prop_assume!(w.max_abs() > 1e-3);
        let u = biot_savart(&w).unwrap();
        prop_assert!(divergence(&u).max_abs() <= 1e-10 * w.max_abs());
        prop_assert!(curl(&u).sub(&w).unwrap().max_abs() <= 1e-10 * w.max_abs());
    }

    #[test]
    fn lp_norm_is_homogeneous(coefs in prop::collection::vec(mode(), 1..5), c in -5.0..5.0f64, p in 1.0..6.0f64) {
        let g = Grid::new(32, PI).unwrap();
        let f = band_limited(g, &coefs);
        let a = lp_norm(&f.scaled(c), p).unwrap();
        let b = c.abs() * lp_norm(&f, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn neg_sobolev_is_monotone(coefs in prop::collection::vec(mode(), 1..5), l1 in 0.0..3.0f64, dl in 0.0..3.0f64) {
        let g = Grid::new(32, PI).unwrap();
        let f = band_limited(g, &coefs);
        prop_assert!(neg_sobolev_proxy_norm(&f, l1 + dl) <= neg_sobolev_proxy_norm(&f, l1) * (1.0 + 1e-14));
    }

    #[test]
    fn mollify_preserves_mass_and_sign(cx in -1.0..1.0f64, cy in -1.0..1.0f64, s in 0.1..0.6f64, eps in 0.2..0.8f64) {
        let g = Grid::new(64, PI).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (-((x - cx).powi(2) + (y - cy).powi(2)) / (s * s)).exp());
        let m = mollify(&f, eps).unwrap();
        prop_assert!((m.integral() - f.integral()).abs() <= 1e-12 * f.integral());
        prop_assert!(m.min() >= 0.0);
    }
}

/// Direct Biot-Savart convolution in polar coordinates about the target.
///
/// `u(x) = (1/2π) ∫ (x-y)⊥/|x-y|² ω(y) dy`; with `y = x + r e_θ` the kernel
/// reduces to `(sin θ, -cos θ) / (2π)` times `∫ ω dr`.
fn direct_velocity(omega: &impl Fn(f64, f64) -> f64, x: f64, y: f64, rmax: f64) -> (f64, f64) {
    let nt = 512;
    let (mut a, mut b) = (0.0, 0.0);
    for k in 0..nt {
        let th = 2.0 * PI * k as f64 / nt as f64;
        let (ct, st) = (th.cos(), th.sin());
        let radial = gauss_panels(|r| omega(x + r * ct, y + r * st), 0.0, rmax, 32, 16);
        a += st * radial;
        b -= ct * radial;
    }
    (a / nt as f64, b / nt as f64)
}

#[test]
fn biot_savart_matches_direct_convolution() {
    // Shielded blob ω = Δφ with Gaussian φ: zero net circulation, so the
    // whole-plane velocity ∇⊥φ is effectively periodic on the box.
    let g = Grid::new(64, PI).unwrap();
    let (s, c): (f64, (f64, f64)) = (0.2, (0.1, -0.05));
    let omega = move |x: f64, y: f64| {
        let r2 = (x - c.0).powi(2) + (y - c.1).powi(2);
        (r2 / s.powi(4) - 2.0 / (s * s)) * (-r2 / (2.0 * s * s)).exp()
    };
    let w = ScalarField::from_fn(g, omega);
    let mean = w.mean();
    let u = biot_savart(&w.map(|v| v - mean)).unwrap();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for idx in (0..g.len()).step_by(7) {
        let (x, y) = g.point(idx);
        if x.abs().max(y.abs()) > PI / 2.0 {
            continue;
        }
        let rmax = (x - c.0).hypot(y - c.1) + 10.0 * s;
        let (a, b) = direct_velocity(&omega, x, y, rmax);
        worst = worst.max((a - u.u1.values()[idx]).hypot(b - u.u2.values()[idx]));
        checked += 1;
    }
    assert!(checked > 50);
    assert!(worst < 1e-6, "worst {worst:e}");
}

#[test]
fn local_l2_of_sigma() {
    let (l, r) = (4.0, 1.0);
    let g = Grid::new(256, l).unwrap();
    let sigma = build_sigma(r, g).unwrap();
    let rad = l / 2.0;
    let num = local_l2_norm(sigma.velocity(), (0.0, 0.0), rad).unwrap();

    // Same node set with the closed-form Σ: the sampling itself is exact.
    let p = *sigma.profile();
    let exact_nodes = VectorField::from_fn(g, |x, y| {
        let rr = x.hypot(y);
        if rr == 0.0 {
            return (0.0, 0.0);
        }
        let h = p.enclosed(rr) / (rr * rr);
        (-y * h, x * h)
    });
    let lattice = local_l2_norm(&exact_nodes, (0.0, 0.0), rad).unwrap();
    assert!((num - lattice).abs() < 1e-10 * lattice);

    // Radial quadrature of |Σ|² = F(r)²/r²; the node-set ball carries a
    // lattice boundary error of a few 1e-4 at this resolution.
    let radial = integrate(|t| if t == 0.0 { 0.0 } else { p.enclosed(t).powi(2) / t }, 0.0, rad, 1e-13);
    let exact = (2.0 * PI * radial).sqrt();
    assert!((num - exact).abs() < 5e-4 * exact, "{num} {exact}");
}
