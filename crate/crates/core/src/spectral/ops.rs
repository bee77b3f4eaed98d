//! Spectral operators and norms on periodic fields.

use std::sync::OnceLock;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::reduce::{pairwise_sum_by, pairwise_sum_indexed};

use super::fft::with_fft;
use super::{Grid, ScalarField, VectorField};

const MEAN_TOL: f64 = 1e-12;

pub fn spectrum(f: &ScalarField) -> Vec<Complex64> {
    with_fft(f.grid().n(), |fft| fft.forward_real(f.values()))
}

pub fn from_spectrum(grid: Grid, spec: Vec<Complex64>) -> ScalarField {
    ScalarField::from_values(grid, with_fft(grid.n(), |fft| fft.inverse_real(spec)))
}

fn check_mean_zero(omega: &ScalarField) -> Result<()> {
    let mean = omega.mean();
    let max_abs = omega.max_abs();
    if mean.abs() > MEAN_TOL * max_abs || (max_abs == 0.0 && mean != 0.0) {
        return Err(Error::NonZeroMean { mean, max_abs });
    }
    Ok(())
}

/// `ψ̂ = -ω̂ / |k|²` in place, with the zero mode set to 0.
pub(crate) fn invert_laplacian_spectrum(grid: &Grid, spec: &mut [Complex64]) {
    let n = grid.n();
    for a in 0..n {
        let kx = grid.wavenumber(a);
        for b in 0..n {
            let ky = grid.wavenumber(b);
            let k2 = kx * kx + ky * ky;
            let c = &mut spec[a * n + b];
            *c = if k2 == 0.0 { Complex64::default() } else { -*c / k2 };
        }
    }
}

/// Spectral derivative `∂^(px)_x ∂^(py)_y` applied to a copy of `spec`.
pub(crate) fn derivative_spectrum(grid: &Grid, spec: &[Complex64], px: u32, py: u32) -> Vec<Complex64> {
    let n = grid.n();
    let mut out = spec.to_vec();
    for a in 0..n {
        let kx = if px % 2 == 1 { grid.derivative_wavenumber(a) } else { grid.wavenumber(a) };
        let fx = Complex64::new(0.0, kx).powu(px);
        for b in 0..n {
            let ky = if py % 2 == 1 { grid.derivative_wavenumber(b) } else { grid.wavenumber(b) };
            let fy = Complex64::new(0.0, ky).powu(py);
            out[a * n + b] *= fx * fy;
        }
    }
    out
}

/// Solves `Δψ = ω` for mean-zero `ω`; the zero mode of `ψ` is fixed to 0.
pub fn laplacian_invert(omega: &ScalarField) -> Result<ScalarField> {
    check_mean_zero(omega)?;
    let grid = *omega.grid();
    let mut spec = spectrum(omega);
    invert_laplacian_spectrum(&grid, &mut spec);
    Ok(from_spectrum(grid, spec))
}

/// Velocity `u = ∇⊥ψ = (-∂_y ψ, ∂_x ψ)` of a mean-zero vorticity field.
pub fn biot_savart(omega: &ScalarField) -> Result<VectorField> {
    check_mean_zero(omega)?;
    let grid = *omega.grid();
    let mut spec = spectrum(omega);
    invert_laplacian_spectrum(&grid, &mut spec);
    Ok(velocity_from_streamfunction_spectrum(&grid, &spec))
}

pub(crate) fn velocity_from_streamfunction_spectrum(grid: &Grid, psi: &[Complex64]) -> VectorField {
    let dy = derivative_spectrum(grid, psi, 0, 1);
    let dx = derivative_spectrum(grid, psi, 1, 0);
    VectorField {
        u1: from_spectrum(*grid, dy).scaled(-1.0),
        u2: from_spectrum(*grid, dx),
    }
}

/// `∂_x u2 - ∂_y u1`.
pub fn curl(u: &VectorField) -> ScalarField {
    let grid = *u.grid();
    let mut s2 = derivative_spectrum(&grid, &spectrum(&u.u2), 1, 0);
    let s1 = derivative_spectrum(&grid, &spectrum(&u.u1), 0, 1);
    for (a, b) in s2.iter_mut().zip(&s1) {
        *a -= b;
    }
    from_spectrum(grid, s2)
}

/// `∂_x u1 + ∂_y u2`.
pub fn divergence(u: &VectorField) -> ScalarField {
    let grid = *u.grid();
    let mut s1 = derivative_spectrum(&grid, &spectrum(&u.u1), 1, 0);
    let s2 = derivative_spectrum(&grid, &spectrum(&u.u2), 0, 1);
    for (a, b) in s1.iter_mut().zip(&s2) {
        *a += b;
    }
    from_spectrum(grid, s1)
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let grid = *f.grid();
    let s = spectrum(f);
    VectorField {
        u1: from_spectrum(grid, derivative_spectrum(&grid, &s, 1, 0)),
        u2: from_spectrum(grid, derivative_spectrum(&grid, &s, 0, 1)),
    }
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let mut s = spectrum(f);
    let n = grid.n();
    for a in 0..n {
        let kx = grid.wavenumber(a);
        for b in 0..n {
            let ky = grid.wavenumber(b);
            s[a * n + b] *= -(kx * kx + ky * ky);
        }
    }
    from_spectrum(grid, s)
}

/// Zeroes every mode outside the 2/3 band.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let mut s = spectrum(f);
    truncate_spectrum(&grid, &mut s);
    from_spectrum(grid, s)
}

pub(crate) fn truncate_spectrum(grid: &Grid, spec: &mut [Complex64]) {
    let n = grid.n();
    for a in 0..n {
        let keep_a = grid.keeps_mode(a);
        for b in 0..n {
            if !(keep_a && grid.keeps_mode(b)) {
                spec[a * n + b] = Complex64::default();
            }
        }
    }
}

/// Pointwise velocity gradient `[∂_x u1, ∂_y u1, ∂_x u2, ∂_y u2]`.
pub fn velocity_gradient(u: &VectorField) -> [ScalarField; 4] {
    let g1 = gradient(&u.u1);
    let g2 = gradient(&u.u2);
    [g1.u1, g1.u2, g2.u1, g2.u2]
}

/// Largest singular value of the 2x2 matrix `[[a, b], [c, d]]`.
pub fn spectral_norm_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let s = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (s + disc)).sqrt()
}

/// `L^p` norm by trapezoidal quadrature; `p = f64::INFINITY` gives the node maximum.
pub fn lp_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let v = f.values();
    let sum = if p == 1.0 {
        pairwise_sum_by(v, &|x: &f64| x.abs())
    } else if p == 2.0 {
        pairwise_sum_by(v, &|x: &f64| x * x)
    } else {
        pairwise_sum_by(v, &|x: &f64| x.abs().powf(p))
    };
    Ok((sum * f.grid().cell_area()).powf(1.0 / p))
}

/// Parseval-side `Σ_k |f̂_k|²`, normalised to equal `‖f‖²_{L²}`.
pub fn spectral_energy(f: &ScalarField) -> f64 {
    weighted_spectral_energy(f, |_| 1.0)
}

fn weighted_spectral_energy(f: &ScalarField, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = *f.grid();
    let n = grid.n();
    let s = spectrum(f);
    let norm = grid.cell_area() / (n * n) as f64;
    pairwise_sum_indexed(n * n, &|idx| {
        let kx = grid.wavenumber(idx / n);
        let ky = grid.wavenumber(idx % n);
        weight(kx * kx + ky * ky) * s[idx].norm_sqr()
    }) * norm
}

/// Graded negative-order norm `(Σ_k (1+|k|²)^{-order} |f̂_k|²)^{1/2}`.
pub fn neg_sobolev_proxy_norm(f: &ScalarField, order: f64) -> f64 {
    weighted_spectral_energy(f, |k2| (1.0 + k2).powf(-order)).max(0.0).sqrt()
}

/// `‖u‖_{L²(B_r(c))}` by summing `|u|²` over nodes strictly inside the ball.
pub fn local_l2_norm(u: &VectorField, center: (f64, f64), radius: f64) -> Result<f64> {
    let grid = *u.grid();
    let l = grid.box_half_width();
    let (cx, cy) = center;
    if !(radius > 0.0) || cx.abs() + radius > l || cy.abs() + radius > l {
        return Err(Error::BallOutsideBox {
            cx,
            cy,
            radius,
            half_width: l,
        });
    }
    let (a, b) = (u.u1.values(), u.u2.values());
    let r2 = radius * radius;
    let sum = pairwise_sum_indexed(grid.len(), &|idx| {
        let (x, y) = grid.point(idx);
        let (dx, dy) = (x - cx, y - cy);
        if dx * dx + dy * dy < r2 {
            a[idx] * a[idx] + b[idx] * b[idx]
        } else {
            0.0
        }
    });
    Ok((sum * grid.cell_area()).sqrt())
}

fn bump_unnormalised(r2: f64) -> f64 {
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// Normalisation of the planar bump: `1 / ∫_{ℝ²} exp(-1/(1-|x|²)) dx`.
fn bump_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let radial = quadrature::integrate(|r| r * bump_unnormalised(r * r), 0.0, 1.0, 1e-16);
        1.0 / (2.0 * std::f64::consts::PI * radial)
    })
}

/// Standard mollifier `η(x)`, unit mass, supported in the unit ball.
pub fn standard_mollifier(x: f64, y: f64) -> f64 {
    bump_constant() * bump_unnormalised(x * x + y * y)
}

/// Scaled mollifier `η^ε(x) = ε^{-2} η(x/ε)`.
pub fn scaled_mollifier(epsilon: f64, x: f64, y: f64) -> f64 {
    standard_mollifier(x / epsilon, y / epsilon) / (epsilon * epsilon)
}

/// Periodic convolution with the scaled bump `η^ε`.
///
/// The stencil is renormalised on the grid so that mass is preserved to
/// rounding, and the sum runs in real space so non-negative input stays
/// non-negative.
pub fn mollify(f: &ScalarField, epsilon: f64) -> Result<ScalarField> {
    let grid = *f.grid();
    let h = grid.spacing();
    if !(epsilon >= 2.0 * h) {
        return Err(Error::KernelUnderresolved {
            epsilon,
            min: 2.0 * h,
        });
    }
    let n = grid.n() as i64;
    let reach = ((epsilon / h).ceil() as i64).min(n / 2);
    let mut stencil = Vec::new();
    for di in -reach..=reach {
        for dj in -reach..=reach {
            let w = scaled_mollifier(epsilon, di as f64 * h, dj as f64 * h);
            if w > 0.0 {
                stencil.push((di, dj, w));
            }
        }
    }
    let total = pairwise_sum_by(&stencil, &|s: &(i64, i64, f64)| s.2) * grid.cell_area();
    let area = grid.cell_area() / total;
    let src = f.values();
    let out = (0..grid.len())
        .map(|idx| {
            let i = (idx as i64) / n;
            let j = (idx as i64) % n;
            let terms = |s: &(i64, i64, f64)| {
                let si = (i - s.0).rem_euclid(n);
                let sj = (j - s.1).rem_euclid(n);
                s.2 * src[(si * n + sj) as usize]
            };
            pairwise_sum_by(&stencil, &terms) * area
        })
        .collect();
    Ok(ScalarField::from_values(grid, out))
}

/// Value and first/second derivatives of the trigonometric interpolant at `(x, y)`.
struct Jet {
    f: f64,
    fx: f64,
    fy: f64,
    fxx: f64,
    fxy: f64,
    fyy: f64,
}

fn interpolant_jet(grid: &Grid, spec: &[Complex64], x: f64, y: f64) -> Jet {
    let n = grid.n();
    let l = grid.box_half_width();
    let phase = |a: usize, s: f64| {
        if a == n / 2 {
            Complex64::default()
        } else {
            Complex64::from_polar(1.0, grid.wavenumber(a) * (s + l))
        }
    };
    let ey: Vec<Complex64> = (0..n).map(|b| phase(b, y)).collect();
    let ky: Vec<f64> = (0..n).map(|b| grid.wavenumber(b)).collect();
    let (mut f, mut fx, mut fy, mut fxx, mut fxy, mut fyy) =
        (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
    let i = Complex64::new(0.0, 1.0);
    for a in 0..n {
        let row = &spec[a * n..(a + 1) * n];
        let (mut g0, mut g1, mut g2) = (Complex64::default(), Complex64::default(), Complex64::default());
        for b in 0..n {
            let t = row[b] * ey[b];
            g0 += t;
            g1 += t * ky[b];
            g2 += t * (ky[b] * ky[b]);
        }
        // g1 carries a missing factor i, g2 a missing factor -1.
        let ex = phase(a, x);
        let kx = grid.wavenumber(a);
        f += ex * g0;
        fx += ex * g0 * (i * kx);
        fxx -= ex * g0 * (kx * kx);
        fy += ex * g1 * i;
        fxy -= ex * g1 * kx;
        fyy -= ex * g2;
    }
    let s = 1.0 / (n * n) as f64;
    Jet {
        f: f.re * s,
        fx: fx.re * s,
        fy: fy.re * s,
        fxx: fxx.re * s,
        fxy: fxy.re * s,
        fyy: fyy.re * s,
    }
}

/// Sup-norm of the trigonometric interpolant of `f`.
///
/// Starts from the largest node values and climbs to the off-grid extremum
/// with Newton iterations on the interpolant; never below `max |f_ij|`.
pub fn spectral_sup_norm(f: &ScalarField) -> f64 {
    let grid = *f.grid();
    let n = grid.n();
    let h = grid.spacing();
    let v = f.values();
    let node_max = f.max_abs();
    if node_max == 0.0 {
        return 0.0;
    }
    let at = |i: usize, j: usize| v[(i % n) * n + (j % n)].abs();
    let mut candidates: Vec<usize> = (0..grid.len())
        .filter(|&idx| {
            let (i, j) = (idx / n + n, idx % n + n);
            let c = at(i, j);
            c >= 0.5 * node_max
                && [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1), (i - 1, j - 1), (i + 1, j + 1), (i - 1, j + 1), (i + 1, j - 1)]
                    .iter()
                    .all(|&(p, q)| at(p, q) <= c)
        })
        .collect();
    candidates.sort_by(|&p, &q| v[q].abs().total_cmp(&v[p].abs()).then(p.cmp(&q)));
    candidates.truncate(8);

    let spec = spectrum(f);
    let mut best = node_max;
    for idx in candidates {
        let (mut x, mut y) = grid.point(idx);
        let sign = v[idx].signum();
        for _ in 0..20 {
            let jet = interpolant_jet(&grid, &spec, x, y);
            best = best.max(jet.f.abs());
            let (gx, gy) = (sign * jet.fx, sign * jet.fy);
            let (hxx, hxy, hyy) = (sign * jet.fxx, sign * jet.fxy, sign * jet.fyy);
            let det = hxx * hyy - hxy * hxy;
            if !(hxx < 0.0 && det > 0.0) {
                break;
            }
            let mut dx = -(hyy * gx - hxy * gy) / det;
            let mut dy = -(-hxy * gx + hxx * gy) / det;
            let len = dx.hypot(dy);
            if len > h {
                dx *= h / len;
                dy *= h / len;
            }
            x += dx;
            y += dy;
            if len < 1e-13 * grid.box_half_width() {
                let jet = interpolant_jet(&grid, &spec, x, y);
                best = best.max(jet.f.abs());
                break;
            }
        }
    }
    best
}
