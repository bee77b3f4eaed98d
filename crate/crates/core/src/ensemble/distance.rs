use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::radial::{StationaryField, VorticityState};
use crate::reduce::pairwise_sum;
use crate::spectral::VectorField;

use super::measure::DiscreteMeasure;

/// `y_{ij} = ∫ u_i · v_j` for every atom `i`.
pub fn project_measure(
    mu: &DiscreteMeasure<VorticityState>,
    sigma: &StationaryField,
    test_fields: &[VectorField],
) -> Result<Vec<Vec<f64>>> {
    if test_fields.is_empty() {
        return Err(Error::InvalidArgument("need at least one test field".into()));
    }
    for v in test_fields {
        sigma.grid().same_as(v.grid())?;
    }
    mu.atoms()
        .par_iter()
        .map(|a| {
            let u = a.velocity(sigma)?;
            test_fields.iter().map(|v| u.inner(v)).collect()
        })
        .collect::<Vec<Result<Vec<f64>>>>()
        .into_iter()
        .collect()
}

/// Exact `W₁` between weighted point sets on the line, `∫ |F₁ - F₂|`.
pub fn w1_1d(x: &[f64], wx: &[f64], y: &[f64], wy: &[f64]) -> f64 {
    assert_eq!(x.len(), wx.len());
    assert_eq!(y.len(), wy.len());
    // (position, weight, side)
    let mut events: Vec<(f64, f64, bool)> = x
        .iter()
        .zip(wx)
        .map(|(&p, &w)| (p, w, false))
        .chain(y.iter().zip(wy).map(|(&p, &w)| (p, w, true)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)).then(a.1.total_cmp(&b.1)));
    let (mut fx, mut fy) = (0.0, 0.0);
    let mut parts = Vec::with_capacity(events.len());
    for (k, &(p, w, side)) in events.iter().enumerate() {
        if side {
            fy += w;
        } else {
            fx += w;
        }
        if let Some(&(next, _, _)) = events.get(k + 1) {
            parts.push((fx - fy).abs() * (next - p));
        }
    }
    pairwise_sum(&parts)
}

/// `W₁` for `k = 1`, otherwise the sliced `W₁` averaged over `n_slices`
/// seeded uniform directions on the unit sphere.
pub fn sliced_w1(
    ys1: &[Vec<f64>],
    w1: &[f64],
    ys2: &[Vec<f64>],
    w2: &[f64],
    n_slices: usize,
    slice_seed: u64,
) -> Result<f64> {
    let k = ys1.first().or(ys2.first()).map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::InvalidArgument("empty projection".into()));
    }
    if ys1.iter().chain(ys2).any(|y| y.len() != k) {
        return Err(Error::InvalidArgument("projections of different dimension".into()));
    }
    if k == 1 {
        let a: Vec<f64> = ys1.iter().map(|y| y[0]).collect();
        let b: Vec<f64> = ys2.iter().map(|y| y[0]).collect();
        return Ok(w1_1d(&a, w1, &b, w2));
    }
    if n_slices == 0 {
        return Err(Error::InvalidArgument("n_slices must be positive for k > 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(slice_seed);
    let mut dists = Vec::with_capacity(n_slices);
    for _ in 0..n_slices {
        let dir: Vec<f64> = loop {
            let d: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break d.into_iter().map(|v| v / norm).collect();
            }
        };
        let dot = |y: &Vec<f64>| y.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>();
        let a: Vec<f64> = ys1.iter().map(dot).collect();
        let b: Vec<f64> = ys2.iter().map(dot).collect();
        dists.push(w1_1d(&a, w1, &b, w2));
    }
    Ok(pairwise_sum(&dists) / n_slices as f64)
}

/// Projected (sliced) `W₁` distance between two measures on states.
pub fn bl_distance_projected(
    mu1: &DiscreteMeasure<VorticityState>,
    mu2: &DiscreteMeasure<VorticityState>,
    sigma: &StationaryField,
    test_fields: &[VectorField],
    n_slices: usize,
    slice_seed: u64,
) -> Result<f64> {
    for a in mu1.atoms().iter().chain(mu2.atoms()) {
        sigma.grid().same_as(a.grid())?;
    }
    let y1 = project_measure(mu1, sigma, test_fields)?;
    let y2 = project_measure(mu2, sigma, test_fields)?;
    sliced_w1(&y1, mu1.weights(), &y2, mu2.weights(), n_slices, slice_seed)
}

/// Outcome of the support check.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    /// Per limit atom, the first sequence index from which every later
    /// element has an atom within the radius; `None` if the last one does not.
    pub first_index: Vec<Option<usize>>,
    pub pass: bool,
}

/// `supp π ⊂ liminf supp π_n` at a fixed radius in projected coordinates.
pub fn support_liminf_check(sequence: &[Vec<Vec<f64>>], limit: &[Vec<f64>], radius: f64) -> Result<SupportReport> {
    if sequence.len() < 2 {
        return Err(Error::InvalidArgument("sequence needs at least two measures".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius}")));
    }
    let covered = |atoms: &Vec<Vec<f64>>, x: &Vec<f64>| {
        atoms.iter().any(|a| {
            let d2: f64 = a.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum();
            d2.sqrt() <= radius
        })
    };
    let first_index: Vec<Option<usize>> = limit
        .iter()
        .map(|x| {
            let mut first = None;
            for (n, atoms) in sequence.iter().enumerate().rev() {
                if covered(atoms, x) {
                    first = Some(n);
                } else {
                    break;
                }
            }
            first
        })
        .collect();
    let pass = first_index.iter().all(Option::is_some);
    Ok(SupportReport { first_index, pass })
}
