//! Fixed-order reductions.
//!
//! Every sum over grid nodes or ensemble members goes through [`pairwise_sum`],
//! whose association tree depends only on the input length. Results are
//! therefore bitwise reproducible regardless of how the inputs were produced
//! (serially or by any number of workers).

const LEAF: usize = 8;

/// Pairwise (cascade) summation with a fixed split point at `len / 2`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(x)` over `values`, without allocating.
pub fn pairwise_sum_by<T, F>(values: &[T], f: &F) -> f64
where
    F: Fn(&T) -> f64,
{
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for v in values {
            acc += f(v);
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum_by(&values[..mid], f) + pairwise_sum_by(&values[mid..], f)
}

/// Pairwise sum of `f(i)` for `i` in `0..len`.
pub fn pairwise_sum_indexed<F>(len: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64,
{
    fn go<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= LEAF {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            return acc;
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, len, f)
}

/// Weighted sum `Σ w_i x_i` with the same fixed tree.
pub fn weighted_sum(weights: &[f64], values: &[f64]) -> f64 {
    assert_eq!(weights.len(), values.len());
    pairwise_sum_indexed(weights.len(), &|i| weights[i] * values[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_on_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        assert_eq!(pairwise_sum_indexed(v.len(), &|i| v[i]), 500_500.0);
        assert_eq!(pairwise_sum_by(&v, &|x| *x), 500_500.0);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn tree_is_independent_of_entry_point() {
        let v: Vec<f64> = (0..777).map(|i| (i as f64 * 0.37).sin() * 1e-3 + 1.0).collect();
        let a = pairwise_sum(&v);
        let b = pairwise_sum_indexed(v.len(), &|i| v[i]);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
