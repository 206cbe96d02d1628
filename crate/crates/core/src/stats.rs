//! Rank statistics for the experiment checks: Spearman correlation with
//! average-rank tie handling and a permutation trend test.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// 1-based ranks with ties assigned the average of their rank range.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold equal values; average their ranks.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateCorrelation(
            "constant list, correlation undefined",
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation in [-1, 1]. Errors when either list is
/// constant (undefined) or lengths differ.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            context: "spearman",
            expected: format!("{} values", xs.len()),
            got: format!("{} values", ys.len()),
        });
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateCorrelation(
            "need at least 2 paired values",
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("correlation input"));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// One-sided permutation test for a positive monotone trend of `ys` in
/// `xs`. Returns (spearman rho, p-value); small p means the observed
/// positive association is unlikely under shuffled pairing.
pub fn spearman_trend_test(
    xs: &[f64],
    ys: &[f64],
    n_permutations: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let rho = spearman(xs, ys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = ys.to_vec();
    let mut at_least = 0usize;
    for _ in 0..n_permutations {
        shuffled.shuffle(&mut rng);
        // A shuffled copy of a non-constant list stays non-constant.
        let r = spearman(xs, &shuffled)?;
        if r >= rho {
            at_least += 1;
        }
    }
    let p = (1 + at_least) as f64 / (1 + n_permutations) as f64;
    Ok((rho, p))
}

/// Sample mean and standard deviation (n - 1 denominator; 0 for n < 2).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_monotone_agreement() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [10.0, 20.0, 25.0, 40.0, 100.0];
        assert_abs_diff_eq!(spearman(&xs, &ys).unwrap(), 1.0, epsilon = 1e-12);
        let rev: Vec<f64> = ys.iter().rev().copied().collect();
        assert_abs_diff_eq!(spearman(&xs, &rev).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn ties_get_average_ranks() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 1.0, 2.0, 3.0];
        // Ranks of ys are [1.5, 1.5, 3, 4]; Pearson against [1,2,3,4]
        // works out to sqrt(0.9).
        assert_abs_diff_eq!(
            spearman(&xs, &ys).unwrap(),
            0.9f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn invariant_under_monotone_transform() {
        let xs = [0.2, 1.4, -3.0, 2.2, 0.9];
        let ys = [5.0, 1.0, 4.0, 2.0, 3.0];
        let exp_ys: Vec<f64> = ys.iter().map(|v: &f64| v.exp()).collect();
        assert_abs_diff_eq!(
            spearman(&xs, &ys).unwrap(),
            spearman(&xs, &exp_ys).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn degenerate_inputs_error() {
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateCorrelation(_))
        ));
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(spearman(&[1.0], &[2.0]).is_err());
    }

    #[test]
    fn trend_test_detects_increase() {
        let xs: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let (rho, p) = spearman_trend_test(&xs, &ys, 999, 7).unwrap();
        assert_abs_diff_eq!(rho, 1.0, epsilon = 1e-12);
        assert!(p < 0.05, "p = {p}");
    }

    #[test]
    fn trend_test_ignores_noise() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys = [3.0, -1.0, 2.0, 0.5, -2.0, 1.0, 0.0, -0.5, 2.5, -1.5];
        let (_, p) = spearman_trend_test(&xs, &ys, 999, 7).unwrap();
        assert!(p > 0.05, "p = {p}");
    }

    #[test]
    fn trend_test_is_deterministic() {
        let xs: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let ys = [0.1, 0.3, 0.2, 0.5, 0.4, 0.7, 0.6, 0.9];
        let a = spearman_trend_test(&xs, &ys, 500, 42).unwrap();
        let b = spearman_trend_test(&xs, &ys, 500, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mean_std_hand_values() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_abs_diff_eq!(m, 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s * s, 5.0 / 3.0, epsilon = 1e-12);
        let (m1, s1) = mean_std(&[7.0]);
        assert_eq!((m1, s1), (7.0, 0.0));
    }
}
