//! Noise injection, denoising reports, the alternating solver for the
//! joint feature-and-edge problem, and the attention-correlation
//! diagnostic over existing edges.

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::graph::{normalized_ops, total_variation, FeatureMatrix, Graph, NormalizedOps};
use crate::spectral::resolvent_solve;
use crate::stats::spearman;
use crate::{Error, Result};

pub const PROBLEM2_DEFAULT_ITERS: usize = 10;
pub const PROBLEM2_DEFAULT_TOL: f64 = 1e-6;

/// Noise protocol: additive Gaussian feature noise plus random edge
/// additions/removals, all driven by one seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub mu: f64,
    pub sigma: f64,
    /// r = (noisy edge operations) / (original edge count).
    pub edge_ratio: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn features(sigma: f64, seed: u64) -> Self {
        NoiseSpec {
            mu: 0.0,
            sigma,
            edge_ratio: 0.0,
            seed,
        }
    }

    pub fn edges(edge_ratio: f64, seed: u64) -> Self {
        NoiseSpec {
            mu: 0.0,
            sigma: 0.0,
            edge_ratio,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise mean/std must be finite with sigma >= 0, got mu={} sigma={}",
                self.mu, self.sigma
            )));
        }
        if !self.edge_ratio.is_finite() || self.edge_ratio < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "edge_ratio must be finite and >= 0, got {}",
                self.edge_ratio
            )));
        }
        Ok(())
    }
}

/// Row-normalization flavor for raw features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureNorm {
    L1,
    L2,
}

/// Normalizes each row to unit L1 (or L2) norm. Zero rows pass through
/// unchanged and are reported by index.
pub fn normalize_features(
    x: &FeatureMatrix,
    norm: FeatureNorm,
) -> Result<(FeatureMatrix, Vec<usize>)> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("features to normalize"));
    }
    let mut out = x.clone();
    let mut zero_rows = Vec::new();
    for (i, mut row) in out.outer_iter_mut().enumerate() {
        let scale = match norm {
            FeatureNorm::L1 => row.iter().map(|v| v.abs()).sum::<f64>(),
            FeatureNorm::L2 => row.iter().map(|v| v * v).sum::<f64>().sqrt(),
        };
        if scale == 0.0 {
            zero_rows.push(i);
        } else {
            row.mapv_inplace(|v| v / scale);
        }
    }
    Ok((out, zero_rows))
}

/// X + Z with Z i.i.d. Normal(mu, sigma^2), fully determined by the seed.
/// sigma = 0 returns the input bit-for-bit.
pub fn inject_feature_noise(x: &FeatureMatrix, spec: &NoiseSpec) -> Result<FeatureMatrix> {
    spec.validate()?;
    if spec.sigma == 0.0 && spec.mu == 0.0 {
        return Ok(x.clone());
    }
    let normal = Normal::new(spec.mu, spec.sigma)
        .map_err(|e| Error::InvalidConfig(format!("bad noise parameters: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = x.clone();
    out.mapv_inplace(|v| v + normal.sample(&mut rng));
    Ok(out)
}

/// Applies floor(edge_ratio * |E|) edge operations, each independently a
/// 50/50 choice between removing a random existing edge and adding a
/// random absent pair at unit weight. Removals that would isolate a node
/// are resampled.
pub fn inject_edge_noise(g: &Graph, spec: &NoiseSpec) -> Result<Graph> {
    spec.validate()?;
    if spec.edge_ratio == 0.0 {
        return Ok(g.clone());
    }
    let n = g.node_count();
    let n_ops = (spec.edge_ratio * g.edge_count() as f64).floor() as usize;
    if n_ops == 0 {
        return Err(Error::EdgeNoiseInfeasible(format!(
            "edge_ratio {} on {} edges yields no whole operation",
            spec.edge_ratio,
            g.edge_count()
        )));
    }

    let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut loops: Vec<(usize, usize, f64)> = Vec::new();
    let mut incident = vec![0usize; n];
    for e in g.edges() {
        if e.i == e.j {
            // Self-loops are outside the add/remove protocol.
            loops.push((e.i, e.j, e.weight));
            incident[e.i] += 1;
        } else {
            weights.insert((e.i, e.j), e.weight);
            incident[e.i] += 1;
            incident[e.j] += 1;
        }
    }
    let mut pairs: Vec<(usize, usize)> = weights.keys().copied().collect();
    let max_pairs = n * (n - 1) / 2;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..n_ops {
        if rng.random_bool(0.5) {
            // Addition of an absent pair.
            if pairs.len() >= max_pairs {
                return Err(Error::EdgeNoiseInfeasible(
                    "graph is complete, no absent pair to add".into(),
                ));
            }
            loop {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                if a == b {
                    continue;
                }
                let key = (a.min(b), a.max(b));
                if weights.contains_key(&key) {
                    continue;
                }
                weights.insert(key, 1.0);
                pairs.push(key);
                incident[key.0] += 1;
                incident[key.1] += 1;
                break;
            }
        } else {
            // Removal of an existing pair that leaves no node isolated.
            let mut attempts = 0;
            let max_attempts = 50 * pairs.len().max(1);
            loop {
                if pairs.is_empty() {
                    return Err(Error::EdgeNoiseInfeasible(
                        "no removable edge left".into(),
                    ));
                }
                if attempts >= max_attempts {
                    return Err(Error::EdgeNoiseInfeasible(
                        "every removal candidate would isolate a node".into(),
                    ));
                }
                attempts += 1;
                let idx = rng.random_range(0..pairs.len());
                let key = pairs[idx];
                if incident[key.0] <= 1 || incident[key.1] <= 1 {
                    continue;
                }
                pairs.swap_remove(idx);
                weights.remove(&key);
                incident[key.0] -= 1;
                incident[key.1] -= 1;
                break;
            }
        }
    }

    let mut edge_list: Vec<(usize, usize, f64)> = weights
        .into_iter()
        .map(|((i, j), w)| (i, j, w))
        .collect();
    edge_list.extend(loops);
    Graph::build_with_self_loops(n, &edge_list)
}

/// Per-node noise magnitudes and smoothness before/after denoising.
#[derive(Debug, Clone, Serialize)]
pub struct DenoiseReport {
    pub per_node_noise_before: Vec<f64>,
    pub per_node_noise_after: Vec<f64>,
    pub mean_noise_before: f64,
    pub mean_noise_after: f64,
    pub tv_before: f64,
    pub tv_after: f64,
}

/// Measures how far the kernel output and the noisy input sit from the
/// ground truth, per node, plus total variation of both signals.
pub fn denoise_report(
    ops: &NormalizedOps,
    kernel_output: &FeatureMatrix,
    ground_truth: &FeatureMatrix,
    noisy_input: &FeatureMatrix,
) -> Result<DenoiseReport> {
    let n = ops.node_count();
    for (m, what) in [
        (kernel_output, "kernel output"),
        (ground_truth, "ground truth"),
        (noisy_input, "noisy input"),
    ] {
        if m.nrows() != n || m.dim() != kernel_output.dim() {
            return Err(Error::DimensionMismatch {
                context: "denoise_report",
                expected: format!("{n} x {} like the kernel output", kernel_output.ncols()),
                got: format!("{} x {} for {what}", m.nrows(), m.ncols()),
            });
        }
    }
    let row_dist = |a: &FeatureMatrix, b: &FeatureMatrix, i: usize| -> f64 {
        a.row(i)
            .iter()
            .zip(b.row(i).iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let before: Vec<f64> = (0..n).map(|i| row_dist(noisy_input, ground_truth, i)).collect();
    let after: Vec<f64> = (0..n).map(|i| row_dist(kernel_output, ground_truth, i)).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    Ok(DenoiseReport {
        mean_noise_before: mean(&before),
        mean_noise_after: mean(&after),
        per_node_noise_before: before,
        per_node_noise_after: after,
        tv_before: total_variation(ops, noisy_input)?,
        tv_after: total_variation(ops, kernel_output)?,
    })
}

impl DenoiseReport {
    /// CSV rows `node_id,noise_before,noise_after`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "node_id,noise_before,noise_after")?;
        for (i, (b, a)) in self
            .per_node_noise_before
            .iter()
            .zip(&self.per_node_noise_after)
            .enumerate()
        {
            writeln!(w, "{i},{b},{a}")?;
        }
        Ok(())
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "tv_before": self.tv_before,
            "tv_after": self.tv_after,
            "mean_noise": self.mean_noise_after,
            "mean_noise_before": self.mean_noise_before,
        })
    }
}

/// Result of the alternating feature/edge denoising iteration.
#[derive(Debug, Clone)]
pub struct Problem2Solution {
    pub x_hat: FeatureMatrix,
    /// Final corrected adjacency A^_n = A_n + sqrt(eps2) X^ X^T / ||X^||^2.
    pub a_hat: Array2<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Alternates the closed-form feature update
/// X^ <- (1-a)(I - a A^_n)^{-1} X with the edge update
/// A^_n <- A_n + sqrt(eps2) X^ X^T / ||X^||^2, starting from
/// X^ = X, A^_n = A_n. Stops after `iters` rounds or when successive X^
/// change less than `tol` in Frobenius norm; non-convergence is reported
/// through the flag, not an error.
pub fn problem2_solve(
    g: &Graph,
    x: &FeatureMatrix,
    alpha: f64,
    eps2: f64,
    iters: usize,
    tol: f64,
) -> Result<Problem2Solution> {
    if !(alpha > 0.0 && alpha < 1.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    if !eps2.is_finite() || eps2 < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "eps2 must be finite and >= 0, got {eps2}"
        )));
    }
    if iters == 0 {
        return Err(Error::InvalidConfig("need at least one iteration".into()));
    }
    let ops = normalized_ops(g)?;
    let a_norm = ops.a_norm.to_dense();
    let sqrt_eps = eps2.sqrt();

    let mut a_hat = a_norm.clone();
    let mut x_prev = x.clone();
    for t in 1..=iters {
        let x_new = resolvent_solve(&a_hat, x, alpha)?;
        if eps2 > 0.0 {
            let norm_sq: f64 = x_new.iter().map(|v| v * v).sum();
            if !norm_sq.is_finite() || norm_sq == 0.0 {
                return Err(Error::NonFinite("denoised features in edge update"));
            }
            a_hat = &a_norm + &(x_new.dot(&x_new.t()) * (sqrt_eps / norm_sq));
        }
        let change = (&x_new - &x_prev).iter().map(|v| v * v).sum::<f64>().sqrt();
        x_prev = x_new;
        if change < tol {
            return Ok(Problem2Solution {
                x_hat: x_prev,
                a_hat,
                iterations: t,
                converged: true,
            });
        }
    }
    Ok(Problem2Solution {
        x_hat: x_prev,
        a_hat,
        iterations: iters,
        converged: false,
    })
}

/// Spearman correlation between training-free attention coefficients
/// (softmax over the closed neighborhood of the feature cosine
/// similarities) and the jointly denoised edge weights, compared on the
/// directed existing-edge pairs.
pub fn prop2_attention_correlation(
    g: &Graph,
    x: &FeatureMatrix,
    alpha: f64,
    eps2: f64,
) -> Result<f64> {
    if g.edge_count() < 10 {
        return Err(Error::InvalidConfig(format!(
            "attention diagnostic needs >= 10 edges, got {}",
            g.edge_count()
        )));
    }
    let n = g.node_count();
    if x.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "prop2_attention_correlation",
            expected: format!("{n} rows"),
            got: format!("{} rows", x.nrows()),
        });
    }

    let row_norms: Vec<f64> = (0..n)
        .map(|i| x.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let excluded: Vec<usize> = (0..n).filter(|&i| row_norms[i] == 0.0).collect();
    if !excluded.is_empty() {
        log::warn!(
            "{} zero-norm feature rows excluded from attention (first: node {})",
            excluded.len(),
            excluded[0]
        );
    }
    let usable = |i: usize| row_norms[i] > 0.0;
    let cosine = |i: usize, j: usize| x.row(i).dot(&x.row(j)) / (row_norms[i] * row_norms[j]);

    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in g.edge_pairs() {
        if i != j {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
    }

    let solution = problem2_solve(g, x, alpha, eps2, PROBLEM2_DEFAULT_ITERS, PROBLEM2_DEFAULT_TOL)?;

    let mut attention = Vec::new();
    let mut denoised = Vec::new();
    for i in 0..n {
        if !usable(i) {
            continue;
        }
        let members: Vec<usize> = std::iter::once(i)
            .chain(neighbors[i].iter().copied())
            .filter(|&j| usable(j))
            .collect();
        let exps: Vec<f64> = members.iter().map(|&j| cosine(i, j).exp()).collect();
        let denom: f64 = exps.iter().sum();
        for (&j, &e) in members.iter().zip(&exps) {
            if j != i {
                attention.push(e / denom);
                denoised.push(solution.a_hat[(i, j)]);
            }
        }
    }
    spearman(&attention, &denoised)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::closed_form_denoise;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn p2() -> Graph {
        Graph::build(2, &[(0, 1, 1.0)]).unwrap()
    }

    fn ring(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Graph::build(n, &edges).unwrap()
    }

    #[test]
    fn normalize_l1_hand_values() {
        let x = array![[2.0, 2.0], [0.0, 0.0], [3.0, -1.0]];
        let (y, zeros) = normalize_features(&x, FeatureNorm::L1).unwrap();
        assert_eq!(y.row(0).to_vec(), vec![0.5, 0.5]);
        assert_eq!(y.row(1).to_vec(), vec![0.0, 0.0]);
        assert_eq!(y.row(2).to_vec(), vec![0.75, -0.25]);
        assert_eq!(zeros, vec![1]);
    }

    #[test]
    fn normalize_l2_hand_value() {
        let x = array![[3.0, 4.0]];
        let (y, zeros) = normalize_features(&x, FeatureNorm::L2).unwrap();
        assert_abs_diff_eq!(y[(0, 0)], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(y[(0, 1)], 0.8, epsilon = 1e-15);
        assert!(zeros.is_empty());
    }

    #[test]
    fn normalize_rejects_non_finite() {
        let x = array![[1.0, f64::NAN]];
        assert!(matches!(
            normalize_features(&x, FeatureNorm::L1),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn feature_noise_zero_sigma_is_identity() {
        let x = array![[1.0, 2.0], [3.0, 4.0]];
        let y = inject_feature_noise(&x, &NoiseSpec::features(0.0, 7)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn feature_noise_is_deterministic() {
        let x = FeatureMatrix::zeros((5, 3));
        let spec = NoiseSpec::features(0.3, 123);
        let a = inject_feature_noise(&x, &spec).unwrap();
        let b = inject_feature_noise(&x, &spec).unwrap();
        assert_eq!(a, b);
        let c = inject_feature_noise(&x, &NoiseSpec::features(0.3, 124)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn feature_noise_empirical_std() {
        let x = FeatureMatrix::zeros((1000, 1000));
        let sigma = 0.01;
        let y = inject_feature_noise(&x, &NoiseSpec::features(sigma, 99)).unwrap();
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let std = var.sqrt();
        assert!((std - sigma).abs() / sigma < 0.01, "std = {std}");
        assert!(mean.abs() < 3.0 * sigma / n.sqrt() * 3.0);
    }

    #[test]
    fn edge_noise_ratio_zero_is_identity() {
        let g = ring(6);
        let g2 = inject_edge_noise(&g, &NoiseSpec::edges(0.0, 1)).unwrap();
        assert_eq!(g2.edges(), g.edges());
    }

    #[test]
    fn edge_noise_counts_and_invariants() {
        let g = ring(40);
        let spec = NoiseSpec::edges(0.2, 11);
        let noisy = inject_edge_noise(&g, &spec).unwrap();
        assert_eq!(noisy.node_count(), g.node_count());
        // 8 operations on 40 edges: net change bounded by the op count,
        // and something must have changed.
        let before: std::collections::HashSet<_> = g.edge_pairs().collect();
        let after: std::collections::HashSet<_> = noisy.edge_pairs().collect();
        let added = after.difference(&before).count();
        let removed = before.difference(&after).count();
        assert!(added + removed > 0);
        assert!(added + removed <= 8);
        for e in noisy.edges() {
            assert!(e.weight > 0.0);
        }
        for d in noisy.degrees() {
            assert!(d > 0.0, "edge noise isolated a node");
        }
        let again = inject_edge_noise(&g, &spec).unwrap();
        assert_eq!(again.edges(), noisy.edges());
    }

    #[test]
    fn edge_noise_below_one_operation_errors() {
        let g = ring(6);
        assert!(matches!(
            inject_edge_noise(&g, &NoiseSpec::edges(0.1, 1)),
            Err(Error::EdgeNoiseInfeasible(_))
        ));
    }

    #[test]
    fn edge_noise_respects_connectivity_or_reports() {
        // A star's removals all isolate leaves, so any removal attempt
        // must end in the explicit infeasibility error.
        let star = Graph::build(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let mut saw_error = false;
        let mut saw_success = false;
        for seed in 0..20 {
            match inject_edge_noise(&star, &NoiseSpec::edges(1.0, seed)) {
                Ok(g) => {
                    saw_success = true;
                    for d in g.degrees() {
                        assert!(d > 0.0);
                    }
                }
                Err(Error::EdgeNoiseInfeasible(_)) => saw_error = true,
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
        assert!(saw_error && saw_success);
    }

    #[test]
    fn report_hand_cases() {
        let g = p2();
        let ops = normalized_ops(&g).unwrap();
        let gt = array![[1.0, 0.0], [0.0, 1.0]];
        let noisy = array![[1.0, 0.5], [0.5, 1.0]];

        let perfect = denoise_report(&ops, &gt, &gt, &noisy).unwrap();
        assert_eq!(perfect.per_node_noise_after, vec![0.0, 0.0]);
        assert_abs_diff_eq!(perfect.per_node_noise_before[0], 0.5, epsilon = 1e-15);

        let unchanged = denoise_report(&ops, &noisy, &gt, &noisy).unwrap();
        assert_eq!(
            unchanged.per_node_noise_after,
            unchanged.per_node_noise_before
        );
    }

    #[test]
    fn report_csv_and_summary_layout() {
        let g = p2();
        let ops = normalized_ops(&g).unwrap();
        let gt = array![[1.0], [0.0]];
        let out = array![[1.0], [0.0]];
        let noisy = array![[2.0], [0.0]];
        let report = denoise_report(&ops, &out, &gt, &noisy).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "node_id,noise_before,noise_after\n0,1,0\n1,0,0\n");
        let summary = report.summary();
        assert_eq!(summary["mean_noise"], 0.0);
        assert!(summary["tv_before"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn problem2_eps_zero_matches_closed_form_exactly() {
        let g = ring(5);
        let ops = normalized_ops(&g).unwrap();
        let x = array![[1.0], [0.0], [2.0], [-1.0], [0.5]];
        let sol = problem2_solve(&g, &x, 0.6, 0.0, 10, 1e-6).unwrap();
        let oracle = closed_form_denoise(&ops.a_norm, &x, 0.6).unwrap();
        assert_eq!(sol.x_hat, oracle);
        assert!(sol.converged);
        assert_eq!(sol.iterations, 2);
        assert_eq!(sol.a_hat, ops.a_norm.to_dense());
    }

    #[test]
    fn problem2_single_iteration_unrolls_the_definition() {
        let g = ring(5);
        let ops = normalized_ops(&g).unwrap();
        let x = array![[1.0], [0.0], [2.0], [-1.0], [0.5]];
        let eps2 = 0.25;
        let sol = problem2_solve(&g, &x, 0.5, eps2, 1, 1e-12).unwrap();
        assert!(!sol.converged);
        let x1 = closed_form_denoise(&ops.a_norm, &x, 0.5).unwrap();
        let norm_sq: f64 = x1.iter().map(|v| v * v).sum();
        let want = &ops.a_norm.to_dense() + &(x1.dot(&x1.t()) * (eps2.sqrt() / norm_sq));
        for (a, b) in sol.a_hat.iter().zip(want.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn problem2_smooth_signal_is_a_fixed_point() {
        // The first feature update leaves a smooth signal unchanged, so
        // the alternation converges immediately for every alpha and eps2.
        let g = p2();
        let x = array![[1.0], [1.0]];
        for alpha in [0.3, 0.5, 0.8] {
            for eps2 in [0.0, 0.04] {
                let sol = problem2_solve(&g, &x, alpha, eps2, 10, 1e-9).unwrap();
                assert_abs_diff_eq!(sol.x_hat[(0, 0)], 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(sol.x_hat[(1, 0)], 1.0, epsilon = 1e-12);
                assert!(sol.converged);
                assert_eq!(sol.iterations, 1);
            }
        }
    }

    #[test]
    fn problem2_edge_update_lands_in_a_hat() {
        let g = p2();
        let x = array![[1.0], [1.0]];
        let sol = problem2_solve(&g, &x, 0.5, 0.04, 10, 1e-9).unwrap();
        // A^ = A_n + 0.2 * (x x^T) / 2 on the unit square signal.
        let want = array![[0.1, 1.1], [1.1, 0.1]];
        for (a, b) in sol.a_hat.iter().zip(want.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn problem2_validates_inputs() {
        let g = p2();
        let x = array![[1.0], [0.0]];
        assert!(matches!(
            problem2_solve(&g, &x, 1.0, 0.0, 10, 1e-6),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(problem2_solve(&g, &x, 0.5, -1.0, 10, 1e-6).is_err());
        assert!(problem2_solve(&g, &x, 0.5, 0.0, 0, 1e-6).is_err());
    }

    #[test]
    fn prop2_rejects_tiny_graphs() {
        let g = p2();
        let x = array![[1.0], [0.0]];
        assert!(matches!(
            prop2_attention_correlation(&g, &x, 0.5, 0.01),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn prop2_constant_lists_are_degenerate() {
        // Regular ring with identical feature rows: every cosine is 1 and
        // every denoised weight equals the same constant.
        let g = ring(10);
        let x = FeatureMatrix::ones((10, 3));
        assert!(matches!(
            prop2_attention_correlation(&g, &x, 0.5, 0.01),
            Err(Error::DegenerateCorrelation(_))
        ));
    }

    #[test]
    fn prop2_excludes_zero_rows_and_still_works() {
        let g = ring(12);
        let mut x = FeatureMatrix::zeros((12, 2));
        for i in 0..12 {
            x[(i, 0)] = 1.0 + 0.1 * (i as f64);
            x[(i, 1)] = if i % 2 == 0 { 0.8 } else { -0.2 };
        }
        x.row_mut(3).fill(0.0);
        let rho = prop2_attention_correlation(&g, &x, 0.5, 0.01).unwrap();
        assert!((-1.0..=1.0).contains(&rho));
    }
}
