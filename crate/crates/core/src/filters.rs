//! Polynomial graph-convolution kernels: ChebyNet, GCN, SGC, the truncated
//! resolvent-series denoisers, and the feature-corrected adjacency variant
//! that also denoises edges.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{normalized_ops, FeatureMatrix, Graph, NormalizedOps, SparseMatrix};
use crate::{Error, Result};

/// Dense edge correction is refused above this size; the n x n feature
/// gram matrix stops being a desk-scale object.
pub const GSDNEF_DENSE_CAP: usize = 5000;

/// Chebyshev filter coefficients theta_0..theta_K over the rescaled
/// Laplacian L~ = (2/lambda_max) L_n - I.
#[derive(Debug, Clone)]
pub struct ChebyCoeffs {
    pub theta: Vec<f64>,
    pub lambda_max: f64,
}

impl ChebyCoeffs {
    /// Coefficients under the lambda_max = 2 convention, where L~ = -A_n.
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        Self::with_lambda_max(theta, 2.0)
    }

    pub fn with_lambda_max(theta: Vec<f64>, lambda_max: f64) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidConfig(
                "chebyshev filter needs at least theta_0".into(),
            ));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("chebyshev coefficients"));
        }
        if !lambda_max.is_finite() || lambda_max <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "lambda_max must be positive and finite, got {lambda_max}"
            )));
        }
        Ok(ChebyCoeffs { theta, lambda_max })
    }

    pub fn order(&self) -> usize {
        self.theta.len() - 1
    }
}

/// Shared knobs of the denoising kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoiseConfig {
    /// Smoothing weight a = 1/(1+g). Values above 1 flip the leading sign
    /// on purpose; at or above 2 the series terms can grow on any graph and
    /// a diagnostic is logged.
    pub alpha: f64,
    /// Polynomial order K.
    pub k_order: usize,
    /// Strength of the feature-similarity edge correction.
    pub beta: f64,
    /// Restrict the edge correction to the support of A.
    pub sparse_edge_mask: bool,
    /// Keep the self-similarity diagonal of the correction instead of
    /// zeroing it (deviation knob; default off).
    pub keep_correction_diagonal: bool,
}

impl DenoiseConfig {
    pub fn new(alpha: f64, k_order: usize) -> Self {
        DenoiseConfig {
            alpha,
            k_order,
            beta: 0.0,
            sparse_edge_mask: false,
            keep_correction_diagonal: false,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_sparse_mask(mut self, on: bool) -> Self {
        self.sparse_edge_mask = on;
        self
    }

    pub fn with_kept_diagonal(mut self, on: bool) -> Self {
        self.keep_correction_diagonal = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::AlphaOutOfRange { alpha: self.alpha });
        }
        if !self.beta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "beta must be finite, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

fn check_rows(n: usize, x: &FeatureMatrix, context: &'static str) -> Result<()> {
    if x.nrows() != n {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("{n} rows"),
            got: format!("{} rows", x.nrows()),
        });
    }
    Ok(())
}

fn cheby_series(
    lap_norm: &SparseMatrix,
    coeffs: &ChebyCoeffs,
    x: &FeatureMatrix,
) -> Result<FeatureMatrix> {
    check_rows(lap_norm.n_rows(), x, "cheby_apply")?;
    let scale = 2.0 / coeffs.lambda_max;
    let apply_lt = |v: &FeatureMatrix| -> Result<FeatureMatrix> {
        let mut lv = lap_norm.mul_dense(v)?;
        lv *= scale;
        lv -= v;
        Ok(lv)
    };
    let mut y = x * coeffs.theta[0];
    if coeffs.order() >= 1 {
        let mut t_prev = x.clone();
        let mut t_cur = apply_lt(x)?;
        y.scaled_add(coeffs.theta[1], &t_cur);
        for k in 2..=coeffs.order() {
            let mut t_next = apply_lt(&t_cur)?;
            t_next *= 2.0;
            t_next -= &t_prev;
            y.scaled_add(coeffs.theta[k], &t_next);
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    Ok(y)
}

fn resolvent_series(
    a: &SparseMatrix,
    alpha: f64,
    k_order: usize,
    x: &FeatureMatrix,
) -> Result<FeatureMatrix> {
    check_rows(a.n_rows(), x, "resolvent series kernel")?;
    if alpha >= 2.0 {
        log::warn!(
            "alpha = {alpha} >= 2: truncated series terms can grow as (2 alpha)^k; \
             output is exact but likely useless"
        );
    }
    let mut y = x.clone();
    for _ in 0..k_order {
        let mut ay = a.mul_dense(&y)?;
        ay *= alpha;
        ay += x;
        y = ay;
    }
    y *= 1.0 - alpha;
    Ok(y)
}

/// ChebyNet filter: sum_k theta_k T_k(L~) x by the two-term recurrence
/// T_k = 2 L~ T_{k-1} - T_{k-2}.
pub fn cheby_apply(
    ops: &NormalizedOps,
    coeffs: &ChebyCoeffs,
    x: &FeatureMatrix,
) -> Result<FeatureMatrix> {
    cheby_series(&ops.lap_norm, coeffs, x)
}

/// GCN propagation: one multiplication by the renormalized adjacency A~_n.
pub fn gcn_apply(ops: &NormalizedOps, x: &FeatureMatrix) -> Result<FeatureMatrix> {
    check_rows(ops.node_count(), x, "gcn_apply")?;
    ops.a_renorm.mul_dense(x)
}

/// SGC propagation: k repeated A~_n multiplications, never materializing
/// the dense power.
pub fn sgc_apply(ops: &NormalizedOps, k: usize, x: &FeatureMatrix) -> Result<FeatureMatrix> {
    if k == 0 {
        return Err(Error::InvalidConfig("sgc order must be >= 1".into()));
    }
    check_rows(ops.node_count(), x, "sgc_apply")?;
    let mut y = ops.a_renorm.mul_dense(x)?;
    for _ in 1..k {
        y = ops.a_renorm.mul_dense(&y)?;
    }
    Ok(y)
}

/// Feature-denoising kernel: (1-a) sum_{k=0}^{K} (a A_n)^k x, evaluated as
/// a Horner recurrence y <- x + a A_n y.
pub fn gsdnf_apply(
    ops: &NormalizedOps,
    cfg: &DenoiseConfig,
    x: &FeatureMatrix,
) -> Result<FeatureMatrix> {
    cfg.validate()?;
    resolvent_series(&ops.a_norm, cfg.alpha, cfg.k_order, x)
}

/// Builds the feature-corrected adjacency A^ = A_n + beta X X^T / ||X||^2
/// (negatives clamped, correction diagonal zeroed unless configured
/// otherwise) and returns it as a weighted graph together with its
/// normalized operators; the `.a_norm` of the result is the renormalized
/// A^_n the edge-denoising kernel propagates with.
pub fn gsdnef_denoise_adjacency(
    g: &Graph,
    ops: &NormalizedOps,
    x: &FeatureMatrix,
    cfg: &DenoiseConfig,
) -> Result<(Graph, NormalizedOps)> {
    cfg.validate()?;
    let n = g.node_count();
    check_rows(n, x, "gsdnef_denoise_adjacency")?;
    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    if !norm_sq.is_finite() || norm_sq == 0.0 {
        return Err(Error::NonFinite("feature norm for the edge correction"));
    }
    let scale = cfg.beta / norm_sq;

    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    if cfg.sparse_edge_mask {
        // Correction only where A already has support; diagonal excluded.
        for e in g.edges() {
            let base = ops.a_norm.get(e.i, e.j);
            let v = if e.i == e.j {
                base
            } else {
                base + scale * x.row(e.i).dot(&x.row(e.j))
            };
            if v > 0.0 {
                triplets.push((e.i, e.j, v));
            }
        }
    } else {
        if n > GSDNEF_DENSE_CAP {
            return Err(Error::DenseCapExceeded {
                n,
                cap: GSDNEF_DENSE_CAP,
            });
        }
        let mut dense = x.dot(&x.t());
        dense *= scale;
        if !cfg.keep_correction_diagonal {
            for i in 0..n {
                dense[(i, i)] = 0.0;
            }
        }
        for (i, j, v) in ops.a_norm.entries() {
            dense[(i, j)] += v;
        }
        for i in 0..n {
            for j in i..n {
                let v = dense[(i, j)];
                if v > 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
    }

    let denoised = Graph::build_with_self_loops(n, &triplets)?;
    let degrees = denoised.degrees();
    if let Some(node) = degrees.iter().position(|&d| d == 0.0) {
        return Err(Error::IsolatedAfterClamp { node });
    }
    let denoised_ops = normalized_ops(&denoised)?;
    Ok((denoised, denoised_ops))
}

/// Edge-and-feature denoising kernel: the resolvent series of
/// [`gsdnf_apply`] over the renormalized corrected adjacency A^_n.
pub fn gsdnef_apply(
    denoised: &NormalizedOps,
    cfg: &DenoiseConfig,
    x: &FeatureMatrix,
) -> Result<FeatureMatrix> {
    cfg.validate()?;
    resolvent_series(&denoised.a_norm, cfg.alpha, cfg.k_order, x)
}

/// First-order kernel without the renormalization trick: (I + A_n) x.
pub fn no_renorm_apply(ops: &NormalizedOps, x: &FeatureMatrix) -> Result<FeatureMatrix> {
    check_rows(ops.node_count(), x, "no_renorm_apply")?;
    let mut y = ops.a_norm.mul_dense(x)?;
    y += x;
    Ok(y)
}

/// Re-parametrizes the truncated resolvent series as Chebyshev coefficients:
/// the returned theta satisfy cheby_apply(theta) = gsdnf_apply(alpha, K)
/// exactly, exhibiting the denoising kernel inside ChebyNet's span.
///
/// Uses A_n = (1 - lambda_max/2) I - (lambda_max/2) L~ and Horner in the
/// Chebyshev basis, where t * T_m = (T_{m+1} + T_{m-1}) / 2.
pub fn gsdnf_as_cheby_coeffs(alpha: f64, k_order: usize, lambda_max: f64) -> Result<ChebyCoeffs> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    let c0 = 1.0 - lambda_max / 2.0;
    let c1 = -lambda_max / 2.0;
    let monomial = |j: usize| (1.0 - alpha) * alpha.powi(j as i32);

    let mut q = vec![monomial(k_order)];
    for j in (0..k_order).rev() {
        let mut r = vec![0.0; q.len() + 1];
        for (m, &qm) in q.iter().enumerate() {
            r[m] += c0 * qm;
            if m == 0 {
                r[1] += c1 * qm;
            } else {
                r[m + 1] += c1 * qm / 2.0;
                r[m - 1] += c1 * qm / 2.0;
            }
        }
        r[0] += monomial(j);
        q = r;
    }
    ChebyCoeffs::with_lambda_max(q, lambda_max)
}

/// Kernel selector shared by the experiment drivers and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    Cheby,
    Gcn,
    Sgc,
    GsdnF,
    GsdnEf,
    GsdnEfSparse,
    IPlusAn,
    Identity,
}

impl Kernel {
    pub const ALL: [Kernel; 8] = [
        Kernel::Cheby,
        Kernel::Gcn,
        Kernel::Sgc,
        Kernel::GsdnF,
        Kernel::GsdnEf,
        Kernel::GsdnEfSparse,
        Kernel::IPlusAn,
        Kernel::Identity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Cheby => "cheby",
            Kernel::Gcn => "gcn",
            Kernel::Sgc => "sgc",
            Kernel::GsdnF => "gsdn-f",
            Kernel::GsdnEf => "gsdn-ef",
            Kernel::GsdnEfSparse => "gsdn-ef-sparse",
            Kernel::IPlusAn => "i-plus-an",
            Kernel::Identity => "identity",
        }
    }

    /// Binds the kernel to a graph, yielding the fixed linear map it applies
    /// per layer. The edge-denoising variants build their corrected
    /// adjacency from `raw_features` here, once.
    pub fn prepare(
        &self,
        g: &Graph,
        ops: &NormalizedOps,
        raw_features: &FeatureMatrix,
        cfg: &DenoiseConfig,
    ) -> Result<PreparedKernel> {
        Ok(match self {
            Kernel::Identity => PreparedKernel::Identity,
            Kernel::Gcn => PreparedKernel::Propagate {
                a: ops.a_renorm.clone(),
                k: 1,
            },
            Kernel::Sgc => {
                if cfg.k_order == 0 {
                    return Err(Error::InvalidConfig("sgc order must be >= 1".into()));
                }
                PreparedKernel::Propagate {
                    a: ops.a_renorm.clone(),
                    k: cfg.k_order,
                }
            }
            Kernel::Cheby => PreparedKernel::Cheby {
                lap_norm: ops.lap_norm.clone(),
                coeffs: ChebyCoeffs::new(vec![1.0; cfg.k_order + 1])?,
            },
            Kernel::GsdnF => {
                cfg.validate()?;
                PreparedKernel::Resolvent {
                    a: ops.a_norm.clone(),
                    alpha: cfg.alpha,
                    k: cfg.k_order,
                }
            }
            Kernel::GsdnEf | Kernel::GsdnEfSparse => {
                let mut ef_cfg = cfg.clone();
                ef_cfg.sparse_edge_mask =
                    cfg.sparse_edge_mask || *self == Kernel::GsdnEfSparse;
                let (_, denoised) = gsdnef_denoise_adjacency(g, ops, raw_features, &ef_cfg)?;
                PreparedKernel::Resolvent {
                    a: denoised.a_norm,
                    alpha: cfg.alpha,
                    k: cfg.k_order,
                }
            }
            Kernel::IPlusAn => PreparedKernel::PlusIdentity {
                a: ops.a_norm.clone(),
            },
        })
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Kernel::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown kernel {s:?}, expected one of {}",
                    names.join(" | ")
                ))
            })
    }
}

/// A kernel bound to its graph, acting as a fixed symmetric linear map.
/// Symmetry means the map is its own adjoint, which the classifier's
/// backward pass relies on.
#[derive(Debug, Clone)]
pub enum PreparedKernel {
    Identity,
    /// k-fold multiplication by a fixed operator (GCN at k=1, SGC beyond).
    Propagate { a: SparseMatrix, k: usize },
    Cheby {
        lap_norm: SparseMatrix,
        coeffs: ChebyCoeffs,
    },
    /// (1-a) sum (a M)^k over A_n or a corrected A^_n.
    Resolvent { a: SparseMatrix, alpha: f64, k: usize },
    /// (I + A_n), the un-renormalized first-order kernel.
    PlusIdentity { a: SparseMatrix },
}

impl PreparedKernel {
    pub fn apply(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        match self {
            PreparedKernel::Identity => Ok(x.clone()),
            PreparedKernel::Propagate { a, k } => {
                let mut y = a.mul_dense(x)?;
                for _ in 1..*k {
                    y = a.mul_dense(&y)?;
                }
                Ok(y)
            }
            PreparedKernel::Cheby { lap_norm, coeffs } => cheby_series(lap_norm, coeffs, x),
            PreparedKernel::Resolvent { a, alpha, k } => resolvent_series(a, *alpha, *k, x),
            PreparedKernel::PlusIdentity { a } => {
                let mut y = a.mul_dense(x)?;
                y += x;
                Ok(y)
            }
        }
    }
}
