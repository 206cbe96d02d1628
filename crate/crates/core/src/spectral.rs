//! Dense spectral oracle: exact eigendecomposition, graph Fourier
//! transforms, and the closed-form denoiser (1-a)(I - a A_n)^{-1} X.
//!
//! Everything here goes through nalgebra's dense routines so the sparse
//! polynomial kernels can be checked against an independent path.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2};

use crate::graph::{FeatureMatrix, SparseMatrix};
use crate::{Error, Result};

/// Default cap on dense spectral work; beyond this the O(n^3) routines are
/// a mistake, not a computation. Raise it explicitly via the `_capped`
/// variants when you really mean it.
pub const DEFAULT_DENSE_CAP: usize = 2000;

const SYMMETRY_TOL: f64 = 1e-10;

/// Eigendecomposition M = Q diag(w) Q^T of a symmetric operator.
/// Eigenvalues ascend; each eigenvector column is signed so that its
/// largest-magnitude entry (first such on ties) is positive.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Array1<f64>,
    /// Orthonormal eigenvectors, one per column, aligned with `eigenvalues`.
    pub eigenvectors: Array2<f64>,
}

fn to_dmatrix(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn check_square_symmetric(a: &Array2<f64>, cap: usize) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "eigendecompose",
            expected: format!("{n} x {n}"),
            got: format!("{} x {}", a.nrows(), a.ncols()),
        });
    }
    if n > cap {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix for spectral oracle"));
    }
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max_asym = max_asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if max_asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { max_asym });
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric dense matrix under the default
/// size cap.
pub fn eigendecompose(a: &Array2<f64>) -> Result<EigenSystem> {
    eigendecompose_capped(a, DEFAULT_DENSE_CAP)
}

/// Eigendecomposition with an explicit size cap.
pub fn eigendecompose_capped(a: &Array2<f64>, cap: usize) -> Result<EigenSystem> {
    check_square_symmetric(a, cap)?;
    let n = a.nrows();
    let se = nalgebra::linalg::SymmetricEigen::new(to_dmatrix(a));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));

    let eigenvalues = Array1::from_iter(order.iter().map(|&k| se.eigenvalues[k]));
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        let v = se.eigenvectors.column(k);
        let mut lead = 0;
        for i in 1..n {
            if v[i].abs() > v[lead].abs() {
                lead = i;
            }
        }
        let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[(i, col)] = sign * v[i];
        }
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigendecomposition of a sparse symmetric operator via densification.
pub fn eigendecompose_sparse(m: &SparseMatrix) -> Result<EigenSystem> {
    eigendecompose(&m.to_dense())
}

/// Forward graph Fourier transform X^ = Q^T X.
pub fn graph_fourier(es: &EigenSystem, x: &FeatureMatrix) -> Result<FeatureMatrix> {
    let n = es.eigenvectors.nrows();
    if x.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "graph_fourier",
            expected: format!("{n} rows"),
            got: format!("{} rows", x.nrows()),
        });
    }
    Ok(es.eigenvectors.t().dot(x))
}

/// Inverse graph Fourier transform X = Q X^.
pub fn graph_fourier_inverse(es: &EigenSystem, coeffs: &FeatureMatrix) -> Result<FeatureMatrix> {
    let n = es.eigenvectors.nrows();
    if coeffs.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "graph_fourier_inverse",
            expected: format!("{n} rows"),
            got: format!("{} rows", coeffs.nrows()),
        });
    }
    Ok(es.eigenvectors.dot(coeffs))
}

/// Applies a spectral response Y = Q h(diag(w)) Q^T X.
pub fn spectral_filter(
    es: &EigenSystem,
    h: impl Fn(f64) -> f64,
    x: &FeatureMatrix,
) -> Result<FeatureMatrix> {
    let mut coeffs = graph_fourier(es, x)?;
    for (k, mut row) in coeffs.outer_iter_mut().enumerate() {
        let scale = h(es.eigenvalues[k]);
        row.mapv_inplace(|v| v * scale);
    }
    graph_fourier_inverse(es, &coeffs)
}

/// Solves (I - a M) Y = (1 - a) X by dense LU. `m` must be the full square
/// operator; callers guarantee symmetry upstream.
pub fn resolvent_solve(m: &Array2<f64>, x: &FeatureMatrix, alpha: f64) -> Result<FeatureMatrix> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "resolvent_solve",
            expected: format!("{n} x {n}"),
            got: format!("{} x {}", m.nrows(), m.ncols()),
        });
    }
    if x.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "resolvent_solve",
            expected: format!("{n} rows"),
            got: format!("{} rows", x.nrows()),
        });
    }
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let mut system = to_dmatrix(m);
    system *= -alpha;
    for i in 0..n {
        system[(i, i)] += 1.0;
    }
    let rhs = DMatrix::from_fn(n, x.ncols(), |i, j| (1.0 - alpha) * x[(i, j)]);
    let lu = nalgebra::linalg::LU::new(system);
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SolverFailure(format!("I - {alpha} M is singular")))?;
    Ok(Array2::from_shape_fn((n, x.ncols()), |(i, j)| sol[(i, j)]))
}

/// Closed-form denoiser X^* = (1-a)(I - a A_n)^{-1} X with a = 1/(1+g),
/// the exact minimizer the polynomial kernels approximate. Requires
/// a in (0, 1), where I - a A_n is strictly diagonally dominant in
/// spectrum and the solve cannot be singular.
pub fn closed_form_denoise(
    a_norm: &SparseMatrix,
    x: &FeatureMatrix,
    alpha: f64,
) -> Result<FeatureMatrix> {
    if !(alpha > 0.0 && alpha < 1.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    resolvent_solve(&a_norm.to_dense(), x, alpha)
}

/// Exact variance and squared bias of the closed-form denoiser
/// H = Q diag(h) Q^T with h_i = (1-a)/(1 - a w_i), under noise covariance
/// diag(`noise_cov_diag`) and clean signal `x_hat` (single column):
/// variance = Tr(H^2 Sigma), bias^2 = ||(H - I) x_hat||^2.
pub fn closed_form_var_bias(
    eig: &EigenSystem,
    alpha: f64,
    x_hat: &FeatureMatrix,
    noise_cov_diag: &[f64],
) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    let n = eig.eigenvectors.nrows();
    if x_hat.nrows() != n || x_hat.ncols() != 1 {
        return Err(Error::DimensionMismatch {
            context: "closed_form_var_bias",
            expected: format!("{n} x 1 signal"),
            got: format!("{} x {}", x_hat.nrows(), x_hat.ncols()),
        });
    }
    if noise_cov_diag.len() != n {
        return Err(Error::DimensionMismatch {
            context: "closed_form_var_bias",
            expected: format!("{n} variances"),
            got: format!("{}", noise_cov_diag.len()),
        });
    }
    let h: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&w| (1.0 - alpha) / (1.0 - alpha * w))
        .collect();

    let mut variance = 0.0;
    for i in 0..n {
        let mut hii = 0.0;
        for k in 0..n {
            let q = eig.eigenvectors[(i, k)];
            hii += h[k] * h[k] * q * q;
        }
        variance += noise_cov_diag[i] * hii;
    }

    let coeffs = graph_fourier(eig, x_hat)?;
    let mut bias_sq = 0.0;
    for k in 0..n {
        let d = (h[k] - 1.0) * coeffs[(k, 0)];
        bias_sq += d * d;
    }
    Ok((variance, bias_sq))
}

/// Trade-off weight a = 1/(1 + g) for regularization strength g > 0.
pub fn alpha_from_gamma(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    Ok(1.0 / (1.0 + gamma))
}
