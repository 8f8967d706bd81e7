//! Matrix kernels shared by the identifiability and recovery layers:
//! truncated SVD, pseudo-inverse, real eigendecomposition, Gram matrices,
//! Kruskal ranks and Kruskal eigenvalues, Hadamard products.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance deciding numerical linear independence: a column
/// subset counts as independent iff `sigma_min > KRUSKAL_TOL * sigma_max`.
pub const KRUSKAL_TOL: f64 = 1e-8;

/// Subset enumeration cap for Kruskal quantities.
pub const MAX_KRUSKAL_COLUMNS: usize = 12;

/// Rank-`m` truncation of a matrix, the operator-norm best approximation.
#[derive(Debug, Clone)]
pub struct SvdTruncation {
    /// Left singular vectors, orthonormal columns (n x m).
    pub u: DMatrix<f64>,
    /// Retained singular values, descending.
    pub sigma: DVector<f64>,
    /// Right singular vectors, orthonormal columns (p x m).
    pub v: DMatrix<f64>,
    /// Operator-norm distance to the input, `sigma_{m+1}`.
    pub residual: f64,
}

impl SvdTruncation {
    /// Reassembles the rank-m matrix `U diag(sigma) V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.u.clone();
        for (mut col, &s) in scaled.column_iter_mut().zip(self.sigma.iter()) {
            col *= s;
        }
        scaled * self.v.transpose()
    }
}

/// Top-`rank` singular triple of `m`, by full SVD.
pub fn truncated_svd(m: &DMatrix<f64>, rank: usize) -> Result<SvdTruncation> {
    let min_dim = m.nrows().min(m.ncols());
    if rank == 0 || rank > min_dim {
        return Err(Error::RankTooLarge { rank, min_dim });
    }
    let svd = m.clone().svd(true, true);
    let u_full = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let sigma = DVector::from_fn(rank, |i, _| svd.singular_values[i]);
    let u = u_full.columns(0, rank).into_owned();
    let v = v_t.rows(0, rank).transpose();
    let residual = if rank < min_dim {
        svd.singular_values[rank]
    } else {
        0.0
    };
    Ok(SvdTruncation {
        u,
        sigma,
        v,
        residual,
    })
}

/// Moore-Penrose inverse of the truncation, `V diag(1/sigma) U^T`.
pub fn pinv_truncated(s: &SvdTruncation) -> Result<DMatrix<f64>> {
    let sigma_max = s.sigma[0];
    let tol = 1e-12 * sigma_max;
    if let Some(&bad) = s.sigma.iter().find(|&&x| x <= tol) {
        return Err(Error::SingularTruncation { sigma: bad, tol });
    }
    let mut scaled = s.v.clone();
    for (mut col, &sv) in scaled.column_iter_mut().zip(s.sigma.iter()) {
        col /= sv;
    }
    Ok(scaled * s.u.transpose())
}

/// Real eigendecomposition of a small square matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues, descending.
    pub values: DVector<f64>,
    /// Unit-L2 eigenvector columns, sign-fixed so the largest-magnitude
    /// entry is positive.
    pub vectors: DMatrix<f64>,
    /// Minimum pairwise eigenvalue separation.
    pub condition_gap: f64,
}

/// Eigendecomposition of a real matrix with real, well-separated spectrum.
///
/// Rejects complex spectra and gaps below `gap_min` instead of repairing
/// them; the recovery layer owns the probe redraw loop. Eigenvectors come
/// from the null direction of `M - lambda I` via SVD, valid because the gap
/// check guarantees one-dimensional eigenspaces.
pub fn eig_real(m: &DMatrix<f64>, gap_min: f64) -> Result<EigenDecomposition> {
    let n = m.nrows();
    if n != m.ncols() || n == 0 {
        return Err(Error::ShapeMismatch(format!(
            "eig_real needs a square nonempty matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if n == 1 {
        return Ok(EigenDecomposition {
            values: DVector::from_element(1, m[(0, 0)]),
            vectors: DMatrix::from_element(1, 1, 1.0),
            condition_gap: f64::INFINITY,
        });
    }
    let schur = m
        .clone()
        .try_schur(1e-14, 10_000)
        .ok_or(Error::ComplexSpectrum { max_imag: f64::NAN })?;
    let complex = schur.complex_eigenvalues();
    let scale = complex.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
    let max_imag = complex.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if max_imag > 1e-9 * scale {
        return Err(Error::ComplexSpectrum { max_imag });
    }
    let mut values: Vec<f64> = complex.iter().map(|c| c.re).collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut gap = f64::INFINITY;
    for w in values.windows(2) {
        gap = gap.min(w[0] - w[1]);
    }
    if gap < gap_min {
        return Err(Error::DegenerateGap { gap, gap_min });
    }
    let mut vectors = DMatrix::zeros(n, n);
    for (i, &lambda) in values.iter().enumerate() {
        let shifted = m - DMatrix::<f64>::identity(n, n) * lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("svd requested v_t");
        let mut v = v_t.row(n - 1).transpose();
        // sign convention: largest-magnitude entry positive
        let lead = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if v[lead] < 0.0 {
            v = -v;
        }
        v /= v.norm();
        vectors.set_column(i, &v);
    }
    Ok(EigenDecomposition {
        values: DVector::from_vec(values),
        vectors,
        condition_gap: gap,
    })
}

/// Gram matrix of a family of equal-length vectors.
pub fn gram(vectors: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = vectors.len();
    let len = vectors.first().map(|v| v.len()).unwrap_or(0);
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::LengthMismatch(
            "gram needs equal-length vectors".into(),
        ));
    }
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
            g[(i, j)] = dot;
            g[(j, i)] = dot;
        }
    }
    Ok(g)
}

fn subset_independent(m: &DMatrix<f64>, subset: &[usize], tol: f64) -> bool {
    let sub = m.select_columns(subset.iter());
    let sv = sub.svd(false, false).singular_values;
    let smax = sv[0];
    let smin = sv[sv.len() - 1];
    smax > 0.0 && smin > tol * smax
}

/// Kruskal rank: the largest `k` such that every `k`-subset of columns is
/// numerically linearly independent at relative tolerance `tol`.
pub fn kruskal_rank(m: &DMatrix<f64>, tol: f64) -> Result<usize> {
    let n = m.ncols();
    if n > MAX_KRUSKAL_COLUMNS {
        return Err(Error::TooManyColumns {
            got: n,
            max: MAX_KRUSKAL_COLUMNS,
        });
    }
    if tol <= 0.0 {
        return Err(Error::RangeViolation("kruskal tol must be positive".into()));
    }
    // a dependent k-subset stays dependent inside any superset, so the
    // first failing k terminates the search
    for k in 1..=n {
        let all_ok = (0..n)
            .combinations(k)
            .all(|subset| subset_independent(m, &subset, tol));
        if !all_ok {
            return Ok(k - 1);
        }
    }
    Ok(n)
}

/// k-th Kruskal eigenvalue of a PSD Gram matrix: the minimum over all
/// size-`k` principal submatrices of their smallest eigenvalue.
pub fn kruskal_eigenvalue(g: &DMatrix<f64>, k: usize) -> Result<f64> {
    let n = g.nrows();
    if n != g.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "expected square matrix, got {}x{}",
            n,
            g.ncols()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::RangeViolation(format!(
            "kruskal eigenvalue order {k} outside 1..={n}"
        )));
    }
    if n > MAX_KRUSKAL_COLUMNS {
        return Err(Error::TooManyColumns {
            got: n,
            max: MAX_KRUSKAL_COLUMNS,
        });
    }
    let mut best = f64::INFINITY;
    for subset in (0..n).combinations(k) {
        let sub = g.select_columns(subset.iter()).select_rows(subset.iter());
        let eigs = sub.symmetric_eigen().eigenvalues;
        let min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        best = best.min(min);
    }
    Ok(best)
}

/// Entrywise product of two equally shaped matrices.
pub fn hadamard(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.component_mul(b))
}

/// Operator (spectral) norm.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values[0]
}
