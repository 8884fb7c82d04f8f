//! Dense linear-algebra primitives: SVD, the two proximal operators used by
//! PCP, power-iteration spectral norm and the matrix norms.

use faer::Mat;
use serde::Serialize;

use crate::error::{PcpError, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{mix_seed, SeededRng};

/// Iteration cap shared by the power-iteration style estimators.
pub const MAX_POWER_ITERS: usize = 10_000;

/// Thin SVD `M = U · diag(σ) · Vᵀ` with `k = min(rows, cols)` components.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdResult {
    pub fn rank_at(&self, rel_tol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values.iter().take_while(|&&s| s > rel_tol * top && s > 0.0).count()
    }

    /// `U diag(σ) Vᵀ` using the given (possibly modified) singular values.
    /// Components with a zero weight are skipped.
    pub fn reconstruct_with(&self, weights: &[f64]) -> DenseMatrix {
        assert_eq!(weights.len(), self.singular_values.len());
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = DenseMatrix::zeros(m, n);
        let vt = self.v.transpose();
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let vk = vt.row(k);
            for i in 0..m {
                let a = w * self.u[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out.row_mut(i).iter_mut().zip(vk) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.reconstruct_with(&self.singular_values)
    }
}

fn to_faer(m: &DenseMatrix) -> Mat<f64> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn svd(m: &DenseMatrix) -> Result<SvdResult> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if m.as_slice().iter().all(|&x| x == 0.0) {
        // canonical basis for the zero matrix
        return Ok(SvdResult {
            u: DenseMatrix::from_fn(rows, k, |i, j| if i == j { 1.0 } else { 0.0 }),
            singular_values: vec![0.0; k],
            v: DenseMatrix::from_fn(cols, k, |i, j| if i == j { 1.0 } else { 0.0 }),
        });
    }
    let dec = to_faer(m).thin_svd().map_err(|_| PcpError::SvdNoConvergence)?;
    let singular_values: Vec<f64> = dec.S().column_vector().iter().map(|s| s.max(0.0)).collect();
    debug_assert!(singular_values.windows(2).all(|w| w[0] >= w[1]));
    Ok(SvdResult { u: from_faer(dec.U()), singular_values, v: from_faer(dec.V()) })
}

pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    if m.rows().min(m.cols()) == 0 {
        return Ok(Vec::new());
    }
    to_faer(m).singular_values().map_err(|_| PcpError::SvdNoConvergence)
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_nan() || tau < 0.0 {
        return Err(PcpError::param("tau", format!("threshold must be nonnegative, got {tau}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn shrink(x: f64, tau: f64) -> f64 {
    let mag = x.abs() - tau;
    if mag > 0.0 {
        mag.copysign(x)
    } else {
        0.0
    }
}

/// Entrywise shrinkage `sgn(m)·max(|m| − τ, 0)`, the prox of `τ‖·‖₁`.
pub fn soft_threshold(m: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    Ok(m.map(|x| shrink(x, tau)))
}

/// Output of [`svt_detailed`].
#[derive(Clone, Debug)]
pub struct SvtOutput {
    pub matrix: DenseMatrix,
    /// Shrunk spectrum `max(σᵢ − τ, 0)`, nonincreasing.
    pub shrunk: Vec<f64>,
}

impl SvtOutput {
    pub fn rank(&self) -> usize {
        self.shrunk.iter().filter(|&&s| s > 0.0).count()
    }

    /// Nuclear norm of the thresholded matrix.
    pub fn nuclear_norm(&self) -> f64 {
        self.shrunk.iter().sum()
    }
}

/// Singular value thresholding, the prox of `τ‖·‖_*`. Singular values equal
/// to `τ` shrink to exactly zero.
pub fn svt(m: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    svt_detailed(m, tau).map(|o| o.matrix)
}

pub fn svt_detailed(m: &DenseMatrix, tau: f64) -> Result<SvtOutput> {
    check_tau(tau)?;
    let dec = svd(m)?;
    let shrunk: Vec<f64> = dec.singular_values.iter().map(|&s| (s - tau).max(0.0)).collect();
    Ok(SvtOutput { matrix: dec.reconstruct_with(&shrunk), shrunk })
}

/// Deterministic start vector for power iterations, seeded from the shape.
pub(crate) fn start_vector(len: usize, rows: usize, cols: usize) -> Vec<f64> {
    let mut rng = SeededRng::new(mix_seed(0x5043_504D, &[rows as u64, cols as u64]));
    (0..len).map(|_| rng.normal()).collect()
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Largest singular value by power iteration on `MᵀM`.
///
/// Stops once the eigen-residual `‖MᵀMx − σ²x‖` drops below `tol·σ²`.
/// Exhausting the iteration cap returns [`PcpError::NotConverged`] carrying
/// the last estimate.
pub fn spectral_norm(m: &DenseMatrix, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(PcpError::param("tol", format!("must be positive, got {tol}")));
    }
    if m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let mut x = start_vector(m.cols(), m.rows(), m.cols());
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut estimate = 0.0;
    for _ in 0..MAX_POWER_ITERS {
        let y = m.matvec(&x);
        let z = m.tr_matvec(&y);
        let lambda = y.iter().map(|v| v * v).sum::<f64>();
        estimate = lambda.sqrt();
        let resid = z.iter().zip(&x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        if resid <= tol * lambda {
            return Ok(estimate);
        }
        let nz = norm2(&z);
        if nz == 0.0 {
            return Ok(estimate);
        }
        x = z.into_iter().map(|v| v / nz).collect();
    }
    Err(PcpError::NotConverged { iterations: MAX_POWER_ITERS, estimate })
}

/// Largest singular value from a full SVD; exact to working precision.
pub fn operator_norm(m: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Norms {
    pub frobenius: f64,
    pub one_norm: f64,
    pub inf_norm: f64,
    pub nuclear: f64,
}

pub fn norms(m: &DenseMatrix) -> Result<Norms> {
    Ok(Norms {
        frobenius: m.frobenius_norm(),
        one_norm: m.l1_norm(),
        inf_norm: m.max_abs(),
        nuclear: singular_values(m)?.iter().sum(),
    })
}
