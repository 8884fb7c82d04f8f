//! Inexact augmented Lagrange multiplier solver for
//! `min ‖L‖_* + λ‖S‖₁  s.t.  L + S = D`, plus the truncated-SVD baseline.

use serde::{Deserialize, Serialize};

use crate::error::{PcpError, Result};
use crate::linalg::{shrink, singular_values, svd, svt_detailed};
use crate::matrix::DenseMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Stop once `‖D − L − S‖_F / ‖D‖_F` falls to this value.
    pub tol_feasibility: f64,
    pub max_iters: usize,
    /// Initial penalty; `None` means `1.25 / ‖D‖`.
    pub mu0: Option<f64>,
    /// Penalty growth factor per iteration.
    pub rho_mu: f64,
    /// Penalty cap; `None` means `1e7 · mu0`.
    pub mu_max: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol_feasibility: 1e-7, max_iters: 1000, mu0: None, rho_mu: 1.5, mu_max: None }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_feasibility > 0.0) {
            return Err(PcpError::param("tol_feasibility", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(PcpError::param("max_iters", "must be at least 1"));
        }
        if !(self.rho_mu > 1.0) {
            return Err(PcpError::param("rho_mu", "must exceed 1"));
        }
        if let Some(mu0) = self.mu0 {
            if !(mu0 > 0.0 && mu0.is_finite()) {
                return Err(PcpError::param("mu0", "must be positive and finite"));
            }
        }
        if let Some(mu_max) = self.mu_max {
            if !(mu_max > 0.0) {
                return Err(PcpError::param("mu_max", "must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub l_hat: DenseMatrix,
    pub s_hat: DenseMatrix,
    pub iterations: usize,
    /// `‖D − L̂ − Ŝ‖_F / ‖D‖_F`
    pub feasibility_residual: f64,
    /// `‖L̂‖_* + λ‖Ŝ‖₁`
    pub objective: f64,
    pub converged: bool,
    pub rank: usize,
}

/// Scalar summary of a solve, as written to JSON reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveSummary {
    pub lambda: f64,
    pub iterations: usize,
    pub feasibility_residual: f64,
    pub objective: f64,
    pub converged: bool,
    pub rank: usize,
}

impl SolveResult {
    pub fn summary(&self, lambda: f64) -> SolveSummary {
        SolveSummary {
            lambda,
            iterations: self.iterations,
            feasibility_residual: self.feasibility_residual,
            objective: self.objective,
            converged: self.converged,
            rank: self.rank,
        }
    }
}

/// PCP objective of an arbitrary pair.
pub fn pcp_objective(l: &DenseMatrix, s: &DenseMatrix, lambda: f64) -> Result<f64> {
    Ok(singular_values(l)?.iter().sum::<f64>() + lambda * s.l1_norm())
}

/// Solves PCP by inexact ALM:
///
/// ```text
/// Y ← D / max(‖D‖, ‖D‖_∞/λ),  μ ← μ0,  S ← 0
/// repeat
///     L ← svt(D − S + Y/μ, 1/μ)
///     S ← soft_threshold(D − L + Y/μ, λ/μ)
///     Y ← Y + μ(D − L − S)
///     μ ← min(ρ_μ·μ, μ_max)
/// until ‖D − L − S‖_F ≤ tol·‖D‖_F
/// ```
///
/// Running out of iterations is not an error: the iterate with the smallest
/// residual is returned with `converged = false`.
pub fn pcp_solve(d: &DenseMatrix, lambda: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    if !d.is_square() {
        return Err(PcpError::Dimension(format!("expected a square data matrix, got {:?}", d.shape())));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(PcpError::param("lambda", format!("must be positive and finite, got {lambda}")));
    }
    let n = d.rows();
    let d_fro = d.frobenius_norm();
    if d_fro == 0.0 {
        return Ok(SolveResult {
            l_hat: DenseMatrix::zeros(n, n),
            s_hat: DenseMatrix::zeros(n, n),
            iterations: 0,
            feasibility_residual: 0.0,
            objective: 0.0,
            converged: true,
            rank: 0,
        });
    }

    let d_two = svd(d)?.singular_values[0];
    let dual_scale = d_two.max(d.max_abs() / lambda);
    let mut y = d.scale(1.0 / dual_scale);
    let mut mu = cfg.mu0.unwrap_or(1.25 / d_two);
    let mu_max = cfg.mu_max.unwrap_or(1e7 * mu);

    let mut s = DenseMatrix::zeros(n, n);
    let mut best: Option<SolveResult> = None;

    for iter in 1..=cfg.max_iters {
        let inv_mu = 1.0 / mu;
        let mut target = d.sub(&s);
        target.axpy(inv_mu, &y);
        let low_rank = svt_detailed(&target, inv_mu)?;
        let l = &low_rank.matrix;

        let thresh = lambda * inv_mu;
        let mut residual = DenseMatrix::zeros(n, n);
        {
            let (dv, lv, yv) = (d.as_slice(), l.as_slice(), y.as_slice());
            let sv = s.as_mut_slice();
            let rv = residual.as_mut_slice();
            for k in 0..sv.len() {
                sv[k] = shrink(dv[k] - lv[k] + inv_mu * yv[k], thresh);
                rv[k] = dv[k] - lv[k] - sv[k];
            }
        }
        y.axpy(mu, &residual);
        mu = (cfg.rho_mu * mu).min(mu_max);

        let feasibility_residual = residual.frobenius_norm() / d_fro;
        let converged = feasibility_residual <= cfg.tol_feasibility;
        let improves = best.as_ref().map_or(true, |b| feasibility_residual < b.feasibility_residual);
        if converged || improves {
            let candidate = SolveResult {
                objective: low_rank.nuclear_norm() + lambda * s.l1_norm(),
                rank: low_rank.rank(),
                l_hat: low_rank.matrix,
                s_hat: s.clone(),
                iterations: iter,
                feasibility_residual,
                converged,
            };
            if converged {
                return Ok(candidate);
            }
            best = Some(candidate);
        }
    }
    let mut out = best.expect("max_iters >= 1");
    out.iterations = cfg.max_iters;
    Ok(out)
}

/// Best rank-`r` approximation by truncated SVD.
pub fn pca_baseline(d: &DenseMatrix, r: usize) -> Result<DenseMatrix> {
    let k = d.rows().min(d.cols());
    if r > k {
        return Err(PcpError::param("r", format!("rank {r} exceeds min dimension {k}")));
    }
    let dec = svd(d)?;
    let weights: Vec<f64> = dec.singular_values.iter().enumerate().map(|(i, &s)| if i < r { s } else { 0.0 }).collect();
    Ok(dec.reconstruct_with(&weights))
}

/// `‖L0 − L̂‖_F / ‖L0‖_F`
pub fn relative_error(l0: &DenseMatrix, l_hat: &DenseMatrix) -> Result<f64> {
    if l0.shape() != l_hat.shape() {
        return Err(PcpError::Dimension(format!("{:?} vs {:?}", l0.shape(), l_hat.shape())));
    }
    let denom = l0.frobenius_norm();
    if denom == 0.0 {
        return Err(PcpError::param("L0", "ground truth must be nonzero"));
    }
    Ok(l0.sub(l_hat).frobenius_norm() / denom)
}

pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.01;

/// Recovery counts as successful when the relative error is strictly below
/// `threshold`.
pub fn recovery_success(l0: &DenseMatrix, l_hat: &DenseMatrix, threshold: f64) -> Result<bool> {
    Ok(relative_error(l0, l_hat)? < threshold)
}
