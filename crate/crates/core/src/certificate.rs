//! Dual certificates for PCP.
//!
//! Builds `W = W^L + W^S` (golfing scheme plus least squares via a Neumann
//! series) for a known pair `(L0, S0)` and checks the optimality conditions
//!
//! ```text
//! P_T W = 0,   ‖W‖ < α,   ‖P_Ω(UVᵀ + W − λ·sgn S0)‖_F ≤ λε²,   ‖P_Ω⊥(UVᵀ + W)‖_∞ < λ/2
//! ```
//!
//! together with the component bounds on `W^L` and `W^S` and the spectral
//! bound on the sign matrix.

use faer::{Mat, Side};
use serde::Serialize;

use crate::error::{PcpError, Result};
use crate::linalg::{operator_norm, start_vector, svd, MAX_POWER_ITERS};
use crate::matrix::DenseMatrix;
use crate::problem::{SupportSet, NUMERICAL_RANK_TOL};

pub const DEFAULT_ALPHA: f64 = 0.9;
pub const DEFAULT_OPNORM_TOL: f64 = 1e-8;
pub const DEFAULT_NEUMANN_TOL: f64 = 1e-10;
pub const DEFAULT_NEUMANN_MAX_TERMS: usize = 10_000;
/// `P_T W = 0` is accepted when `‖P_T W‖_F ≤ TANGENT_TOL · ‖W‖_F`.
pub const TANGENT_TOL: f64 = 1e-8;
/// The Neumann series is refused once `‖P_Ω P_T‖ ≥ 1 − DIVERGENCE_MARGIN`.
pub const DIVERGENCE_MARGIN: f64 = 1e-6;

/// `T = {U Xᵀ + Y Vᵀ}` for orthonormal `U`, `V` of size `n×r`.
#[derive(Clone, Debug)]
pub struct TangentSubspace {
    u: DenseMatrix,
    v: DenseMatrix,
    vt: DenseMatrix,
}

impl TangentSubspace {
    pub fn new(u: DenseMatrix, v: DenseMatrix) -> Result<Self> {
        if u.shape() != v.shape() {
            return Err(PcpError::Dimension(format!("U is {:?} but V is {:?}", u.shape(), v.shape())));
        }
        for (name, q) in [("U", &u), ("V", &v)] {
            let err = q.tr_matmul(q).sub(&DenseMatrix::identity(q.cols())).max_abs();
            if err > 1e-10 {
                return Err(PcpError::param("tangent", format!("{name} columns not orthonormal (error {err:e})")));
            }
        }
        let vt = v.transpose();
        Ok(Self { u, v, vt })
    }

    /// The `r = 0` subspace `{0}`.
    pub fn empty(n: usize) -> Self {
        Self { u: DenseMatrix::zeros(n, 0), v: DenseMatrix::zeros(n, 0), vt: DenseMatrix::zeros(0, n) }
    }

    /// Tangent space at `l0` using its leading `r` singular vectors.
    pub fn from_low_rank(l0: &DenseMatrix, r: usize) -> Result<Self> {
        if !l0.is_square() {
            return Err(PcpError::Dimension(format!("expected a square matrix, got {:?}", l0.shape())));
        }
        let n = l0.rows();
        if r > n {
            return Err(PcpError::param("r", format!("rank {r} exceeds n = {n}")));
        }
        if r == 0 {
            return Ok(Self::empty(n));
        }
        let dec = svd(l0)?;
        let top = dec.singular_values[0];
        if r < n && top > 0.0 && dec.singular_values[r] > NUMERICAL_RANK_TOL * top {
            return Err(PcpError::RankExceeded { rank: r, ratio: dec.singular_values[r] / top });
        }
        Self::new(dec.u.leading_columns(r), dec.v.leading_columns(r))
    }

    /// Tangent space at `l0` with the rank read off at the numerical tolerance.
    pub fn from_matrix(l0: &DenseMatrix) -> Result<Self> {
        let dec = svd(l0)?;
        let r = dec.rank_at(NUMERICAL_RANK_TOL);
        Self::new(dec.u.leading_columns(r), dec.v.leading_columns(r))
    }

    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    /// `U Vᵀ`
    pub fn uv_t(&self) -> DenseMatrix {
        self.u.matmul(&self.vt)
    }

    /// `UUᵀM + MVVᵀ − UUᵀMVVᵀ`, evaluated as `U·A + (B − U·(A·V))·Vᵀ`
    /// with `A = UᵀM`, `B = MV`.
    pub fn project(&self, m: &DenseMatrix) -> DenseMatrix {
        assert_eq!(m.shape(), (self.n(), self.n()), "dimension mismatch");
        if self.rank() == 0 {
            return DenseMatrix::zeros(self.n(), self.n());
        }
        let a = self.u.tr_matmul(m);
        let b = m.matmul(&self.v);
        let core = self.u.matmul(&a.matmul(&self.v));
        let mut out = self.u.matmul(&a);
        let right = b.sub(&core).matmul(&self.vt);
        out.axpy(1.0, &right);
        out
    }

    /// `M − P_T M`
    pub fn project_perp(&self, m: &DenseMatrix) -> DenseMatrix {
        m.sub(&self.project(m))
    }
}

pub fn project_t(m: &DenseMatrix, t: &TangentSubspace) -> DenseMatrix {
    t.project(m)
}

pub fn project_omega(m: &DenseMatrix, omega: &SupportSet) -> DenseMatrix {
    mask_with(m, omega, true)
}

pub fn project_omega_complement(m: &DenseMatrix, omega: &SupportSet) -> DenseMatrix {
    mask_with(m, omega, false)
}

fn mask_with(m: &DenseMatrix, omega: &SupportSet, keep_inside: bool) -> DenseMatrix {
    assert_eq!(m.shape(), (omega.n(), omega.n()), "dimension mismatch");
    let mut out = m.clone();
    for (x, &inside) in out.as_mut_slice().iter_mut().zip(omega.mask()) {
        if inside != keep_inside {
            *x = 0.0;
        }
    }
    out
}

fn mask_slice(m: &DenseMatrix, mask: &[bool]) -> DenseMatrix {
    let mut out = m.clone();
    for (x, &keep) in out.as_mut_slice().iter_mut().zip(mask) {
        if !keep {
            *x = 0.0;
        }
    }
    out
}

// Without reorthogonalisation the residual estimate can stall near `tol`
// while the Ritz value has already settled.
const STALL_WINDOW: usize = 5;

/// `‖P_Ω P_T‖`, the square root of the top eigenvalue of the self-adjoint
/// map `X ↦ P_T P_Ω P_T X`.
///
/// The eigenvalue is found by Lanczos (the Krylov acceleration of power
/// iteration) started from the projection of a shape-seeded random matrix.
/// Iteration stops when the Ritz residual `β_k·|s_k|` is below `tol·θ`, or
/// when `θ` has moved by less than `tol·θ` over the last few steps.
pub fn opnorm_pomega_pt(omega: &SupportSet, t: &TangentSubspace, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(PcpError::param("tol", format!("must be positive, got {tol}")));
    }
    let n = t.n();
    if omega.n() != n {
        return Err(PcpError::Dimension(format!("support is {0}x{0}, subspace is {n}x{n}", omega.n())));
    }
    if t.rank() == 0 || omega.is_empty() {
        return Ok(0.0);
    }
    let seed = DenseMatrix::from_vec(n, n, start_vector(n * n, n, t.rank()))?;
    let start = t.project(&seed);
    let norm = start.frobenius_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mut q = start.scale(1.0 / norm);
    let mut q_prev = DenseMatrix::zeros(n, n);
    let mut beta_prev = 0.0;
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut theta = 0.0;
    let mut history: Vec<f64> = Vec::new();

    for _ in 0..MAX_POWER_ITERS {
        let mut w = t.project(&project_omega(&t.project(&q), omega));
        let alpha = w.dot(&q);
        w.axpy(-alpha, &q);
        w.axpy(-beta_prev, &q_prev);
        let beta = w.frobenius_norm();
        alphas.push(alpha);

        let (top, last_component) = tridiagonal_top_eigenpair(&alphas, &betas);
        theta = top;
        history.push(top);
        let settled = history.len() > STALL_WINDOW
            && (top - history[history.len() - 1 - STALL_WINDOW]).abs() <= tol * top.abs();
        if beta * last_component.abs() <= tol * theta.abs() || beta <= 1e-14 || settled {
            return Ok(theta.max(0.0).sqrt());
        }
        betas.push(beta);
        q_prev = std::mem::replace(&mut q, w.scale(1.0 / beta));
        beta_prev = beta;
    }
    Err(PcpError::NotConverged { iterations: MAX_POWER_ITERS, estimate: theta.max(0.0).sqrt() })
}

/// Largest eigenvalue of the symmetric tridiagonal `(alphas, betas)` and the
/// last component of its unit eigenvector.
fn tridiagonal_top_eigenpair(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    if k == 1 {
        return (alphas[0], 1.0);
    }
    let tri = Mat::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i == j + 1 {
            betas[j]
        } else if j == i + 1 {
            betas[i]
        } else {
            0.0
        }
    });
    let eig = tri.self_adjoint_eigen(Side::Lower).expect("tridiagonal eigensolver");
    let vals = eig.S().column_vector();
    (vals[k - 1], eig.U()[(k - 1, k - 1)])
}

#[derive(Clone, Debug)]
pub struct GolfingOutput {
    /// `P_T⊥ Y_{j0}`
    pub w_l: DenseMatrix,
    /// `‖P_T(UVᵀ − Y_j)‖_F` for `j = 0..=j0`.
    pub trace: Vec<f64>,
}

/// Golfing scheme: `Y_0 = 0`, `Y_j = Y_{j−1} + q⁻¹ P_{Ω_j} P_T(UVᵀ − Y_{j−1})`,
/// `W^L = P_T⊥ Y_{j0}`. The support must carry its golfing partition.
pub fn golfing_wl(omega: &SupportSet, t: &TangentSubspace) -> Result<GolfingOutput> {
    let part = omega
        .partition()
        .ok_or_else(|| PcpError::param("omega", "golfing requires a partition of the complement"))?;
    let n = t.n();
    if omega.n() != n {
        return Err(PcpError::Dimension(format!("support is {0}x{0}, subspace is {n}x{n}", omega.n())));
    }
    let uv = t.uv_t();
    let mut y = DenseMatrix::zeros(n, n);
    let mut trace = Vec::with_capacity(part.batches.len() + 1);
    // P_T(UVᵀ − Y) = UVᵀ − P_T Y since UVᵀ ∈ T
    let mut residual = uv.clone();
    trace.push(residual.frobenius_norm());
    for batch in &part.batches {
        y.axpy(1.0 / part.q, &mask_slice(&residual, batch));
        residual = uv.sub(&t.project(&y));
        trace.push(residual.frobenius_norm());
    }
    Ok(GolfingOutput { w_l: t.project_perp(&y), trace })
}

#[derive(Clone, Debug)]
pub struct NeumannOutput {
    pub w_s: DenseMatrix,
    /// Number of series terms summed.
    pub terms: usize,
    /// `‖P_Ω W^S − λE‖_F`, equal to `λ` times the first omitted term.
    pub constraint_residual: f64,
    pub opnorm: f64,
}

/// Least-squares certificate `W^S = λ P_T⊥ Σ_k (P_Ω P_T P_Ω)^k E`.
///
/// Terms are added until the next one has Frobenius norm at most
/// `tol·‖E‖_F`; since the constraint residual `P_Ω W^S − λE` equals `−λ`
/// times that next term, this bounds the relative residual by `tol`.
pub fn neumann_ws(
    omega: &SupportSet,
    t: &TangentSubspace,
    e: &DenseMatrix,
    lambda: f64,
    tol: f64,
    max_terms: usize,
) -> Result<NeumannOutput> {
    let opnorm = opnorm_pomega_pt(omega, t, DEFAULT_OPNORM_TOL)?;
    neumann_ws_with_opnorm(omega, t, e, lambda, tol, max_terms, opnorm)
}

/// As [`neumann_ws`] with `‖P_Ω P_T‖` already measured.
pub fn neumann_ws_with_opnorm(
    omega: &SupportSet,
    t: &TangentSubspace,
    e: &DenseMatrix,
    lambda: f64,
    tol: f64,
    max_terms: usize,
    opnorm: f64,
) -> Result<NeumannOutput> {
    let n = t.n();
    if e.shape() != (n, n) || omega.n() != n {
        return Err(PcpError::Dimension("sign matrix, support and subspace sizes differ".into()));
    }
    if !(tol > 0.0) || max_terms == 0 {
        return Err(PcpError::param("tol", "need tol > 0 and max_terms >= 1"));
    }
    for (&x, &inside) in e.as_slice().iter().zip(omega.mask()) {
        if (inside && x.abs() != 1.0) || (!inside && x != 0.0) {
            return Err(PcpError::param("E", "must be ±1 on the support and 0 off it"));
        }
    }
    if opnorm >= 1.0 - DIVERGENCE_MARGIN {
        return Err(PcpError::SeriesDivergent { norm: opnorm });
    }
    let stop = tol * e.frobenius_norm();
    let mut sum = DenseMatrix::zeros(n, n);
    let mut term = e.clone();
    for k in 1..=max_terms {
        sum.axpy(1.0, &term);
        term = project_omega(&t.project(&term), omega);
        let next = term.frobenius_norm();
        if next <= stop {
            let mut w_s = t.project_perp(&sum);
            w_s.scale_in_place(lambda);
            return Ok(NeumannOutput { w_s, terms: k, constraint_residual: lambda * next, opnorm });
        }
    }
    Err(PcpError::NotConverged { iterations: max_terms, estimate: lambda * term.frobenius_norm() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn strict(value: f64, bound: f64) -> Self {
        Self { value, bound, holds: value < bound }
    }

    fn weak(value: f64, bound: f64) -> Self {
        Self { value, bound, holds: value <= bound }
    }

    /// `bound − value`; positive when the bound holds with room to spare.
    pub fn margin(&self) -> f64 {
        self.bound - self.value
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WlChecks {
    pub w_l_spectral: f64,
    pub omega_residual: f64,
    pub omega_perp_inf: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WsChecks {
    pub w_s_spectral: f64,
    pub omega_perp_inf: f64,
    pub e_spectral: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    /// `‖P_T W‖_F`
    pub pt_w_norm: f64,
    /// `‖W‖`
    pub w_spectral: f64,
    /// `‖P_Ω(UVᵀ + W − λ·sgn S0)‖_F`
    pub omega_residual: f64,
    /// `‖P_Ω⊥(UVᵀ + W)‖_∞`
    pub omega_perp_inf: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub lambda: f64,
    /// `‖P_Ω P_T‖`
    pub opnorm: f64,
    pub tangent_ok: bool,
    pub spectral_ok: bool,
    pub omega_residual_ok: bool,
    pub omega_perp_ok: bool,
    /// `λ < 1 − α`
    pub lambda_hypothesis_ok: bool,
    /// `‖P_Ω P_T‖ ≤ 1 − ε`
    pub opnorm_hypothesis_ok: bool,
    /// All four optimality conditions hold.
    pub passed: bool,
    pub wl_checks: Option<WlChecks>,
    pub ws_checks: Option<WsChecks>,
}

impl CertificateReport {
    pub fn hypotheses_ok(&self) -> bool {
        self.lambda_hypothesis_ok && self.opnorm_hypothesis_ok
    }
}

/// Evaluates the four optimality conditions for `W` and the two hypotheses
/// on `λ` and `‖P_Ω P_T‖`. When `epsilon` is `None` it is taken as
/// `1 − ‖P_Ω P_T‖` measured on the instance.
pub fn verify_certificate(
    w: &DenseMatrix,
    t: &TangentSubspace,
    omega: &SupportSet,
    e: &DenseMatrix,
    lambda: f64,
    alpha: f64,
    epsilon: Option<f64>,
) -> Result<CertificateReport> {
    let opnorm = opnorm_pomega_pt(omega, t, DEFAULT_OPNORM_TOL)?;
    verify_with_opnorm(w, t, omega, e, lambda, alpha, epsilon, opnorm)
}

#[allow(clippy::too_many_arguments)]
fn verify_with_opnorm(
    w: &DenseMatrix,
    t: &TangentSubspace,
    omega: &SupportSet,
    e: &DenseMatrix,
    lambda: f64,
    alpha: f64,
    epsilon: Option<f64>,
    opnorm: f64,
) -> Result<CertificateReport> {
    let n = t.n();
    if w.shape() != (n, n) || e.shape() != (n, n) || omega.n() != n {
        return Err(PcpError::Dimension("certificate, sign matrix, support and subspace sizes differ".into()));
    }
    let epsilon = epsilon.unwrap_or(1.0 - opnorm);
    let uv = t.uv_t();
    let uv_w = uv.add(w);

    let pt_w_norm = t.project(w).frobenius_norm();
    let w_spectral = operator_norm(w)?;
    let mut on_omega = uv_w.clone();
    on_omega.axpy(-lambda, e);
    let omega_residual = project_omega(&on_omega, omega).frobenius_norm();
    let omega_perp_inf = project_omega_complement(&uv_w, omega).max_abs();

    let tangent_ok = pt_w_norm <= TANGENT_TOL * w.frobenius_norm();
    let spectral_ok = w_spectral < alpha;
    let omega_residual_ok = omega_residual <= lambda * epsilon * epsilon;
    let omega_perp_ok = omega_perp_inf < lambda / 2.0;
    Ok(CertificateReport {
        pt_w_norm,
        w_spectral,
        omega_residual,
        omega_perp_inf,
        alpha,
        epsilon,
        lambda,
        opnorm,
        tangent_ok,
        spectral_ok,
        omega_residual_ok,
        omega_perp_ok,
        lambda_hypothesis_ok: lambda < 1.0 - alpha,
        opnorm_hypothesis_ok: opnorm <= 1.0 - epsilon,
        passed: tangent_ok && spectral_ok && omega_residual_ok && omega_perp_ok,
        wl_checks: None,
        ws_checks: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GolfingBounds {
    /// `‖W^L‖ < 1/10`
    pub spectral: BoundCheck,
    /// `‖P_Ω(UVᵀ + W^L)‖_F < λ(1 − σ)²`
    pub omega_residual: BoundCheck,
    /// `‖P_Ω⊥(UVᵀ + W^L)‖_∞ < λ/4`
    pub omega_perp_inf: BoundCheck,
}

impl GolfingBounds {
    pub fn all_hold(&self) -> bool {
        self.spectral.holds && self.omega_residual.holds && self.omega_perp_inf.holds
    }
}

/// Bounds on the golfing component, with `σ` the measured `‖P_Ω P_T‖`.
pub fn check_golfing_bounds(w_l: &DenseMatrix, t: &TangentSubspace, omega: &SupportSet, lambda: f64, sigma: f64) -> Result<GolfingBounds> {
    let uv_w = t.uv_t().add(w_l);
    Ok(GolfingBounds {
        spectral: BoundCheck::strict(operator_norm(w_l)?, 0.1),
        omega_residual: BoundCheck::strict(project_omega(&uv_w, omega).frobenius_norm(), lambda * (1.0 - sigma).powi(2)),
        omega_perp_inf: BoundCheck::strict(project_omega_complement(&uv_w, omega).max_abs(), lambda / 4.0),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LeastSquaresBounds {
    /// `‖W^S‖ < 8/10`
    pub spectral: BoundCheck,
    /// `‖P_Ω⊥ W^S‖_∞ < λ/4`
    pub omega_perp_inf: BoundCheck,
    /// `‖E‖ ≤ 4√(nρ)`
    pub e_norm: BoundCheck,
    /// `‖W^S/λ − P_T⊥ E‖ ≤ (9/4)√(ρn/(1−ρ))`
    pub tail_norm: BoundCheck,
}

impl LeastSquaresBounds {
    pub fn all_hold(&self) -> bool {
        self.spectral.holds && self.omega_perp_inf.holds && self.e_norm.holds && self.tail_norm.holds
    }
}

/// Bounds on the least-squares component. `w_s` must come from
/// [`neumann_ws`] so that `W^S/λ − P_T⊥E` is the series tail.
pub fn check_least_squares_bounds(
    w_s: &DenseMatrix,
    t: &TangentSubspace,
    omega: &SupportSet,
    e: &DenseMatrix,
    lambda: f64,
    n: usize,
    rho: f64,
) -> Result<LeastSquaresBounds> {
    if !(lambda > 0.0) {
        return Err(PcpError::param("lambda", "must be positive"));
    }
    let (nf, r) = (n as f64, rho);
    let tail = w_s.scale(1.0 / lambda).sub(&t.project_perp(e));
    Ok(LeastSquaresBounds {
        spectral: BoundCheck::strict(operator_norm(w_s)?, 0.8),
        omega_perp_inf: BoundCheck::strict(project_omega_complement(w_s, omega).max_abs(), lambda / 4.0),
        e_norm: BoundCheck::weak(operator_norm(e)?, 4.0 * (nf * r).sqrt()),
        tail_norm: BoundCheck::weak(operator_norm(&tail)?, 2.25 * (r * nf / (1.0 - r)).sqrt()),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct CertifyOptions {
    pub alpha: f64,
    pub epsilon: Option<f64>,
    pub neumann_tol: f64,
    pub neumann_max_terms: usize,
    pub opnorm_tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            epsilon: None,
            neumann_tol: DEFAULT_NEUMANN_TOL,
            neumann_max_terms: DEFAULT_NEUMANN_MAX_TERMS,
            opnorm_tol: DEFAULT_OPNORM_TOL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub w_l: DenseMatrix,
    pub w_s: DenseMatrix,
    pub w: DenseMatrix,
    pub golfing_trace: Vec<f64>,
    pub neumann_terms: usize,
    pub neumann_residual: f64,
    pub report: CertificateReport,
    pub golfing_bounds: GolfingBounds,
    pub least_squares_bounds: LeastSquaresBounds,
}

/// Constructs `W = W^L + W^S` for the instance and evaluates every check.
/// `omega` must carry a golfing partition and `e` the signs of `S0`.
pub fn certify(t: &TangentSubspace, omega: &SupportSet, e: &DenseMatrix, lambda: f64, opts: &CertifyOptions) -> Result<Certificate> {
    let opnorm = opnorm_pomega_pt(omega, t, opts.opnorm_tol)?;
    let golf = golfing_wl(omega, t)?;
    let neumann = neumann_ws_with_opnorm(omega, t, e, lambda, opts.neumann_tol, opts.neumann_max_terms, opnorm)?;
    let w = golf.w_l.add(&neumann.w_s);
    let mut report = verify_with_opnorm(&w, t, omega, e, lambda, opts.alpha, opts.epsilon, opnorm)?;

    let golfing_bounds = check_golfing_bounds(&golf.w_l, t, omega, lambda, opnorm)?;
    let least_squares_bounds = check_least_squares_bounds(&neumann.w_s, t, omega, e, lambda, t.n(), omega.fraction())?;
    report.wl_checks = Some(WlChecks {
        w_l_spectral: golfing_bounds.spectral.value,
        omega_residual: golfing_bounds.omega_residual.value,
        omega_perp_inf: golfing_bounds.omega_perp_inf.value,
    });
    report.ws_checks = Some(WsChecks {
        w_s_spectral: least_squares_bounds.spectral.value,
        omega_perp_inf: least_squares_bounds.omega_perp_inf.value,
        e_spectral: least_squares_bounds.e_norm.value,
    });
    Ok(Certificate {
        w_l: golf.w_l,
        w_s: neumann.w_s,
        w,
        golfing_trace: golf.trace,
        neumann_terms: neumann.terms,
        neumann_residual: neumann.constraint_residual,
        report,
        golfing_bounds,
        least_squares_bounds,
    })
}
