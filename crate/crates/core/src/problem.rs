//! Synthetic PCP instances, corruption supports, incoherence and the
//! weighting parameter λ.

use serde::{Deserialize, Serialize};

use crate::error::{PcpError, Result};
use crate::linalg::svd;
use crate::matrix::DenseMatrix;
use crate::rng::SeededRng;

/// Relative threshold separating construction rank from round-off.
pub const NUMERICAL_RANK_TOL: f64 = 1e-8;

/// How the corruption support is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportModel {
    /// Each entry independently with probability ρ.
    Bernoulli,
    /// Uniform among supports of size ⌊ρn²⌋.
    #[default]
    Exact,
}

impl std::str::FromStr for SupportModel {
    type Err = PcpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(Self::Bernoulli),
            "exact" => Ok(Self::Exact),
            other => Err(PcpError::param("model", format!("expected `bernoulli` or `exact`, got `{other}`"))),
        }
    }
}

/// A set of `(row, col)` positions in an `n×n` grid, optionally carrying a
/// golfing partition `Ω₁..Ω_{j0}` of its complement.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportSet {
    n: usize,
    mask: Vec<bool>,
    partition: Option<GolfingPartition>,
}

/// Batches whose union is the complement of the support. Batches may
/// overlap.
#[derive(Clone, Debug, PartialEq)]
pub struct GolfingPartition {
    pub q: f64,
    pub batches: Vec<Vec<bool>>,
}

impl SupportSet {
    pub fn empty(n: usize) -> Self {
        Self { n, mask: vec![false; n * n], partition: None }
    }

    pub fn full(n: usize) -> Self {
        Self { n, mask: vec![true; n * n], partition: None }
    }

    pub fn from_mask(n: usize, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != n * n {
            return Err(PcpError::Dimension(format!("mask has {} entries, expected {}", mask.len(), n * n)));
        }
        Ok(Self { n, mask, partition: None })
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = Self::empty(n);
        for (i, j) in indices {
            if i >= n || j >= n {
                return Err(PcpError::Dimension(format!("index ({i}, {j}) outside {n}x{n}")));
            }
            set.mask[i * n + j] = true;
        }
        Ok(set)
    }

    /// Support of the nonzero entries of a square matrix.
    pub fn support_of(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(PcpError::Dimension(format!("expected a square matrix, got {:?}", m.shape())));
        }
        Ok(Self { n: m.rows(), mask: m.as_slice().iter().map(|&x| x != 0.0).collect(), partition: None })
    }

    /// Attaches explicit golfing batches; their union must be the complement.
    pub fn with_partition(mut self, q: f64, batches: Vec<Vec<bool>>) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(PcpError::param("q", format!("must lie in (0, 1], got {q}")));
        }
        let nn = self.n * self.n;
        if batches.iter().any(|b| b.len() != nn) {
            return Err(PcpError::Dimension("batch mask size differs from grid".into()));
        }
        for idx in 0..nn {
            let covered = batches.iter().any(|b| b[idx]);
            if covered == self.mask[idx] {
                return Err(PcpError::param("partition", format!("batches do not cover the complement exactly at linear index {idx}")));
            }
        }
        self.partition = Some(GolfingPartition { q, batches });
        Ok(self)
    }

    /// Samples `j0` batches covering the complement of this (fixed) support:
    /// every complement entry gets an i.i.d. Ber(q)^{j0} membership pattern
    /// conditioned on not being all-zero, with `(1 − q)^{j0}` equal to the
    /// support's fill fraction. This is the law of the golfing batches given Ω.
    pub fn sample_partition_given_support(mut self, j0: usize, seed: u64) -> Result<Self> {
        if j0 == 0 {
            return Err(PcpError::param("j0", "must be at least 1"));
        }
        let nn = self.n * self.n;
        let rho = self.fraction();
        let q = if rho > 0.0 { 1.0 - rho.powf(1.0 / j0 as f64) } else { 1.0 };
        let mut rng = SeededRng::new(seed);
        let mut batches = vec![vec![false; nn]; j0];
        for idx in 0..nn {
            if self.mask[idx] {
                continue;
            }
            loop {
                let mut any = false;
                for batch in batches.iter_mut() {
                    let hit = rng.bernoulli(q);
                    batch[idx] = hit;
                    any |= hit;
                }
                if any {
                    break;
                }
            }
        }
        self.partition = Some(GolfingPartition { q, batches });
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n + j]
    }

    #[inline]
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.len() as f64 / (self.n * self.n) as f64
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(move |(idx, _)| (idx / n, idx % n))
    }

    pub fn complement(&self) -> Self {
        Self { n: self.n, mask: self.mask.iter().map(|b| !b).collect(), partition: None }
    }

    pub fn partition(&self) -> Option<&GolfingPartition> {
        self.partition.as_ref()
    }
}

/// Synthetic instance `D = L0 + S0`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub l0: DenseMatrix,
    pub s0: DenseMatrix,
    pub d: DenseMatrix,
    pub n: usize,
    pub r: usize,
    pub rho: f64,
    pub seed: u64,
    pub support_model: SupportModel,
}

impl ProblemInstance {
    /// Low-rank part from substream 0 of `seed`, corruption from substream 1.
    pub fn generate(n: usize, r: usize, rho: f64, model: SupportModel, seed: u64) -> Result<Self> {
        let l0 = generate_low_rank(n, r, crate::rng::mix_seed(seed, &[0]))?;
        let (s0, _) = generate_sign_corruption(n, rho, model, crate::rng::mix_seed(seed, &[1]))?;
        let d = l0.add(&s0);
        Ok(Self { l0, s0, d, n, r, rho, seed, support_model: model })
    }
}

/// `L0 = R1 R2ᵀ` with `R1`, `R2` i.i.d. `N(0, 100/n)` of size `n×r`.
/// `R1` is filled row-major first, then `R2`, from one stream.
pub fn generate_low_rank(n: usize, r: usize, seed: u64) -> Result<DenseMatrix> {
    if n == 0 || r == 0 || r > n {
        return Err(PcpError::param("r", format!("need 1 <= r <= n, got r = {r}, n = {n}")));
    }
    let sd = (100.0 / n as f64).sqrt();
    let mut rng = SeededRng::new(seed);
    let r1 = DenseMatrix::from_fn(n, r, |_, _| sd * rng.normal());
    let r2 = DenseMatrix::from_fn(n, r, |_, _| sd * rng.normal());
    Ok(r1.matmul_tr(&r2))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(PcpError::param("rho", format!("must lie in (0, 1), got {rho}")));
    }
    Ok(())
}

/// `⌊ρ·n²⌋`, robust to the product landing a few ulps below an integer.
pub fn exact_support_size(n: usize, rho: f64) -> usize {
    let target = rho * (n * n) as f64;
    let k = target.round();
    if (target - k).abs() <= 1e-9 * target.max(1.0) {
        k as usize
    } else {
        target.floor() as usize
    }
}

/// ±1 corruption matrix and its support.
///
/// Bernoulli: entries visited row-major, one uniform decides membership and,
/// for members, one more the sign. Exact: a partial Fisher–Yates shuffle of
/// the `n²` linear indices selects the first `⌊ρn²⌋`, then one sign per
/// selected index in selection order.
pub fn generate_sign_corruption(n: usize, rho: f64, model: SupportModel, seed: u64) -> Result<(DenseMatrix, SupportSet)> {
    check_rho(rho)?;
    let nn = n * n;
    let mut rng = SeededRng::new(seed);
    let mut s0 = DenseMatrix::zeros(n, n);
    match model {
        SupportModel::Bernoulli => {
            for x in s0.as_mut_slice() {
                if rng.bernoulli(rho) {
                    *x = rng.sign();
                }
            }
        }
        SupportModel::Exact => {
            let k = exact_support_size(n, rho);
            let mut perm: Vec<usize> = (0..nn).collect();
            for i in 0..k {
                let j = i + rng.below((nn - i) as u64) as usize;
                perm.swap(i, j);
            }
            let data = s0.as_mut_slice();
            for &idx in &perm[..k] {
                data[idx] = rng.sign();
            }
        }
    }
    let omega = SupportSet::support_of(&s0)?;
    Ok((s0, omega))
}

/// ±1 signs on the given support, one draw per member in row-major order.
pub fn random_signs_on(omega: &SupportSet, seed: u64) -> DenseMatrix {
    let n = omega.n();
    let mut rng = SeededRng::new(seed);
    let mut e = DenseMatrix::zeros(n, n);
    for (x, &inside) in e.as_mut_slice().iter_mut().zip(omega.mask()) {
        if inside {
            *x = rng.sign();
        }
    }
    e
}

/// Golfing batch probability `q = 1 − ρ^{1/j0}`, so that `(1 − q)^{j0} = ρ`.
pub fn golfing_q(rho: f64, j0: usize) -> f64 {
    1.0 - rho.powf(1.0 / j0 as f64)
}

/// Default number of golfing batches, `2⌈ln n⌉` (at least one).
pub fn default_j0(n: usize) -> usize {
    (2.0 * (n.max(2) as f64).ln().ceil()) as usize
}

/// Samples `j0` independent Ber(q) batches (batch-major, entries row-major)
/// and returns Ω as the complement of their union, so Ω ~ Ber(ρ).
pub fn sample_golfing_partition(n: usize, rho: f64, j0: usize, seed: u64) -> Result<SupportSet> {
    check_rho(rho)?;
    if j0 == 0 {
        return Err(PcpError::param("j0", "must be at least 1"));
    }
    let q = golfing_q(rho, j0);
    let nn = n * n;
    let mut rng = SeededRng::new(seed);
    let batches: Vec<Vec<bool>> = (0..j0).map(|_| (0..nn).map(|_| rng.bernoulli(q)).collect()).collect();
    let mask = (0..nn).map(|idx| !batches.iter().any(|b| b[idx])).collect();
    Ok(SupportSet { n, mask, partition: Some(GolfingPartition { q, batches }) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Incoherence {
    pub mu_row: f64,
    pub mu_col: f64,
    pub mu_cross: f64,
    pub mu: f64,
}

/// Smallest μ for which `L` satisfies the three incoherence bounds, using
/// the reduced SVD truncated to exactly `r` components.
pub fn incoherence_mu(l: &DenseMatrix, r: usize) -> Result<Incoherence> {
    if !l.is_square() {
        return Err(PcpError::Dimension(format!("expected a square matrix, got {:?}", l.shape())));
    }
    let n = l.rows();
    if r == 0 || r > n {
        return Err(PcpError::param("r", format!("need 1 <= r <= n, got {r}")));
    }
    let dec = svd(l)?;
    let top = dec.singular_values[0];
    if top == 0.0 {
        return Err(PcpError::param("L", "zero matrix has no singular subspace"));
    }
    if r < n {
        let ratio = dec.singular_values[r] / top;
        if ratio > NUMERICAL_RANK_TOL {
            return Err(PcpError::RankExceeded { rank: r, ratio });
        }
    }
    let u = dec.u.leading_columns(r);
    let v = dec.v.leading_columns(r);
    let max_row_sq = |q: &DenseMatrix| (0..n).map(|i| q.row(i).iter().map(|x| x * x).sum::<f64>()).fold(0.0, f64::max);
    let (nf, rf) = (n as f64, r as f64);
    let mu_row = nf / rf * max_row_sq(&u);
    let mu_col = nf / rf * max_row_sq(&v);
    let uv_inf = u.matmul_tr(&v).max_abs();
    let mu_cross = nf * nf / rf * uv_inf * uv_inf;
    Ok(Incoherence { mu_row, mu_col, mu_cross, mu: mu_row.max(mu_col).max(mu_cross) })
}

/// Dense-error weighting `C1 · (4√(1−ρ) + 9/4)⁻¹ · √((1−ρ)/(nρ))`.
pub fn lambda_dense(n: usize, rho: f64, c1: f64) -> Result<f64> {
    check_rho(rho)?;
    if n == 0 {
        return Err(PcpError::param("n", "must be at least 1"));
    }
    if !(c1 >= 0.0) || !c1.is_finite() {
        return Err(PcpError::param("C1", format!("must be a nonnegative finite constant, got {c1}")));
    }
    let base = ((1.0 - rho) / (n as f64 * rho)).sqrt() / (4.0 * (1.0 - rho).sqrt() + 2.25);
    Ok(c1 * base)
}

/// Classical weighting `n^{-1/2}`.
pub fn lambda_classic(n: usize) -> f64 {
    1.0 / (n as f64).sqrt()
}

/// `r < C2·n / (μ·ln²n)`.
pub fn rank_bound_ok(n: usize, r: usize, mu: f64, c2: f64) -> bool {
    let ln = (n as f64).ln();
    (r as f64) < c2 * n as f64 / (mu * ln * ln)
}
