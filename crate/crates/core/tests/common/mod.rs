//! Independent reference implementations shared by the integration tests.
//! Everything numerical here goes through nalgebra, never through the
//! crate's own decompositions.
#![allow(dead_code)]

use nalgebra::DMatrix;
use pcp_core::matrix::DenseMatrix;
use pcp_core::rng::SeededRng;

pub fn gaussian(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = SeededRng::new(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| rng.normal())
}

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values, largest first.
pub fn ref_singular_values(m: &DenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn ref_nuclear(m: &DenseMatrix) -> f64 {
    ref_singular_values(m).iter().sum()
}

fn ref_svt(m: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let shrunk = svd.singular_values.map(|s| (s - tau).max(0.0));
    u * DMatrix::from_diagonal(&shrunk) * vt
}

fn soft(x: f64, tau: f64) -> f64 {
    x.signum() * (x.abs() - tau).max(0.0)
}

pub struct OracleSolution {
    pub l: DenseMatrix,
    pub objective: f64,
    pub iterations: usize,
}

/// Douglas–Rachford splitting on `‖L‖_* + λ‖D − L‖₁`, run until the fixed
/// point residual is at round-off level or `max_iters` is reached.
pub fn douglas_rachford(d: &DenseMatrix, lambda: f64, max_iters: usize) -> OracleSolution {
    let dn = to_na(d);
    let step = 1.0;
    let mut z = dn.clone();
    let mut l = ref_svt(&z, step);
    let scale = 1.0 + dn.norm();
    let mut iterations = max_iters;
    for it in 0..max_iters {
        l = ref_svt(&z, step);
        let reflect = &l * 2.0 - &z;
        let m = dn.zip_map(&(&dn - &reflect), |dv, r| dv - soft(r, step * lambda));
        let gap = (&m - &l).norm();
        z += &m - &l;
        if gap <= 1e-13 * scale {
            iterations = it + 1;
            break;
        }
    }
    let l_out = from_na(&l);
    let objective = ref_nuclear(&l_out) + lambda * d.sub(&l_out).l1_norm();
    OracleSolution { l: l_out, objective, iterations }
}

/// Minimiser of `τ|x| + ½(x − m)²` by ternary search on a bracket around `m`.
pub fn scalar_prox_search(m: f64, tau: f64) -> f64 {
    let f = |x: f64| tau * x.abs() + 0.5 * (x - m) * (x - m);
    let (mut lo, mut hi) = (m - tau.abs() - 1.0, m + tau.abs() + 1.0);
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

/// Matrix of `X ↦ f(X)` on `n × n` matrices in the row-major basis.
pub fn operator_matrix(n: usize, f: impl Fn(&DenseMatrix) -> DenseMatrix) -> DMatrix<f64> {
    let dim = n * n;
    let mut out = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut basis = DenseMatrix::zeros(n, n);
        basis.as_mut_slice()[k] = 1.0;
        let image = f(&basis);
        for (i, &v) in image.as_slice().iter().enumerate() {
            out[(i, k)] = v;
        }
    }
    out
}
