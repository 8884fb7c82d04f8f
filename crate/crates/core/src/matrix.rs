//! Dense row-major matrix storage, the handful of kernels the solver and
//! certificate code need, and the `PCPM` binary file format.
//!
//! `PCPM` layout (all little-endian):
//!
//! | bytes | content                         |
//! |-------|---------------------------------|
//! | 4     | magic `b"PCPM"`                 |
//! | 4     | version, `u32` = 1              |
//! | 8     | rows, `u64`                     |
//! | 8     | cols, `u64`                     |
//! | 8·r·c | entries, `f64`, row-major order |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::ops::{Index, IndexMut};
use std::path::Path;

use crate::error::{PcpError, Result};

pub const PCPM_MAGIC: &[u8; 4] = b"PCPM";
pub const PCPM_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(PcpError::ShapeMismatch { rows, cols, len: data.len() });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(PcpError::NonFinite { row: pos / cols.max(1), col: pos % cols.max(1), value: data[pos] });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(PcpError::Dimension("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.iter().flat_map(|row| row.iter().copied()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// The closure must produce finite values; this is checked in debug builds.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|x| x.is_finite()));
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// First `k` columns.
    pub fn leading_columns(&self, k: usize) -> Self {
        assert!(k <= self.cols);
        Self::from_fn(self.rows, k, |i, j| self[(i, j)])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| s * x)
    }

    pub fn scale_in_place(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.assert_same_shape(other);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        self.assert_same_shape(other);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    fn assert_same_shape(&self, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "matrix shapes differ");
    }

    /// Frobenius inner product `<A, B> = tr(AᵀB)`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.assert_same_shape(other);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Entrywise 1-norm, `Σ|m_ij|`.
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).sum()
    }

    /// Entrywise max-norm, `max|m_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&x| x != 0.0).count()
    }

    /// `self · other`
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `selfᵀ · other` without materialising the transpose.
    pub fn tr_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "outer dimensions differ");
        let mut out = Self::zeros(self.cols, other.cols);
        for i in 0..self.rows {
            let b_row = other.row(i);
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self · otherᵀ`
    pub fn matmul_tr(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a_row = self.row(i);
            for j in 0..other.rows {
                out.data[i * other.rows + j] = a_row.iter().zip(other.row(j)).map(|(a, b)| a * b).sum();
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    pub fn write_pcpm<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(PCPM_MAGIC)?;
        w.write_all(&PCPM_VERSION.to_le_bytes())?;
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        for x in &self.data {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_pcpm<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != PCPM_MAGIC {
            return Err(PcpError::Format(format!("bad magic {magic:?}")));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let version = u32::from_le_bytes(word);
        if version != PCPM_VERSION {
            return Err(PcpError::Format(format!("unsupported version {version}")));
        }
        let mut dword = [0u8; 8];
        r.read_exact(&mut dword)?;
        let rows = u64::from_le_bytes(dword);
        r.read_exact(&mut dword)?;
        let cols = u64::from_le_bytes(dword);
        let len = rows
            .checked_mul(cols)
            .and_then(|n| usize::try_from(n).ok())
            .ok_or_else(|| PcpError::Format(format!("dimensions {rows}x{cols} overflow")))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != len * 8 {
            return Err(PcpError::Format(format!("expected {} payload bytes, found {}", len * 8, bytes.len())));
        }
        let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Self::from_vec(rows as usize, cols as usize, data)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_pcpm(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_pcpm(BufReader::new(File::open(path)?))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(DenseMatrix::from_vec(2, 2, vec![1.0; 3]), Err(PcpError::ShapeMismatch { .. })));
        let err = DenseMatrix::from_vec(2, 2, vec![1.0, 2.0, f64::NAN, 0.0]).unwrap_err();
        assert!(matches!(err, PcpError::NonFinite { row: 1, col: 0, .. }));
        assert!(DenseMatrix::from_vec(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn degenerate_shapes() {
        let empty = DenseMatrix::from_vec(0, 0, vec![]).unwrap();
        assert_eq!(empty.frobenius_norm(), 0.0);
        assert_eq!(empty.matmul(&empty).shape(), (0, 0));
        let tall = DenseMatrix::zeros(3, 0);
        assert_eq!(tall.matmul_tr(&tall), DenseMatrix::zeros(3, 3));
    }

    #[test]
    fn products_agree() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0, 0.0], &[-1.0, 0.5, 3.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[&[2.0, 1.0], &[0.0, -1.0], &[4.0, 1.0]]).unwrap();
        let ab = a.matmul(&b);
        assert_eq!(ab, DenseMatrix::from_rows(&[&[2.0, -1.0], &[10.0, 1.5]]).unwrap());
        assert_eq!(a.transpose().tr_matmul(&b), ab);
        assert_eq!(a.matmul_tr(&b.transpose()), ab);
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]), vec![3.0, 2.5]);
        assert_eq!(a.tr_matvec(&[1.0, 1.0]), vec![0.0, 2.5, 3.0]);
    }

    #[test]
    fn pcpm_layout_is_exact() {
        let m = DenseMatrix::from_rows(&[&[1.0, -2.5]]).unwrap();
        let mut buf = Vec::new();
        m.write_pcpm(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"PCPM");
        assert_eq!(&buf[4..8], &1u32.to_le_bytes());
        assert_eq!(&buf[8..16], &1u64.to_le_bytes());
        assert_eq!(&buf[16..24], &2u64.to_le_bytes());
        assert_eq!(&buf[24..32], &1.0f64.to_le_bytes());
        assert_eq!(&buf[32..40], &(-2.5f64).to_le_bytes());
        assert_eq!(buf.len(), 40);
        assert_eq!(DenseMatrix::read_pcpm(&buf[..]).unwrap(), m);
    }

    #[test]
    fn pcpm_rejects_corruption() {
        let m = DenseMatrix::identity(2);
        let mut buf = Vec::new();
        m.write_pcpm(&mut buf).unwrap();
        let mut bad_magic = buf.clone();
        bad_magic[0] = b'X';
        assert!(matches!(DenseMatrix::read_pcpm(&bad_magic[..]), Err(PcpError::Format(_))));
        let mut bad_version = buf.clone();
        bad_version[4] = 2;
        assert!(matches!(DenseMatrix::read_pcpm(&bad_version[..]), Err(PcpError::Format(_))));
        assert!(matches!(DenseMatrix::read_pcpm(&buf[..buf.len() - 1]), Err(PcpError::Format(_))));
        let mut nan = buf.clone();
        nan[24..32].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(DenseMatrix::read_pcpm(&nan[..]), Err(PcpError::NonFinite { .. })));
    }
}
