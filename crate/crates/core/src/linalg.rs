//! Dense complex matrices and the handful of kernels the solvers need:
//! products, norms, LU factorisation with partial pivoting and a 1-norm
//! condition estimate.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Index, IndexMut};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn add(&self, other: &CMatrix) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(l)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum()).collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest column sum of moduli.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// LU factorisation `P A = L U` with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: CMatrix,
    pivots: Vec<usize>,
}

impl LuFactors {
    pub fn new(matrix: &CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("LU of a non-square matrix".into()));
        }
        let n = matrix.rows();
        let mut lu = matrix.clone();
        let mut pivots = Vec::with_capacity(n);
        let scale = matrix.max_abs();
        for k in 0..n {
            let (p, pivot_abs) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= scale * f64::EPSILON * 1e-6 || pivot_abs == 0.0 {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            pivots.push(p);
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
            }
            let inv = ONE / lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] * inv;
                lu[(i, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                let (upper, lower) = lu.data.split_at_mut(i * n);
                let pivot_row = &upper[k * n + k + 1..k * n + n];
                for (target, &src) in lower[k + 1..n].iter_mut().zip(pivot_row) {
                    *target -= factor * src;
                }
            }
        }
        Ok(Self { lu, pivots })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut x = b.to_vec();
        for (k, &p) in self.pivots.iter().enumerate() {
            x.swap(k, p);
        }
        for i in 0..n {
            let row = self.lu.row(i);
            let s: Complex64 = row[..i].iter().zip(&x[..i]).map(|(&a, &b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: Complex64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(&a, &b)| a * b).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `A^* x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut x = b.to_vec();
        // U^* y = b
        for i in 0..n {
            let s = x[..i].iter().enumerate().fold(x[i], |s, (k, xk)| s - self.lu[(k, i)].conj() * xk);
            x[i] = s / self.lu[(i, i)].conj();
        }
        // L^* w = y
        for i in (0..n).rev() {
            x[i] = x[i + 1..].iter().enumerate().fold(x[i], |s, (k, xk)| s - self.lu[(i + 1 + k, i)].conj() * xk);
        }
        for (k, &p) in self.pivots.iter().enumerate().rev() {
            x.swap(k, p);
        }
        x
    }

    /// Hager–Higham estimate of `‖A⁻¹‖₁`.
    pub fn inverse_norm_one_estimate(&self) -> f64 {
        let n = self.dim();
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut estimate = 0.0;
        let mut last_index = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = y.iter().map(|z| z.norm()).sum::<f64>();
            let xi: Vec<Complex64> = y.iter().map(|&z| if z.norm() > 0.0 { z / z.norm() } else { ONE }).collect();
            let z = self.solve_adjoint(&xi);
            let (j, zmax) =
                z.iter().enumerate().map(|(i, v)| (i, v.norm())).fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_index {
                break;
            }
            last_index = j;
            x = vec![ZERO; n];
            x[j] = ONE;
        }
        // Alternative test vector guards against unlucky cancellation.
        let alt: Vec<Complex64> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * (1.0 + i as f64 / (n as f64 - 1.0).max(1.0)), 0.0)
            })
            .collect();
        let alt_est = 2.0 * vec_norm_one(&self.solve(&alt)) / (3.0 * n as f64);
        estimate.max(alt_est)
    }
}

fn vec_norm_one(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> CMatrix {
        CMatrix::from_fn(5, 5, |i, j| {
            let t = (i * 5 + j) as f64;
            c((t * 0.37).sin() + if i == j { 3.0 } else { 0.0 }, (t * 0.91).cos())
        })
    }

    #[test]
    fn lu_solves_and_adjoint_solves() {
        let a = sample();
        let lu = LuFactors::new(&a).unwrap();
        let b: Vec<Complex64> = (0..5).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let x = lu.solve(&b);
        let r = a.matvec(&x).unwrap();
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-12);
        }
        let y = lu.solve_adjoint(&b);
        let r = a.adjoint().matvec(&y).unwrap();
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = CMatrix::from_fn(3, 3, |i, _| c(i as f64, 0.0));
        assert!(matches!(LuFactors::new(&a), Err(Error::Singular(_))));
    }

    #[test]
    fn condition_estimate_is_exact_for_diagonal() {
        let a = CMatrix::diagonal(&[4.0, 2.0, 1e-3]);
        let lu = LuFactors::new(&a).unwrap();
        assert!((lu.inverse_norm_one_estimate() - 1e3).abs() < 1e-9);
    }

    #[test]
    fn matmul_against_identity_and_adjoint_product() {
        let a = sample();
        assert_eq!(a.matmul(&CMatrix::identity(5)).unwrap(), a);
        let g = a.adjoint().matmul(&a).unwrap();
        // A^*A is Hermitian
        assert!(g.sub(&g.adjoint()).unwrap().frobenius_norm() < 1e-12);
        assert!(a.matmul(&CMatrix::zeros(4, 4)).is_err());
    }
}
