//! Complex singular value decomposition by one-sided Jacobi rotations.
//!
//! Columns of a working copy of `A` are orthogonalised pairwise; the
//! accumulated rotations form `V`, the final column norms are the singular
//! values and the normalised columns form `U`. The method is slow compared
//! to bidiagonalisation but simple, and it delivers singular values with high
//! relative accuracy.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use num_complex::Complex64;

/// Maximum number of full sweeps before giving up.
pub const MAX_SWEEPS: usize = 60;

/// `A = U diag(σ) V*` with `σ` nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl SvdFactors {
    pub fn dim(&self) -> usize {
        self.singular_values.len()
    }

    /// `U* b`.
    pub fn project(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n).map(|j| (0..n).map(|i| self.u[(i, j)].conj() * b[i]).sum()).collect()
    }

    /// `U diag(σ) V*`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let us = CMatrix::from_fn(n, n, |i, j| self.u[(i, j)] * self.singular_values[j]);
        us.matmul(&self.v.adjoint()).expect("square factors")
    }

    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Full SVD of a square complex matrix.
pub fn svd(matrix: &CMatrix) -> Result<SvdFactors> {
    if !matrix.is_square() {
        return Err(Error::Dimension(format!("SVD expects a square matrix, got {}x{}", matrix.rows(), matrix.cols())));
    }
    let n = matrix.rows();
    if matrix.as_slice().iter().any(|z| !z.is_finite()) {
        return Err(Error::Domain("SVD input contains non-finite entries".into()));
    }
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|j| matrix.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let tol = f64::EPSILON * n.max(1) as f64;
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm_sqr(&a[p]);
                let beta = norm_sqr(&a[q]);
                let gamma = dot(&a[p], &a[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate column q so that the pair's inner product is real.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut a, &mut v] {
                    let (left, right) = cols.split_at_mut(q);
                    let (cp, cq) = (&mut left[p], &mut right[0]);
                    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                        let yq = *y * phase;
                        let xp = *x;
                        *x = xp * c - yq * s;
                        *y = xp * s + yq * c;
                    }
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::Convergence { what: "Jacobi SVD".into(), iterations: MAX_SWEEPS });
    }
    let mut order: Vec<(f64, usize)> = a.iter().enumerate().map(|(j, c)| (norm_sqr(c).sqrt(), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let singular_values: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    let scale = singular_values.first().copied().unwrap_or(0.0);
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (pos, &(s, j)) in order.iter().enumerate() {
        if s > 0.0 && s > scale * f64::EPSILON * 1e-3 {
            u_cols.push(a[j].iter().map(|z| z / s).collect());
        } else {
            u_cols.push(Vec::new());
            missing.push(pos);
        }
    }
    complete_basis(&mut u_cols, &missing, n);
    let v_cols: Vec<Vec<Complex64>> = order.iter().map(|&(_, j)| v[j].clone()).collect();
    Ok(SvdFactors { u: CMatrix::from_columns(n, &u_cols), singular_values, v: CMatrix::from_columns(n, &v_cols) })
}

/// Fills the columns listed in `missing` with unit vectors orthogonal to all
/// others, by Gram–Schmidt on the standard basis.
fn complete_basis(cols: &mut [Vec<Complex64>], missing: &[usize], n: usize) {
    let mut candidate = 0;
    for &pos in missing {
        loop {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[candidate] = Complex64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for (i, c) in cols.iter().enumerate() {
                    if c.is_empty() || i == pos {
                        continue;
                    }
                    let proj = dot(c, &e);
                    for (x, y) in e.iter_mut().zip(c) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = norm_sqr(&e).sqrt();
            if norm > 0.5 {
                cols[pos] = e.iter().map(|z| z / norm).collect();
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn orthonormality_defect(m: &CMatrix) -> f64 {
        m.adjoint().matmul(m).unwrap().sub(&CMatrix::identity(m.rows())).unwrap().frobenius_norm()
    }

    #[test]
    fn diagonal_values_are_recovered_in_order() {
        let a = CMatrix::diagonal(&[1.0, 3.0, 2.0]);
        let f = svd(&a).unwrap();
        assert_eq!(f.singular_values, vec![3.0, 2.0, 1.0]);
        let id = svd(&CMatrix::identity(5)).unwrap();
        assert!(id.singular_values.iter().all(|&s| (s - 1.0).abs() < 1e-15));
    }

    #[test]
    fn random_matrix_factors() {
        let a = random_matrix(20, 3);
        let f = svd(&a).unwrap();
        let rec = f.reconstruct().sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(rec < 1e-12, "{rec}");
        assert!(orthonormality_defect(&f.u) < 1e-12);
        assert!(orthonormality_defect(&f.v) < 1e-12);
        assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rank_deficient_and_zero_matrices() {
        let z = svd(&CMatrix::zeros(4, 4)).unwrap();
        assert!(z.singular_values.iter().all(|&s| s == 0.0));
        assert!(orthonormality_defect(&z.u) < 1e-14);
        // rank one
        let x: Vec<Complex64> = (0..6).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let a = CMatrix::from_fn(6, 6, |i, j| x[i] * x[j].conj());
        let f = svd(&a).unwrap();
        assert!(orthonormality_defect(&f.u) < 1e-12);
        let rec = f.reconstruct().sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(rec < 1e-13);
        assert!(f.singular_values[1] < 1e-12 * f.singular_values[0]);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(svd(&CMatrix::zeros(2, 3)).is_err());
    }
}
