//! Minimal complex linear algebra: the handful of kernels the rest of the
//! crate needs (inner products, Hermitian systems via Cholesky), nothing more.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Condition-estimate ceiling beyond which a system is treated as singular.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Hermitian inner product `a^H b`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sq(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Squared Euclidean norm of a real vector.
pub fn norm_sq_real(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix rows must form a square".into()));
        }
        let mut m = CMat::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    /// `A += w * h h^H` for real `w`.
    pub fn add_scaled_outer(&mut self, w: f64, h: &[C64]) {
        debug_assert_eq!(h.len(), self.n);
        for i in 0..self.n {
            let hi = h[i];
            for j in 0..self.n {
                self.data[i * self.n + j] += w * hi * h[j].conj();
            }
        }
    }

    /// `A += x * I` for real `x`.
    pub fn add_diag(&mut self, x: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += x;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Largest elementwise deviation from the conjugate transpose.
    pub fn hermitian_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                let d = (self.at(i, j) - self.at(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn trace_abs(&self) -> f64 {
        (0..self.n).map(|i| self.at(i, i).norm()).sum()
    }

    /// Cholesky factorization `A = L L^H` with `L` lower triangular and a
    /// real positive diagonal. Fails when a pivot is non-positive.
    pub fn cholesky(&self) -> Result<CholFactor> {
        let n = self.n;
        let mut l = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.at(j, j).re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { row: j, pivot: d });
            }
            let ljj = d.sqrt();
            l[j * n + j] = C64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut s = self.at(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(CholFactor { n, l })
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct CholFactor {
    n: usize,
    l: Vec<C64>,
}

impl CholFactor {
    /// Solve `A x = b` given `A = L L^H`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        // forward: L y = b
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[i * n + k];
                y[i] = y[i] - lik * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        // backward: L^H x = y
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let lki = self.l[k * n + i].conj();
                y[i] = y[i] - lki * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        y
    }

    /// Cheap spectral condition estimate from the factor diagonal:
    /// `(max L_jj / min L_jj)^2`.
    pub fn condition_estimate(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for j in 0..self.n {
            let d = self.l[j * self.n + j].re;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if lo <= 0.0 {
            return f64::INFINITY;
        }
        (hi / lo) * (hi / lo)
    }
}

/// Solve the Hermitian positive-definite system `A x = b`.
///
/// Performs a Hermitian check, a Cholesky factorization with a condition
/// estimate, and one step of iterative refinement on the solution.
pub fn hermitian_solve(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {0}x{0} but rhs has length {1}",
            a.n(),
            b.len()
        )));
    }
    let scale = a.trace_abs().max(1.0);
    let dev = a.hermitian_violation();
    if dev > 1e-12 * scale {
        return Err(Error::NotHermitian(dev));
    }
    let chol = a.cholesky()?;
    let cond = chol.condition_estimate();
    if cond > CONDITION_LIMIT {
        return Err(Error::SingularSystem { cond, limit: CONDITION_LIMIT });
    }
    let mut x = chol.solve(b);
    // one refinement pass keeps the residual near machine level
    let ax = a.matvec(&x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let dx = chol.solve(&r);
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += di;
    }
    Ok(x)
}

/// Cholesky factor of a real symmetric positive-definite matrix (row-major,
/// lower triangle returned). Used for correlated-Gaussian sampling and the
/// non-identity prior of the posterior-mean predictor.
pub fn real_spd_cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("matrix rows must form a square".into()));
    }
    let mut l = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        l[j][j] = d.sqrt();
        for i in (j + 1)..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / l[j][j];
        }
    }
    Ok(l)
}

/// Solve `A x = b` given the real Cholesky factor `L` of `A`.
pub fn real_chol_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i][k] * y[k];
        }
        y[i] /= l[i][i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[k][i] * y[k];
        }
        y[i] /= l[i][i];
    }
    y
}
