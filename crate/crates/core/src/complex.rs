//! Complex vectors and square matrices, plus the two phase-style coordinate
//! types used throughout: points on the 2-torus and unimodular phase vectors
//! pinned to 1 in their first coordinate.
//!
//! The inner product is conjugate-linear in its second argument:
//! `inner(x, y) = sum_i x_i * conj(y_i)`.

use std::f64::consts::PI;
use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest matrix order handled by the dense kernels.
pub const MAX_ORDER: usize = 9;

/// Nonempty complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::dimension("vector must have at least one entry"));
        }
        Ok(ComplexVector { data })
    }

    /// Builds a vector of length `n >= 1` from a coordinate function.
    pub fn from_fn(n: usize, f: impl FnMut(usize) -> C64) -> Self {
        assert!(n >= 1, "vector length must be positive");
        ComplexVector {
            data: (0..n).map(f).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.data.iter()
    }

    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: C64) -> ComplexVector {
        ComplexVector {
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

/// Square complex matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: Vec<Vec<C64>>,
}

impl ComplexMatrix {
    pub fn new(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::dimension("matrix must have at least one row"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::dimension(format!(
                "matrix rows must all have length {n}"
            )));
        }
        Ok(ComplexMatrix { rows })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(n >= 1, "matrix order must be positive");
        ComplexMatrix {
            rows: (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix::from_fn(n, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    /// Matrix-vector product `A x`.
    pub fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if x.dim() != self.n() {
            return Err(Error::dimension(format!(
                "matrix order {} does not match vector length {}",
                self.n(),
                x.dim()
            )));
        }
        Ok(ComplexVector::from_fn(self.n(), |i| {
            self.rows[i]
                .iter()
                .zip(x.iter())
                .map(|(a, b)| a * b)
                .sum()
        }))
    }

    /// Matrix product `A B`.
    pub fn compose(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.n();
        if other.n() != n {
            return Err(Error::dimension(format!(
                "cannot multiply orders {} and {}",
                n,
                other.n()
            )));
        }
        Ok(ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| self.rows[i][k] * other.rows[k][j]).sum()
        }))
    }

    pub fn scaled(&self, c: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|z| z * c).collect())
                .collect(),
        }
    }

    pub fn max_entry_modulus(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn entry_modulus_sum(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm())
            .sum()
    }

    /// Block diagonal matrix from two square blocks.
    pub fn block_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let (na, n) = (a.n(), a.n() + b.n());
        ComplexMatrix::from_fn(n, |i, j| match (i < na, j < na) {
            (true, true) => a.entry(i, j),
            (false, false) => b.entry(i - na, j - na),
            _ => C64::new(0.0, 0.0),
        })
    }
}

/// `sum_i x_i * conj(y_i)`; conjugate-linear in `y`.
pub fn inner(x: &ComplexVector, y: &ComplexVector) -> Result<C64> {
    if x.dim() != y.dim() {
        return Err(Error::dimension(format!(
            "inner product of lengths {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum())
}

/// The l^p norm for `p in [1, inf]`; pass `f64::INFINITY` for the sup norm.
pub fn pnorm(x: &ComplexVector, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::domain(format!("pnorm exponent {p} is not in [1, inf]")));
    }
    if p.is_infinite() {
        return Ok(x.max_modulus());
    }
    let m = x.max_modulus();
    if m == 0.0 {
        return Ok(0.0);
    }
    // Scale by the largest modulus so the powers cannot overflow.
    let sum: f64 = x.iter().map(|z| (z.norm() / m).powf(p)).sum();
    Ok(m * sum.powf(1.0 / p))
}

/// Conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.n(), |i, j| a.entry(j, i).conj())
}

/// Determinant by LU elimination with partial pivoting; orders up to 9.
pub fn det(a: &ComplexMatrix) -> Result<C64> {
    let n = a.n();
    if n > MAX_ORDER {
        return Err(Error::dimension(format!(
            "determinant supports orders up to {MAX_ORDER}, got {n}"
        )));
    }
    let mut m: Vec<Vec<C64>> = a.rows.clone();
    let mut result = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        if pivot != col {
            m.swap(pivot, col);
            result = -result;
        }
        result *= m[col][col];
        for i in col + 1..n {
            let factor = m[i][col] / m[col][col];
            for j in col..n {
                let sub = factor * m[col][j];
                m[i][j] -= sub;
            }
        }
    }
    Ok(result)
}

/// Matrix inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.n();
    let scale = a.max_entry_modulus();
    if scale == 0.0 {
        return Err(Error::domain("cannot invert the zero matrix"));
    }
    let mut m: Vec<Vec<C64>> = a.rows.clone();
    let mut inv = ComplexMatrix::identity(n).rows;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[pivot][col].norm() <= 1e-14 * scale {
            return Err(Error::domain("matrix is numerically singular"));
        }
        m.swap(pivot, col);
        inv.swap(pivot, col);
        let d = m[col][col];
        for j in 0..n {
            m[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let factor = m[i][col];
                for j in 0..n {
                    let (a_sub, b_sub) = (factor * m[col][j], factor * inv[col][j]);
                    m[i][j] -= a_sub;
                    inv[i][j] -= b_sub;
                }
            }
        }
    }
    ComplexMatrix::new(inv)
}

fn normalize_angle(t: f64) -> f64 {
    let w = (t + PI).rem_euclid(2.0 * PI);
    w - PI
}

/// Point on the 2-torus, stored in the fundamental square `[-pi, pi)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    theta1: f64,
    theta2: f64,
}

impl TorusPoint {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !theta1.is_finite() || !theta2.is_finite() {
            return Err(Error::domain("torus coordinates must be finite"));
        }
        Ok(TorusPoint {
            theta1: normalize_angle(theta1),
            theta2: normalize_angle(theta2),
        })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// The phase vector `(1, e^{i theta1}, e^{i theta2})`.
    pub fn phase_vector(&self) -> ComplexVector {
        ComplexVector::from_fn(3, |i| match i {
            0 => C64::new(1.0, 0.0),
            1 => C64::from_polar(1.0, self.theta1),
            _ => C64::from_polar(1.0, self.theta2),
        })
    }
}

/// Unimodular vector with its first coordinate fixed to exactly 1,
/// represented by the `n - 1` free angles of the remaining coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    free_angles: Vec<f64>,
}

impl PhaseVector {
    pub fn new(free_angles: Vec<f64>) -> Result<Self> {
        if free_angles.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("phase angles must be finite"));
        }
        Ok(PhaseVector { free_angles })
    }

    pub fn dim(&self) -> usize {
        self.free_angles.len() + 1
    }

    pub fn free_angles(&self) -> &[f64] {
        &self.free_angles
    }

    pub fn realize(&self) -> ComplexVector {
        ComplexVector::from_fn(self.dim(), |i| {
            if i == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::from_polar(1.0, self.free_angles[i - 1])
            }
        })
    }
}

/// Materializes a phase vector; the first coordinate is exactly `1 + 0i`.
pub fn phase_vector_realize(p: &PhaseVector) -> ComplexVector {
    p.realize()
}
