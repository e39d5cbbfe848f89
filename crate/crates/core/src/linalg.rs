//! Closed-form 2x2 complex matrix arithmetic.
//!
//! Everything in the network model is at most 2x2: the data channel, the
//! cooperation-degraded channels, transmit covariances and their Gram
//! matrices. Determinants, eigenpairs, square roots and SVDs are therefore
//! computed in closed form rather than through a general linear-algebra
//! backend.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance on eigenvalues when testing positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-12;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A general 2x2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex2x2 {
    m: [[C64; 2]; 2],
}

/// A 2x2 Hermitian matrix `[[a, b], [conj(b), d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2x2 {
    a: f64,
    d: f64,
    b: C64,
}

/// Singular value decomposition `M = U diag(sigma) V^H` with descending `sigma`.
#[derive(Debug, Clone, Copy)]
pub struct Svd {
    pub u: Complex2x2,
    pub sigma: [f64; 2],
    pub v: Complex2x2,
}

/// Eigen-decomposition of a Hermitian matrix; eigenvectors are the columns
/// of `vectors`, matching the descending `values`.
#[derive(Debug, Clone, Copy)]
pub struct Eigen {
    pub values: [f64; 2],
    pub vectors: Complex2x2,
}

impl Complex2x2 {
    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn new(entries: [C64; 4]) -> Result<Self> {
        if let Some(index) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteEntry { index });
        }
        Ok(Self::from_rows([entries[0], entries[1]], [entries[2], entries[3]]))
    }

    pub(crate) const fn from_rows(r0: [C64; 2], r1: [C64; 2]) -> Self {
        Self { m: [r0, r1] }
    }

    pub const fn zero() -> Self {
        Self::from_rows([ZERO, ZERO], [ZERO, ZERO])
    }

    pub const fn identity() -> Self {
        Self::from_rows([ONE, ZERO], [ZERO, ONE])
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[row][col]
    }

    pub fn row(&self, i: usize) -> [C64; 2] {
        self.m[i]
    }

    pub fn col(&self, j: usize) -> [C64; 2] {
        [self.m[0][j], self.m[1][j]]
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::from_rows([m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()])
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Multiplies row `i` by a real factor.
    pub fn scale_row(mut self, i: usize, factor: f64) -> Self {
        self.m[i][0] *= factor;
        self.m[i][1] *= factor;
        self
    }

    pub fn mul_vec(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `A h A^H`, Hermitian by construction.
    pub fn congruence(&self, h: &Hermitian2x2) -> Hermitian2x2 {
        let p = *self * h.to_matrix();
        let r0 = self.m[0];
        let r1 = self.m[1];
        let a = p.m[0][0] * r0[0].conj() + p.m[0][1] * r0[1].conj();
        let d = p.m[1][0] * r1[0].conj() + p.m[1][1] * r1[1].conj();
        let b = p.m[0][0] * r1[0].conj() + p.m[0][1] * r1[1].conj();
        Hermitian2x2::new(a.re, d.re, b)
    }

    /// `A^H h A`.
    pub fn adjoint_congruence(&self, h: &Hermitian2x2) -> Hermitian2x2 {
        self.adjoint().congruence(h)
    }

    /// `A A^H`.
    pub fn gram(&self) -> Hermitian2x2 {
        let [r0, r1] = self.m;
        Hermitian2x2::new(
            r0[0].norm_sqr() + r0[1].norm_sqr(),
            r1[0].norm_sqr() + r1[1].norm_sqr(),
            r0[0] * r1[0].conj() + r0[1] * r1[1].conj(),
        )
    }

    pub fn svd(&self) -> Svd {
        let eig = self.adjoint().gram().eigen();
        let sigma = [eig.values[0].max(0.0).sqrt(), eig.values[1].max(0.0).sqrt()];
        let v = eig.vectors;

        let u1 = if sigma[0] > 0.0 {
            let w = self.mul_vec(v.col(0));
            [w[0] / sigma[0], w[1] / sigma[0]]
        } else {
            [ONE, ZERO]
        };
        let perp = [-u1[1].conj(), u1[0].conj()];
        // Rotate the completing vector so that u2^H M v2 is real and nonnegative.
        let w2 = self.mul_vec(v.col(1));
        let proj = perp[0].conj() * w2[0] + perp[1].conj() * w2[1];
        let phase = if proj.norm() > 0.0 { proj / proj.norm() } else { ONE };
        let u2 = [perp[0] * phase, perp[1] * phase];
        let u = Self::from_rows([u1[0], u2[0]], [u1[1], u2[1]]);
        Svd { u, sigma, v }
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for Complex2x2 {
    type Output = Complex2x2;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self::from_rows(
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        )
    }
}

impl Add for Complex2x2 {
    type Output = Complex2x2;

    fn add(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self::from_rows(
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        )
    }
}

impl Hermitian2x2 {
    /// `[[a, off], [conj(off), d]]`.
    pub const fn new(a: f64, d: f64, off: C64) -> Self {
        Self { a, d, b: off }
    }

    pub const fn diag(a: f64, d: f64) -> Self {
        Self::new(a, d, ZERO)
    }

    pub const fn zero() -> Self {
        Self::diag(0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Self::diag(1.0, 1.0)
    }

    /// `weight * v v^H`.
    pub fn outer(v: [C64; 2], weight: f64) -> Self {
        Self::new(
            weight * v[0].norm_sqr(),
            weight * v[1].norm_sqr(),
            v[0] * v[1].conj() * weight,
        )
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn off(&self) -> C64 {
        self.b
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b.norm_sqr()
    }

    pub fn to_matrix(&self) -> Complex2x2 {
        Complex2x2::from_rows([C64::new(self.a, 0.0), self.b], [self.b.conj(), C64::new(self.d, 0.0)])
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.d.is_finite() && self.b.re.is_finite() && self.b.im.is_finite()
    }

    /// True when both eigenvalues are at least `-PSD_TOL`.
    pub fn is_psd(&self) -> bool {
        eig_hermitian(self).1 >= -PSD_TOL
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.d - other.d).abs())
            .max((self.b - other.b).norm())
    }

    pub fn eigen(&self) -> Eigen {
        let (l1, l2) = eig_hermitian(self);
        let vectors = if self.b.norm() == 0.0 {
            if self.a >= self.d {
                Complex2x2::identity()
            } else {
                Complex2x2::from_rows([ZERO, ONE], [ONE, ZERO])
            }
        } else {
            // Both (l1 - d, conj b) and (b, l1 - a) span the top eigenspace;
            // pick the better conditioned one.
            let v = if self.a >= self.d {
                [C64::new(l1 - self.d, 0.0), self.b.conj()]
            } else {
                [self.b, C64::new(l1 - self.a, 0.0)]
            };
            let n = v[0].norm().hypot(v[1].norm());
            let v1 = [v[0] / n, v[1] / n];
            let v2 = [-v1[1].conj(), v1[0].conj()];
            Complex2x2::from_rows([v1[0], v2[0]], [v1[1], v2[1]])
        };
        Eigen {
            values: [l1, l2],
            vectors,
        }
    }

    /// Rebuilds `V diag(values) V^H`.
    pub fn from_eigen(values: [f64; 2], vectors: &Complex2x2) -> Self {
        Self::outer(vectors.col(0), values[0]) + Self::outer(vectors.col(1), values[1])
    }

    /// Principal square root of a PSD matrix; slightly negative
    /// eigenvalues are clamped to zero.
    pub fn sqrt_psd(&self) -> Self {
        let e = self.eigen();
        Self::from_eigen([e.values[0].max(0.0).sqrt(), e.values[1].max(0.0).sqrt()], &e.vectors)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::DegenerateChannel("singular Hermitian matrix".into()));
        }
        Ok(Self::new(self.d / det, self.a / det, -self.b / det))
    }

    /// `M^{-1/2}` for a positive definite matrix.
    pub fn inv_sqrt(&self) -> Result<Self> {
        let e = self.eigen();
        if e.values[1] <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                eigenvalue: e.values[1],
            });
        }
        Ok(Self::from_eigen(
            [1.0 / e.values[0].sqrt(), 1.0 / e.values[1].sqrt()],
            &e.vectors,
        ))
    }
}

impl Add for Hermitian2x2 {
    type Output = Hermitian2x2;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.d + rhs.d, self.b + rhs.b)
    }
}

impl Sub for Hermitian2x2 {
    type Output = Hermitian2x2;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.d - rhs.d, self.b - rhs.b)
    }
}

impl Mul<f64> for Hermitian2x2 {
    type Output = Hermitian2x2;

    fn mul(self, s: f64) -> Self {
        Self::new(self.a * s, self.d * s, self.b * s)
    }
}

/// `log2 det(I + m)` via `(1 + a)(1 + d) - |b|^2`.
pub fn logdet_i_plus(m: &Hermitian2x2) -> Result<f64> {
    let (_, low) = eig_hermitian(m);
    if low <= -1.0 + PSD_TOL {
        return Err(Error::NotPositiveDefinite { eigenvalue: low });
    }
    let det = (1.0 + m.a) * (1.0 + m.d) - m.b.norm_sqr();
    Ok(det.log2())
}

/// Eigenvalues of a Hermitian 2x2 matrix, descending.
pub fn eig_hermitian(m: &Hermitian2x2) -> (f64, f64) {
    let mean = 0.5 * (m.a + m.d);
    let half_gap = 0.5 * (m.a - m.d);
    let radius = half_gap.hypot(m.b.norm());
    (mean + radius, mean - radius)
}

/// `row * m * row^H`.
pub fn quad_form(row: [C64; 2], m: &Hermitian2x2) -> f64 {
    m.a * row[0].norm_sqr() + m.d * row[1].norm_sqr() + 2.0 * (row[0] * m.b * row[1].conj()).re
}
