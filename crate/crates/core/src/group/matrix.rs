use std::ops::Mul;

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::numeric::Real;

/// A 2×2 matrix of determinant one, read projectively (`M ~ −M`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2<T = TwoFloat> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

/// Largest tolerated `|ad − bc − 1|`.
pub const DET_TOL: f64 = 1e-12;

impl<T: Real> Matrix2<T> {
    /// Checked constructor: rejects matrices whose determinant is not one.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let m = Self { a, b, c, d };
        let det = m.det().to_f64();
        if (det - 1.0).abs() > DET_TOL {
            return Err(Error::InvalidParameter(format!(
                "determinant {det} is not 1"
            )));
        }
        Ok(m)
    }

    pub(crate) fn from_entries(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::from_entries(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Self {
        Self::from_entries(self.d, -self.b, -self.c, self.a)
    }

    /// Representative of `±M` with trace ≥ 0; a zero trace is broken by the
    /// first nonzero entry being positive.
    pub fn normalized(&self) -> Self {
        let t = self.trace().to_f64();
        let flip = if t != 0.0 {
            t < 0.0
        } else {
            [self.a, self.b, self.c, self.d]
                .iter()
                .map(|v| v.to_f64())
                .find(|v| *v != 0.0)
                .is_some_and(|v| v < 0.0)
        };
        if flip {
            Self::from_entries(-self.a, -self.b, -self.c, -self.d)
        } else {
            *self
        }
    }

    pub fn to_f64(&self) -> Matrix2<f64> {
        Matrix2::from_entries(self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), self.d.to_f64())
    }

    /// Squared Frobenius norm; `acosh(‖M‖²/2)` is the distance `M` moves `i`.
    pub fn frobenius_sq(&self) -> T {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    /// Hyperbolic distance from `i` to `M·i` in the upper half-plane.
    pub fn displacement(&self) -> f64 {
        (self.frobenius_sq().to_f64() / 2.0).max(1.0).acosh()
    }

    /// `p·M + q·I`.
    pub fn affine(&self, p: T, q: T) -> Self {
        Self::from_entries(p * self.a + q, p * self.b, p * self.c, p * self.d + q)
    }

    /// Largest entrywise difference between the two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ]
        .iter()
        .map(|v| v.to_f64().abs())
        .fold(0.0, f64::max)
    }
}

impl<T: Real> Mul for Matrix2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_entries(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl<T: Real> Mul for &Matrix2<T> {
    type Output = Matrix2<T>;
    fn mul(self, o: Self) -> Matrix2<T> {
        *self * *o
    }
}
