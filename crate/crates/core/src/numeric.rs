//! Small numeric toolbox: a scalar trait shared by `f64` and double-double,
//! compensated and pairwise summation, and grid helpers.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use twofloat::TwoFloat;

/// Field operations needed by the generic difference operators and matrix code.
pub trait Real:
    Copy
    + PartialOrd
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    /// `self / rhs`, accurate to the working precision.
    fn quot(self, rhs: Self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn quot(self, rhs: Self) -> Self {
        self / rhs
    }
}

impl Real for TwoFloat {
    fn from_f64(v: f64) -> Self {
        TwoFloat::from(v)
    }
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
    fn quot(self, rhs: Self) -> Self {
        dd_div(self, rhs)
    }
}

/// Double-double quotient by long division on the leading word.
///
/// `twofloat`'s own `TwoFloat / TwoFloat` forms its residual without a fused
/// multiply-add and is only accurate to about one `f64` ulp; its products and
/// sums are exact to double-double precision, so each correction step here
/// recovers another 53 bits.
pub fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r1 = a - b * q1;
    let q2 = r1.hi() / b.hi();
    let r2 = r1 - b * q2;
    let q3 = r2.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

/// Neumaier's improved Kahan summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of complex values (real and imaginary parts independently).
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Sequential compensated sum in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}

/// Pairwise (tree) summation; an independent reduction order used as a cross-check.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `n` points spaced uniformly in log between `a` and `b` inclusive.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..n)
                .map(|i| match i {
                    0 => a,
                    i if i == n - 1 => b,
                    _ => (la + (lb - la) * i as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

/// `n` points spaced uniformly between `a` and `b` inclusive.
pub fn lin_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
        assert_eq!(v.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn pairwise_matches_exact_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
    }

    #[test]
    fn twofloat_roundtrip() {
        let x = <TwoFloat as Real>::from_f64(0.1);
        assert_eq!(x.to_f64(), 0.1);
        let third = dd_div(TwoFloat::from(1.0), TwoFloat::from(3.0));
        assert!((third * TwoFloat::from(3.0) - TwoFloat::from(1.0)).hi().abs() < 1e-31);
        let q = dd_div(TwoFloat::new_add(2.0, 1e-20), TwoFloat::new_add(7.0, -3e-19));
        let back = q * TwoFloat::new_add(7.0, -3e-19) - TwoFloat::new_add(2.0, 1e-20);
        assert!(back.hi().abs() < 1e-31);
    }

    #[test]
    fn grids_hit_endpoints() {
        let g = log_grid(10.0, 1000.0, 3);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[2], 1000.0);
        assert!((g[1] - 100.0).abs() < 1e-12);
        assert_eq!(lin_grid(0.0, 1.0, 5)[2], 0.5);
    }
}
