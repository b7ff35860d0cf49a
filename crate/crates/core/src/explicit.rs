//! Explicit formulas for `ψ₁` and `ψ₂`, difference-operator smoothing and the
//! sandwich reconstruction of `ψ` with step `h = x^{3/4}`.
//!
//! Conventions: the trivial zero `ρ = 1` never enters a spectral sum (its
//! contributions are the main terms `x²/2` and `x³/6`); each stored ordinate
//! `γ` stands for the pair `½ ± iγ` and is folded to `2·Re[…]`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{NeumaierSum, Real};
use crate::spectral::ZeroSet;
use crate::summatory::Summatory;

const MAX_SERIES_TERMS: usize = 50_000_000;

fn need_x_gt_one(x: f64) -> Result<()> {
    if x > 1.0 {
        Ok(())
    } else {
        Err(Error::SeriesDiverges(x))
    }
}

fn series_coeff(k: f64) -> f64 {
    (2.0 * k + 1.0) / (k * (k - 1.0))
}

/// `G(x) = (2g−2)·Σ_{k≥2} (2k+1)/(k(k−1))·x^{1−k}`: the contribution of the
/// zeros at `s = −k`. Summation stops once the next term is below `tol·|sum|`.
pub fn small_series_g(x: f64, g: u32, tol: f64) -> Result<f64> {
    need_x_gt_one(x)?;
    let inv = 1.0 / x;
    let mut pow = inv; // x^{1−k} for k = 2
    let mut sum = NeumaierSum::new();
    for k in 2..MAX_SERIES_TERMS {
        let term = series_coeff(k as f64) * pow;
        sum.add(term);
        let next = series_coeff((k + 1) as f64) * pow * inv;
        if next < tol * sum.value().abs() || next == 0.0 {
            return Ok((2.0 * f64::from(g) - 2.0) * sum.value());
        }
        pow *= inv;
    }
    Err(Error::Numerical(format!("series in x = {x} did not reach tolerance {tol}")))
}

/// `∫₁ˣ G`, integrated term by term: the `k = 2` term gives `(5/2)·log x`,
/// `k ≥ 3` give `(2k+1)/(k(k−1))·(x^{2−k} − 1)/(2−k)`.
///
/// The constant parts `Σ_{k≥3} (2k+1)/(k(k−1)(k−2))` telescope to `9/4`, so
/// only the geometric remainder is summed.
pub fn integrated_series_term(x: f64, g: u32, tol: f64) -> Result<f64> {
    if x == 1.0 {
        return Ok(0.0);
    }
    need_x_gt_one(x)?;
    let inv = 1.0 / x;
    let mut pow = inv; // x^{2−k} for k = 3
    let mut tail = NeumaierSum::new();
    let head = 2.5 * x.ln() + 2.25;
    for k in 3..MAX_SERIES_TERMS {
        let kf = k as f64;
        let term = series_coeff(kf) * pow / (kf - 2.0);
        tail.add(term);
        if term < tol * (head - tail.value()).abs() || term == 0.0 {
            return Ok((2.0 * f64::from(g) - 2.0) * (head - tail.value()));
        }
        pow *= inv;
    }
    Err(Error::Numerical(format!("series in x = {x} did not reach tolerance {tol}")))
}

/// Largest float strictly below `t` (so `γ < t` becomes `γ ≤ below(t)`).
fn below(t: f64) -> f64 {
    if t.is_finite() && t > 0.0 {
        f64::from_bits(t.to_bits() - 1)
    } else {
        t
    }
}

/// Order of the explicit formula: 1 for `ψ₁` (`x^{ρ+1}/(ρ(ρ+1))`), 2 for `ψ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    One,
    Two,
}

impl Order {
    fn shift(self) -> f64 {
        match self {
            Order::One => 1.0,
            Order::Two => 2.0,
        }
    }

    fn denom(self, rho: Complex64) -> Complex64 {
        match self {
            Order::One => rho * (rho + 1.0),
            Order::Two => rho * (rho + 1.0) * (rho + 2.0),
        }
    }
}

/// Folded contribution `2·Re[x^{ρ+s}/D(ρ)]` of one pair `ρ = ½ ± iγ`.
#[inline]
pub fn pair_term(order: Order, log_x: f64, gamma: f64) -> f64 {
    let rho = Complex64::new(0.5, gamma);
    let (s, c) = (gamma * log_x).sin_cos();
    let scale = ((0.5 + order.shift()) * log_x).exp();
    2.0 * scale * (Complex64::new(c, s) / order.denom(rho)).re
}

/// Pairs with `lo < γ ≤ hi`, ascending, compensated.
pub fn pair_sum(zeros: &ZeroSet, order: Order, x: f64, lo: f64, hi: f64) -> f64 {
    let lx = x.ln();
    let mut sum = NeumaierSum::new();
    zeros.for_each_in(lo, hi, |g, m| sum.add(f64::from(m) * pair_term(order, lx, g)));
    sum.value()
}

/// `Σ_{½<ρ<1} x^{ρ+s}/D(ρ)` over the real zeros.
pub fn real_zero_part(zeros: &ZeroSet, order: Order, x: f64) -> f64 {
    zeros
        .real_zeros
        .iter()
        .map(|r| {
            let d = order.denom(Complex64::new(r.rho, 0.0)).re;
            f64::from(r.multiplicity) * x.powf(r.rho + order.shift()) / d
        })
        .collect::<NeumaierSum>()
        .value()
}

/// `Σ_{½<ρ<1} x^{ρ+1}/(ρ(ρ+1)) + Σ_{γ<T} 2·Re[x^{ρ+1}/(ρ(ρ+1))]`.
pub fn spectral_sum_psi1(zeros: &ZeroSet, x: f64, t: f64) -> f64 {
    real_zero_part(zeros, Order::One, x) + pair_sum(zeros, Order::One, x, 0.0, below(t))
}

/// As [`spectral_sum_psi1`] with `x^{ρ+2}/(ρ(ρ+1)(ρ+2))`; `t = ∞` sums every
/// stored ordinate (the series converges absolutely).
pub fn spectral_sum_psi2(zeros: &ZeroSet, x: f64, t: f64) -> f64 {
    real_zero_part(zeros, Order::Two, x) + pair_sum(zeros, Order::Two, x, 0.0, below(t))
}

/// `Σ_{lower<ρ<1} mult·x^ρ/ρ` over the real zeros.
pub fn real_zero_sum(zeros: &ZeroSet, x: f64, lower: f64) -> f64 {
    zeros
        .real_zeros
        .iter()
        .filter(|r| r.rho > lower && r.rho < 1.0)
        .map(|r| f64::from(r.multiplicity) * x.powf(r.rho) / r.rho)
        .collect::<NeumaierSum>()
        .value()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Plus,
    Minus,
}

/// `Δ₁⁺f(x) = f(x+h) − f(x)`, `Δ₁⁻f(x) = f(x) − f(x−h)`.
pub fn delta1<R: Real>(mut f: impl FnMut(R) -> Result<R>, x: R, h: R, dir: Direction) -> Result<R> {
    match dir {
        Direction::Plus => Ok(f(x + h)? - f(x)?),
        Direction::Minus => Ok(f(x)? - f(x - h)?),
    }
}

/// `Δ₂±f(x) = f(x±2h) − 2f(x±h) + f(x)`.
pub fn delta2<R: Real>(mut f: impl FnMut(R) -> Result<R>, x: R, h: R, dir: Direction) -> Result<R> {
    let s = match dir {
        Direction::Plus => h,
        Direction::Minus => -h,
    };
    let two = R::from_f64(2.0);
    Ok(f(x + two * s)? - two * f(x + s)? + f(x)?)
}

/// The two envelope terms of the spectral error after smoothing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSplit {
    pub head: f64,
    pub tail: f64,
}

/// `head = √x·Σ_{|ρ|<M} 1/|ρ|`, `tail = x^{5/2}/h²·Σ_{|ρ|≥M} 1/|ρ|³`, summed
/// over both members of every stored pair, `|ρ| = √(¼+γ²)`.
pub fn tail_split_bound(zeros: &ZeroSet, x: f64, h: f64, m: f64) -> Result<TailSplit> {
    if !(m > 2.0) {
        return Err(Error::InvalidParameter(format!("split point M must exceed 2, got {m}")));
    }
    let (mut head, mut tail) = (NeumaierSum::new(), NeumaierSum::new());
    zeros.for_each_in(0.0, f64::INFINITY, |g, mult| {
        let r = (0.25 + g * g).sqrt();
        let w = 2.0 * f64::from(mult);
        if r < m {
            head.add(w / r);
        } else {
            tail.add(w / (r * r * r));
        }
    });
    Ok(TailSplit { head: x.sqrt() * head.value(), tail: x.powf(2.5) / (h * h) * tail.value() })
}

/// Fitted constants of the smooth parts of the two explicit formulas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothCoefficients {
    pub alpha0: f64,
    pub beta0: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha0p: f64,
    pub beta0p: f64,
    pub alpha1p: f64,
    pub beta2: f64,
    pub genus: u32,
    /// Ordinate cutoff used while fitting (largest stored γ when untruncated).
    pub fit_t: f64,
    pub residual_norm_psi1: f64,
    pub residual_norm_psi2: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
}

impl SmoothCoefficients {
    /// All constants zero: the formulas reduce to main terms plus zeros.
    pub fn zero(genus: u32) -> Self {
        Self {
            alpha0: 0.0,
            beta0: 0.0,
            alpha1: 0.0,
            beta1: 0.0,
            alpha0p: 0.0,
            beta0p: 0.0,
            alpha1p: 0.0,
            beta2: 0.0,
            genus,
            fit_t: 0.0,
            residual_norm_psi1: 0.0,
            residual_norm_psi2: 0.0,
            grid_min: 0.0,
            grid_max: 0.0,
            grid_points: 0,
        }
    }
}

/// Linear least squares `ys ≈ Σ c_i·basis_i(x)` via SVD on column-scaled data.
///
/// Returns the coefficients and the residual 2-norm; a numerically singular
/// design is an error.
pub fn fit_linear<const N: usize>(
    xs: &[f64],
    ys: &[f64],
    basis: impl Fn(f64) -> [f64; N],
) -> Result<([f64; N], f64)> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter("fit: x and y lengths differ".into()));
    }
    if xs.len() < N {
        return Err(Error::RankDeficient(format!("{} points for {N} unknowns", xs.len())));
    }
    let rows: Vec<[f64; N]> = xs.iter().map(|&x| basis(x)).collect();
    let mut scale = [0.0f64; N];
    for r in &rows {
        for j in 0..N {
            scale[j] = scale[j].max(r[j].abs());
        }
    }
    if scale.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return Err(Error::RankDeficient("a basis column vanishes on the grid".into()));
    }
    let a = DMatrix::from_fn(xs.len(), N, |i, j| rows[i][j] / scale[j]);
    let b = DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-13 * smax) {
        return Err(Error::RankDeficient(format!(
            "design condition number {:.3e} on {} points",
            smax / smin,
            xs.len()
        )));
    }
    let sol = svd.solve(&b, 0.0).map_err(|e| Error::Numerical(e.to_string()))?;
    let resid = (&a * &sol - &b).norm();
    let mut c = [0.0; N];
    for j in 0..N {
        c[j] = sol[j] / scale[j];
    }
    Ok((c, resid))
}

fn basis_psi1(x: f64) -> [f64; 4] {
    let l = x.ln();
    [x, x * l, 1.0, l]
}

fn basis_psi2(x: f64) -> [f64; 4] {
    let l = x.ln();
    [x * x, x * x * l, x, 1.0]
}

/// Default relative tolerance for the `k`-series.
pub const SERIES_TOL: f64 = 1e-15;

/// Everything in the `ψ₁` formula except the spectral sum.
pub fn psi1_smooth(c: &SmoothCoefficients, x: f64, tol: f64) -> Result<f64> {
    let l = x.ln();
    Ok(c.alpha0 * x + c.beta0 * x * l + c.alpha1 + c.beta1 * l
        + small_series_g(x, c.genus, tol)?
        + 0.5 * x * x)
}

/// Everything in the `ψ₂` formula except the spectral sum.
pub fn psi2_smooth(c: &SmoothCoefficients, x: f64, tol: f64) -> Result<f64> {
    let l = x.ln();
    Ok(c.alpha0p * x * x + c.beta0p * x * x * l + c.alpha1p * x + c.beta1 * x * l
        + x * x * x / 6.0
        + c.beta2
        + integrated_series_term(x, c.genus, tol)?)
}

/// `ψ₁` explicit formula with ordinates `γ < t`.
pub fn psi1_formula(c: &SmoothCoefficients, zeros: &ZeroSet, x: f64, t: f64, tol: f64) -> Result<f64> {
    Ok(psi1_smooth(c, x, tol)? + spectral_sum_psi1(zeros, x, t))
}

/// `ψ₂` explicit formula with ordinates `γ < t` (`t = ∞` for every stored zero).
pub fn psi2_formula(c: &SmoothCoefficients, zeros: &ZeroSet, x: f64, t: f64, tol: f64) -> Result<f64> {
    Ok(psi2_smooth(c, x, tol)? + spectral_sum_psi2(zeros, x, t))
}

fn grid_provenance(c: &mut SmoothCoefficients, grid: &[f64]) {
    c.grid_min = grid.iter().copied().fold(f64::INFINITY, f64::min);
    c.grid_max = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    c.grid_points = grid.len();
}

/// Fits `(α₀, β₀, α₁, β₁)` against `ψ₁ − x²/2 − G − S₁(x)` for a caller-supplied
/// spectral sum `S₁`; the `ψ₂` constants are left at zero.
pub fn fit_psi1_with(
    psi: &Summatory,
    grid: &[f64],
    genus: u32,
    mut s1: impl FnMut(f64) -> Result<f64>,
) -> Result<SmoothCoefficients> {
    if grid.len() < 4 {
        return Err(Error::RankDeficient(format!("{} grid points for 4 unknowns", grid.len())));
    }
    let mut c = SmoothCoefficients::zero(genus);
    let y = grid
        .iter()
        .map(|&x| Ok(psi.psi1(x)? - psi1_smooth(&c, x, SERIES_TOL)? - s1(x)?))
        .collect::<Result<Vec<_>>>()?;
    let ([a0, b0, a1, b1], r) = fit_linear(grid, &y, basis_psi1)?;
    c.alpha0 = a0;
    c.beta0 = b0;
    c.alpha1 = a1;
    c.beta1 = b1;
    c.residual_norm_psi1 = r;
    grid_provenance(&mut c, grid);
    Ok(c)
}

/// Fits `(α₀, β₀, α₁, β₁)` against `ψ₁ − x²/2 − G − S₁(T)`, then, with `β₁`
/// held, `(α₀′, β₀′, α₁′, β₂)` against `ψ₂ − x³/6 − ∫G − β₁x log x − S₂(T)`.
pub fn fit_smooth_coefficients(
    psi: &Summatory,
    zeros: &ZeroSet,
    grid: &[f64],
    t: f64,
    genus: u32,
) -> Result<SmoothCoefficients> {
    let mut c = fit_psi1_with(psi, grid, genus, |x| Ok(spectral_sum_psi1(zeros, x, t)))?;
    let mut bare = SmoothCoefficients::zero(genus);
    bare.beta1 = c.beta1;
    let y2 = grid
        .iter()
        .map(|&x| Ok(psi.psi2(x)? - psi2_formula(&bare, zeros, x, t, SERIES_TOL)?))
        .collect::<Result<Vec<_>>>()?;
    let ([a0p, b0p, a1p, b2], r2) = fit_linear(grid, &y2, basis_psi2)?;
    c.alpha0p = a0p;
    c.beta0p = b0p;
    c.alpha1p = a1p;
    c.beta2 = b2;
    c.residual_norm_psi2 = r2;
    c.fit_t = if t.is_finite() { t } else { zeros.max_gamma().unwrap_or(0.0) };
    Ok(c)
}

/// An interval `[lower, upper]` for `ψ(x)` obtained with step `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
    pub h: f64,
}

impl Sandwich {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `Δ₂∓f(x)/h²` for a twice-integrated nondecreasing function `f`.
pub fn second_difference_sandwich(
    mut f: impl FnMut(f64) -> Result<f64>,
    x: f64,
    h: f64,
) -> Result<Sandwich> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step h must be positive, got {h}")));
    }
    let h2 = h * h;
    let lower = delta2(&mut f, x, h, Direction::Minus)? / h2;
    let upper = delta2(&mut f, x, h, Direction::Plus)? / h2;
    Ok(Sandwich { lower, upper, h })
}

/// `Δ₂∓(ψ₂ formula)/h²` with `h = x^{3/4}` and every stored ordinate.
pub fn reconstruct_psi_thm1(c: &SmoothCoefficients, zeros: &ZeroSet, x: f64) -> Result<Sandwich> {
    let h = x.powf(0.75);
    if !(x - 2.0 * h > 1.0) {
        return Err(Error::Domain(format!("x = {x} too small: x − 2x^(3/4) must exceed 1")));
    }
    second_difference_sandwich(|y| psi2_formula(c, zeros, y, f64::INFINITY, SERIES_TOL), x, h)
}

/// `ψ(x) − x − Σ_{¾<ρ<1} x^ρ/ρ`.
pub fn residual_thm1(psi: &Summatory, zeros: &ZeroSet, x: f64) -> Result<f64> {
    Ok(psi.psi(x)? - x - real_zero_sum(zeros, x, 0.75))
}

/// Least-squares line through `(log x, log|r|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub used: usize,
    pub dropped: usize,
}

pub fn fit_error_exponent(pairs: &[(f64, f64)]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(x, r)| *r != 0.0 && r.is_finite() && *x > 0.0)
        .map(|(x, r)| (x.ln(), r.abs().ln()))
        .collect();
    let dropped = pairs.len() - pts.len();
    if pts.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "{} usable residuals (need 10; {dropped} dropped)",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(ExponentFit { slope, intercept: my - slope * mx, r2, used: pts.len(), dropped })
}

/// One row of a formula-evaluation report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub x: f64,
    pub psi_exact: f64,
    /// Midpoint of the sandwich: the formula's estimate of `ψ(x)`.
    pub formula: f64,
    pub residual: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn comparison_row(psi: &Summatory, c: &SmoothCoefficients, zeros: &ZeroSet, x: f64) -> Result<ComparisonRow> {
    let s = reconstruct_psi_thm1(c, zeros, x)?;
    Ok(ComparisonRow {
        x,
        psi_exact: psi.psi(x)?,
        formula: 0.5 * (s.lower + s.upper),
        residual: residual_thm1(psi, zeros, x)?,
        lower: s.lower,
        upper: s.upper,
    })
}

/// CSV `x,psi_exact,formula,residual,lower,upper`.
pub fn write_comparison_csv<W: Write>(out: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "psi_exact", "formula", "residual", "lower", "upper"])?;
    for r in rows {
        w.write_record([r.x, r.psi_exact, r.formula, r.residual, r.lower, r.upper].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
