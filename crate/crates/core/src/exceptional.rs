//! Exceptional sets where a tail of the zero sum is large, their logarithmic
//! measure, and the `h = x^{3/4}/(log x)^α` reconstruction of `ψ` that avoids them.
//!
//! For an octave `[T, eT)` with `T = eⁿ` the tail is
//! `Σ_{Y<γ≤T} 2·Re[x^{ρ+1}/(ρ(ρ+1))]` and `x` is exceptional when it exceeds
//! `x^{3/2}/(log x)^{2α}`. Three tails per octave are scanned:
//! `E` with `Y = n^β`, `F` with `Y = (n−1)^β` and `G` with `Y = e^{n−1}`;
//! `H` is their union.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explicit::{self, Direction, Order, SmoothCoefficients};
use crate::oscillatory::MomentTable;
use crate::spectral::ZeroSet;
use crate::summatory::Summatory;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalParams {
    pub alpha: f64,
    pub beta: f64,
    pub n_min: u32,
    pub n_max: u32,
    /// Grid points per octave.
    pub density: usize,
    pub epsilon: f64,
}

impl Default for ExceptionalParams {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 6.0, n_min: 4, n_max: 10, density: 256, epsilon: 0.01 }
    }
}

impl ExceptionalParams {
    pub fn new(alpha: f64, beta: f64, n_min: u32, n_max: u32, density: usize) -> Result<Self> {
        let p = Self { alpha, beta, n_min, n_max, density, ..Self::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta > 4.0 * self.alpha + 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must exceed 4*alpha + 1 = {}, got {}",
                4.0 * self.alpha + 1.0,
                self.beta
            )));
        }
        if self.n_min < 2 || self.n_min > self.n_max {
            return Err(Error::InvalidParameter(format!(
                "octave range must satisfy 2 <= n_min <= n_max, got {}..{}",
                self.n_min, self.n_max
            )));
        }
        check_density(self.density)?;
        if !(0.0..0.25).contains(&self.epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1/4), got {}", self.epsilon)));
        }
        Ok(())
    }

    /// `Y` for one family in octave `n`, before clamping.
    pub fn y_of(&self, kind: SetKind, n: u32) -> f64 {
        let n = f64::from(n);
        match kind {
            SetKind::E => n.powf(self.beta),
            SetKind::F => (n - 1.0).powf(self.beta),
            SetKind::G => (n - 1.0).exp(),
        }
    }
}

fn check_density(density: usize) -> Result<()> {
    if density < 64 {
        return Err(Error::InvalidParameter(format!("density must be at least 64 points per octave, got {density}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetKind {
    E,
    F,
    G,
}

impl SetKind {
    pub const ALL: [SetKind; 3] = [SetKind::E, SetKind::F, SetKind::G];
}

/// Exceptional threshold `x^{3/2}/(log x)^{2α}`.
pub fn threshold(x: f64, alpha: f64) -> f64 {
    x.powf(1.5) / x.ln().powf(2.0 * alpha)
}

/// `Σ_{Y<γ≤T} 2·Re[x^{ρ+1}/(ρ(ρ+1))]` by direct summation.
pub fn sigma_sum(zeros: &ZeroSet, x: f64, y: f64, t: f64) -> f64 {
    if y >= t {
        return 0.0;
    }
    explicit::pair_sum(zeros, Order::One, x, y, t)
}

/// Logarithmic measure `Σ log(b/a)` of disjoint intervals `[a, b)`.
pub fn log_measure(intervals: &[[f64; 2]]) -> Result<f64> {
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|p, q| p[0].total_cmp(&q[0]));
    for iv in &sorted {
        if !(iv[0] > 0.0 && iv[0] <= iv[1]) {
            return Err(Error::InvalidParameter(format!("bad interval [{}, {})", iv[0], iv[1])));
        }
    }
    for w in sorted.windows(2) {
        if w[1][0] < w[0][1] {
            return Err(Error::Overlap(w[0][0], w[0][1], w[1][0], w[1][1]));
        }
    }
    Ok(sorted.iter().map(|iv| (iv[1] / iv[0]).ln()).sum())
}

/// Sampled exceptional set in one octave.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSetReport {
    pub n: Option<u32>,
    pub kind: Option<SetKind>,
    #[serde(rename = "T")]
    pub t: f64,
    /// Lower end of the ordinate range actually used.
    #[serde(rename = "Y")]
    pub y: f64,
    /// `Y` as requested (differs from `Y` when clamped).
    pub y_requested: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub grid_density: usize,
    pub log_measure: f64,
    pub resolution_error: f64,
    pub max_ratio: f64,
    pub intervals: Vec<[f64; 2]>,
    #[serde(skip)]
    pub grid: Vec<f64>,
    #[serde(skip)]
    pub indicator: Vec<bool>,
}

/// Sample points `T·e^{(i+½)/d}`: midpoints (in `log x`) of `d` equal cells.
pub fn octave_grid(t: f64, density: usize) -> Vec<f64> {
    let lt = t.ln();
    (0..density).map(|i| (lt + (i as f64 + 0.5) / density as f64).exp()).collect()
}

fn cell_edge(t: f64, density: usize, i: usize) -> f64 {
    if i == 0 {
        t
    } else {
        (t.ln() + i as f64 / density as f64).exp()
    }
}

/// Merges flagged grid cells into intervals `[a, b)`.
fn intervals_from(t: f64, density: usize, flags: &[bool]) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < flags.len() {
        if flags[i] {
            let start = i;
            while i < flags.len() && flags[i] {
                i += 1;
            }
            out.push([cell_edge(t, density, start), cell_edge(t, density, i)]);
        } else {
            i += 1;
        }
    }
    out
}

/// Clamps `Y < 2` to just below the smallest stored ordinate.
fn effective_y(zeros: &ZeroSet, y: f64) -> f64 {
    match zeros.min_gamma() {
        Some(g) if y < 2.0 => g * (1.0 - 1e-9),
        _ => y,
    }
}

#[allow(clippy::too_many_arguments)]
fn report_from_sums(
    t: f64,
    y: f64,
    y_requested: f64,
    alpha: f64,
    density: usize,
    grid: &[f64],
    sums: &[f64],
    n: Option<u32>,
    kind: Option<SetKind>,
    beta: Option<f64>,
) -> ExceptionalSetReport {
    let ratios: Vec<f64> = grid.iter().zip(sums).map(|(&x, s)| s.abs() / threshold(x, alpha)).collect();
    let indicator: Vec<bool> = ratios.iter().map(|&r| r > 1.0).collect();
    let count = indicator.iter().filter(|&&b| b).count();
    ExceptionalSetReport {
        n,
        kind,
        t,
        y,
        y_requested,
        alpha,
        beta,
        grid_density: density,
        log_measure: count as f64 / density as f64,
        resolution_error: 1.0 / density as f64,
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        intervals: intervals_from(t, density, &indicator),
        grid: grid.to_vec(),
        indicator,
    }
}

/// Scans `[T, eT)` for points where the `(Y, T]` tail exceeds the threshold.
pub fn scan_d(zeros: &ZeroSet, t: f64, y: f64, alpha: f64, density: usize) -> Result<ExceptionalSetReport> {
    check_density(density)?;
    if !(t > 1.0 && y > 0.0) {
        return Err(Error::InvalidParameter(format!("scan needs T > 1 and Y > 0, got T = {t}, Y = {y}")));
    }
    let y_eff = effective_y(zeros, y);
    let grid = octave_grid(t, density);
    let sums = if y_eff >= t {
        vec![0.0; density]
    } else {
        let table = MomentTable::build(zeros, Order::One, t.ln() + 0.5, 1.0, &[y_eff, t])?;
        grid.par_iter().map(|&x| table.sum(x, y_eff, t)).collect::<Result<Vec<_>>>()?
    };
    Ok(report_from_sums(t, y_eff, y, alpha, density, &grid, &sums, None, None, None))
}

/// Union `H = E ∪ F ∪ G` in one octave.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionSet {
    pub log_measure: f64,
    pub intervals: Vec<[f64; 2]>,
    #[serde(skip)]
    pub indicator: Vec<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OctaveScan {
    pub n: u32,
    #[serde(rename = "T")]
    pub t: f64,
    pub e: ExceptionalSetReport,
    pub f: ExceptionalSetReport,
    pub g: ExceptionalSetReport,
    pub h: UnionSet,
    /// Moments of every ordinate up to `T`, reused by the reconstruction.
    #[serde(skip)]
    table: Option<MomentTable>,
}

impl OctaveScan {
    pub fn report(&self, kind: SetKind) -> &ExceptionalSetReport {
        match kind {
            SetKind::E => &self.e,
            SetKind::F => &self.f,
            SetKind::G => &self.g,
        }
    }

    /// Whether `x` (inside this octave) lies in a flagged cell of `H`.
    pub fn in_h(&self, x: f64) -> bool {
        let pos = (x.ln() - self.t.ln()) * self.h.indicator.len() as f64;
        if !(pos >= 0.0) {
            return false;
        }
        self.h.indicator.get(pos as usize).copied().unwrap_or(false)
    }
}

/// All octave scans of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExceptionalScan {
    pub params: ExceptionalParams,
    pub octaves: Vec<OctaveScan>,
}

/// Scans `E_n`, `F_n`, `G_n` and `H_n` for every `n` in the parameter range.
pub fn build_efgh(zeros: &ZeroSet, params: &ExceptionalParams) -> Result<ExceptionalScan> {
    params.validate()?;
    let coverage = zeros.coverage();
    let max_n = if coverage > 1.0 { coverage.ln().floor() as i64 } else { 0 };
    if f64::from(params.n_max).exp() > coverage {
        return Err(Error::InsufficientDepth { needed: f64::from(params.n_max).exp(), have: coverage, max_n });
    }
    let mut octaves = Vec::new();
    for n in params.n_min..=params.n_max {
        octaves.push(scan_octave(zeros, params, n)?);
    }
    Ok(ExceptionalScan { params: params.clone(), octaves })
}

fn scan_octave(zeros: &ZeroSet, params: &ExceptionalParams, n: u32) -> Result<OctaveScan> {
    let t = f64::from(n).exp();
    let ys: Vec<(f64, f64)> = SetKind::ALL
        .iter()
        .map(|&k| {
            let y = params.y_of(k, n);
            (y, effective_y(zeros, y))
        })
        .collect();
    let mut bps = vec![0.0, t];
    bps.extend(ys.iter().map(|p| p.1).filter(|&y| y > 0.0 && y < t));
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let table = MomentTable::build(zeros, Order::One, f64::from(n) + 0.5, 1.0, &bps)?;
    let grid = octave_grid(t, params.density);
    let sums: Vec<[f64; 3]> = grid
        .par_iter()
        .map(|&x| {
            let v = table.cell_values(x)?;
            let mut out = [0.0; 3];
            for (slot, &(_, y)) in out.iter_mut().zip(&ys) {
                *slot = if y < t { table.range_sum(&v, y, t)? } else { 0.0 };
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut reports = Vec::new();
    for (i, &kind) in SetKind::ALL.iter().enumerate() {
        let col: Vec<f64> = sums.iter().map(|s| s[i]).collect();
        let (y_req, y) = ys[i];
        reports.push(report_from_sums(
            t,
            y,
            y_req,
            params.alpha,
            params.density,
            &grid,
            &col,
            Some(n),
            Some(kind),
            Some(params.beta),
        ));
    }
    let indicator: Vec<bool> =
        (0..params.density).map(|i| reports.iter().any(|r| r.indicator[i])).collect();
    let h = UnionSet {
        log_measure: indicator.iter().filter(|&&b| b).count() as f64 / params.density as f64,
        intervals: intervals_from(t, params.density, &indicator),
        indicator,
    };
    let mut it = reports.into_iter();
    let (e, f, g) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
    Ok(OctaveScan { n, t, e, f, g, h, table: Some(table) })
}

impl ExceptionalScan {
    pub fn octave(&self, n: u32) -> Option<&OctaveScan> {
        self.octaves.iter().find(|o| o.n == n)
    }

    pub fn reports(&self) -> Vec<&ExceptionalSetReport> {
        self.octaves.iter().flat_map(|o| [&o.e, &o.f, &o.g]).collect()
    }

    fn depth_error(&self, needed: u32) -> Error {
        let max_n = self.octaves.last().map_or(0, |o| i64::from(o.n));
        Error::InsufficientDepth { needed: f64::from(needed).exp(), have: f64::from(self.params.n_max).exp(), max_n }
    }

    /// `Σ_{γ<T} 2·Re[y^{ρ+1}/(ρ(ρ+1))]` with `T = e^n`, from octave `n`'s table.
    pub fn spectral_psi1(&self, n: u32, y: f64) -> Result<f64> {
        let o = self.octave(n).ok_or_else(|| self.depth_error(n))?;
        let table = o.table.as_ref().ok_or_else(|| Error::Numerical("scan was loaded without moment tables".into()))?;
        table.sum(y, 0.0, o.t)
    }

    /// Whether `x` lies in the scanned `H` of its own octave.
    pub fn is_exceptional_point(&self, x: f64) -> Result<bool> {
        let n = x.ln().floor() as u32;
        let o = self.octave(n).ok_or_else(|| self.depth_error(n))?;
        Ok(o.in_h(x))
    }
}

/// Envelope constant `Ĉ` and per-report ratios `μ^×·Y/(1+log T)^{4α}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureBound {
    pub c_hat: f64,
    pub ratios: Vec<f64>,
    /// `(log T, max ratio)` per octave, ascending.
    pub per_octave: Vec<(f64, f64)>,
    pub slack: f64,
    pub pass: bool,
}

pub fn verify_measure_bound(reports: &[&ExceptionalSetReport], slack: f64) -> MeasureBound {
    let ratios: Vec<f64> = reports
        .iter()
        .map(|r| r.log_measure * r.y / (1.0 + r.t.ln()).powf(4.0 * r.alpha))
        .collect();
    let c_hat = ratios.iter().copied().fold(0.0, f64::max);
    let mut per_octave: Vec<(f64, f64)> = Vec::new();
    for (r, &q) in reports.iter().zip(&ratios) {
        let lt = r.t.ln();
        match per_octave.iter_mut().find(|p| (p.0 - lt).abs() < 1e-9) {
            Some(p) => p.1 = p.1.max(q),
            None => per_octave.push((lt, q)),
        }
    }
    per_octave.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ok = c_hat.is_finite() && reports.len() >= 3 && per_octave.len() >= 2;
    let mut running = 0.0f64;
    for &(_, c) in &per_octave {
        if running > 0.0 && c > slack * running {
            ok = false;
        }
        running = running.max(c);
    }
    MeasureBound { c_hat, ratios, per_octave, slack, pass: ok }
}

/// `Σ_{n=a}^{b} (n+1)^{4α}/n^β`.
pub fn comparison_series(alpha: f64, beta: f64, n_min: u32, n_max: u32) -> f64 {
    (n_min..=n_max).map(|n| f64::from(n + 1).powf(4.0 * alpha) / f64::from(n).powf(beta)).sum()
}

/// Upper bound for `Σ_{n>N} (n+1)^{4α}/n^β` from `(n+1) ≤ 2n` and the integral
/// test; finite exactly when `β > 4α+1`.
pub fn comparison_tail_bound(alpha: f64, beta: f64, n: u32) -> f64 {
    let e = beta - 4.0 * alpha - 1.0;
    if e <= 0.0 {
        return f64::INFINITY;
    }
    2f64.powf(4.0 * alpha) * f64::from(n).powf(-e) / e
}

/// Running totals per family, with the scaled envelope `Ĉ·Σ(n+1)^{4α}/Y(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSums {
    pub n: Vec<u32>,
    pub measure: [Vec<f64>; 3],
    pub envelope: [Vec<f64>; 3],
    /// `Ĉ·Σ (n+1)^{4α}/n^β`.
    pub comparison: Vec<f64>,
}

pub fn partial_sums(scan: &ExceptionalScan, c_hat: f64) -> PartialSums {
    let p = &scan.params;
    let mut ps = PartialSums {
        n: Vec::new(),
        measure: Default::default(),
        envelope: Default::default(),
        comparison: Vec::new(),
    };
    let mut acc = [0.0; 3];
    let mut env = [0.0; 3];
    let mut cmp = 0.0;
    for o in &scan.octaves {
        let growth = f64::from(o.n + 1).powf(4.0 * p.alpha);
        for (i, &k) in SetKind::ALL.iter().enumerate() {
            acc[i] += o.report(k).log_measure;
            env[i] += c_hat * growth / p.y_of(k, o.n);
            ps.measure[i].push(acc[i]);
            ps.envelope[i].push(env[i]);
        }
        cmp += c_hat * growth / f64::from(o.n).powf(p.beta);
        ps.n.push(o.n);
        ps.comparison.push(cmp);
    }
    ps
}

/// CSV `n,measure_E,measure_F,measure_G,measure_H,bound_envelope` where the
/// envelope is `Ĉ·(n+1)^{4α}·Σ_K 1/Y_K(n)`.
pub fn write_aggregate_csv<W: Write>(out: W, scan: &ExceptionalScan, c_hat: f64) -> Result<()> {
    let p = &scan.params;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "measure_E", "measure_F", "measure_G", "measure_H", "bound_envelope"])?;
    for o in &scan.octaves {
        let inv_y: f64 = SetKind::ALL.iter().map(|&k| 1.0 / p.y_of(k, o.n)).sum();
        let env = c_hat * f64::from(o.n + 1).powf(4.0 * p.alpha) * inv_y;
        w.write_record([
            o.n.to_string(),
            o.e.log_measure.to_string(),
            o.f.log_measure.to_string(),
            o.g.log_measure.to_string(),
            o.h.log_measure.to_string(),
            env.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Interval for `ψ(x)` from first differences of the `ψ₁` formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm2Sandwich {
    pub x: f64,
    pub lower: f64,
    pub upper: f64,
    pub h_used: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub exceptional: bool,
}

impl Thm2Sandwich {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `Δ₁∓(ψ₁ formula)/h` at `x ∈ [eⁿ, eⁿ⁺¹)` with `h = x^{3/4}/(log x)^α` and
/// ordinates up to `T = eⁿ`. The point is exceptional when `x` lies in `H_n`
/// or `x + h` lies in `H` of its own octave.
pub fn reconstruct_psi_thm2(
    c: &SmoothCoefficients,
    scan: &ExceptionalScan,
    zeros: &ZeroSet,
    x: f64,
    alpha: f64,
) -> Result<Thm2Sandwich> {
    let lx = x.ln();
    let h = x.powf(0.75) / lx.powf(alpha);
    if !(x - h > 1.0) {
        return Err(Error::Domain(format!("x = {x} too small for step h = {h}")));
    }
    let n = lx.floor() as u32;
    let t = f64::from(n).exp();
    let exceptional = scan.is_exceptional_point(x)? || scan.is_exceptional_point(x + h)?;
    let real = |y: f64| explicit::real_zero_part(zeros, Order::One, y);
    let mut f = |y: f64| -> Result<f64> {
        Ok(explicit::psi1_smooth(c, y, explicit::SERIES_TOL)? + real(y) + scan.spectral_psi1(n, y)?)
    };
    let upper = explicit::delta1(&mut f, x, h, Direction::Plus)? / h;
    let lower = explicit::delta1(&mut f, x, h, Direction::Minus)? / h;
    Ok(Thm2Sandwich { x, lower, upper, h_used: h, t, exceptional })
}

/// `ψ(x) − x − Σ_{¾−ε<ρ<1} x^ρ/ρ`.
pub fn residual_thm2(psi: &Summatory, zeros: &ZeroSet, x: f64, epsilon: f64) -> Result<f64> {
    Ok(psi.psi(x)? - x - explicit::real_zero_sum(zeros, x, 0.75 - epsilon))
}

/// Fits `(α₀, β₀, α₁, β₁)` with spectral sums truncated at `T = e^{⌊log x⌋}`
/// as used by [`reconstruct_psi_thm2`].
pub fn fit_thm2_coefficients(
    psi: &Summatory,
    scan: &ExceptionalScan,
    zeros: &ZeroSet,
    grid: &[f64],
    genus: u32,
) -> Result<SmoothCoefficients> {
    explicit::fit_psi1_with(psi, grid, genus, |x| {
        let n = x.ln().floor() as u32;
        Ok(explicit::real_zero_part(zeros, Order::One, x) + scan.spectral_psi1(n, x)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{synthesize_zeros, Ordinate};
    use std::f64::consts::{E, PI};

    #[test]
    fn beta_must_exceed_bound() {
        assert!(ExceptionalParams::new(1.0, 4.0, 4, 10, 256).is_err());
        assert!(ExceptionalParams::new(1.0, 5.0, 4, 10, 256).is_err());
        assert!(ExceptionalParams::new(1.0, 6.0, 4, 10, 256).is_ok());
        assert!(ExceptionalParams::new(1.0, 6.0, 4, 10, 32).is_err());
    }

    #[test]
    fn log_measure_examples() {
        assert!((log_measure(&[[10.0, 10.0 * E]]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(log_measure(&[]).unwrap(), 0.0);
        let m = log_measure(&[[8.0, 16.0], [2.0, 4.0]]).unwrap();
        assert!((m - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!(matches!(log_measure(&[[2.0, 5.0], [4.0, 8.0]]), Err(Error::Overlap(..))));
    }

    #[test]
    fn empty_range_and_full_octave() {
        let z = synthesize_zeros(4.0 * PI, 100.0, 1).unwrap();
        let r = scan_d(&z, 50.0, 200.0, 1.0, 64).unwrap();
        assert_eq!(r.log_measure, 0.0);
        assert!(r.intervals.is_empty());
        let loud = ZeroSet::from_ordinates(vec![Ordinate { gamma: 3.0, multiplicity: 1_000_000 }], 4.0 * PI);
        let r = scan_d(&loud, 40.0, 2.5, 0.0, 128).unwrap();
        // the single ordinate oscillates, so only part of the octave is flagged
        assert!(r.log_measure > 0.0 && r.log_measure <= 1.0);
        assert!((log_measure(&r.intervals).unwrap() - r.log_measure).abs() < 1e-12);
    }

    #[test]
    fn scan_agrees_with_direct_sigma() {
        let z = synthesize_zeros(4.0 * PI, 60.0, 5).unwrap();
        let t = 3f64.exp();
        let r = scan_d(&z, t, 5.0, 1.0, 64).unwrap();
        for (x, flag) in r.grid.iter().zip(&r.indicator) {
            let s = sigma_sum(&z, *x, 5.0, t);
            let ratio = s.abs() / threshold(*x, 1.0);
            if (ratio - 1.0).abs() > 1e-9 {
                assert_eq!(*flag, ratio > 1.0);
            }
        }
    }
}
