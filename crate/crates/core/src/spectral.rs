//! Laplacian eigenvalues and the Selberg zeta zeros they determine.
//!
//! An eigenvalue `λ` gives `ρ(1−ρ) = λ`: `λ = 0` is the trivial zero `ρ = 1`,
//! `0 < λ < ¼` a real zero `ρ = ½ + √(¼−λ)` in `(½, 1)`, and `λ > ¼` a pair
//! `ρ = ½ ± iγ` with `γ = √(λ−¼)`. Only the positive ordinate `γ` is stored.

use std::f64::consts::PI;
use std::io::{BufRead, BufReader, Read, Write};
use std::ops::Range;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub multiplicity: u32,
}

/// Sorted, deduplicated eigenvalues with multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub entries: Vec<Eigenvalue>,
    pub source: String,
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Reads `lambda` or `lambda,multiplicity` records, one per line; `#` starts a comment.
pub fn load_eigenvalues<R: Read>(source: R) -> Result<EigenvalueList> {
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        let lineno = i as u64 + 1;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let mut fields = text.split(',').map(str::trim);
        let lam_text = fields.next().unwrap_or("");
        let lambda: f64 = lam_text
            .parse()
            .map_err(|_| parse_err(lineno, format!("not a number: '{lam_text}'")))?;
        if !lambda.is_finite() {
            return Err(parse_err(lineno, format!("not a finite number: '{lam_text}'")));
        }
        if lambda < 0.0 {
            return Err(parse_err(lineno, format!("negative eigenvalue {lambda}")));
        }
        let multiplicity = match fields.next() {
            None => 1,
            Some(m) => m
                .parse::<u32>()
                .ok()
                .filter(|&m| m > 0)
                .ok_or_else(|| parse_err(lineno, format!("bad multiplicity '{m}'")))?,
        };
        if fields.next().is_some() {
            return Err(parse_err(lineno, "too many fields"));
        }
        entries.push(Eigenvalue { lambda, multiplicity });
    }
    if entries.is_empty() {
        return Err(Error::NoEigenvalues);
    }
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let mut merged: Vec<Eigenvalue> = Vec::with_capacity(entries.len());
    for e in entries {
        match merged.last_mut() {
            Some(last) if last.lambda == e.lambda => last.multiplicity += e.multiplicity,
            _ => merged.push(e),
        }
    }
    Ok(EigenvalueList { entries: merged, source: String::new() })
}

impl EigenvalueList {
    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    /// Total count including multiplicity.
    pub fn count(&self) -> u64 {
        self.entries.iter().map(|e| u64::from(e.multiplicity)).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealZero {
    pub rho: f64,
    pub multiplicity: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ordinate {
    pub gamma: f64,
    pub multiplicity: u32,
}

/// Parameters of a synthetic Weyl-density ordinate sequence.
///
/// `γ_j = √((j−½)/κ) + δ_j` with `κ = area/4π`; `δ_j` is uniform in
/// `±½·jitter·min(gap₋, gap₊)`, drawn from a counter-based ChaCha8 stream
/// (word position `2(j−1)`), so any index range can be regenerated on demand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub area: f64,
    pub t_max: f64,
    pub seed: u64,
    /// 0 disables jitter, 1 is the maximum (half the local gap).
    pub jitter: f64,
}

#[derive(Clone, Debug)]
enum Ordinates {
    Explicit(Vec<Ordinate>),
    Synthetic { spec: SyntheticSpec, count: u64 },
}

/// Zeros of the Selberg zeta function relevant to the explicit formulas.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    /// `ρ = 1` present (from `λ = 0`).
    pub trivial: bool,
    /// Real zeros in `(½, 1)`.
    pub real_zeros: Vec<RealZero>,
    /// Their companions `1 − ρ ∈ (0, ½)`; recorded but never summed.
    pub companions: Vec<RealZero>,
    /// Multiplicity of `λ = ¼` (`ρ = ½`, `γ = 0`); excluded from every sum.
    pub half_zero: u32,
    pub area: f64,
    pub source: String,
    ordinates: Ordinates,
}

/// Zeros determined by an eigenvalue list on a surface of the given area.
pub fn eigenvalues_to_zeros(evs: &EigenvalueList, area: f64) -> ZeroSet {
    let mut z = ZeroSet {
        trivial: false,
        real_zeros: Vec::new(),
        companions: Vec::new(),
        half_zero: 0,
        area,
        source: evs.source.clone(),
        ordinates: Ordinates::Explicit(Vec::new()),
    };
    let mut ords: Vec<Ordinate> = Vec::new();
    for e in &evs.entries {
        let m = e.multiplicity;
        if e.lambda == 0.0 {
            z.trivial = true;
        } else if e.lambda < 0.25 {
            let s = (0.25 - e.lambda).sqrt();
            z.real_zeros.push(RealZero { rho: 0.5 + s, multiplicity: m });
            z.companions.push(RealZero { rho: 0.5 - s, multiplicity: m });
        } else if e.lambda == 0.25 {
            z.half_zero += m;
        } else {
            let gamma = (e.lambda - 0.25).sqrt();
            match ords.last_mut() {
                Some(last) if last.gamma == gamma => last.multiplicity += m,
                _ => ords.push(Ordinate { gamma, multiplicity: m }),
            }
        }
    }
    z.real_zeros.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    z.companions.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    z.ordinates = Ordinates::Explicit(ords);
    z
}

/// Synthetic ordinates following the Weyl law `N(T) = (area/4π)·T²`; no real
/// zeros, trivial zero present.
pub fn synthesize_zeros(area: f64, t_max: f64, seed: u64) -> Result<ZeroSet> {
    synthesize_zeros_with(SyntheticSpec { area, t_max, seed, jitter: 1.0 })
}

pub fn synthesize_zeros_with(spec: SyntheticSpec) -> Result<ZeroSet> {
    if !(spec.area > 0.0) || !(spec.t_max > 1.0) || !(0.0..=1.0).contains(&spec.jitter) {
        return Err(Error::InvalidParameter(format!(
            "synthetic zeros need area > 0, T_max > 1, jitter in [0,1]; got {spec:?}"
        )));
    }
    let mut z = ZeroSet {
        trivial: true,
        real_zeros: Vec::new(),
        companions: Vec::new(),
        half_zero: 0,
        area: spec.area,
        source: format!(
            "synthetic(area={}, t_max={}, seed={}, jitter={})",
            spec.area, spec.t_max, spec.seed, spec.jitter
        ),
        ordinates: Ordinates::Synthetic { spec, count: 0 },
    };
    // γ_j ≤ T_max exactly for j ≤ count (the sequence is strictly increasing).
    let kappa = spec.area / (4.0 * PI);
    let mut j = (kappa * spec.t_max * spec.t_max + 0.5).floor().max(0.0) as u64 + 2;
    while j > 0 && synthetic_gamma(&spec, j) > spec.t_max {
        j -= 1;
    }
    z.ordinates = Ordinates::Synthetic { spec, count: j };
    Ok(z)
}

fn base_gamma(kappa: f64, j: u64) -> f64 {
    ((j as f64 - 0.5) / kappa).sqrt()
}

fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn jittered(spec: &SyntheticSpec, prev: f64, cur: f64, next: f64, bits: u64) -> f64 {
    let gap = (cur - prev).min(next - cur);
    cur + spec.jitter * (unit(bits) - 0.5) * gap
}

/// The j-th synthetic ordinate (1-based), by random access.
fn synthetic_gamma(spec: &SyntheticSpec, j: u64) -> f64 {
    let kappa = spec.area / (4.0 * PI);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_word_pos(2 * u128::from(j - 1));
    let prev = if j == 1 { 0.0 } else { base_gamma(kappa, j - 1) };
    jittered(spec, prev, base_gamma(kappa, j), base_gamma(kappa, j + 1), rng.next_u64())
}

/// Streams synthetic ordinates with (0-based) indices in `range`.
fn stream_synthetic(spec: &SyntheticSpec, range: Range<u64>, f: &mut dyn FnMut(f64, u32)) {
    if range.is_empty() {
        return;
    }
    let kappa = spec.area / (4.0 * PI);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_word_pos(2 * u128::from(range.start));
    let j0 = range.start + 1;
    let mut prev = if j0 == 1 { 0.0 } else { base_gamma(kappa, j0 - 1) };
    let mut cur = base_gamma(kappa, j0);
    for j in j0..=range.end {
        let next = base_gamma(kappa, j + 1);
        f(jittered(spec, prev, cur, next, rng.next_u64()), 1);
        prev = cur;
        cur = next;
    }
}

impl ZeroSet {
    /// A zero set with only the given ordinates (trivial zero present).
    pub fn from_ordinates(mut ords: Vec<Ordinate>, area: f64) -> Self {
        ords.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        let mut merged: Vec<Ordinate> = Vec::with_capacity(ords.len());
        for o in ords {
            match merged.last_mut() {
                Some(last) if last.gamma == o.gamma => last.multiplicity += o.multiplicity,
                _ => merged.push(o),
            }
        }
        Self {
            trivial: true,
            real_zeros: Vec::new(),
            companions: Vec::new(),
            half_zero: 0,
            area,
            source: String::from("explicit"),
            ordinates: Ordinates::Explicit(merged),
        }
    }

    /// Empty zero set (no zeros at all).
    pub fn empty(area: f64) -> Self {
        let mut z = Self::from_ordinates(Vec::new(), area);
        z.trivial = false;
        z.source = String::from("empty");
        z
    }

    pub fn with_real_zeros(mut self, zeros: Vec<RealZero>) -> Self {
        self.real_zeros = zeros;
        self.real_zeros.sort_by(|a, b| a.rho.total_cmp(&b.rho));
        self
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self.ordinates, Ordinates::Synthetic { .. })
    }

    pub fn synthetic_spec(&self) -> Option<SyntheticSpec> {
        match &self.ordinates {
            Ordinates::Synthetic { spec, .. } => Some(*spec),
            Ordinates::Explicit(_) => None,
        }
    }

    /// Number of distinct stored ordinates.
    pub fn ordinate_len(&self) -> u64 {
        match &self.ordinates {
            Ordinates::Explicit(v) => v.len() as u64,
            Ordinates::Synthetic { count, .. } => *count,
        }
    }

    /// Ordinates counted with multiplicity.
    pub fn ordinate_count(&self) -> u64 {
        match &self.ordinates {
            Ordinates::Explicit(v) => v.iter().map(|o| u64::from(o.multiplicity)).sum(),
            Ordinates::Synthetic { count, .. } => *count,
        }
    }

    fn gamma_at(&self, i: u64) -> f64 {
        match &self.ordinates {
            Ordinates::Explicit(v) => v[i as usize].gamma,
            Ordinates::Synthetic { spec, .. } => synthetic_gamma(spec, i + 1),
        }
    }

    pub fn min_gamma(&self) -> Option<f64> {
        (self.ordinate_len() > 0).then(|| self.gamma_at(0))
    }

    pub fn max_gamma(&self) -> Option<f64> {
        let n = self.ordinate_len();
        (n > 0).then(|| self.gamma_at(n - 1))
    }

    /// Height up to which the ordinates are known to be complete: `T_max`
    /// for synthetic sets, the largest ordinate for data files.
    pub fn coverage(&self) -> f64 {
        match &self.ordinates {
            Ordinates::Synthetic { spec, .. } => spec.t_max,
            Ordinates::Explicit(_) => self.max_gamma().unwrap_or(0.0),
        }
    }

    /// Number of stored ordinates with `γ ≤ t` (distinct entries).
    fn rank_le(&self, t: f64) -> u64 {
        let (mut lo, mut hi) = (0u64, self.ordinate_len());
        match &self.ordinates {
            Ordinates::Explicit(v) => v.partition_point(|o| o.gamma <= t) as u64,
            Ordinates::Synthetic { spec, .. } => {
                // narrow with the unjittered inverse, then settle exactly
                let kappa = spec.area / (4.0 * PI);
                if t.is_finite() && t >= 0.0 {
                    let est = (kappa * t * t + 0.5).floor() as u64;
                    lo = est.saturating_sub(2).min(hi);
                    hi = (est + 2).min(hi);
                    while lo > 0 && self.gamma_at(lo - 1) > t {
                        lo -= 1;
                    }
                    while hi < self.ordinate_len() && self.gamma_at(hi) <= t {
                        hi += 1;
                    }
                } else if t < 0.0 {
                    return 0;
                }
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if self.gamma_at(mid) <= t {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }

    /// Index range of the ordinates with `lo < γ ≤ hi`.
    pub fn index_range(&self, lo: f64, hi: f64) -> Range<u64> {
        let a = self.rank_le(lo);
        let b = self.rank_le(hi).max(a);
        a..b
    }

    /// Visits the ordinates with indices in `range`, ascending.
    pub fn visit_indices(&self, range: Range<u64>, mut f: impl FnMut(f64, u32)) {
        let range = range.start..range.end.min(self.ordinate_len());
        match &self.ordinates {
            Ordinates::Explicit(v) => {
                for o in &v[range.start as usize..range.end as usize] {
                    f(o.gamma, o.multiplicity);
                }
            }
            Ordinates::Synthetic { spec, .. } => stream_synthetic(spec, range, &mut f),
        }
    }

    /// Visits `(γ, multiplicity)` with `lo < γ ≤ hi`, ascending.
    pub fn for_each_in(&self, lo: f64, hi: f64, f: impl FnMut(f64, u32)) {
        self.visit_indices(self.index_range(lo, hi), f);
    }

    /// Materializes the ordinates with `lo < γ ≤ hi`.
    pub fn ordinates_in(&self, lo: f64, hi: f64) -> Vec<Ordinate> {
        let mut out = Vec::new();
        self.for_each_in(lo, hi, |gamma, multiplicity| out.push(Ordinate { gamma, multiplicity }));
        out
    }

    /// All ordinates (materialized).
    pub fn ordinates(&self) -> Vec<Ordinate> {
        self.ordinates_in(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Genus implied by Gauss–Bonnet, `area = 4π(g−1)`, rounded.
    pub fn genus_from_area(&self) -> u32 {
        (self.area / (4.0 * PI) + 1.0).round().max(0.0) as u32
    }

    /// Writes `gamma,multiplicity` rows after `#` metadata lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# area={}", self.area)?;
        writeln!(out, "# trivial_zero={}", self.trivial)?;
        let reals: Vec<String> =
            self.real_zeros.iter().map(|r| format!("{}x{}", r.rho, r.multiplicity)).collect();
        writeln!(out, "# real_zeros={}", reals.join(";"))?;
        writeln!(out, "# half_zero_multiplicity={}", self.half_zero)?;
        writeln!(out, "# source={}", self.source)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["gamma", "multiplicity"])?;
        let mut err = None;
        self.visit_indices(0..self.ordinate_len(), |g, m| {
            if err.is_none() {
                if let Err(e) = w.write_record([g.to_string(), m.to_string()]) {
                    err = Some(e);
                }
            }
        });
        if let Some(e) = err {
            return Err(e.into());
        }
        w.flush()?;
        Ok(())
    }
}

/// Outcome of comparing the ordinate count with the Weyl law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub t: f64,
    pub expected: f64,
    pub observed: u64,
    pub ratio: f64,
}

/// `observed = #{γ ≤ T}` (with multiplicity, pairs once) against `(area/4π)·T²`.
pub fn weyl_check(zeros: &ZeroSet, t: f64) -> Result<WeylReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("Weyl check needs T > 0, got {t}")));
    }
    let expected = zeros.area / (4.0 * PI) * t * t;
    let observed = match &zeros.ordinates {
        Ordinates::Explicit(v) => {
            v.iter().filter(|o| o.gamma <= t).map(|o| u64::from(o.multiplicity)).sum()
        }
        Ordinates::Synthetic { .. } => zeros.rank_le(t),
    };
    Ok(WeylReport { t, expected, observed, ratio: observed as f64 / expected })
}
