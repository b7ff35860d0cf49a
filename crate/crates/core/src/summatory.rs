//! Chebyshev-type summatory functions of a length spectrum and their first
//! two iterated integrals, evaluated in closed form.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{LengthSpectrum, Model};
use crate::numeric::NeumaierSum;

/// A prime-power event `(P, k)`: at `x = N(P)^k` the function `ψ` jumps by `mult·ℓ(P)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub at: f64,
    pub weight: f64,
}

/// Sorted event list of a spectrum, valid for `x ≤ bound`.
#[derive(Clone, Debug)]
pub struct Summatory {
    events: Vec<Event>,
    bound: f64,
}

impl Summatory {
    /// Events with `N^k ≤ certified_bound`; powers are formed as `e^{kℓ}`.
    pub fn new(spec: &LengthSpectrum) -> Self {
        let bound = spec.certified_bound;
        let mut events = Vec::new();
        for c in &spec.classes {
            let weight = f64::from(c.multiplicity) * c.length;
            for k in 1u32.. {
                let at = if k == 1 { c.norm } else { (f64::from(k) * c.length).exp() };
                if at > bound {
                    break;
                }
                events.push(Event { at, weight });
            }
        }
        events.sort_by(|a, b| a.at.total_cmp(&b.at));
        Self { events, bound }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Largest `x` for which the values are exact.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    fn check(&self, x: f64) -> Result<()> {
        if !(x >= 1.0) {
            return Err(Error::Domain(format!("summatory functions need x >= 1, got {x}")));
        }
        if x > self.bound {
            return Err(Error::SpectrumIncomplete { x, bound: self.bound });
        }
        Ok(())
    }

    /// Number of events with `N^k ≤ x`.
    fn cutoff(&self, x: f64) -> usize {
        self.events.partition_point(|e| e.at <= x)
    }

    fn psi_upto(&self, n: usize) -> f64 {
        self.events[..n].iter().map(|e| e.weight).collect::<NeumaierSum>().value()
    }

    fn psi1_upto(&self, n: usize, x: f64) -> f64 {
        self.events[..n].iter().map(|e| e.weight * (x - e.at)).collect::<NeumaierSum>().value()
    }

    fn psi2_upto(&self, n: usize, x: f64) -> f64 {
        self.events[..n]
            .iter()
            .map(|e| {
                let d = x - e.at;
                0.5 * e.weight * d * d
            })
            .collect::<NeumaierSum>()
            .value()
    }

    /// `ψ(x) = Σ_{N(P)^k ≤ x} mult·log N(P)`.
    pub fn psi(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.psi_upto(self.cutoff(x)))
    }

    /// `ψ₁(x) = ∫₁ˣ ψ = Σ mult·log N·(x − N^k)₊`.
    pub fn psi1(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.psi1_upto(self.cutoff(x), x))
    }

    /// `ψ₂(x) = ∫₁ˣ ψ₁ = Σ mult·log N·(x − N^k)₊²/2`.
    pub fn psi2(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.psi2_upto(self.cutoff(x), x))
    }

    /// All three functions on an ascending grid: one sweep locates each
    /// point's event cutoff, then points are summed independently (in
    /// parallel, into disjoint slots), giving the pointwise values exactly.
    pub fn profile(&self, grid: &[f64]) -> Result<[Vec<f64>; 3]> {
        if grid.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::Domain("profile grid must be ascending".into()));
        }
        for &x in grid {
            self.check(x)?;
        }
        let mut cuts = Vec::with_capacity(grid.len());
        let mut i = 0;
        for &x in grid {
            while i < self.events.len() && self.events[i].at <= x {
                i += 1;
            }
            cuts.push(i);
        }
        let rows: Vec<(f64, f64, f64)> = grid
            .par_iter()
            .zip(cuts.par_iter())
            .map(|(&x, &n)| (self.psi_upto(n), self.psi1_upto(n, x), self.psi2_upto(n, x)))
            .collect();
        let mut out = [Vec::new(), Vec::new(), Vec::new()];
        for (a, b, c) in rows {
            out[0].push(a);
            out[1].push(b);
            out[2].push(c);
        }
        Ok(out)
    }
}

pub fn psi(spec: &LengthSpectrum, x: f64) -> Result<f64> {
    Summatory::new(spec).psi(x)
}

pub fn psi1(spec: &LengthSpectrum, x: f64) -> Result<f64> {
    Summatory::new(spec).psi1(x)
}

pub fn psi2(spec: &LengthSpectrum, x: f64) -> Result<f64> {
    Summatory::new(spec).psi2(x)
}

/// `ψ`, `ψ₁`, `ψ₂` tabulated on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummatoryProfile {
    pub grid: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi1: Vec<f64>,
    pub psi2: Vec<f64>,
    pub model: Model,
    pub norm_bound: f64,
    pub x_max: f64,
    pub complete: bool,
}

pub fn batch_profile(spec: &LengthSpectrum, grid: &[f64]) -> Result<SummatoryProfile> {
    let s = Summatory::new(spec);
    let [psi, psi1, psi2] = s.profile(grid)?;
    Ok(SummatoryProfile {
        grid: grid.to_vec(),
        psi,
        psi1,
        psi2,
        model: spec.model,
        norm_bound: spec.norm_bound,
        x_max: s.bound(),
        complete: spec.complete,
    })
}

impl SummatoryProfile {
    /// CSV `x,psi,psi1,psi2`; `extra` metadata lines are written first as `# key=value`.
    pub fn write_csv<W: Write>(&self, mut out: W, extra: &[(String, String)]) -> Result<()> {
        for (k, v) in extra {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "psi", "psi1", "psi2"])?;
        for i in 0..self.grid.len() {
            w.write_record([
                self.grid[i].to_string(),
                self.psi[i].to_string(),
                self.psi1[i].to_string(),
                self.psi2[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{modular_necklace_spectrum, EnumerationOptions, PrimitiveClass};

    fn single(norm: f64, mult: u32, bound: f64) -> LengthSpectrum {
        let length = norm.ln();
        let class = PrimitiveClass { trace: 2.0 * (length / 2.0).cosh(), length, norm, multiplicity: mult, word: None };
        LengthSpectrum::new(Model::Modular, vec![class], bound, bound, true, EnumerationOptions::default())
    }

    #[test]
    fn single_class_values() {
        let s = Summatory::new(&single(5.0, 2, 100.0));
        let l = 5f64.ln();
        assert_eq!(s.psi(4.9).unwrap(), 0.0);
        assert_eq!(s.psi(5.0).unwrap(), 2.0 * l);
        assert!((s.psi(25.5).unwrap() - 4.0 * l).abs() < 1e-12);
        assert!((s.psi1(6.0).unwrap() - 2.0 * l).abs() < 1e-12);
        assert!((s.psi2(7.0).unwrap() - 4.0 * l).abs() < 1e-12);
    }

    #[test]
    fn modular_at_seven() {
        let gens = crate::group::modular_generators();
        let spec = crate::group::enumerate_length_spectrum(&gens, 7.0, &EnumerationOptions::default()).unwrap();
        assert!((psi(&spec, 7.0).unwrap() - 2.0 * 1.5f64.acosh()).abs() < 1e-12);
        assert!(matches!(psi(&spec, 8.0), Err(Error::SpectrumIncomplete { .. })));
        assert!(matches!(psi(&spec, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn profile_equals_pointwise() {
        let spec = modular_necklace_spectrum(60);
        let s = Summatory::new(&spec);
        let grid = crate::numeric::log_grid(2.0, spec.norm_bound, 300);
        let [a, b, c] = s.profile(&grid).unwrap();
        for (i, &x) in grid.iter().enumerate() {
            assert_eq!(a[i], s.psi(x).unwrap());
            assert_eq!(b[i], s.psi1(x).unwrap());
            assert_eq!(c[i], s.psi2(x).unwrap());
        }
    }
}
