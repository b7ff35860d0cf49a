//! Fast evaluation of `Σ_γ 2·Re[x^{ρ+s}/D(ρ)]` for many `x` in one octave.
//!
//! Ordinates are grouped into cells of width ≤ 1. Around a centre `u₀` (in
//! `u = log x`) each cell with midpoint `c` is expanded as
//!
//! `Σ_j a_j e^{iγ_j u} = e^{icδ} Σ_m M_m (iδ)^m/m!`,  `M_m = Σ_j a_j e^{iγ_j u₀}(γ_j − c)^m`,
//!
//! with `δ = u − u₀`. Since `|γ_j − c| ≤ ½` and `|δ| ≤ δ_max ≤ 1`, sixteen
//! moments reach double precision. Building costs one pass over the
//! ordinates; each evaluation then costs `16·cells`.
//!
//! Cells never straddle a requested breakpoint, so sums over `lo < γ ≤ hi`
//! for breakpoints `lo`, `hi` are exact cell ranges.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::explicit::Order;
use crate::numeric::NeumaierSum;
use crate::spectral::ZeroSet;

/// Number of Taylor moments per cell.
pub const MOMENTS: usize = 16;
const MAX_CELL_WIDTH: f64 = 1.0;

#[derive(Clone, Copy, Debug)]
struct Cell {
    lo: f64,
    hi: f64,
    mid: f64,
}

#[derive(Clone, Debug)]
pub struct MomentTable {
    order: Order,
    u0: f64,
    delta_max: f64,
    breakpoints: Vec<f64>,
    cells: Vec<Cell>,
    moments: Vec<[Complex64; MOMENTS]>,
}

fn denom(order: Order, gamma: f64) -> Complex64 {
    let rho = Complex64::new(0.5, gamma);
    match order {
        Order::One => rho * (rho + 1.0),
        Order::Two => rho * (rho + 1.0) * (rho + 2.0),
    }
}

fn shift(order: Order) -> f64 {
    match order {
        Order::One => 1.0,
        Order::Two => 2.0,
    }
}

impl MomentTable {
    /// Moments of the ordinates in `(b₀, b_last]` about `u0`, valid for
    /// `|log x − u0| ≤ delta_max`. `breakpoints` must be ascending.
    pub fn build(zeros: &ZeroSet, order: Order, u0: f64, delta_max: f64, breakpoints: &[f64]) -> Result<Self> {
        if !(delta_max > 0.0 && delta_max <= 1.0) {
            return Err(Error::InvalidParameter(format!("delta_max must lie in (0, 1], got {delta_max}")));
        }
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("breakpoints must be strictly ascending".into()));
        }
        let mut cells = Vec::new();
        for w in breakpoints.windows(2) {
            let pieces = ((w[1] - w[0]) / MAX_CELL_WIDTH).ceil().max(1.0) as usize;
            let step = (w[1] - w[0]) / pieces as f64;
            for i in 0..pieces {
                let lo = if i == 0 { w[0] } else { w[0] + step * i as f64 };
                let hi = if i + 1 == pieces { w[1] } else { w[0] + step * (i + 1) as f64 };
                cells.push(Cell { lo, hi, mid: 0.5 * (lo + hi) });
            }
        }
        let moments = cells
            .par_iter()
            .map(|cell| {
                let mut m = [Complex64::new(0.0, 0.0); MOMENTS];
                zeros.for_each_in(cell.lo, cell.hi, |g, mult| {
                    let (s, c) = (g * u0).sin_cos();
                    let mut t = Complex64::new(c, s) * f64::from(mult) / denom(order, g);
                    let d = g - cell.mid;
                    for slot in m.iter_mut() {
                        *slot += t;
                        t *= d;
                    }
                });
                m
            })
            .collect();
        Ok(Self { order, u0, delta_max, breakpoints: breakpoints.to_vec(), cells, moments })
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Whether `log x` lies within the expansion radius.
    pub fn covers(&self, x: f64) -> bool {
        (x.ln() - self.u0).abs() <= self.delta_max
    }

    /// Folded contribution of every cell at `x`, in cell order.
    pub fn cell_values(&self, x: f64) -> Result<Vec<f64>> {
        let u = x.ln();
        let delta = u - self.u0;
        if !(delta.abs() <= self.delta_max) {
            return Err(Error::Domain(format!(
                "log x = {u} outside the expansion window {} ± {}",
                self.u0, self.delta_max
            )));
        }
        // (iδ)^m/m!
        let mut w = [Complex64::new(0.0, 0.0); MOMENTS];
        let mut t = Complex64::new(1.0, 0.0);
        for (m, slot) in w.iter_mut().enumerate() {
            *slot = t;
            t *= Complex64::new(0.0, delta) / (m + 1) as f64;
        }
        let scale = 2.0 * ((0.5 + shift(self.order)) * u).exp();
        Ok(self
            .cells
            .iter()
            .zip(&self.moments)
            .map(|(cell, mom)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in (0..MOMENTS).rev() {
                    acc += mom[m] * w[m];
                }
                let (s, c) = (cell.mid * delta).sin_cos();
                scale * (Complex64::new(c, s) * acc).re
            })
            .collect())
    }

    fn cell_index(&self, b: f64) -> Result<usize> {
        if b <= self.cells[0].lo {
            return Ok(0);
        }
        if b >= self.cells[self.cells.len() - 1].hi {
            return Ok(self.cells.len());
        }
        if !self.breakpoints.contains(&b) {
            return Err(Error::InvalidParameter(format!("{b} is not a breakpoint of the table")));
        }
        Ok(self.cells.partition_point(|c| c.hi <= b))
    }

    /// Sum over `lo < γ ≤ hi` from precomputed [`cell_values`](Self::cell_values);
    /// `lo` and `hi` must be breakpoints (or lie beyond the table).
    pub fn range_sum(&self, values: &[f64], lo: f64, hi: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let (a, b) = (self.cell_index(lo)?, self.cell_index(hi)?);
        Ok(values[a..b].iter().copied().collect::<NeumaierSum>().value())
    }

    pub fn sum(&self, x: f64, lo: f64, hi: f64) -> Result<f64> {
        self.range_sum(&self.cell_values(x)?, lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explicit::pair_sum;
    use crate::spectral::synthesize_zeros;

    #[test]
    fn matches_direct_sum() {
        let z = synthesize_zeros(4.0 * std::f64::consts::PI, 150.0, 11).unwrap();
        let bps = [0.0, 20.0, 54.59815, 150.0];
        for order in [Order::One, Order::Two] {
            let t = MomentTable::build(&z, order, 4.5, 1.0, &bps).unwrap();
            for x in [4f64.exp(), 4.3f64.exp(), 5.49f64.exp(), 3.6f64.exp()] {
                let v = t.cell_values(x).unwrap();
                let scale: f64 = x.powf(0.5 + shift(order)) * 2.0 * 150.0;
                for (lo, hi) in [(0.0, 150.0), (20.0, 150.0), (54.59815, 150.0), (0.0, 20.0)] {
                    let fast = t.range_sum(&v, lo, hi).unwrap();
                    let direct = pair_sum(&z, order, x, lo, hi);
                    assert!((fast - direct).abs() < 1e-12 * scale, "{order:?} {x} {lo} {hi}: {fast} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn rejects_points_outside_window() {
        let z = synthesize_zeros(4.0 * std::f64::consts::PI, 10.0, 1).unwrap();
        let t = MomentTable::build(&z, Order::One, 2.5, 1.0, &[0.0, 10.0]).unwrap();
        assert!(t.cell_values(1.0).is_err());
        assert!(t.range_sum(&t.cell_values(10.0).unwrap(), 3.0, 10.0).is_err());
    }
}
