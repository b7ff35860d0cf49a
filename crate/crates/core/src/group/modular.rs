//! `PSL(2,ℤ)` via primitive necklaces over `L = [[1,1],[0,1]]`, `R = [[1,0],[1,1]]`.
//!
//! Primitive hyperbolic classes correspond one-to-one to Lyndon words over
//! `{L < R}` containing both letters. Words are generated as prenecklaces
//! (Fredricksen–Kessler–Maiorana recursion) and pruned on trace, which never
//! decreases when a word is extended because all matrices involved are
//! nonnegative.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use twofloat::TwoFloat;

use super::{EnumerationOptions, GeneratorSet, LengthSpectrum, Matrix2, Model, PrimitiveClass};
use crate::error::Result;

type IntMat = [u64; 4];

const L_MAT: IntMat = [1, 1, 0, 1];
const R_MAT: IntMat = [1, 0, 1, 1];

fn mul(m: &IntMat, n: &IntMat) -> IntMat {
    [
        m[0] * n[0] + m[1] * n[2],
        m[0] * n[1] + m[1] * n[3],
        m[2] * n[0] + m[3] * n[2],
        m[2] * n[1] + m[3] * n[3],
    ]
}

/// `L`, `R` and their inverses.
pub fn modular_generators() -> GeneratorSet {
    let m = |a: f64, b: f64, c: f64, d: f64| {
        Matrix2::new(TwoFloat::from(a), TwoFloat::from(b), TwoFloat::from(c), TwoFloat::from(d))
            .expect("unimodular")
    };
    GeneratorSet {
        model: Model::Modular,
        generators: vec![m(1., 1., 0., 1.), m(1., 0., 1., 1.), m(1., -1., 0., 1.), m(1., 0., -1., 1.)],
        labels: vec!['L', 'R', 'l', 'r'],
        genus: 0,
        area: PI / 3.0,
    }
}

/// Norm `((t + √(t²−4))/2)²` of a hyperbolic class of integer trace `t ≥ 3`.
pub fn norm_from_trace(t: u64) -> f64 {
    let t = t as f64;
    let e = (t + ((t - 2.0) * (t + 2.0)).sqrt()) / 2.0;
    e * e
}

/// Largest integer trace whose norm does not exceed `norm_bound` (0 if none).
pub fn trace_bound_for_norm(norm_bound: f64) -> u64 {
    if !(norm_bound >= norm_from_trace(3)) {
        return 0;
    }
    let s = norm_bound.sqrt();
    let mut t = (s + 1.0 / s).floor() as u64;
    while norm_from_trace(t + 1) <= norm_bound {
        t += 1;
    }
    while t >= 3 && norm_from_trace(t) > norm_bound {
        t -= 1;
    }
    t
}

struct Search {
    trace_bound: u64,
    syllable_cap: usize,
    word: Vec<u8>,
    found: Vec<(u64, String)>,
    truncated: bool,
}

impl Search {
    // `word` is a prenecklace with period `p`, `m` its matrix product.
    fn visit(&mut self, p: usize, m: IntMat, syllables: usize) {
        let n = self.word.len();
        let has_r = self.word.contains(&1);
        if n >= 2 && p == n && has_r {
            let w: String = self.word.iter().map(|&c| if c == 0 { 'L' } else { 'R' }).collect();
            self.found.push((m[0] + m[3], w));
        }
        // Extension by a[n] = a[n-p] keeps the period; a larger letter resets it.
        let repeat = self.word[n - p];
        let mut children = vec![(repeat, p)];
        if repeat == 0 {
            children.push((1, n + 1));
        }
        for (letter, period) in children {
            let next = mul(&m, if letter == 0 { &L_MAT } else { &R_MAT });
            let lower = if has_r || letter == 1 {
                next[0] + next[3]
            } else {
                // still a power of L: any completion must pass through ·R
                let r = mul(&next, &R_MAT);
                r[0] + r[3]
            };
            if lower > self.trace_bound {
                continue;
            }
            let new_syll = syllables + usize::from(letter != self.word[n - 1]);
            if new_syll > self.syllable_cap {
                self.truncated = true;
                continue;
            }
            self.word.push(letter);
            self.visit(period, next, new_syll);
            self.word.pop();
        }
    }
}

/// All Lyndon words with both letters and trace ≤ `trace_bound`, in lexicographic order.
/// The flag reports whether the syllable cap cut off any admissible branch.
pub(crate) fn lyndon_words(trace_bound: u64, syllable_cap: usize) -> (Vec<(u64, String)>, bool) {
    let mut s = Search {
        trace_bound,
        syllable_cap: syllable_cap.max(1),
        word: vec![0],
        found: Vec::new(),
        truncated: false,
    };
    if trace_bound >= 3 {
        // Every Lyndon word containing R starts with L.
        s.visit(1, L_MAT, 1);
    }
    (s.found, s.truncated)
}

fn spectrum_from_words(
    words: Vec<(u64, String)>,
    norm_bound: f64,
    certified_bound: f64,
    complete: bool,
    opts: EnumerationOptions,
) -> Result<LengthSpectrum> {
    let mut by_trace: BTreeMap<u64, (u32, String)> = BTreeMap::new();
    for (t, w) in words {
        by_trace.entry(t).and_modify(|e| e.0 += 1).or_insert((1, w));
    }
    let classes = by_trace
        .into_iter()
        .map(|(t, (mult, w))| {
            let mut c = PrimitiveClass::from_trace(t as f64, mult, Some(w))?;
            c.norm = norm_from_trace(t);
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LengthSpectrum::new(Model::Modular, classes, norm_bound, certified_bound, complete, opts))
}

/// Every primitive hyperbolic class of `PSL(2,ℤ)` with trace ≤ `trace_bound`.
///
/// Multiplicities count necklaces sharing a trace; the spectrum's norm bound
/// is the norm of `trace_bound`.
pub fn modular_necklace_spectrum(trace_bound: u64) -> LengthSpectrum {
    let (words, _) = lyndon_words(trace_bound, usize::MAX);
    let bound = if trace_bound >= 3 { norm_from_trace(trace_bound) } else { 1.0 };
    spectrum_from_words(words, bound, bound, true, EnumerationOptions::default())
        .expect("integer traces ≥ 3 are hyperbolic")
}

pub(crate) fn enumerate(norm_bound: f64, opts: &EnumerationOptions) -> Result<LengthSpectrum> {
    let tb = trace_bound_for_norm(norm_bound);
    let cap = opts.word_cap_for(Model::Modular);
    let (words, truncated) = lyndon_words(tb, cap);
    if !truncated {
        return spectrum_from_words(words, norm_bound, norm_bound, true, opts.clone());
    }
    // A word with s syllables has trace at least F(s+1) (Fibonacci), the
    // alternating word (LR)^(s/2) being the extreme. Hidden words have more
    // than `cap` syllables, so traces below F(cap+2) are still exact.
    let mut fib = (1u64, 2u64); // (F(2), F(3))
    for _ in 1..cap {
        fib = (fib.1, fib.0.saturating_add(fib.1));
    }
    let safe = (fib.1 - 1).min(tb);
    let words: Vec<_> = words.into_iter().filter(|(t, _)| *t <= safe).collect();
    let certified = if safe >= 3 { norm_from_trace(safe) } else { 1.0 };
    spectrum_from_words(words, norm_bound, certified, false, opts.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(tb: u64) -> Vec<(u64, u32)> {
        modular_necklace_spectrum(tb)
            .classes
            .iter()
            .map(|c| (c.trace as u64, c.multiplicity))
            .collect()
    }

    #[test]
    fn small_trace_bounds() {
        assert!(modular_necklace_spectrum(2).is_empty());
        assert_eq!(counts(3), vec![(3, 1)]);
        assert_eq!(counts(7), vec![(3, 1), (4, 2), (5, 2), (6, 3), (7, 2)]);
    }

    #[test]
    fn trace_bound_inverts_norm() {
        assert_eq!(trace_bound_for_norm(7.0), 3);
        assert_eq!(trace_bound_for_norm(6.0), 0);
        assert_eq!(trace_bound_for_norm(1e4), 100);
        assert_eq!(trace_bound_for_norm(norm_from_trace(57)), 57);
    }

    #[test]
    fn words_multiply_to_their_trace() {
        let gens = modular_generators();
        for c in modular_necklace_spectrum(12).classes {
            let m = gens.evaluate(c.word.as_deref().unwrap()).unwrap();
            assert_eq!(m.trace().hi(), c.trace);
        }
    }

    #[test]
    fn syllable_cap_gives_best_effort() {
        let opts = EnumerationOptions { word_cap: Some(3), ..Default::default() };
        let s = enumerate(1e4, &opts).unwrap();
        assert!(!s.complete);
        assert!(s.certified_bound < 1e4);
        let full = enumerate(1e4, &EnumerationOptions::default()).unwrap();
        assert!(full.complete);
        for c in &s.classes {
            let f = full.classes.iter().find(|f| f.trace == c.trace).unwrap();
            assert_eq!(f.multiplicity, c.multiplicity);
        }
    }
}
