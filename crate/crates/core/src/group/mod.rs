//! Length spectra of concrete Fuchsian groups.
//!
//! Two backends are provided: the genus-2 Bolza surface, counted
//! geometrically from its octagonal fundamental domain, and the modular
//! group `PSL(2,ℤ)`, counted through primitive necklaces over `{L, R}`.

mod bolza;
mod cache;
mod matrix;
mod modular;
mod words;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bolza::{bolza_generators, bolza_octagon, Octagon};
pub use cache::{read_spectrum_csv, spectrum_metadata, write_spectrum_csv};
pub use matrix::{Matrix2, DET_TOL};
pub use modular::{modular_generators, modular_necklace_spectrum, norm_from_trace, trace_bound_for_norm};
pub use words::{canonical_rotation, inverse_word, is_primitive, least_rotation};

/// Which surface a spectrum belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Bolza,
    Modular,
}

impl Model {
    pub fn default_word_cap(self) -> usize {
        match self {
            Model::Bolza => 26,
            Model::Modular => 40,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Bolza => "bolza",
            Model::Modular => "modular",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bolza" => Ok(Model::Bolza),
            "modular" => Ok(Model::Modular),
            other => Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        }
    }
}

/// Generators of a Fuchsian group, followed by their inverses.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub model: Model,
    /// `generators[i]` has letter `labels[i]`; the second half are inverses.
    pub generators: Vec<Matrix2>,
    pub labels: Vec<char>,
    /// 0 for the modular curve.
    pub genus: u32,
    pub area: f64,
}

impl GeneratorSet {
    /// Number of generators, not counting inverses.
    pub fn rank(&self) -> usize {
        self.generators.len() / 2
    }

    /// Product of the generators spelled by `word` (letters from `labels`).
    pub fn evaluate(&self, word: &str) -> Result<Matrix2> {
        word.chars().try_fold(Matrix2::identity(), |acc, ch| {
            let i = self
                .labels
                .iter()
                .position(|&l| l == ch)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown letter '{ch}'")))?;
            Ok(acc * self.generators[i])
        })
    }
}

/// One primitive hyperbolic conjugacy class (or a bundle of classes sharing a length).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveClass {
    pub trace: f64,
    pub length: f64,
    pub norm: f64,
    pub multiplicity: u32,
    pub word: Option<String>,
}

impl PrimitiveClass {
    pub fn from_trace(trace: f64, multiplicity: u32, word: Option<String>) -> Result<Self> {
        let length = trace_to_length(trace)?;
        Ok(Self { trace, length, norm: length.exp(), multiplicity, word })
    }
}

/// Knobs for [`enumerate_length_spectrum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationOptions {
    /// Word-length cap. `None` picks the model default (26 Bolza, 40 modular).
    /// For the modular backend the cap counts syllables (maximal runs `Lᵃ`, `Rᵇ`).
    pub word_cap: Option<usize>,
    /// Upper limit on distinct group elements held during a Bolza search.
    pub max_elements: usize,
    /// Lengths closer than this are merged into one entry.
    pub length_tol: f64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { word_cap: None, max_elements: 4_000_000, length_tol: 1e-9 }
    }
}

impl EnumerationOptions {
    pub fn word_cap_for(&self, model: Model) -> usize {
        self.word_cap.unwrap_or(model.default_word_cap())
    }
}

/// Sorted multiset of primitive classes up to a norm bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthSpectrum {
    pub model: Model,
    pub classes: Vec<PrimitiveClass>,
    pub norm_bound: f64,
    /// Every class with norm ≤ `certified_bound` is present.
    /// Equals `norm_bound` when `complete` is set.
    pub certified_bound: f64,
    pub complete: bool,
    pub genus: u32,
    pub area: f64,
    pub options: EnumerationOptions,
}

impl LengthSpectrum {
    /// Builds a spectrum, sorting by length and merging lengths within `options.length_tol`.
    pub fn new(
        model: Model,
        mut classes: Vec<PrimitiveClass>,
        norm_bound: f64,
        certified_bound: f64,
        complete: bool,
        options: EnumerationOptions,
    ) -> Self {
        classes.sort_by(|x, y| x.length.total_cmp(&y.length));
        let mut merged: Vec<PrimitiveClass> = Vec::with_capacity(classes.len());
        for c in classes {
            match merged.last_mut() {
                Some(last) if (c.length - last.length).abs() <= options.length_tol => {
                    last.multiplicity += c.multiplicity;
                }
                _ => merged.push(c),
            }
        }
        let (genus, area) = match model {
            Model::Bolza => (2, 4.0 * PI),
            Model::Modular => (0, PI / 3.0),
        };
        Self { model, classes: merged, norm_bound, certified_bound, complete, genus, area, options }
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    /// Total number of classes, counted with multiplicity.
    pub fn class_count(&self) -> u64 {
        self.classes.iter().map(|c| u64::from(c.multiplicity)).sum()
    }

    /// Shortest length, if any.
    pub fn systole(&self) -> Option<f64> {
        self.classes.first().map(|c| c.length)
    }
}

/// Translation length `2·arccosh(t/2)` of a matrix with trace `t`.
pub fn trace_to_length(t: f64) -> Result<f64> {
    if t.is_nan() || t < 2.0 {
        return Err(Error::NotHyperbolic(t));
    }
    Ok(2.0 * (t / 2.0).acosh())
}

/// Every primitive hyperbolic class with norm ≤ `norm_bound`.
///
/// Caps in `opts` turn the result into a best-effort spectrum: `complete`
/// is cleared and only classes below `certified_bound` are reported.
pub fn enumerate_length_spectrum(
    gens: &GeneratorSet,
    norm_bound: f64,
    opts: &EnumerationOptions,
) -> Result<LengthSpectrum> {
    if !(norm_bound > 1.0) {
        return Err(Error::InvalidParameter(format!("norm_bound must exceed 1, got {norm_bound}")));
    }
    match gens.model {
        Model::Bolza => bolza::enumerate(gens, norm_bound, opts),
        Model::Modular => modular::enumerate(norm_bound, opts),
    }
}
