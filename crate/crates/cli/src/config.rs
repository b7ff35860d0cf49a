use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use geodesic_lab::group::Model;
use serde::{Deserialize, Serialize};

/// `a:b:N` with an optional `log` (default) or `lin` suffix on `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub points: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn log(start: f64, end: f64, points: usize) -> Self {
        Self { start, end, points, log: true }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.log {
            geodesic_lab::numeric::log_grid(self.start, self.end, self.points)
        } else {
            geodesic_lab::numeric::lin_grid(self.start, self.end, self.points)
        }
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("grid '{s}' is not of the form a:b:N[log|lin]");
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else { return Err(bad()) };
        let start: f64 = a.trim().parse().map_err(|_| bad())?;
        let end: f64 = b.trim().parse().map_err(|_| bad())?;
        let n = n.trim();
        let (count, log) = if let Some(c) = n.strip_suffix("log") {
            (c, true)
        } else if let Some(c) = n.strip_suffix("lin") {
            (c, false)
        } else {
            (n, true)
        };
        let points: usize = count.parse().map_err(|_| bad())?;
        if points == 0 || !(start.is_finite() && end.is_finite()) || !(start <= end) {
            return Err(format!("grid '{s}': need 0 < N and a <= b"));
        }
        if log && !(start > 0.0) {
            return Err(format!("grid '{s}': log spacing needs a > 0"));
        }
        Ok(Self { start, end, points, log })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}{}", self.start, self.end, self.points, if self.log { "log" } else { "lin" })
    }
}

impl Serialize for GridSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Octave range `a:b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OctaveRange(pub u32, pub u32);

impl FromStr for OctaveRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("octave range '{s}' is not of the form a:b"))?;
        let a = a.trim().parse().map_err(|_| format!("bad octave '{a}'"))?;
        let b = b.trim().parse().map_err(|_| format!("bad octave '{b}'"))?;
        Ok(Self(a, b))
    }
}

impl fmt::Display for OctaveRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0, self.1)
    }
}

impl Serialize for OctaveRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OctaveRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything that determines a run. Written into every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    pub norm_bound: f64,
    pub word_cap: Option<usize>,
    pub max_elements: usize,
    pub eigenvalues: Option<PathBuf>,
    /// Surface area paired with the eigenvalue file (defaults to the model's).
    pub area: Option<f64>,
    pub synthetic_area: Option<f64>,
    pub synthetic_t_max: Option<f64>,
    pub seed: u64,
    pub jitter: f64,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub density: usize,
    pub n: OctaveRange,
    pub grid: Option<GridSpec>,
    pub fit_grid: Option<GridSpec>,
    /// Ordinate cutoff `T` for the explicit formulas (all stored zeros when unset).
    pub truncation: Option<f64>,
    pub weyl_t: Option<f64>,
    pub slack: f64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: Model::Bolza,
            norm_bound: 1000.0,
            word_cap: None,
            max_elements: 4_000_000,
            eigenvalues: None,
            area: None,
            synthetic_area: None,
            synthetic_t_max: None,
            seed: 1,
            jitter: 1.0,
            alpha: 1.0,
            beta: 6.0,
            epsilon: 0.01,
            density: 256,
            n: OctaveRange(4, 10),
            grid: None,
            fit_grid: None,
            truncation: None,
            weyl_t: None,
            slack: 3.0,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// JSON configuration file (flags take precedence)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Group model: bolza or modular
    #[arg(long, global = true)]
    pub model: Option<Model>,
    /// Largest geodesic norm to enumerate
    #[arg(long, global = true)]
    pub norm_bound: Option<f64>,
    /// Word-length cap (BFS depth for bolza, syllables for modular)
    #[arg(long, global = true)]
    pub word_cap: Option<usize>,
    /// Element budget for the bolza enumeration
    #[arg(long, global = true)]
    pub max_elements: Option<usize>,
    /// Laplacian eigenvalue file (`lambda[,multiplicity]` per line)
    #[arg(long, global = true)]
    pub eigenvalues: Option<PathBuf>,
    /// Surface area paired with --eigenvalues
    #[arg(long, global = true)]
    pub area: Option<f64>,
    /// Use synthetic Weyl-law zeros for a surface of this area
    #[arg(long, global = true)]
    pub synthetic_area: Option<f64>,
    /// Largest synthetic ordinate
    #[arg(long, global = true)]
    pub synthetic_t_max: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Synthetic jitter scale in [0, 1]
    #[arg(long, global = true)]
    pub jitter: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Scan points per octave
    #[arg(long, global = true)]
    pub density: Option<usize>,
    /// Octave range a:b
    #[arg(long, global = true)]
    pub n: Option<OctaveRange>,
    /// Evaluation grid a:b:N[log|lin]
    #[arg(long, global = true)]
    pub grid: Option<GridSpec>,
    /// Coefficient-fit grid a:b:N[log|lin]
    #[arg(long, global = true)]
    pub fit_grid: Option<GridSpec>,
    /// Ordinate cutoff T for the explicit formulas
    #[arg(long, global = true)]
    pub truncation: Option<f64>,
    /// Height for the Weyl-law check
    #[arg(long, global = true)]
    pub weyl_t: Option<f64>,
    /// Allowed growth factor of the envelope constant across octaves
    #[arg(long, global = true)]
    pub slack: Option<f64>,
    /// Output directory
    #[arg(long, short = 'o', global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn read_file(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("--config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("--config {}: {e}", path.display())))
}

macro_rules! overlay {
    ($cfg:ident, $args:ident, $($f:ident),*) => {
        $( if let Some(v) = $args.$f.clone() { $cfg.$f = v; } )*
    };
}

macro_rules! overlay_opt {
    ($cfg:ident, $args:ident, $($f:ident),*) => {
        $( if let Some(v) = $args.$f.clone() { $cfg.$f = Some(v); } )*
    };
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(p) => read_file(p)?,
            None => RunConfig::default(),
        };
        let a = self;
        overlay!(cfg, a, model, norm_bound, max_elements, seed, jitter, alpha, beta, epsilon, density, n, slack, out_dir);
        overlay_opt!(
            cfg, a, word_cap, eigenvalues, area, synthetic_area, synthetic_t_max, grid, fit_grid, truncation, weyl_t
        );
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError(m));
        if !(self.norm_bound > 1.0) {
            return err(format!("--norm-bound must exceed 1, got {}", self.norm_bound));
        }
        if !(self.alpha > 0.0) {
            return err(format!("--alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta > 4.0 * self.alpha + 1.0) {
            return err(format!(
                "--beta {} violates beta > 4*alpha + 1 = {} (alpha = {})",
                self.beta,
                4.0 * self.alpha + 1.0,
                self.alpha
            ));
        }
        if !(0.0..0.25).contains(&self.epsilon) {
            return err(format!("--epsilon must lie in [0, 0.25), got {}", self.epsilon));
        }
        if self.density < 64 {
            return err(format!("--density must be at least 64, got {}", self.density));
        }
        if self.n.0 < 2 || self.n.0 > self.n.1 {
            return err(format!("--n {} must satisfy 2 <= a <= b", self.n));
        }
        if !(0.0..=1.0).contains(&self.jitter) {
            return err(format!("--jitter must lie in [0, 1], got {}", self.jitter));
        }
        if !(self.slack >= 1.0) {
            return err(format!("--slack must be at least 1, got {}", self.slack));
        }
        for (flag, v) in [("--area", self.area), ("--synthetic-area", self.synthetic_area)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return err(format!("{flag} must be positive, got {v}"));
                }
            }
        }
        if let Some(t) = self.synthetic_t_max {
            if !(t > 1.0) {
                return err(format!("--synthetic-t-max must exceed 1, got {t}"));
            }
        }
        for (flag, g) in [("--grid", self.grid), ("--fit-grid", self.fit_grid)] {
            if let Some(g) = g {
                if !(g.start >= 1.0) {
                    return err(format!("{flag} {g}: points must be at least 1"));
                }
                if g.end > self.norm_bound {
                    return err(format!("{flag} {g} extends beyond --norm-bound {}", self.norm_bound));
                }
            }
        }
        if let Some(p) = &self.eigenvalues {
            if !p.is_file() {
                return err(format!("--eigenvalues {}: no such file", p.display()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        let g: GridSpec = "10:1e3:50log".parse().unwrap();
        assert_eq!(g, GridSpec::log(10.0, 1000.0, 50));
        assert_eq!(g.values().len(), 50);
        assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
        let l: GridSpec = "0:1:5lin".parse().unwrap();
        assert_eq!(l.values()[2], 0.5);
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("0:2:5log".parse::<GridSpec>().is_err());
        assert!("3:2:5".parse::<GridSpec>().is_err());
    }

    #[test]
    fn beta_validation() {
        let cfg = RunConfig { beta: 4.0, ..RunConfig::default() };
        assert!(cfg.validate().unwrap_err().0.contains("--beta"));
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn config_roundtrips_through_json() {
        let cfg = RunConfig { grid: Some(GridSpec::log(2.0, 50.0, 7)), ..RunConfig::default() };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
    }
}
