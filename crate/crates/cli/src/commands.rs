use std::f64::consts::PI;
use std::fs::File;

use geodesic_lab::exceptional::{self as exc, SetKind};
use geodesic_lab::explicit::{self, SmoothCoefficients};
use geodesic_lab::group::{
    enumerate_length_spectrum, modular_generators, read_spectrum_csv, spectrum_metadata, write_spectrum_csv,
    bolza_generators, EnumerationOptions, LengthSpectrum, Model,
};
use geodesic_lab::spectral::{self, SyntheticSpec, ZeroSet};
use geodesic_lab::summatory::{batch_profile, Summatory};
use geodesic_lab::Error;
use serde::Serialize;

use crate::config::{GridSpec, RunConfig};
use crate::output::{self, config_json};
use crate::{Failure, Outcome};

fn options(cfg: &RunConfig) -> EnumerationOptions {
    EnumerationOptions { word_cap: cfg.word_cap, max_elements: cfg.max_elements, ..EnumerationOptions::default() }
}

const CACHE_KEYS: [&str; 6] = ["model", "norm_bound", "word_cap", "max_elements", "length_tol", "tool_version"];

fn cache_key(spec: &LengthSpectrum) -> Vec<(String, String)> {
    spectrum_metadata(spec).into_iter().filter(|(k, _)| CACHE_KEYS.contains(&k.as_str())).collect()
}

/// Loads the cached spectrum when its metadata matches the configuration,
/// otherwise enumerates and rewrites the cache.
fn ensure_spectrum(cfg: &RunConfig) -> Result<LengthSpectrum, Failure> {
    let opts = options(cfg);
    let path = output::path(cfg, &format!("spectrum_{}_{}.csv", cfg.model, cfg.norm_bound));
    let wanted = cache_key(&LengthSpectrum::new(cfg.model, Vec::new(), cfg.norm_bound, cfg.norm_bound, true, opts.clone()));
    if path.is_file() {
        match File::open(&path).map_err(Error::from).and_then(read_spectrum_csv) {
            Ok(cached) if cache_key(&cached) == wanted => {
                eprintln!("reusing {}", path.display());
                return Ok(cached);
            }
            Ok(_) => eprintln!("warning: {} was produced with different settings; recomputing", path.display()),
            Err(e) => eprintln!("warning: unreadable cache {}: {e}; recomputing", path.display()),
        }
    }
    let gens = match cfg.model {
        Model::Bolza => bolza_generators(),
        Model::Modular => modular_generators(),
    };
    let spec = enumerate_length_spectrum(&gens, cfg.norm_bound, &opts)?;
    output::ensure_dir(&cfg.out_dir)?;
    let mut buf = format!("# config={}\n", config_json(cfg)).into_bytes();
    write_spectrum_csv(&mut buf, &spec)?;
    std::fs::write(&path, buf).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(spec)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = ensure_spectrum(cfg)?;
    eprintln!(
        "{} classes ({} with multiplicity), complete up to norm {}",
        spec.len(),
        spec.class_count(),
        spec.certified_bound
    );
    Ok(Outcome { incomplete: !spec.complete })
}

fn model_area(model: Model) -> f64 {
    match model {
        Model::Bolza => 4.0 * PI,
        Model::Modular => PI / 3.0,
    }
}

/// Zeros from `--eigenvalues`, or synthetic ones of the given default height.
fn load_zeros(cfg: &RunConfig, default_t_max: f64) -> Result<ZeroSet, Failure> {
    if let Some(p) = &cfg.eigenvalues {
        let file = File::open(p).map_err(|e| Failure::Config(format!("--eigenvalues {}: {e}", p.display())))?;
        let evs = spectral::load_eigenvalues(file)
            .map_err(|e| Failure::runtime(format!("--eigenvalues {}: {e}", p.display())))?
            .with_source(p.display().to_string());
        return Ok(spectral::eigenvalues_to_zeros(&evs, cfg.area.unwrap_or_else(|| model_area(cfg.model))));
    }
    let spec = SyntheticSpec {
        area: cfg.synthetic_area.unwrap_or(4.0 * PI),
        t_max: cfg.synthetic_t_max.unwrap_or(default_t_max),
        seed: cfg.seed,
        jitter: cfg.jitter,
    };
    Ok(spectral::synthesize_zeros_with(spec)?)
}

#[derive(Serialize)]
struct ZeroSummary {
    source: String,
    area: f64,
    trivial_zero: bool,
    real_zeros: Vec<spectral::RealZero>,
    half_zero_multiplicity: u32,
    ordinates: u64,
    coverage: f64,
    weyl: Vec<spectral::WeylReport>,
}

pub fn zeros(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let z = load_zeros(cfg, 100.0)?;
    let t = cfg.weyl_t.unwrap_or_else(|| z.coverage());
    let weyl = if t > 0.0 {
        [0.25, 0.5, 1.0].iter().map(|f| spectral::weyl_check(&z, f * t)).collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    let csv = output::path(cfg, "zeros.csv");
    output::csv_file(&csv, cfg, &[], |buf| z.write_csv(buf))?;
    let summary = ZeroSummary {
        source: z.source.clone(),
        area: z.area,
        trivial_zero: z.trivial,
        real_zeros: z.real_zeros.clone(),
        half_zero_multiplicity: z.half_zero,
        ordinates: z.ordinate_count(),
        coverage: z.coverage(),
        weyl,
    };
    output::json_file(&output::path(cfg, "zeros.json"), cfg, &summary)?;
    Ok(Outcome { incomplete: false })
}

pub fn psi(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = ensure_spectrum(cfg)?;
    let grid = cfg.grid.unwrap_or(GridSpec::log(2.0, spec.certified_bound, 200)).values();
    let profile = batch_profile(&spec, &grid)?;
    let extra = [
        ("model".to_string(), spec.model.to_string()),
        ("x_max".to_string(), profile.x_max.to_string()),
        ("complete".to_string(), spec.complete.to_string()),
    ];
    output::csv_file(&output::path(cfg, "psi.csv"), cfg, &extra, |buf| profile.write_csv(buf, &[]))?;
    Ok(Outcome { incomplete: !spec.complete })
}

#[derive(Serialize)]
struct Containment {
    inside: usize,
    total: usize,
    rate: f64,
}

impl Containment {
    fn new(inside: usize, total: usize) -> Self {
        Self { inside, total, rate: if total > 0 { inside as f64 / total as f64 } else { f64::NAN } }
    }
}

#[derive(Serialize)]
struct CompareSummary {
    truncation: Option<f64>,
    h_rule: &'static str,
    m_rule: &'static str,
    genus: u32,
    coefficients: SmoothCoefficients,
    exponent_fit: Option<explicit::ExponentFit>,
    exponent_fit_error: Option<String>,
    containment: Containment,
    max_width_over_x34: f64,
    max_residual_over_x34: f64,
    tail_split_at_grid_end: explicit::TailSplit,
    weyl_at_coverage: Option<spectral::WeylReport>,
}

fn max_of(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, f64::max)
}

pub fn compare(cfg: &RunConfig) -> Result<Outcome, Failure> {
    if cfg.eigenvalues.is_none() {
        return Err(Failure::Config("compare needs an eigenvalue file: pass --eigenvalues <file>".into()));
    }
    let spec = ensure_spectrum(cfg)?;
    let z = load_zeros(cfg, 0.0)?;
    let grid_spec = cfg.grid.unwrap_or(GridSpec::log(30.0, spec.certified_bound, 100));
    if !(grid_spec.start - 2.0 * grid_spec.start.powf(0.75) > 1.0) {
        return Err(Failure::Config(format!("--grid {grid_spec}: x − 2x^(3/4) must exceed 1 at every point")));
    }
    let grid = grid_spec.values();
    let fit_grid = cfg.fit_grid.map_or_else(|| grid.clone(), |g| g.values());
    let psi = Summatory::new(&spec);
    let genus = z.genus_from_area();
    let t = cfg.truncation.unwrap_or(f64::INFINITY);
    let coeffs = explicit::fit_smooth_coefficients(&psi, &z, &fit_grid, t, genus)?;
    let rows = grid
        .iter()
        .map(|&x| explicit::comparison_row(&psi, &coeffs, &z, x))
        .collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.x, r.residual)).collect();
    let (exponent_fit, exponent_fit_error) = match explicit::fit_error_exponent(&pairs) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let inside = rows.iter().filter(|r| r.lower <= r.psi_exact && r.psi_exact <= r.upper).count();
    let x_end = grid_spec.end;
    let summary = CompareSummary {
        truncation: cfg.truncation,
        h_rule: "x^(3/4)",
        m_rule: "x^(1/4)",
        genus,
        coefficients: coeffs,
        exponent_fit,
        exponent_fit_error,
        containment: Containment::new(inside, rows.len()),
        max_width_over_x34: max_of(rows.iter().map(|r| (r.upper - r.lower) / r.x.powf(0.75))),
        max_residual_over_x34: max_of(rows.iter().map(|r| r.residual.abs() / r.x.powf(0.75))),
        tail_split_at_grid_end: explicit::tail_split_bound(&z, x_end, x_end.powf(0.75), x_end.powf(0.25).max(2.0 + 1e-12))?,
        weyl_at_coverage: (z.coverage() > 0.0).then(|| spectral::weyl_check(&z, z.coverage())).transpose()?,
    };
    output::csv_file(&output::path(cfg, "compare.csv"), cfg, &[], |buf| explicit::write_comparison_csv(buf, &rows))?;
    output::json_file(&output::path(cfg, "compare.json"), cfg, &summary)?;
    Ok(Outcome { incomplete: !spec.complete })
}

fn exc_params(cfg: &RunConfig) -> exc::ExceptionalParams {
    exc::ExceptionalParams {
        alpha: cfg.alpha,
        beta: cfg.beta,
        n_min: cfg.n.0,
        n_max: cfg.n.1,
        density: cfg.density,
        epsilon: cfg.epsilon,
    }
}

#[derive(Serialize)]
struct ScanSummary {
    c_hat: f64,
    pass: bool,
    slack: f64,
    per_octave: Vec<(f64, f64)>,
    measure_h: Vec<(u32, f64)>,
    partial_sums: exc::PartialSums,
    comparison_series: f64,
    comparison_tail_bound: f64,
}

fn run_scan(cfg: &RunConfig, z: &ZeroSet) -> Result<(exc::ExceptionalScan, exc::MeasureBound), Failure> {
    let params = exc_params(cfg);
    let scan = exc::build_efgh(z, &params)?;
    let bound = exc::verify_measure_bound(&scan.reports(), cfg.slack);
    Ok((scan, bound))
}

pub fn scan(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let z = load_zeros(cfg, f64::from(cfg.n.1).exp())?;
    let (scan, bound) = run_scan(cfg, &z)?;
    for o in &scan.octaves {
        for kind in SetKind::ALL {
            let name = format!("scan/n{}_{:?}.json", o.n, kind);
            output::json_file(&output::path(cfg, &name), cfg, o.report(kind))?;
        }
    }
    output::csv_file(&output::path(cfg, "scan_aggregate.csv"), cfg, &[], |buf| {
        exc::write_aggregate_csv(buf, &scan, bound.c_hat)
    })?;
    let p = &scan.params;
    let summary = ScanSummary {
        c_hat: bound.c_hat,
        pass: bound.pass,
        slack: bound.slack,
        per_octave: bound.per_octave.clone(),
        measure_h: scan.octaves.iter().map(|o| (o.n, o.h.log_measure)).collect(),
        partial_sums: exc::partial_sums(&scan, bound.c_hat),
        comparison_series: exc::comparison_series(p.alpha, p.beta, p.n_min, p.n_max),
        comparison_tail_bound: exc::comparison_tail_bound(p.alpha, p.beta, p.n_max),
    };
    output::json_file(&output::path(cfg, "scan.json"), cfg, &summary)?;
    eprintln!("C_hat = {} ({})", bound.c_hat, if bound.pass { "bounded" } else { "trend violated" });
    Ok(Outcome { incomplete: false })
}

struct Thm2Row {
    x: f64,
    psi_exact: f64,
    lower: f64,
    upper: f64,
    h: f64,
    exceptional: bool,
    residual: f64,
}

#[derive(Serialize)]
struct Thm2Summary {
    genus: u32,
    coefficients: SmoothCoefficients,
    evaluated: usize,
    exceptional: usize,
    skipped_depth: usize,
    skipped_range: usize,
    containment_non_exceptional: Containment,
    /// `(n, max width·(log x)^α/x^{3/4})` over non-exceptional points.
    width_scale_per_octave: Vec<(u32, f64)>,
    c_hat: f64,
}

pub fn thm2(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = ensure_spectrum(cfg)?;
    let psi = Summatory::new(&spec);
    let z = load_zeros(cfg, f64::from(cfg.n.1).exp())?;
    let (scan, bound) = run_scan(cfg, &z)?;
    let genus = z.genus_from_area();
    let mut candidates = Vec::new();
    let mut skipped_range = 0;
    for o in &scan.octaves {
        for &x in &o.e.grid {
            if x <= psi.bound() {
                candidates.push(x);
            } else {
                skipped_range += 1;
            }
        }
    }
    let usable = |x: f64| {
        let h = x.powf(0.75) / x.ln().powf(cfg.alpha);
        scan.octave((x + h).ln().floor() as u32).is_some()
    };
    let fit_grid: Vec<f64> = match cfg.fit_grid {
        Some(g) => g.values(),
        None => candidates.iter().copied().filter(|&x| usable(x)).step_by(16).collect(),
    };
    let coeffs = exc::fit_thm2_coefficients(&psi, &scan, &z, &fit_grid, genus)?;
    let mut rows = Vec::new();
    let mut skipped_depth = 0;
    for &x in &candidates {
        match exc::reconstruct_psi_thm2(&coeffs, &scan, &z, x, cfg.alpha) {
            Ok(s) => rows.push(Thm2Row {
                x,
                psi_exact: psi.psi(x)?,
                lower: s.lower,
                upper: s.upper,
                h: s.h_used,
                exceptional: s.exceptional,
                residual: exc::residual_thm2(&psi, &z, x, cfg.epsilon)?,
            }),
            Err(Error::InsufficientDepth { .. }) | Err(Error::Domain(_)) => skipped_depth += 1,
            Err(e) => return Err(e.into()),
        }
    }
    let normal: Vec<&Thm2Row> = rows.iter().filter(|r| !r.exceptional).collect();
    let inside = normal.iter().filter(|r| r.lower <= r.psi_exact && r.psi_exact <= r.upper).count();
    let mut width_scale: Vec<(u32, f64)> = Vec::new();
    for r in &normal {
        let n = r.x.ln().floor() as u32;
        let w = (r.upper - r.lower) * r.x.ln().powf(cfg.alpha) / r.x.powf(0.75);
        match width_scale.iter_mut().find(|p| p.0 == n) {
            Some(p) => p.1 = p.1.max(w),
            None => width_scale.push((n, w)),
        }
    }
    let summary = Thm2Summary {
        genus,
        coefficients: coeffs,
        evaluated: rows.len(),
        exceptional: rows.len() - normal.len(),
        skipped_depth,
        skipped_range,
        containment_non_exceptional: Containment::new(inside, normal.len()),
        width_scale_per_octave: width_scale,
        c_hat: bound.c_hat,
    };
    output::csv_file(&output::path(cfg, "thm2.csv"), cfg, &[], |buf| {
        use std::io::Write;
        writeln!(buf, "x,psi_exact,lower,upper,h,exceptional,residual")?;
        for r in &rows {
            writeln!(buf, "{},{},{},{},{},{},{}", r.x, r.psi_exact, r.lower, r.upper, r.h, r.exceptional, r.residual)?;
        }
        Ok(())
    })?;
    output::json_file(&output::path(cfg, "thm2.json"), cfg, &summary)?;
    Ok(Outcome { incomplete: !spec.complete })
}
