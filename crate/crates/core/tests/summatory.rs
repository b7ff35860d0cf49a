use geodesic_lab::group::{enumerate_length_spectrum, modular_generators, EnumerationOptions, LengthSpectrum, Model, PrimitiveClass};
use geodesic_lab::numeric::log_grid;
use geodesic_lab::summatory::{batch_profile, Summatory};
use geodesic_lab::Error;
use proptest::prelude::*;
use std::sync::OnceLock;

fn modular() -> &'static LengthSpectrum {
    static S: OnceLock<LengthSpectrum> = OnceLock::new();
    S.get_or_init(|| enumerate_length_spectrum(&modular_generators(), 1e4, &EnumerationOptions::default()).unwrap())
}

fn single(trace: f64, bound: f64) -> LengthSpectrum {
    let c = PrimitiveClass::from_trace(trace, 1, None).unwrap();
    LengthSpectrum::new(Model::Modular, vec![c], bound, bound, true, EnumerationOptions::default())
}

#[test]
fn single_class_examples() {
    let spec = single(3.0, 100.0);
    let n0 = spec.classes[0].norm;
    let s = Summatory::new(&spec);
    assert_eq!(s.psi(n0 - 0.1).unwrap(), 0.0);
    assert_eq!(s.psi1(2.0).unwrap(), 0.0);
    assert!((s.psi1(n0 + 1.0).unwrap() - n0.ln()).abs() < 1e-12);
    assert!((s.psi2(n0 + 2.0).unwrap() - 2.0 * n0.ln()).abs() < 1e-12);
    assert!((s.psi(n0 * n0 + 1e-6).unwrap() - 2.0 * n0.ln()).abs() < 1e-12);
}

#[test]
fn modular_psi_at_seven() {
    let s = Summatory::new(modular());
    assert!((s.psi(7.0).unwrap() - 1.9248473002384139).abs() < 1e-12);
}

#[test]
fn domain_errors() {
    let s = Summatory::new(modular());
    assert!(matches!(s.psi(2e4), Err(Error::SpectrumIncomplete { .. })));
    assert!(s.psi(0.5).is_err());
}

#[test]
fn profile_columns_are_monotone() {
    let grid = log_grid(2.0, 1e4, 1000);
    let p = batch_profile(modular(), &grid).unwrap();
    for col in [&p.psi, &p.psi1, &p.psi2] {
        assert!(col.windows(2).all(|w| w[0] <= w[1]));
    }
    assert!(p.complete);
}

#[test]
fn profile_matches_pointwise_exactly() {
    let s = Summatory::new(modular());
    let mut grid: Vec<f64> = (0..100).map(|i| 1.0 + 9999.0 * ((i as f64 * 0.618_033_988_75) % 1.0)).collect();
    grid.sort_by(f64::total_cmp);
    let [a, b, c] = s.profile(&grid).unwrap();
    for (i, &x) in grid.iter().enumerate() {
        assert_eq!(a[i], s.psi(x).unwrap());
        assert_eq!(b[i], s.psi1(x).unwrap());
        assert_eq!(c[i], s.psi2(x).unwrap());
    }
}

#[test]
fn psi1_slopes_recover_psi_between_events() {
    let s = Summatory::new(modular());
    let ev: Vec<f64> = s.events().iter().map(|e| e.at).collect();
    for w in ev.windows(2).filter(|w| w[1] - w[0] > 1e-3) {
        let (a, b) = (w[0] + (w[1] - w[0]) * 0.25, w[0] + (w[1] - w[0]) * 0.75);
        let slope = (s.psi1(b).unwrap() - s.psi1(a).unwrap()) / (b - a);
        let v = s.psi(a).unwrap();
        assert!((slope - v).abs() <= 1e-9 * v.max(1.0), "{a}: {slope} vs {v}");
    }
}

#[test]
fn powers_are_truncated() {
    let spec = modular();
    let lmin = spec.systole().unwrap();
    let s = Summatory::new(spec);
    let kmax = (1e4f64.ln() / lmin).floor();
    // the systole's powers are the densest; count them
    let count = s.events().iter().filter(|e| (e.weight - lmin).abs() < 1e-12).count() as f64;
    assert!(count <= kmax);
}

proptest! {
    #[test]
    fn second_difference_sandwich(x in 5.0f64..9000.0, frac in 0.001f64..1.0) {
        let s = Summatory::new(modular());
        let hmax = ((x - 1.0) / 2.0).min((1e4 - x) / 2.0);
        prop_assume!(hmax > 0.0);
        let h = frac * hmax;
        let f = |y: f64| s.psi2(y).unwrap();
        let lower = f(x - 2.0 * h) - 2.0 * f(x - h) + f(x);
        let upper = f(x + 2.0 * h) - 2.0 * f(x + h) + f(x);
        let mid = h * h * s.psi(x).unwrap();
        let tol = 1e-9 * f(x).max(1.0);
        prop_assert!(lower <= mid + tol && mid <= upper + tol, "{} {} {}", lower, mid, upper);
    }

    #[test]
    fn all_three_are_nondecreasing(a in 1.0f64..1e4, b in 1.0f64..1e4) {
        let s = Summatory::new(modular());
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(s.psi(lo).unwrap() <= s.psi(hi).unwrap());
        prop_assert!(s.psi1(lo).unwrap() <= s.psi1(hi).unwrap());
        prop_assert!(s.psi2(lo).unwrap() <= s.psi2(hi).unwrap());
    }
}
