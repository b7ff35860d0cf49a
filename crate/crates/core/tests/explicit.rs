use std::f64::consts::PI;

use geodesic_lab::explicit::{
    delta1, delta2, fit_error_exponent, fit_linear, integrated_series_term, pair_sum, pair_term, small_series_g,
    spectral_sum_psi1, spectral_sum_psi2, tail_split_bound, Direction, Order,
};
use geodesic_lab::numeric::{compensated_sum, pairwise_sum, Real};
use geodesic_lab::spectral::{synthesize_zeros, Ordinate, RealZero, ZeroSet};
use num_complex::Complex64;
use proptest::prelude::*;
use twofloat::TwoFloat;

#[test]
fn g_series_examples() {
    let x = 1e6;
    let g = small_series_g(x, 2, 1e-15).unwrap();
    assert!((g * x / 5.0 - 1.0).abs() < 1e-4);
    let brute: f64 = (2..10_000).map(|k| (2.0 * k as f64 + 1.0) / (k as f64 * (k as f64 - 1.0)) * 2f64.powi(1 - k)).sum();
    assert!((small_series_g(2.0, 2, 1e-15).unwrap() - 2.0 * brute).abs() < 1e-13);
    let coarse = small_series_g(100.0, 3, 1e-12).unwrap();
    let fine = small_series_g(100.0, 3, 1e-16).unwrap();
    assert!((coarse - fine).abs() <= 1e-12 * fine.abs());
    assert!(small_series_g(1.0, 2, 1e-15).is_err());
}

#[test]
fn integrated_term_is_an_antiderivative() {
    assert_eq!(integrated_series_term(1.0, 2, 1e-15).unwrap(), 0.0);
    let h = 1e-4;
    let fd = (integrated_series_term(10.0 + h, 2, 1e-15).unwrap() - integrated_series_term(10.0 - h, 2, 1e-15).unwrap())
        / (2.0 * h);
    let g = small_series_g(10.0, 2, 1e-15).unwrap();
    assert!((fd - g).abs() <= 1e-6 * g.abs());
}

#[test]
fn real_zeros_enter_both_formulas() {
    let z = ZeroSet::empty(4.0 * PI).with_real_zeros(vec![RealZero { rho: 0.8, multiplicity: 2 }]);
    let x: f64 = 50.0;
    assert!((spectral_sum_psi1(&z, x, 10.0) - 2.0 * x.powf(1.8) / (0.8 * 1.8)).abs() < 1e-10);
    assert!((spectral_sum_psi2(&z, x, 10.0) - 2.0 * x.powf(2.8) / (0.8 * 1.8 * 2.8)).abs() < 1e-9);
}

#[test]
fn ascending_and_pairwise_sums_agree() {
    let z = synthesize_zeros(4.0 * PI, 316.3, 11).unwrap();
    assert!(z.ordinate_count() >= 100_000);
    for x in [50.0, 1234.5, 9e4] {
        let lx = f64::ln(x);
        let terms: Vec<f64> = z.ordinates().iter().map(|o| pair_term(Order::One, lx, o.gamma)).collect();
        let asc = compensated_sum(terms.iter().copied());
        let tree = pairwise_sum(&terms);
        let folded = pair_sum(&z, Order::One, x, 0.0, f64::INFINITY);
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        assert!((asc - tree).abs() <= 1e-10 * scale, "{x}: {asc} vs {tree}");
        assert_eq!(asc, folded);
    }
}

#[test]
fn tail_split_needs_m_above_two() {
    let z = synthesize_zeros(4.0 * PI, 30.0, 2).unwrap();
    assert!(tail_split_bound(&z, 100.0, 10.0, 2.0).is_err());
    let s = tail_split_bound(&z, 1e4, 1e3, 10.0).unwrap();
    assert!(s.head > 0.0 && s.tail > 0.0);
}

#[test]
fn exponent_fit_examples() {
    let xs: Vec<f64> = (0..60).map(|i| 10f64.powf(2.0 + i as f64 / 20.0)).collect();
    let exact: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 3.0 * x.powf(0.75))).collect();
    assert!((fit_error_exponent(&exact).unwrap().slope - 0.75).abs() < 1e-9);
    let flat: Vec<(f64, f64)> = xs.iter().map(|&x| (x, -2.0)).collect();
    assert!(fit_error_exponent(&flat).unwrap().slope.abs() < 1e-12);
    let wavy: Vec<(f64, f64)> = xs.iter().map(|&x| (x, x.sqrt() * x.ln().cos())).collect();
    let f = fit_error_exponent(&wavy).unwrap();
    assert!((f.slope - 0.5).abs() < 0.25 && f.r2 < 1.0);
    assert!(fit_error_exponent(&exact[..5]).is_err());
}

#[test]
fn linear_fit_recovers_known_coefficients() {
    let xs: Vec<f64> = (0..40).map(|i| 10.0 + 30.0 * i as f64).collect();
    let basis = |x: f64| [x, x * x.ln(), 1.0, x.ln()];
    let want = [1.0, -0.5, 0.25, 2.0];
    let ys: Vec<f64> = xs.iter().map(|&x| basis(x).iter().zip(&want).map(|(b, c)| b * c).sum()).collect();
    let (c, r) = fit_linear(&xs, &ys, basis).unwrap();
    for (a, b) in c.iter().zip(&want) {
        assert!((a - b).abs() < 1e-8, "{c:?}");
    }
    assert!(r < 1e-8);
    assert!(fit_linear(&xs, &ys, |x: f64| [x, 2.0 * x]).is_err());
}

fn folded_vs_complex(order: Order, x: f64, gamma: f64) -> (f64, f64) {
    let s = match order {
        Order::One => 1.0,
        Order::Two => 2.0,
    };
    let term = |rho: Complex64| {
        let d = match order {
            Order::One => rho * (rho + 1.0),
            Order::Two => rho * (rho + 1.0) * (rho + 2.0),
        };
        Complex64::new(x, 0.0).powc(rho + s) / d
    };
    let full = term(Complex64::new(0.5, gamma)) + term(Complex64::new(0.5, -gamma));
    (pair_term(order, x.ln(), gamma), full.re)
}

proptest! {
    #[test]
    fn conjugate_folding_matches_complex_pairs(x in 1.5f64..1e6, gamma in 0.01f64..500.0, two in any::<bool>()) {
        let order = if two { Order::Two } else { Order::One };
        let (folded, full) = folded_vs_complex(order, x, gamma);
        prop_assert!((folded - full).abs() <= 1e-12 * full.abs().max(folded.abs()) + 1e-300,
            "{} vs {}", folded, full);
    }

    #[test]
    fn second_difference_is_exact_on_cubics(
        c in prop::array::uniform4(-10.0f64..10.0),
        x in 1.0f64..1e3,
        h in 1e-3f64..1e2,
        plus in any::<bool>(),
    ) {
        let dir = if plus { Direction::Plus } else { Direction::Minus };
        let s = if plus { h } else { -h };
        let [c0, c1, c2, c3] = c.map(TwoFloat::from);
        let f = |y: TwoFloat| Ok(c0 + y * (c1 + y * (c2 + y * c3)));
        let (xd, hd) = (TwoFloat::from(x), TwoFloat::from(h));
        let got = delta2(f, xd, hd, dir).unwrap().quot(hd * hd).to_f64();
        // Δ₂ of a cubic over h²: 2c₂ + 6c₃(x + s)
        let want = (TwoFloat::from(2.0) * c2 + TwoFloat::from(6.0) * c3 * (xd + TwoFloat::from(s))).to_f64();
        let scale = (c[2].abs() + 6.0 * c[3].abs() * (x + h)).max(1e-300);
        prop_assert!((got - want).abs() <= 8.0 * f64::EPSILON * scale, "{} vs {}", got, want);
    }

    #[test]
    fn first_difference_directions(x in 2.0f64..100.0, h in 0.01f64..1.0) {
        let f = |y: f64| Ok(y * y);
        let p = delta1(f, x, h, Direction::Plus).unwrap();
        let m = delta1(f, x, h, Direction::Minus).unwrap();
        prop_assert!((p - (2.0 * x * h + h * h)).abs() < 1e-9 * x * x);
        prop_assert!((m - (2.0 * x * h - h * h)).abs() < 1e-9 * x * x);
    }

    #[test]
    fn truncation_is_a_prefix(x in 2.0f64..1e4, t in 1.0f64..40.0) {
        let z = ZeroSet::from_ordinates(
            (1..200).map(|j| Ordinate { gamma: 0.2 * j as f64 + 0.05, multiplicity: 1 }).collect(),
            4.0 * PI,
        );
        let direct = pair_sum(&z, Order::Two, x, 0.0, t - 1e-12);
        prop_assert!((spectral_sum_psi2(&z, x, t) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }
}
