use geodesic_lab::group::{
    bolza_generators, canonical_rotation, enumerate_length_spectrum, is_primitive, least_rotation,
    modular_generators, modular_necklace_spectrum, read_spectrum_csv, trace_to_length, write_spectrum_csv,
    EnumerationOptions, LengthSpectrum,
};
use proptest::prelude::*;

fn modular(bound: f64) -> LengthSpectrum {
    enumerate_length_spectrum(&modular_generators(), bound, &EnumerationOptions::default()).unwrap()
}

fn bolza(bound: f64) -> LengthSpectrum {
    enumerate_length_spectrum(&bolza_generators(), bound, &EnumerationOptions::default()).unwrap()
}

fn check_consistency(spec: &LengthSpectrum) {
    for c in &spec.classes {
        assert!((c.norm - c.length.exp()).abs() / c.norm <= 1e-12, "{c:?}");
        assert!((c.length - trace_to_length(c.trace).unwrap()).abs() <= 1e-12, "{c:?}");
        assert!(c.trace > 2.0);
        if spec.complete {
            assert!(c.norm <= spec.norm_bound);
        }
    }
    for w in spec.classes.windows(2) {
        assert!(w[0].length < w[1].length);
    }
}

#[test]
fn bolza_systole() {
    let spec = bolza(1000.0);
    assert!(spec.complete);
    check_consistency(&spec);
    let first = &spec.classes[0];
    assert_eq!(first.multiplicity, 24);
    // 2·arccosh(1 + √2)
    assert!((first.length - 3.0571418).abs() < 1e-6);
    assert!((first.trace - (2.0 + 2f64.sqrt() * 2.0)).abs() < 1e-12);
}

#[test]
fn bolza_below_systole_is_empty() {
    let spec = bolza(20.0);
    assert!(spec.is_empty());
    assert!(spec.complete);
}

#[test]
fn bolza_multiplicities_are_even() {
    // a geodesic and its reverse are distinct classes of the same length
    for c in &bolza(1000.0).classes {
        assert_eq!(c.multiplicity % 2, 0, "{c:?}");
    }
}

#[test]
fn modular_first_classes() {
    let spec = modular(7.0);
    assert_eq!(spec.len(), 1);
    assert_eq!(spec.classes[0].trace, 3.0);
    assert_eq!(spec.classes[0].multiplicity, 1);
    check_consistency(&modular(1e5));
}

#[test]
fn necklace_and_enumeration_agree() {
    let a = modular_necklace_spectrum(40);
    let b = modular(a.norm_bound);
    let pick = |s: &LengthSpectrum| s.classes.iter().map(|c| (c.trace, c.multiplicity)).collect::<Vec<_>>();
    assert_eq!(pick(&a), pick(&b));
}

#[test]
fn word_cap_degrades_to_best_effort() {
    let opts = EnumerationOptions { word_cap: Some(10), ..Default::default() };
    let capped = enumerate_length_spectrum(&bolza_generators(), 1000.0, &opts).unwrap();
    assert!(!capped.complete);
    assert!(capped.certified_bound < 1000.0);
    let full = bolza(1000.0);
    for c in &capped.classes {
        assert!(c.norm <= capped.certified_bound);
        assert!(full.classes.iter().any(|f| (f.length - c.length).abs() < 1e-9 && f.multiplicity == c.multiplicity));
    }
}

#[test]
fn spectrum_csv_round_trip() {
    let spec = bolza(300.0);
    let mut buf = Vec::new();
    write_spectrum_csv(&mut buf, &spec).unwrap();
    let back = read_spectrum_csv(buf.as_slice()).unwrap();
    assert_eq!(back.classes.len(), spec.classes.len());
    assert_eq!(back.complete, spec.complete);
    for (a, b) in back.classes.iter().zip(&spec.classes) {
        assert_eq!(a.multiplicity, b.multiplicity);
        assert!((a.length - b.length).abs() < 1e-14);
    }
}

#[test]
fn enumeration_is_schedule_independent() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| bolza(600.0))
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn primitivity_examples() {
    assert!(is_primitive(b"LR"));
    assert!(!is_primitive(b"LRLR"));
    assert!(is_primitive(b"LLRLR"));
}

fn word() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 1..12)
}

fn invert(c: &u8) -> u8 {
    (c + 2) % 4
}

proptest! {
    #[test]
    fn least_rotation_is_a_minimal_rotation(w in word()) {
        let r = least_rotation(&w);
        let rotations: Vec<Vec<u8>> = (0..w.len()).map(|k| [&w[k..], &w[..k]].concat()).collect();
        prop_assert!(rotations.contains(&r));
        prop_assert!(rotations.iter().all(|q| &r <= q));
    }

    #[test]
    fn canonical_rotation_is_a_class_invariant(w in word(), k in 0usize..12) {
        let k = k % w.len();
        let rotated = [&w[k..], &w[..k]].concat();
        let inverse: Vec<u8> = w.iter().rev().map(invert).collect();
        let c = canonical_rotation(&w, invert);
        prop_assert_eq!(&c, &canonical_rotation(&rotated, invert));
        prop_assert_eq!(&c, &canonical_rotation(&inverse, invert));
    }

    #[test]
    fn powers_are_not_primitive(w in word(), k in 2usize..4) {
        prop_assert!(!is_primitive(&w.repeat(k)));
    }

    #[test]
    fn enlarging_the_bound_keeps_earlier_classes(a in 10.0f64..3000.0, b in 10.0f64..3000.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let small = modular(lo);
        let large = modular(hi);
        prop_assert_eq!(&small.classes[..], &large.classes[..small.len()]);
    }
}
