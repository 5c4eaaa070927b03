use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vilenkin::frame::*;
use vilenkin::grid::Window;
use vilenkin::group::Side;
use vilenkin::Complex64;

fn system(f: &GeneralizedFilter, k: u32, s: &Modulators, form: HighPassForm) -> MultiwaveletSpectrum {
    let phi = build_pseudo_scaling(f, k).unwrap();
    pfmw_build(f, &phi, 0, s, form).unwrap()
}

fn unimodular_table(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..len).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))).collect()
}

fn small_case() -> impl Strategy<Value = (u8, u32, u32, u64)> {
    // (p, R, K, seed) with J = 6 covering the window
    prop_oneof![Just((2u8, 2u32, 3u32)), Just((2, 3, 2)), Just((3, 2, 2)), Just((5, 1, 1))]
        .prop_flat_map(|(p, r, k)| (Just(p), Just(r), Just(k), any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_filters_are_classical(p in prop::sample::select(vec![2u8, 3, 5, 7]), r in 1u32..4, seed: u64) {
        let v = validate_filter(&random_filter(p, r, seed).unwrap(), FilterMode::Classical, 1e-12);
        prop_assert!(v.sum_residual <= 1e-12);
        prop_assert!(v.cross_residual_classical <= 1e-12);
    }

    #[test]
    fn random_filters_give_parseval_frames((p, r, k, seed) in small_case()) {
        let f = random_filter(p, r, seed).unwrap();
        let psi = system(&f, k, &Modulators::identity(p), HighPassForm::Filter);
        let report = parseval_check(&psi, 12, 6, 1e-8).unwrap();
        prop_assert!(report.passed(), "{}", report);
    }

    #[test]
    fn unimodular_factors((p, r, k, seed) in small_case()) {
        let f = random_filter(p, r, seed).unwrap();
        let phi = build_pseudo_scaling(&f, k).unwrap();
        prop_assert!(phi.signum().iter().all(|z| (z.norm() - 1.0).abs() <= 1e-12));
        prop_assert!(phi.cocycle().v.values().iter().all(|z| (z.norm() - 1.0).abs() <= 1e-12));
        let abs_part = pseudo_spectrum(&f, k).unwrap();
        for (a, b) in phi.grid().values().iter().zip(abs_part.values()) {
            prop_assert!((a.norm() - b.re).abs() <= 1e-12);
            prop_assert!(b.re >= 0.0 && b.re <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn refinement_and_telescoping((p, r, k, seed) in small_case()) {
        let f = random_filter(p, r, seed).unwrap();
        let phi = build_pseudo_scaling(&f, k).unwrap();
        prop_assert!(phi.refinement_residual() <= 1e-10);
        prop_assert!(telescoping_check(&f, &phi, 6) <= 1e-10);
    }

    #[test]
    fn modulators_do_not_change_residuals((p, r, k, seed) in small_case()) {
        let f = random_filter(p, r, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rs = 2;
        let tables = (1..p).map(|_| unimodular_table((p as usize).pow(rs), &mut rng)).collect();
        let s = Modulators::new(p, rs, tables).unwrap();
        let plain = parseval_check(&system(&f, k, &Modulators::identity(p), HighPassForm::Filter), 12, 6, 1e-8).unwrap();
        let modulated = parseval_check(&system(&f, k, &s, HighPassForm::Filter), 12, 6, 1e-8).unwrap();
        prop_assert!((plain.cond1_residual - modulated.cond1_residual).abs() <= 1e-10);
        prop_assert!((plain.cond2_residual - modulated.cond2_residual).abs() <= 1e-10);
    }

    #[test]
    fn cocycle_solutions(p in prop::sample::select(vec![2u8, 3, 5]), r in 1u32..3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mu = unimodular_table((p as usize).pow(r), &mut rng);
        mu[0] = Complex64::new(1.0, 0.0);
        let s = solve_v(p, r, &mu, 3).unwrap();
        prop_assert!(s.residual <= 1e-10);
        // μ recovered from v at every cell whose dilate is resolved
        let w = s.v.window();
        for idx in (0..w.len()).step_by(p as usize) {
            let b = w.dilate_index(idx).unwrap();
            let back = s.v.get(b) * s.v.get(idx).conj();
            prop_assert!((back - mu[w.table_index(idx, r)]).norm() <= 1e-10);
        }
    }
}

#[test]
fn conjugated_filters_break_parseval_for_complex_filters() {
    for seed in 0..5 {
        let f = random_filter(2, 2, seed).unwrap();
        let psi = system(&f, 3, &Modulators::identity(2), HighPassForm::ConjugateFilter);
        let report = parseval_check(&psi, 12, 6, 1e-8).unwrap();
        assert!(report.cond1_residual <= 1e-10);
        assert!(report.cond2_residual > 1e-3);
    }
    // real filters do not see the difference
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = |v: [f64; 4]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let f = GeneralizedFilter::new(2, 2, vec![t([1.0, 0.0, h, h]), t([0.0, 1.0, h, -h])]).unwrap();
    let psi = system(&f, 3, &Modulators::identity(2), HighPassForm::ConjugateFilter);
    assert!(parseval_check(&psi, 12, 6, 1e-8).unwrap().passed());
}

#[test]
fn modulation_index_must_be_divisible_by_p() {
    let f = random_filter(3, 2, 3).unwrap();
    let phi = build_pseudo_scaling(&f, 2).unwrap();
    let id = Modulators::identity(3);
    for (alpha, ok) in [(0, true), (3, true), (6, true), (1, false), (5, false)] {
        let psi = pfmw_build(&f, &phi, alpha, &id, HighPassForm::Filter).unwrap();
        assert_eq!(parseval_check(&psi, 12, 6, 1e-8).unwrap().passed(), ok, "alpha = {alpha}");
    }
    // the Haar system tolerates any modulation
    let haar = GeneralizedFilter::haar(3).unwrap();
    let phi = build_pseudo_scaling(&haar, 2).unwrap();
    let psi = pfmw_build(&haar, &phi, 1, &id, HighPassForm::Filter).unwrap();
    assert!(parseval_check(&psi, 12, 6, 1e-8).unwrap().passed());
}

#[test]
fn minus_sign_convention_breaks_parseval() {
    // the minus-sign condition holds here, the classical one does not
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = |v: [f64; 4]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let f = GeneralizedFilter::new(2, 2, vec![t([1.0, 0.0, h, h]), t([0.0, 1.0, h, h])]).unwrap();
    assert!(validate_filter(&f, FilterMode::Paper, 1e-12).passed());
    assert!(!validate_filter(&f, FilterMode::Classical, 1e-12).passed());
    let psi = system(&f, 3, &Modulators::identity(2), HighPassForm::Filter);
    let report = parseval_check(&psi, 12, 6, 1e-8).unwrap();
    assert!(report.cond1_residual <= 1e-10);
    assert!(report.cond2_residual > 0.1);
}

#[test]
fn wavelet_evaluation_matches_grid() {
    let f = random_filter(2, 3, 8).unwrap();
    let psi = system(&f, 3, &Modulators::identity(2), HighPassForm::Filter);
    let w: Window = psi.window();
    for idx in 0..w.len() {
        let xi = w.representative(idx, Side::Dual);
        assert_eq!(psi.eval(1, &xi), psi.spectra()[0].get(idx));
    }
}
