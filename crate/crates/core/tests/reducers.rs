mod common;

use std::path::Path;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use freqlim::freqgram::error_cost;
use freqlim::reducers::*;
use freqlim::{FrequencyBand, StateSpaceModel, StructureMask};

fn data(name: &str) -> StateSpaceModel {
    StateSpaceModel::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)).unwrap()
}

#[test]
fn example1_file_matches_series_build() {
    let file = data("example1.json");
    let built = two_mode_example();
    assert_eq!(file.a(), built.a());
    assert_eq!(file.b(), built.b());
    assert_eq!(file.c(), built.c());
    assert_eq!(file.d(), built.d());
    assert!(file.labels().is_some());
}

#[test]
fn unstable_gawronski_falls_back_to_balanced_truncation() {
    let g = data("unstable_gawronski.json");
    let band = FrequencyBand::up_to(0.5).unwrap();
    let gw = gawronski_reduce(&g, 1, &band).unwrap();
    assert!(!gw.is_hurwitz().unwrap().0);
    let (init, used) = choose_init(&g, 1, &band).unwrap();
    assert_eq!(used, Method::Hankel);
    assert_eq!(init, balanced_truncation(&g, 1).unwrap());
    let report = evaluate(&g, &gw, &band).unwrap();
    assert!(!report.stable && report.h2w_error.is_none());
}

#[test]
fn full_band_choose_init_matches_balanced_truncation() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let g = random_stable(&mut rng, 5, 1, 2, false);
    let (init, _) = choose_init(&g, 2, &FrequencyBand::full()).unwrap();
    let bt = balanced_truncation(&g, 2).unwrap();
    assert!(max_response_gap(&init, &bt, &log_grid(-2.0, 2.0, 100)) < 1e-8);
}

#[test]
fn exact_model_needs_no_iterations() {
    let g = two_mode_example();
    let band = FrequencyBand::up_to(1.7).unwrap();
    let out = h2w_optimize(&g, 4, &band, &StructureMask::full(4, 1, 1), &g, &OptimizerOptions::default()).unwrap();
    assert!(out.report.iterations <= 1);
    assert!(error_cost(&g, &out.model, &band, false).unwrap().abs() < 1e-10);
}

#[test]
fn unbounded_band_keeps_feedthrough_fixed() {
    let mut rng = ChaCha8Rng::seed_from_u64(92);
    let g = random_stable(&mut rng, 5, 1, 1, false);
    let band: FrequencyBand = "1:inf".parse().unwrap();
    let (init, _) = choose_init(&g, 2, &band).unwrap();
    let out = h2w_optimize(&g, 2, &band, &StructureMask::full(2, 1, 1), &init, &OptimizerOptions::default()).unwrap();
    assert_eq!(out.model.d(), g.d());
    assert!(out.report.stable);
}

fn orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_matrix(&mut rng, n, n).qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn optimizer_descends_and_stays_stable(seed in any::<u64>(), n in 3usize..8, free_d in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = 1 + (seed as usize) % (n - 1);
        let g = random_stable(&mut rng, n, 1, 2, free_d);
        let band = random_bounded_band(&mut rng);
        let (init, _) = choose_init(&g, r, &band).unwrap();
        let mask = if free_d { StructureMask::full(r, 1, 2) } else { StructureMask::without_feedthrough(r, 1, 2) };
        let opts = OptimizerOptions::default();
        let out = h2w_optimize(&g, r, &band, &mask, &init, &opts).unwrap();
        prop_assert!(out.trace.costs.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(out.model.is_hurwitz().unwrap().0);
        if out.trace.termination == Termination::GradientTolerance {
            prop_assert!(out.trace.gradient_norm <= opts.gradient_tolerance);
        }
        let before = error_cost(&g, &init, &band, false).unwrap();
        let after = error_cost(&g, &out.model, &band, false).unwrap();
        prop_assert!(after <= before * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn modified_gawronski_is_stable(seed in any::<u64>(), n in 2usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = 1 + (seed as usize) % (n - 1);
        let g = random_stable(&mut rng, n, 2, 1, false);
        let band = random_bounded_band(&mut rng);
        if let Ok(gr) = modified_gawronski_reduce(&g, r, &band) {
            prop_assert!(gr.is_hurwitz().unwrap().0);
        }
    }

    #[test]
    fn rotated_init_reaches_same_cost(seed in any::<u64>(), n in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_stable(&mut rng, n, 1, 1, false);
        let band = random_bounded_band(&mut rng);
        let init = balanced_truncation(&g, 2).unwrap();
        let rotated = init.transformed(&orthogonal(2, seed ^ 0x5eed)).unwrap();
        let mask = StructureMask::without_feedthrough(2, 1, 1);
        let opts = OptimizerOptions::default();
        let a = h2w_optimize(&g, 2, &band, &mask, &init, &opts).unwrap();
        let b = h2w_optimize(&g, 2, &band, &mask, &rotated, &opts).unwrap();
        let ca = error_cost(&g, &a.model, &band, false).unwrap();
        let cb = error_cost(&g, &b.model, &band, false).unwrap();
        prop_assert!((ca - cb).abs() <= 1e-6 * ca.max(cb), "{} vs {} ({:?}, {:?})", ca, cb, a.trace.termination, b.trace.termination);
    }

    #[test]
    fn full_band_gawronski_matches_balanced_truncation(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = 1 + (seed as usize) % (n - 1);
        let g = random_stable(&mut rng, n, 2, 2, false);
        let bt = balanced_truncation(&g, r);
        let gw = gawronski_reduce(&g, r, &FrequencyBand::full());
        if let (Ok(bt), Ok(gw)) = (bt, gw) {
            prop_assert!(max_response_gap(&bt, &gw, &log_grid(-2.0, 2.0, 100)) <= 1e-8);
        }
    }

    #[test]
    fn relative_error_uses_full_model_norm(seed in any::<u64>(), n in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_stable(&mut rng, n, 1, 1, true);
        let band = random_bounded_band(&mut rng);
        let gr = modified_gawronski_reduce(&g, 2, &band).unwrap();
        let report = evaluate(&g, &gr, &band).unwrap();
        let norm = freqlim::freqgram::h2w_norm_sq(&g, &band).unwrap().sqrt();
        let (e, rel) = (report.h2w_error.unwrap(), report.h2w_relative.unwrap());
        prop_assert!((rel - e / norm).abs() <= 1e-9 * rel.max(1e-300));
    }
}
