//! Property tests for the estimator's structural invariants.

use fracjac::{
    estimate_at, estimate_series, gamma, gen_binom, DiffOrder, JacobiParams, KernelCache, Mode,
    SampledSignal, WindowConfig,
};
use proptest::prelude::*;
use std::sync::Arc;

fn p00() -> JacobiParams {
    JacobiParams::new(0.0, 0.0).unwrap()
}

proptest! {
    // C(a, k) k! Gamma(a - k + 1) = Gamma(a + 1) wherever every factor is
    // finite.
    #[test]
    fn gen_binom_gamma_identity(a in -4.9f64..10.0, k in 0usize..9) {
        let off_pole = |x: f64| (x - x.round()).abs() > 1e-6 || x.round() > 0.0;
        prop_assume!(off_pole(a + 1.0) && off_pole(a - k as f64 + 1.0));
        let lhs = gen_binom(a, k)
            * gamma(k as f64 + 1.0).unwrap()
            * gamma(a - k as f64 + 1.0).unwrap();
        let rhs = gamma(a + 1.0).unwrap();
        prop_assert!(
            ((lhs - rhs) / rhs).abs() < 1e-10,
            "a = {a}, k = {k}: {lhs} vs {rhs}"
        );
    }

    // The estimator is a fixed linear functional of the signal.
    #[test]
    fn estimator_linearity(
        c1 in -3.0f64..3.0,
        c2 in -3.0f64..3.0,
        t in 0.05f64..1.0,
        alpha in 0.0f64..2.0,
    ) {
        let m = 240;
        let y1 = SampledSignal::sample(|x| (4.0 * x).sin(), 0.0, 1.5, m).unwrap();
        let y2 = SampledSignal::sample(|x| x * x - 0.7 * x, 0.0, 1.5, m).unwrap();
        let combo = SampledSignal::new(
            0.0,
            y1.period(),
            (0..=m).map(|i| c1 * y1.values()[i] + c2 * y2.values()[i]).collect(),
            None,
        )
        .unwrap();
        let cfg = WindowConfig::new(
            p00(),
            DiffOrder::new(alpha).unwrap(),
            5,
            0.0,
            1.5,
            t,
        )
        .unwrap();
        let lhs = estimate_at(&combo, &cfg).unwrap();
        let rhs = c1 * estimate_at(&y1, &cfg).unwrap() + c2 * estimate_at(&y2, &cfg).unwrap();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
    }

    // Doubling h with identical normalized samples scales the estimate by
    // 2^{-alpha}: the prefactor carries all the h dependence.
    #[test]
    fn h_scaling(alpha in 0.0f64..2.0, t in 0.05f64..1.0) {
        let values: Vec<f64> = (0..=160).map(|j| ((j as f64) / 23.0).cos()).collect();
        let s1 = SampledSignal::new(0.0, 1.0 / 160.0, values.clone(), None).unwrap();
        let s2 = SampledSignal::new(0.0, 2.0 / 160.0, values, None).unwrap();
        let order = DiffOrder::new(alpha).unwrap();
        let c1 = WindowConfig::new(p00(), order, 4, 0.0, 1.0, t).unwrap();
        let c2 = WindowConfig::new(p00(), order, 4, 0.0, 2.0, t).unwrap();
        let e1 = estimate_at(&s1, &c1).unwrap();
        let e2 = estimate_at(&s2, &c2).unwrap();
        let want = e1 * 2f64.powf(-order.alpha());
        prop_assert!((e2 - want).abs() <= 1e-13 * want.abs().max(1e-6), "{e2} vs {want}");
    }

    // Same inputs, same bits; different seed, different noise.
    #[test]
    fn noise_determinism(seed in 0u64..5000, c in 0.01f64..2.0) {
        let clean = SampledSignal::sample(|x| (5.0 * x).sin(), 0.0, 4.0, 64).unwrap();
        let a = clean.add_noise(c, seed);
        let b = clean.add_noise(c, seed);
        prop_assert_eq!(a.values(), b.values());
        let other = clean.add_noise(c, seed.wrapping_add(1));
        prop_assert_ne!(a.values(), other.values());
    }

    // SNR falls strictly as the noise amplitude grows (fixed draw).
    #[test]
    fn snr_monotone_in_c(seed in 0u64..1000, c in 0.02f64..1.0, factor in 1.1f64..4.0) {
        let clean = SampledSignal::sample(|x| (5.0 * x).sin(), 0.0, 4.0, 256).unwrap();
        let lo = clean.add_noise(c, seed).snr_db().unwrap();
        let hi = clean.add_noise(c * factor, seed).snr_db().unwrap();
        prop_assert!(hi < lo, "c = {c}, factor = {factor}: {hi} !< {lo}");
    }
}

// The cache hands out one table per key no matter how many threads race on
// it, and results do not depend on the schedule.
#[test]
fn kernel_cache_is_safe_under_concurrency() {
    let cache = Arc::new(KernelCache::new());
    let signal = Arc::new(SampledSignal::sample(|x| (3.0 * x).sin(), 0.0, 1.0, 120).unwrap());
    let order = DiffOrder::new(0.5).unwrap();
    let mut handles = Vec::new();
    for _ in 0..4 {
        let cache = Arc::clone(&cache);
        let signal = Arc::clone(&signal);
        handles.push(std::thread::spawn(move || {
            estimate_series(&cache, &signal, p00(), order, 6, Mode::Global)
                .unwrap()
                .values()
                .to_vec()
        }));
    }
    let results: Vec<Vec<f64>> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    for other in &results[1..] {
        assert_eq!(&results[0], other);
    }
    assert_eq!(cache.len(), 120);
}
