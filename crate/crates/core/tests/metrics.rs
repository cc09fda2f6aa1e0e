mod common;

use common::*;
use papr_core::metrics::{
    analytic_threshold_db, ccdf_analytic, ccdf_estimate, default_grid, papr_linear, to_db,
};
use papr_core::{idft, papr, Complex64, TimeSignal};
use proptest::prelude::*;

fn arb_signal() -> impl Strategy<Value = TimeSignal> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..64).prop_filter_map("nonzero", |v| {
        let samples: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        if samples.iter().all(|s| s.norm() < 1e-6) {
            None
        } else {
            Some(TimeSignal::new(samples, 1).unwrap())
        }
    })
}

proptest! {
    #[test]
    fn papr_is_scale_and_rotation_invariant(
        s in arb_signal(),
        mag in 1e-3f64..1e3,
        phase in 0.0f64..std::f64::consts::TAU,
    ) {
        let a = papr_linear(&s).unwrap();
        let b = papr_linear(&s.scaled(Complex64::from_polar(mag, phase))).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn papr_at_least_one(s in arb_signal()) {
        let r = papr(&s).unwrap();
        prop_assert!(r.papr_linear >= 1.0 - 1e-12);
        prop_assert!((r.papr_db - to_db(r.papr_linear)).abs() <= 1e-12);
        prop_assert!((r.papr_linear - naive_papr(s.samples())).abs() <= 1e-12 * r.papr_linear);
    }

    #[test]
    fn ccdf_is_monotone(
        values in prop::collection::vec(-5.0f64..20.0, 1..200),
        start in 0.0f64..5.0,
        step in 0.01f64..1.0,
        count in 1usize..100,
    ) {
        let grid: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
        let c = ccdf_estimate(&values, &grid).unwrap();
        prop_assert!(c.is_monotone());
        for (t, p) in grid.iter().zip(&c.probabilities) {
            let brute = values.iter().filter(|&&v| v > *t).count() as f64 / values.len() as f64;
            prop_assert_eq!(*p, brute);
        }
    }

    #[test]
    fn interpolated_threshold_grows_as_probability_falls(
        values in prop::collection::vec(4.0f64..13.0, 20..200),
        p_hi in 0.05f64..0.5,
        ratio in 0.1f64..0.9,
    ) {
        let c = ccdf_estimate(&values, &default_grid()).unwrap();
        let p_lo = p_hi * ratio;
        if let (Some(a), Some(b)) = (c.papr_at_probability(p_hi), c.papr_at_probability(p_lo)) {
            prop_assert!(b >= a);
        }
    }
}

#[test]
fn constant_envelope_is_unit_papr() {
    let s = TimeSignal::new(
        (0..32)
            .map(|n| Complex64::from_polar(0.7, n as f64))
            .collect(),
        1,
    )
    .unwrap();
    assert!((papr_linear(&s).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn threshold_outside_the_data_range() {
    let c = ccdf_estimate(&[5.0, 7.0, 9.0], &[1.0, 6.0, 20.0]).unwrap();
    assert_eq!(c.probabilities[0], 1.0);
    assert!((c.probabilities[1] - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(c.probabilities[2], 0.0);
}

#[test]
fn analytic_curve_limits_and_inverse() {
    for n in [2, 64, 256, 1024] {
        assert!(ccdf_analytic(-100.0, n).unwrap() > 1.0 - 1e-12);
        assert!(ccdf_analytic(25.0, n).unwrap() < 1e-100);
        let mut last = 1.0;
        for t in default_grid() {
            let p = ccdf_analytic(t, n).unwrap();
            assert!(p <= last);
            last = p;
        }
        for p in [1e-1, 1e-2, 1e-3] {
            let t = analytic_threshold_db(p, n).unwrap();
            assert!((ccdf_analytic(t, n).unwrap() / p - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn nyquist_rate_empirical_curve_tracks_the_closed_form() {
    let n = 64;
    let mut rng = rng(21);
    let values: Vec<f64> = (0..4000)
        .map(|_| {
            let (_, freq) = random_qpsk(&mut rng, n);
            to_db(papr_linear(&idft(&freq, 1).unwrap()).unwrap())
        })
        .collect();
    let curve = ccdf_estimate(&values, &default_grid()).unwrap();
    let empirical = curve.papr_at_probability(1e-2).unwrap();
    let analytic = analytic_threshold_db(1e-2, n).unwrap();
    assert!(
        (empirical - analytic).abs() < 0.3,
        "empirical {empirical:.3} dB vs analytic {analytic:.3} dB"
    );
}
