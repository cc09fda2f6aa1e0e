mod common;

use common::*;
use papr_core::metrics::{papr_linear, to_db};
use papr_core::signal::{bin_position, full_spectrum};
use papr_core::{dft, idft, qpsk_demap, Complex64, FreqSymbols};
use proptest::prelude::*;

#[test]
fn fast_transform_matches_direct_synthesis() {
    let mut rng = rng(1);
    let mut n = 2;
    while n <= 64 {
        for l in [1, 2, 4] {
            for _ in 0..5 {
                let (_, freq) = random_qpsk(&mut rng, n);
                let fast = idft(&freq, l).unwrap();
                let direct = naive_idft(freq.values(), l);
                let err = max_abs_diff(fast.samples(), &direct);
                assert!(err < 1e-9, "N={n} L={l}: error {err}");
            }
        }
        n *= 2;
    }
}

#[test]
fn qpsk_n8_l4_against_direct_evaluation() {
    let (_, freq) = random_qpsk(&mut rng(8), 8);
    let fast = idft(&freq, 4).unwrap();
    assert_eq!(fast.len(), 32);
    assert!(max_abs_diff(fast.samples(), &naive_idft(freq.values(), 4)) < 1e-9);
}

#[test]
fn nyquist_round_trip_n64() {
    let (bits, freq) = random_qpsk(&mut rng(2), 64);
    let back = dft(&idft(&freq, 1).unwrap()).unwrap();
    assert!(max_abs_diff(back.values(), freq.values()) < 1e-9);
    assert_eq!(qpsk_demap(&back), bits);
}

#[test]
fn oversampled_round_trip_leaves_empty_bins_empty() {
    let (_, freq) = random_qpsk(&mut rng(3), 64);
    let signal = idft(&freq, 4).unwrap();
    let back = dft(&signal).unwrap();
    assert!(max_abs_diff(back.values(), freq.values()) < 1e-9);
    let spectrum = full_spectrum(&signal);
    let occupied: Vec<usize> = (0..64).map(|k| bin_position(k, 64, 4)).collect();
    for (pos, v) in spectrum.iter().enumerate() {
        if !occupied.contains(&pos) {
            assert!(v.norm() < 1e-9, "bin {pos} holds {v}");
        }
    }
}

#[test]
fn parseval_on_a_thousand_symbols() {
    let mut rng = rng(4);
    for i in 0..1000 {
        let (_, freq) = random_qpsk(&mut rng, 64);
        let l = [1, 2, 4][i % 3];
        let e_t = idft(&freq, l).unwrap().nyquist_energy();
        let e_f = freq.energy();
        assert!((e_t - e_f).abs() <= 1e-9 * e_f);
    }
}

#[test]
fn mean_papr_grows_with_oversampling() {
    let mut rng = rng(5);
    let (mut at1, mut at4) = (Vec::new(), Vec::new());
    for _ in 0..1000 {
        let (_, freq) = random_qpsk(&mut rng, 64);
        at1.push(to_db(papr_linear(&idft(&freq, 1).unwrap()).unwrap()));
        at4.push(to_db(papr_linear(&idft(&freq, 4).unwrap()).unwrap()));
    }
    assert!(mean(&at4) >= mean(&at1), "{} < {}", mean(&at4), mean(&at1));
}

fn arb_symbol() -> impl Strategy<Value = FreqSymbols> {
    (1u32..=6).prop_flat_map(|log_n| {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1usize << log_n).prop_map(|v| {
            FreqSymbols::new(
                v.into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect(),
            )
            .unwrap()
        })
    })
}

proptest! {
    #[test]
    fn energy_is_preserved(freq in arb_symbol(), l in prop::sample::select(vec![1usize, 2, 4])) {
        let e_f = freq.energy();
        let e_t = idft(&freq, l).unwrap().nyquist_energy();
        prop_assert!((e_t - e_f).abs() <= 1e-9 * e_f.max(1e-300));
    }

    #[test]
    fn dft_inverts_idft(freq in arb_symbol(), l in prop::sample::select(vec![1usize, 2, 4])) {
        let back = dft(&idft(&freq, l).unwrap()).unwrap();
        let scale = freq.energy().sqrt().max(1.0);
        prop_assert!(max_abs_diff(back.values(), freq.values()) <= 1e-9 * scale);
    }
}
