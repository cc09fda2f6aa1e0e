#![allow(dead_code)]

use std::f64::consts::TAU;

use papr_core::qpsk::random_bits;
use papr_core::signal::signed_frequency;
use papr_core::{qpsk_map, Complex64, FreqSymbols};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_qpsk(rng: &mut ChaCha8Rng, n: usize) -> (Vec<bool>, FreqSymbols) {
    let bits = random_bits(rng, 2 * n);
    let freq = qpsk_map(&bits).unwrap();
    (bits, freq)
}

/// Direct quadratic-time synthesis at rate `L N`.
pub fn naive_idft(values: &[Complex64], oversampling: usize) -> Vec<Complex64> {
    let n = values.len();
    let len = n * oversampling;
    let norm = 1.0 / (n as f64).sqrt();
    (0..len)
        .map(|t| {
            values
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    let f = signed_frequency(k, n) as f64;
                    s * Complex64::from_polar(norm, TAU * f * t as f64 / len as f64)
                })
                .sum()
        })
        .collect()
}

pub fn naive_papr(samples: &[Complex64]) -> f64 {
    let powers: Vec<f64> = samples.iter().map(|s| s.norm_sqr()).collect();
    let peak = powers.iter().cloned().fold(0.0, f64::max);
    peak / (powers.iter().sum::<f64>() / powers.len() as f64)
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Empirical upper quantile: the smallest value exceeded by at most
/// `probability` of the sample.
pub fn exceedance_level(values: &[f64], probability: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let idx = ((1.0 - probability) * v.len() as f64).ceil() as usize;
    v[idx.min(v.len() - 1)]
}
