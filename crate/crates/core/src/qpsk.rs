//! Gray-coded QPSK with unit average symbol energy.
//!
//! | bits | point          |
//! |------|----------------|
//! | 00   | ( 1 + j)/sqrt2 |
//! | 01   | ( 1 - j)/sqrt2 |
//! | 11   | (-1 - j)/sqrt2 |
//! | 10   | (-1 + j)/sqrt2 |
//!
//! The first bit selects the sign of the in-phase part, the second bit the
//! sign of the quadrature part, so neighbouring points differ in one bit.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::signal::FreqSymbols;

fn axis(bit: bool) -> f64 {
    if bit {
        -FRAC_1_SQRT_2
    } else {
        FRAC_1_SQRT_2
    }
}

pub fn map_pair(b0: bool, b1: bool) -> Complex64 {
    Complex64::new(axis(b0), axis(b1))
}

/// Maps `2N` bits onto `N` QPSK points.
pub fn qpsk_map(bits: &[bool]) -> Result<FreqSymbols> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    FreqSymbols::new(bits.chunks_exact(2).map(|p| map_pair(p[0], p[1])).collect())
}

/// Minimum-distance decision per quadrant. Any point in the correct quadrant
/// decodes to the same bits, whatever its magnitude.
pub fn qpsk_demap(symbols: &FreqSymbols) -> Vec<bool> {
    demap_values(symbols.values())
}

pub fn demap_values(values: &[Complex64]) -> Vec<bool> {
    values
        .iter()
        .flat_map(|s| [s.re < 0.0, s.im < 0.0])
        .collect()
}

pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<bool> {
    (0..count).map(|_| rng.random()).collect()
}
