//! Selected mapping: rotate the symbol by each of `U` phase sequences and
//! transmit the candidate with the lowest PAPR.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::metrics::{papr_linear, Aux, PaprReport, Technique};
use crate::signal::{idft, FreqSymbols, TimeSignal};

/// Unit-modulus alphabet the phase sequences are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseAlphabet {
    /// `{+1, -1}`
    #[default]
    Binary,
    /// `(+-1 +- j)/sqrt2`
    Quaternary,
    /// `exp(j theta)`, `theta` uniform on `[0, 2 pi)`
    RandomPhase,
}

impl PhaseAlphabet {
    fn draw<R: Rng>(self, rng: &mut R) -> Complex64 {
        match self {
            PhaseAlphabet::Binary => {
                if rng.random() {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            }
            PhaseAlphabet::Quaternary => {
                let re = if rng.random() {
                    FRAC_1_SQRT_2
                } else {
                    -FRAC_1_SQRT_2
                };
                let im = if rng.random() {
                    FRAC_1_SQRT_2
                } else {
                    -FRAC_1_SQRT_2
                };
                Complex64::new(re, im)
            }
            PhaseAlphabet::RandomPhase => Complex64::from_polar(1.0, rng.random::<f64>() * TAU),
        }
    }
}

/// `U` phase sequences of length `N`. Row 0 is all ones, so the unmodified
/// symbol is always a candidate. Banks drawn from the same seed are nested:
/// the first `U` rows do not depend on how many rows were requested.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSequenceBank {
    sequences: Vec<Vec<Complex64>>,
    n_subcarriers: usize,
}

impl PhaseSequenceBank {
    pub fn u_count(&self) -> usize {
        self.sequences.len()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn sequence(&self, u: usize) -> Option<&[Complex64]> {
        self.sequences.get(u).map(Vec::as_slice)
    }

    pub fn sequences(&self) -> &[Vec<Complex64>] {
        &self.sequences
    }
}

pub fn generate_bank(
    u_count: usize,
    n_subcarriers: usize,
    alphabet: PhaseAlphabet,
    seed: u64,
) -> Result<PhaseSequenceBank> {
    if u_count < 1 {
        return Err(invalid(
            "u_count",
            "at least one phase sequence is required",
        ));
    }
    if n_subcarriers < 1 {
        return Err(Error::InvalidSubcarrierCount(n_subcarriers));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sequences = Vec::with_capacity(u_count);
    sequences.push(vec![Complex64::new(1.0, 0.0); n_subcarriers]);
    for _ in 1..u_count {
        sequences.push(
            (0..n_subcarriers)
                .map(|_| alphabet.draw(&mut rng))
                .collect(),
        );
    }
    Ok(PhaseSequenceBank {
        sequences,
        n_subcarriers,
    })
}

#[derive(Debug, Clone)]
pub struct SlmOutcome {
    pub signal: TimeSignal,
    pub index: usize,
    pub report: PaprReport,
}

/// Evaluates every candidate and keeps the lowest PAPR; ties go to the
/// smallest index.
pub fn slm_select(
    freq: &FreqSymbols,
    bank: &PhaseSequenceBank,
    oversampling: usize,
) -> Result<SlmOutcome> {
    if bank.n_subcarriers != freq.n_subcarriers() {
        return Err(Error::DimensionMismatch {
            expected: freq.n_subcarriers(),
            actual: bank.n_subcarriers,
        });
    }
    let mut best: Option<(TimeSignal, usize, f64)> = None;
    for (u, seq) in bank.sequences.iter().enumerate() {
        let candidate = idft(&freq.rotated(seq)?, oversampling)?;
        let value = papr_linear(&candidate)?;
        if best.as_ref().is_none_or(|(_, _, b)| value < *b) {
            best = Some((candidate, u, value));
        }
    }
    let (signal, index, value) = best.expect("bank has at least one sequence");
    Ok(SlmOutcome {
        signal,
        index,
        report: PaprReport::new(
            value,
            Technique::Slm,
            Aux::Slm {
                index,
                candidates: bank.u_count(),
            },
        ),
    })
}

/// Undoes the rotation of candidate `index`.
pub fn slm_recover(
    received: &FreqSymbols,
    bank: &PhaseSequenceBank,
    index: usize,
) -> Result<FreqSymbols> {
    let seq = bank.sequence(index).ok_or(Error::IndexOutOfRange {
        index,
        len: bank.u_count(),
    })?;
    let inverse: Vec<Complex64> = seq.iter().map(|b| b.conj()).collect();
    received.rotated(&inverse)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sequence_bank_is_all_ones() {
        let bank = generate_bank(1, 8, PhaseAlphabet::Binary, 3).unwrap();
        assert_eq!(bank.u_count(), 1);
        assert!(bank
            .sequence(0)
            .unwrap()
            .iter()
            .all(|b| *b == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn binary_entries() {
        let bank = generate_bank(5, 32, PhaseAlphabet::Binary, 9).unwrap();
        for seq in bank.sequences() {
            assert!(seq.iter().all(|b| b.im == 0.0 && b.re.abs() == 1.0));
        }
    }

    #[test]
    fn unit_modulus_for_every_alphabet() {
        for alphabet in [
            PhaseAlphabet::Binary,
            PhaseAlphabet::Quaternary,
            PhaseAlphabet::RandomPhase,
        ] {
            let bank = generate_bank(4, 16, alphabet, 1).unwrap();
            for seq in bank.sequences() {
                assert!(seq.iter().all(|b| (b.norm() - 1.0).abs() < 1e-15));
            }
        }
    }

    #[test]
    fn seeded_and_nested() {
        let a = generate_bank(8, 16, PhaseAlphabet::Quaternary, 42).unwrap();
        let b = generate_bank(8, 16, PhaseAlphabet::Quaternary, 42).unwrap();
        assert_eq!(a, b);
        let small = generate_bank(3, 16, PhaseAlphabet::Quaternary, 42).unwrap();
        assert_eq!(small.sequences(), &a.sequences()[..3]);
    }

    #[test]
    fn errors() {
        assert!(generate_bank(0, 8, PhaseAlphabet::Binary, 0).is_err());
        let bank = generate_bank(2, 8, PhaseAlphabet::Binary, 0).unwrap();
        let f = FreqSymbols::zeros(8);
        assert!(matches!(
            slm_recover(&f, &bank, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
        let f = FreqSymbols::new(vec![Complex64::new(1.0, 0.0); 16]).unwrap();
        assert!(slm_select(&f, &bank, 1).is_err());
    }
}
