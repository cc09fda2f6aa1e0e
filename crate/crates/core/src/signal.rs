//! Frequency-domain symbols, time-domain signals and the (oversampled)
//! transforms between them.
//!
//! A symbol of `N` subcarriers is synthesized as
//! `s[n] = 1/sqrt(N) * sum_k S(k) exp(j 2 pi f(k) n / (L N))`, where `f(k)`
//! is the signed frequency of bin `k` (`k` for `k < N/2`, `k - N` otherwise).
//! Oversampling by `L` therefore zero-pads the spectrum at its center and
//! keeps the average sample power independent of `L`.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

/// One OFDM symbol in the frequency domain, `S(k)` for `k in 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqSymbols {
    values: Vec<Complex64>,
}

impl FreqSymbols {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("frequency symbols"));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![Complex64::ZERO; n.max(1)],
        }
    }

    pub fn n_subcarriers(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn energy(&self) -> f64 {
        energy(&self.values)
    }

    /// Element-wise product with a same-length factor vector.
    pub fn rotated(&self, factors: &[Complex64]) -> Result<Self> {
        if factors.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                actual: factors.len(),
            });
        }
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(factors)
                .map(|(s, b)| s * b)
                .collect(),
        })
    }
}

/// Time-domain samples of one symbol at `oversampling` times the Nyquist rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    samples: Vec<Complex64>,
    oversampling: usize,
}

impl TimeSignal {
    pub fn new(samples: Vec<Complex64>, oversampling: usize) -> Result<Self> {
        if oversampling == 0 {
            return Err(Error::InvalidOversampling(oversampling));
        }
        if samples.is_empty() || !samples.len().is_multiple_of(oversampling) {
            return Err(Error::LengthMismatch {
                len: samples.len(),
                oversampling,
            });
        }
        Ok(Self {
            samples,
            oversampling,
        })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.samples.len() / self.oversampling
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    /// Energy per Nyquist interval, `energy / L`. With the `1/sqrt(N)`
    /// synthesis this equals the energy of the generating spectrum at every
    /// oversampling factor.
    pub fn nyquist_energy(&self) -> f64 {
        self.energy() / self.oversampling as f64
    }

    pub fn mean_power(&self) -> f64 {
        self.energy() / self.samples.len() as f64
    }

    pub fn peak_amplitude(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * factor).collect(),
            oversampling: self.oversampling,
        }
    }

    /// Sample-wise sum of two signals with the same length and rate.
    pub fn add(&self, other: &TimeSignal) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            oversampling: self.oversampling,
        })
    }

    pub(crate) fn check_same_shape(&self, other: &TimeSignal) -> Result<()> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::DimensionMismatch {
                expected: self.samples.len(),
                actual: other.samples.len(),
            });
        }
        if self.oversampling != other.oversampling {
            return Err(Error::DimensionMismatch {
                expected: self.oversampling,
                actual: other.oversampling,
            });
        }
        Ok(())
    }
}

pub(crate) fn energy(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum()
}

/// Signed frequency of subcarrier `k` in an `n`-subcarrier symbol.
pub fn signed_frequency(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Position of subcarrier `k` within the `n * oversampling`-point spectrum.
pub fn bin_position(k: usize, n: usize, oversampling: usize) -> usize {
    if k < n / 2 {
        k
    } else {
        n * oversampling - (n - k)
    }
}

pub fn check_subcarrier_count(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidSubcarrierCount(n));
    }
    Ok(())
}

/// Oversampled inverse transform of one symbol.
pub fn idft(freq: &FreqSymbols, oversampling: usize) -> Result<TimeSignal> {
    let n = freq.n_subcarriers();
    check_subcarrier_count(n)?;
    if oversampling == 0 {
        return Err(Error::InvalidOversampling(oversampling));
    }
    let len = n
        .checked_mul(oversampling)
        .ok_or(Error::InvalidOversampling(oversampling))?;
    let half = n / 2;
    let mut buf = vec![Complex64::ZERO; len];
    buf[..half].copy_from_slice(&freq.values[..half]);
    buf[len - half..].copy_from_slice(&freq.values[half..]);
    fft_in_place(&mut buf, true);
    let scale = 1.0 / (n as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    Ok(TimeSignal {
        samples: buf,
        oversampling,
    })
}

/// Full `L N`-bin spectrum of a signal, scaled so that the occupied bins equal
/// the frequency symbols that produced it.
pub fn full_spectrum(signal: &TimeSignal) -> Vec<Complex64> {
    let n = signal.n_subcarriers();
    let mut buf = signal.samples.clone();
    fft_in_place(&mut buf, false);
    let scale = (n as f64).sqrt() / buf.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Inverse of [`full_spectrum`].
pub fn from_full_spectrum(
    mut spectrum: Vec<Complex64>,
    n_subcarriers: usize,
    oversampling: usize,
) -> Result<TimeSignal> {
    check_subcarrier_count(n_subcarriers)?;
    if oversampling == 0 {
        return Err(Error::InvalidOversampling(oversampling));
    }
    if spectrum.len() != n_subcarriers * oversampling {
        return Err(Error::DimensionMismatch {
            expected: n_subcarriers * oversampling,
            actual: spectrum.len(),
        });
    }
    fft_in_place(&mut spectrum, true);
    let scale = 1.0 / (n_subcarriers as f64).sqrt();
    for v in &mut spectrum {
        *v *= scale;
    }
    TimeSignal::new(spectrum, oversampling)
}

/// Forward transform: recovers the `N` occupied bins of a signal. Energy that
/// sits in out-of-band bins (after clipping, say) is discarded.
pub fn dft(signal: &TimeSignal) -> Result<FreqSymbols> {
    let n = signal.n_subcarriers();
    check_subcarrier_count(n)?;
    let spectrum = full_spectrum(signal);
    let l = signal.oversampling;
    let values = (0..n).map(|k| spectrum[bin_position(k, n, l)]).collect();
    Ok(FreqSymbols { values })
}
