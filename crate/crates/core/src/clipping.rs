//! Envelope clipping, out-of-band filtering and iterative clipping-and-filtering.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::metrics::{papr_linear, Aux, PaprReport, Technique};
use crate::signal::{
    bin_position, dft, from_full_spectrum, full_spectrum, idft, FreqSymbols, TimeSignal,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipConfig {
    /// Clip level relative to the RMS amplitude of the unclipped symbol.
    pub clip_ratio_db: f64,
    pub oversampling: usize,
    pub iterations: usize,
}

impl Default for ClipConfig {
    fn default() -> Self {
        Self {
            clip_ratio_db: 5.0,
            oversampling: 4,
            iterations: 1,
        }
    }
}

impl ClipConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.clip_ratio_db.is_finite() {
            return Err(invalid("clip_ratio_db", "must be finite"));
        }
        if self.oversampling == 0 {
            return Err(Error::InvalidOversampling(0));
        }
        if self.iterations == 0 {
            return Err(invalid("iterations", "must be at least 1"));
        }
        Ok(())
    }

    /// Absolute clip level for a given signal.
    pub fn level_for(&self, signal: &TimeSignal) -> f64 {
        signal.mean_power().sqrt() * 10f64.powf(self.clip_ratio_db / 20.0)
    }
}

/// Limits every sample magnitude to `level`, keeping its phase.
pub fn clip(signal: &TimeSignal, level: f64) -> Result<TimeSignal> {
    if !(level > 0.0) || !level.is_finite() {
        return Err(invalid(
            "level",
            format!("clip level must be positive, got {level}"),
        ));
    }
    let samples = signal
        .samples()
        .iter()
        .map(|&s| clip_sample(s, level))
        .collect();
    TimeSignal::new(samples, signal.oversampling())
}

fn clip_sample(s: Complex64, level: f64) -> Complex64 {
    let mag = s.norm();
    if mag <= level {
        return s;
    }
    let mut out = s * (level / mag);
    // Rounding can leave |out| a hair above the level; nudge it under so a
    // second clip is exactly the identity.
    while out.norm() > level {
        out *= 1.0 - f64::EPSILON;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterStatus {
    Filtered,
    /// Nyquist-rate signal: there are no out-of-band bins to remove.
    NothingToFilter,
}

/// Zeroes every spectral bin outside the `N` occupied subcarriers.
pub fn filter_oob(signal: &TimeSignal) -> Result<(TimeSignal, FilterStatus)> {
    let l = signal.oversampling();
    if l == 1 {
        return Ok((signal.clone(), FilterStatus::NothingToFilter));
    }
    let n = signal.n_subcarriers();
    let spectrum = full_spectrum(signal);
    let mut kept = vec![Complex64::ZERO; spectrum.len()];
    for k in 0..n {
        let pos = bin_position(k, n, l);
        kept[pos] = spectrum[pos];
    }
    Ok((from_full_spectrum(kept, n, l)?, FilterStatus::Filtered))
}

/// Energy in the spectral bins outside the occupied subcarriers.
pub fn out_of_band_energy(signal: &TimeSignal) -> f64 {
    let n = signal.n_subcarriers();
    let l = signal.oversampling();
    let spectrum = full_spectrum(signal);
    let total: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum();
    let inband: f64 = (0..n)
        .map(|k| spectrum[bin_position(k, n, l)].norm_sqr())
        .sum();
    (total - inband).max(0.0)
}

/// RMS in-band error of `signal` against `reference`, relative to the RMS of
/// `reference`.
pub fn evm(reference: &FreqSymbols, signal: &TimeSignal) -> Result<f64> {
    let received = dft(signal)?;
    if received.n_subcarriers() != reference.n_subcarriers() {
        return Err(Error::DimensionMismatch {
            expected: reference.n_subcarriers(),
            actual: received.n_subcarriers(),
        });
    }
    let err: f64 = reference
        .values()
        .iter()
        .zip(received.values())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let reference_energy = reference.energy();
    if reference_energy == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok((err / reference_energy).sqrt())
}

#[derive(Debug, Clone)]
pub struct ClipOutcome {
    pub signal: TimeSignal,
    pub report: PaprReport,
    /// Clip level `A` used for every iteration.
    pub level: f64,
    pub peak_per_iteration: Vec<f64>,
}

/// Repeated clip at a fixed level followed by out-of-band filtering.
pub fn clip_and_filter(freq: &FreqSymbols, cfg: &ClipConfig) -> Result<ClipOutcome> {
    cfg.validate()?;
    let original = idft(freq, cfg.oversampling)?;
    let level = cfg.level_for(&original);
    let mut signal = original.clone();
    let mut peaks = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        let clipped = clip(&signal, level)?;
        signal = filter_oob(&clipped)?.0;
        peaks.push(signal.peak_amplitude());
    }
    let power_ratio = signal.mean_power() / original.mean_power();
    let report = PaprReport::new(
        papr_linear(&signal)?,
        Technique::ClipFilter,
        Aux::Clipping {
            iterations: cfg.iterations,
            peak_per_iteration: peaks.clone(),
            power_ratio,
        },
    );
    Ok(ClipOutcome {
        signal,
        report,
        level,
        peak_per_iteration: peaks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn clips_magnitude_and_keeps_phase() {
        let a = 1.5;
        let s = TimeSignal::new(vec![Complex64::from_polar(2.0 * a, PI / 3.0)], 1).unwrap();
        let out = clip(&s, a).unwrap();
        let expected = Complex64::from_polar(a, PI / 3.0);
        assert!((out.samples()[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn below_level_is_untouched() {
        let s = TimeSignal::new(vec![Complex64::new(0.1, -0.2); 4], 1).unwrap();
        assert_eq!(clip(&s, 1.0).unwrap(), s);
    }

    #[test]
    fn rejects_nonpositive_level() {
        let s = TimeSignal::new(vec![Complex64::new(1.0, 0.0); 4], 1).unwrap();
        assert!(clip(&s, 0.0).is_err());
        assert!(clip(&s, -1.0).is_err());
    }

    #[test]
    fn nyquist_rate_filter_is_a_noop() {
        let s = TimeSignal::new(vec![Complex64::new(1.0, 0.0); 4], 1).unwrap();
        let (out, status) = filter_oob(&s).unwrap();
        assert_eq!(status, FilterStatus::NothingToFilter);
        assert_eq!(out, s);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ClipConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.iterations = 0;
        assert!(cfg.validate().is_err());
        cfg = ClipConfig {
            oversampling: 0,
            ..ClipConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
