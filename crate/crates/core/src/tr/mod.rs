//! Tone reservation.
//!
//! A set of subcarriers carries no data. The transmitter fills those tones
//! with a correction spectrum chosen to pull down the peaks of the data
//! signal; the receiver ignores them, so the data tones arrive untouched.
//!
//! [`tr_iterative`] is the production solver (iterative clipping followed by
//! projection onto the reserved tones). [`lp::tr_lp_oracle`] solves the
//! small-instance problem exactly as a linear program and serves as a
//! quality reference.

pub mod lp;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::metrics::{papr_linear, Aux, PaprReport, Technique};
use crate::signal::{check_subcarrier_count, dft, idft, FreqSymbols, TimeSignal};

pub use lp::{tr_lp_oracle, MAX_LP_SUBCARRIERS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TonePlacement {
    #[default]
    Equispaced,
    Random,
    /// A contiguous run at the band edge (around bin `N/2`).
    Edge,
}

/// Sorted subcarrier indices that carry no data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReservedToneSet {
    indices: Vec<usize>,
    n_subcarriers: usize,
    placement: TonePlacement,
}

impl ReservedToneSet {
    pub fn new(
        n_subcarriers: usize,
        r_count: usize,
        placement: TonePlacement,
        seed: u64,
    ) -> Result<Self> {
        if r_count < 1 || r_count >= n_subcarriers {
            return Err(invalid(
                "r_count",
                format!("need 1 <= R < N, got R = {r_count}, N = {n_subcarriers}"),
            ));
        }
        let indices = match placement {
            TonePlacement::Equispaced => {
                (0..r_count).map(|i| i * n_subcarriers / r_count).collect()
            }
            TonePlacement::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picked =
                    rand::seq::index::sample(&mut rng, n_subcarriers, r_count).into_vec();
                picked.sort_unstable();
                picked
            }
            TonePlacement::Edge => {
                let start = n_subcarriers / 2 - r_count / 2;
                (start..start + r_count).collect()
            }
        };
        Ok(Self {
            indices,
            n_subcarriers,
            placement,
        })
    }

    pub fn from_indices(n_subcarriers: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::EmptyInput("reserved tone set"));
        }
        if indices.len() >= n_subcarriers {
            return Err(invalid("r_count", "at least one data tone must remain"));
        }
        if let Some(&bad) = indices.iter().find(|&&k| k >= n_subcarriers) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: n_subcarriers,
            });
        }
        Ok(Self {
            indices,
            n_subcarriers,
            placement: TonePlacement::Equispaced,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn placement(&self) -> TonePlacement {
        self.placement
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices.binary_search(&k).is_ok()
    }

    /// Zeroes the reserved tones of a symbol.
    pub fn clear(&self, freq: &mut FreqSymbols) {
        let values = freq.values_mut();
        for &k in &self.indices {
            if k < values.len() {
                values[k] = Complex64::ZERO;
            }
        }
    }

    pub(crate) fn check_data(&self, freq: &FreqSymbols) -> Result<()> {
        if freq.n_subcarriers() != self.n_subcarriers {
            return Err(Error::DimensionMismatch {
                expected: self.n_subcarriers,
                actual: freq.n_subcarriers(),
            });
        }
        match self
            .indices
            .iter()
            .find(|&&k| freq.values()[k] != Complex64::ZERO)
        {
            Some(&k) => Err(Error::OccupiedReservedTone(k)),
            None => Ok(()),
        }
    }
}

/// Correction spectrum, zero on every data tone.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub freq_values: Vec<Complex64>,
    pub per_tone_cap: f64,
}

impl Correction {
    pub fn zero(n_subcarriers: usize, per_tone_cap: f64) -> Self {
        Self {
            freq_values: vec![Complex64::ZERO; n_subcarriers],
            per_tone_cap,
        }
    }

    pub fn energy(&self) -> f64 {
        self.freq_values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `data + correction`, the transmitted spectrum.
    pub fn apply(&self, data: &FreqSymbols) -> Result<FreqSymbols> {
        if data.n_subcarriers() != self.freq_values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.freq_values.len(),
                actual: data.n_subcarriers(),
            });
        }
        FreqSymbols::new(
            data.values()
                .iter()
                .zip(&self.freq_values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// How the clipping step measures a sample's size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeakNorm {
    /// `|s|`: the envelope the amplifier sees.
    #[default]
    Envelope,
    /// `max(|Re s|, |Im s|)`: the box surrogate minimized by the exact LP.
    Box,
}

impl PeakNorm {
    pub fn peak(self, samples: &[Complex64]) -> f64 {
        match self {
            PeakNorm::Envelope => samples.iter().map(|s| s.norm()).fold(0.0, f64::max),
            PeakNorm::Box => box_peak(samples),
        }
    }

    fn clip(self, s: Complex64, level: f64) -> Complex64 {
        match self {
            PeakNorm::Envelope => {
                let mag = s.norm();
                if mag <= level {
                    s
                } else {
                    s * (level / mag)
                }
            }
            PeakNorm::Box => Complex64::new(s.re.clamp(-level, level), s.im.clamp(-level, level)),
        }
    }
}

pub fn box_peak(samples: &[Complex64]) -> f64 {
    samples
        .iter()
        .map(|s| s.re.abs().max(s.im.abs()))
        .fold(0.0, f64::max)
}

/// Clip level used by each iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClipTarget {
    /// Fixed level, in dB above the RMS amplitude of the data signal; the
    /// iteration stops as soon as the peak is at or below it.
    AboveRms { db: f64 },
    /// Level set to `factor` times the current peak on every iteration, so
    /// the solver keeps descending until `max_iters`.
    TrackPeak { factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToneCap {
    /// Multiple of the mean data-tone amplitude.
    DataRelative(f64),
    Absolute(f64),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrConfig {
    pub oversampling: usize,
    pub target: ClipTarget,
    pub max_iters: usize,
    pub cap: ToneCap,
    pub norm: PeakNorm,
}

impl Default for TrConfig {
    fn default() -> Self {
        Self {
            oversampling: 4,
            target: ClipTarget::AboveRms { db: 6.0 },
            max_iters: 16,
            cap: ToneCap::DataRelative(2.0),
            norm: PeakNorm::Envelope,
        }
    }
}

impl TrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.oversampling == 0 {
            return Err(Error::InvalidOversampling(0));
        }
        if self.max_iters < 1 {
            return Err(invalid("max_iters", "must be at least 1"));
        }
        match self.target {
            ClipTarget::AboveRms { db } if !db.is_finite() => {
                return Err(invalid("target_db", "must be finite"))
            }
            ClipTarget::TrackPeak { factor } if !(factor > 0.0 && factor < 1.0) => {
                return Err(invalid("target", "peak-tracking factor must lie in (0, 1)"))
            }
            _ => {}
        }
        match self.cap {
            ToneCap::DataRelative(m) | ToneCap::Absolute(m) if !(m > 0.0) => {
                Err(invalid("cap", "must be positive"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrOutcome {
    pub signal: TimeSignal,
    pub correction: Correction,
    pub report: PaprReport,
    /// Correction updates performed before the best iterate was reached.
    pub iterations: usize,
    /// Smallest peak, in the configured norm, over every iterate including
    /// those rejected for raising the PAPR.
    pub lowest_peak: f64,
}

#[derive(Clone)]
struct Iterate {
    correction: Vec<Complex64>,
    signal: TimeSignal,
    papr: f64,
    peak: f64,
    iteration: usize,
}

/// Iterative clipping and projection onto the reserved tones.
///
/// Each iteration clips the current signal at the target level, transforms
/// the clipped-off residual back to the frequency domain, keeps only its
/// reserved-tone bins and subtracts them from the correction, clamping every
/// tone to the cap. The best iterate is returned: lowest PAPR for the
/// envelope norm, lowest box peak for the box norm, provided its
/// PAPR is no worse than the input's. If no iterate beats the input, the input is
/// returned with a zero correction.
pub fn tr_iterative(
    freq: &FreqSymbols,
    tones: &ReservedToneSet,
    cfg: &TrConfig,
) -> Result<TrOutcome> {
    cfg.validate()?;
    check_subcarrier_count(freq.n_subcarriers())?;
    if tones.is_empty() {
        return Err(Error::EmptyInput("reserved tone set"));
    }
    tones.check_data(freq)?;
    let n = freq.n_subcarriers();
    let l = cfg.oversampling;

    let data_signal = idft(freq, l)?;
    let initial_papr = papr_linear(&data_signal)?;
    let rms = data_signal.mean_power().sqrt();
    let cap = match cfg.cap {
        ToneCap::DataRelative(m) => {
            let data: Vec<f64> = (0..n)
                .filter(|&k| !tones.contains(k))
                .map(|k| freq.values()[k].norm())
                .collect();
            m * data.iter().sum::<f64>() / data.len() as f64
        }
        ToneCap::Absolute(a) => a,
        ToneCap::Unbounded => f64::INFINITY,
    };

    let mut correction = vec![Complex64::ZERO; n];
    let start = Iterate {
        correction: correction.clone(),
        signal: data_signal.clone(),
        papr: initial_papr,
        peak: cfg.norm.peak(data_signal.samples()),
        iteration: 0,
    };
    // `guarded` never exceeds the input PAPR; `lowest_peak` may, and is only
    // returned if it turns out not to.
    let mut guarded = start.clone();
    let mut lowest_peak = start;
    let mut iterations = 0;
    let mut signal = data_signal.clone();

    loop {
        let peak = cfg.norm.peak(signal.samples());
        let level = match cfg.target {
            ClipTarget::AboveRms { db } => rms * 10f64.powf(db / 20.0),
            ClipTarget::TrackPeak { factor } => factor * peak,
        };
        if iterations == cfg.max_iters || peak <= level {
            break;
        }
        let residual: Vec<Complex64> = signal
            .samples()
            .iter()
            .map(|&s| s - cfg.norm.clip(s, level))
            .collect();
        let residual_freq = dft(&TimeSignal::new(residual, l)?)?;
        for &k in tones.indices() {
            let mut c = correction[k] - residual_freq.values()[k];
            let mag = c.norm();
            if mag > cap {
                c *= cap / mag;
            }
            correction[k] = c;
        }
        iterations += 1;

        let correction_signal = idft(&FreqSymbols::new(correction.clone())?, l)?;
        signal = data_signal.add(&correction_signal)?;
        let value = papr_linear(&signal)?;
        let p = cfg.norm.peak(signal.samples());
        let improves_guarded = match cfg.norm {
            PeakNorm::Envelope => value < guarded.papr,
            PeakNorm::Box => value <= initial_papr && p < guarded.peak,
        };
        let improves_peak = cfg.norm == PeakNorm::Box && p < lowest_peak.peak;
        if improves_guarded || improves_peak {
            let current = Iterate {
                correction: correction.clone(),
                signal: signal.clone(),
                papr: value,
                peak: p,
                iteration: iterations,
            };
            if improves_peak {
                lowest_peak = current.clone();
            }
            if improves_guarded {
                guarded = current;
            }
        }
    }

    let reached = lowest_peak.peak.min(guarded.peak);
    let best = if lowest_peak.papr <= initial_papr && lowest_peak.peak < guarded.peak {
        lowest_peak
    } else {
        guarded
    };
    let (best_correction, best_signal, best_papr, best_iteration) =
        (best.correction, best.signal, best.papr, best.iteration);

    let fell_back = best_iteration == 0;
    let correction = Correction {
        freq_values: best_correction,
        per_tone_cap: cap,
    };
    let report = PaprReport::new(
        best_papr,
        Technique::ToneReservation,
        Aux::ToneReservation {
            iterations: best_iteration,
            correction_energy: correction.energy(),
            fell_back,
        },
    );
    Ok(TrOutcome {
        signal: best_signal,
        correction,
        report,
        iterations: best_iteration,
        lowest_peak: reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placements() {
        let eq = ReservedToneSet::new(16, 4, TonePlacement::Equispaced, 0).unwrap();
        assert_eq!(eq.indices(), &[0, 4, 8, 12]);
        let edge = ReservedToneSet::new(16, 4, TonePlacement::Edge, 0).unwrap();
        assert_eq!(edge.indices(), &[6, 7, 8, 9]);
        let a = ReservedToneSet::new(64, 8, TonePlacement::Random, 5).unwrap();
        let b = ReservedToneSet::new(64, 8, TonePlacement::Random, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        assert!(a.indices().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tone_count_bounds() {
        assert!(ReservedToneSet::new(16, 0, TonePlacement::Equispaced, 0).is_err());
        assert!(ReservedToneSet::new(16, 16, TonePlacement::Equispaced, 0).is_err());
        assert!(ReservedToneSet::from_indices(4, vec![]).is_err());
        assert!(ReservedToneSet::from_indices(4, vec![0, 1, 2, 3]).is_err());
        assert!(ReservedToneSet::from_indices(4, vec![7]).is_err());
    }

    #[test]
    fn rejects_data_on_reserved_tones() {
        let tones = ReservedToneSet::new(8, 2, TonePlacement::Equispaced, 0).unwrap();
        let freq = FreqSymbols::new(vec![Complex64::new(1.0, 0.0); 8]).unwrap();
        assert_eq!(
            tr_iterative(&freq, &tones, &TrConfig::default()).unwrap_err(),
            Error::OccupiedReservedTone(0)
        );
    }

    #[test]
    fn already_below_target_is_identity() {
        let tones = ReservedToneSet::new(8, 2, TonePlacement::Equispaced, 0).unwrap();
        let mut values = vec![Complex64::ZERO; 8];
        values[1] = Complex64::new(1.0, 0.0);
        let freq = FreqSymbols::new(values).unwrap();
        let out = tr_iterative(&freq, &tones, &TrConfig::default()).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out
            .correction
            .freq_values
            .iter()
            .all(|c| *c == Complex64::ZERO));
        assert_eq!(out.signal, idft(&freq, 4).unwrap());
    }

    #[test]
    fn config_validation() {
        assert!(TrConfig::default().validate().is_ok());
        let bad = TrConfig {
            max_iters: 0,
            ..TrConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrConfig {
            target: ClipTarget::TrackPeak { factor: 1.5 },
            ..TrConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrConfig {
            cap: ToneCap::Absolute(0.0),
            ..TrConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
