//! Metric-based simple amplitude predistortion.
//!
//! For every large output sample, each subcarrier's contribution is compared
//! in phase with the sample itself. Subcarriers whose contributions point
//! away from the peaks collect a positive metric; the `l_count` most
//! positive ones are scaled by `alpha > 1`. Scaling a contribution that
//! opposes a peak lowers that peak, and since only magnitudes change, every
//! point stays in its QPSK decision region.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::metrics::{papr_linear, Aux, PaprReport, Technique};
use crate::signal::{idft, signed_frequency, FreqSymbols, TimeSignal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SapConfig {
    pub alpha: f64,
    pub l_count: usize,
    /// Exponent `p` of the sample weighting `|s[n]|^p`.
    pub p_exponent: f64,
    /// Peak samples are those whose power exceeds the mean by this many dB.
    pub threshold_db: f64,
    /// At most this many of the largest peak samples enter the metric.
    pub k_cap: usize,
}

impl SapConfig {
    /// Defaults for an `n`-subcarrier symbol: `alpha = 1.55`, `l_count = N/16`,
    /// `p = 2`, threshold 6 dB, `K = 8`.
    pub fn for_subcarriers(n: usize) -> Self {
        Self {
            alpha: 1.55,
            l_count: (n / 16).max(1),
            p_exponent: 2.0,
            threshold_db: 6.0,
            k_cap: 8,
        }
    }

    pub fn validate(&self, n_subcarriers: usize) -> Result<()> {
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return Err(invalid(
                "alpha",
                format!("must exceed 1, got {}", self.alpha),
            ));
        }
        if self.l_count < 1 || self.l_count > n_subcarriers {
            return Err(invalid(
                "l_count",
                format!("must lie in 1..={n_subcarriers}, got {}", self.l_count),
            ));
        }
        if !self.p_exponent.is_finite() {
            return Err(invalid("p_exponent", "must be finite"));
        }
        if !self.threshold_db.is_finite() {
            return Err(invalid("threshold_db", "must be finite"));
        }
        if self.k_cap < 1 {
            return Err(invalid("k_cap", "must be at least 1"));
        }
        Ok(())
    }
}

/// Per-subcarrier metrics `mu_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricVector {
    pub mu: Vec<f64>,
}

impl MetricVector {
    /// Subcarrier indices by decreasing metric, ties by index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.mu.len()).collect();
        order.sort_by(|&a, &b| self.mu[b].total_cmp(&self.mu[a]).then(a.cmp(&b)));
        order
    }
}

/// Indices of the peak samples entering the metric, largest first.
pub fn peak_samples(signal: &TimeSignal, cfg: &SapConfig) -> Vec<usize> {
    let power: Vec<f64> = signal.samples().iter().map(|s| s.norm_sqr()).collect();
    let mean = power.iter().sum::<f64>() / power.len() as f64;
    let threshold = mean * 10f64.powf(cfg.threshold_db / 10.0);
    let mut peaks: Vec<usize> = (0..power.len()).filter(|&n| power[n] > threshold).collect();
    if peaks.is_empty() {
        let largest = (0..power.len())
            .max_by(|&a, &b| power[a].total_cmp(&power[b]).then(b.cmp(&a)))
            .unwrap_or(0);
        peaks.push(largest);
    }
    peaks.sort_by(|&a, &b| power[b].total_cmp(&power[a]).then(a.cmp(&b)));
    peaks.truncate(cfg.k_cap);
    peaks
}

/// Metric over an explicit set of peak samples.
pub fn metric_over(
    freq: &FreqSymbols,
    signal: &TimeSignal,
    peaks: &[usize],
    p: f64,
) -> Result<MetricVector> {
    let n = freq.n_subcarriers();
    if signal.n_subcarriers() != n || signal.len() != n * signal.oversampling() {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: signal.n_subcarriers(),
        });
    }
    let len = signal.len();
    let norm = 1.0 / (n as f64).sqrt();
    let mut mu = vec![0.0; n];
    for &t in peaks {
        let sample = *signal
            .samples()
            .get(t)
            .ok_or(Error::IndexOutOfRange { index: t, len })?;
        let sample_mag = sample.norm();
        if sample_mag == 0.0 {
            continue;
        }
        let weight = sample_mag.powf(p);
        for (k, (m, s)) in mu.iter_mut().zip(freq.values()).enumerate() {
            let phase = TAU * ((signed_frequency(k, n) * t as i64).rem_euclid(len as i64)) as f64
                / len as f64;
            let contribution = s * Complex64::from_polar(norm, phase);
            let c_mag = contribution.norm();
            if c_mag == 0.0 {
                continue;
            }
            let cos = (sample * contribution.conj()).re / (sample_mag * c_mag);
            *m -= weight * cos;
        }
    }
    Ok(MetricVector { mu })
}

/// `mu_k = sum_{n in T_K} |s[n]|^p * (-cos phi_nk)`.
pub fn sap_metric(
    freq: &FreqSymbols,
    signal: &TimeSignal,
    cfg: &SapConfig,
) -> Result<MetricVector> {
    metric_over(freq, signal, &peak_samples(signal, cfg), cfg.p_exponent)
}

#[derive(Debug, Clone)]
pub struct SapOutcome {
    pub signal: TimeSignal,
    pub freq: FreqSymbols,
    pub report: PaprReport,
    pub scaled: Vec<usize>,
    /// Symbol energy added by the predistortion.
    pub energy_increase: f64,
}

/// Scales the (up to) `l_count` subcarriers with the largest positive metric.
pub fn sap_predistort(
    freq: &FreqSymbols,
    cfg: &SapConfig,
    oversampling: usize,
) -> Result<SapOutcome> {
    cfg.validate(freq.n_subcarriers())?;
    let original = idft(freq, oversampling)?;
    let metric = sap_metric(freq, &original, cfg)?;
    let scaled: Vec<usize> = metric
        .ranking()
        .into_iter()
        .take_while(|&k| metric.mu[k] > 0.0)
        .take(cfg.l_count)
        .collect();
    if scaled.is_empty() {
        let report = PaprReport::new(
            papr_linear(&original)?,
            Technique::Sap,
            Aux::Sap {
                scaled: vec![],
                energy_increase: 0.0,
            },
        );
        return Ok(SapOutcome {
            signal: original,
            freq: freq.clone(),
            report,
            scaled,
            energy_increase: 0.0,
        });
    }
    let mut out = freq.clone();
    let mut energy_increase = 0.0;
    for &k in &scaled {
        let v = &mut out.values_mut()[k];
        energy_increase += (cfg.alpha * cfg.alpha - 1.0) * v.norm_sqr();
        *v *= cfg.alpha;
    }
    let signal = idft(&out, oversampling)?;
    let report = PaprReport::new(
        papr_linear(&signal)?,
        Technique::Sap,
        Aux::Sap {
            scaled: scaled.clone(),
            energy_increase,
        },
    );
    Ok(SapOutcome {
        signal,
        freq: out,
        report,
        scaled,
        energy_increase,
    })
}
