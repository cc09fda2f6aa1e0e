//! Peak-to-average power ratio and its complementary CDF.

use std::fmt;

use crate::error::{Error, Result};
use crate::signal::TimeSignal;

/// Which reduction technique produced a signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Technique {
    None,
    ClipFilter,
    Slm,
    Pts,
    ToneReservation,
    Sap,
    Ops,
}

impl Technique {
    pub fn as_str(self) -> &'static str {
        match self {
            Technique::None => "none",
            Technique::ClipFilter => "clipping",
            Technique::Slm => "slm",
            Technique::Pts => "pts",
            Technique::ToneReservation => "tr",
            Technique::Sap => "sap",
            Technique::Ops => "ops",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Technique-specific side information attached to a [`PaprReport`].
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Aux {
    #[default]
    None,
    Clipping {
        iterations: usize,
        /// Peak amplitude after each clip-and-filter pass.
        peak_per_iteration: Vec<f64>,
        /// Output mean power over input mean power.
        power_ratio: f64,
    },
    Slm {
        index: usize,
        candidates: usize,
    },
    Pts {
        /// Root-of-unity exponent per subblock; subblock 0 is always 0.
        factor_indices: Vec<usize>,
        candidates: usize,
    },
    ToneReservation {
        iterations: usize,
        correction_energy: f64,
        fell_back: bool,
    },
    Sap {
        scaled: Vec<usize>,
        energy_increase: f64,
    },
    Ops {
        index: usize,
        candidates: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaprReport {
    pub papr_linear: f64,
    pub papr_db: f64,
    pub technique: Technique,
    pub aux: Aux,
}

impl PaprReport {
    pub fn new(papr_linear: f64, technique: Technique, aux: Aux) -> Self {
        Self {
            papr_linear,
            papr_db: to_db(papr_linear),
            technique,
            aux,
        }
    }

    pub fn with(mut self, technique: Technique, aux: Aux) -> Self {
        self.technique = technique;
        self.aux = aux;
        self
    }
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Max sample power over mean sample power of one symbol.
pub fn papr_linear(signal: &TimeSignal) -> Result<f64> {
    let mut peak = 0.0f64;
    let mut sum = 0.0;
    for s in signal.samples() {
        let p = s.norm_sqr();
        peak = peak.max(p);
        sum += p;
    }
    if sum == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok(peak * signal.len() as f64 / sum)
}

pub fn papr(signal: &TimeSignal) -> Result<PaprReport> {
    Ok(PaprReport::new(
        papr_linear(signal)?,
        Technique::None,
        Aux::None,
    ))
}

/// Empirical exceedance probabilities over a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    pub thresholds_db: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub n_symbols: usize,
}

impl CcdfCurve {
    /// Rebuilds a curve from stored columns, checking its invariants.
    pub fn from_parts(
        thresholds_db: Vec<f64>,
        probabilities: Vec<f64>,
        n_symbols: usize,
    ) -> Result<Self> {
        if thresholds_db.is_empty() {
            return Err(Error::EmptyInput("threshold grid"));
        }
        if thresholds_db.len() != probabilities.len() {
            return Err(Error::DimensionMismatch {
                expected: thresholds_db.len(),
                actual: probabilities.len(),
            });
        }
        check_grid(&thresholds_db)?;
        if probabilities.iter().any(|p| !(0.0..=1.0).contains(p))
            || probabilities.windows(2).any(|w| w[1] > w[0])
        {
            return Err(Error::InvalidParameter {
                name: "probabilities",
                reason: "must lie in [0, 1] and be nonincreasing".into(),
            });
        }
        Ok(Self {
            thresholds_db,
            probabilities,
            n_symbols,
        })
    }

    pub fn is_monotone(&self) -> bool {
        self.probabilities.windows(2).all(|w| w[1] <= w[0])
            && self.probabilities.iter().all(|p| (0.0..=1.0).contains(p))
    }

    /// Threshold (dB) at which the curve falls to `probability`, by
    /// interpolation that is linear in `log10(probability)` between grid
    /// points. Returns `None` if the curve never brackets `probability`.
    pub fn papr_at_probability(&self, probability: f64) -> Option<f64> {
        let t = &self.thresholds_db;
        let p = &self.probabilities;
        if p[0] < probability || *p.last()? > probability {
            return None;
        }
        let i = p.iter().position(|&v| v <= probability)?;
        if p[i] == probability || i == 0 {
            return Some(t[i]);
        }
        let (p0, p1) = (p[i - 1], p[i]);
        let frac = if p1 > 0.0 {
            (probability.log10() - p0.log10()) / (p1.log10() - p0.log10())
        } else {
            (p0 - probability) / (p0 - p1)
        };
        Some(t[i - 1] + frac * (t[i] - t[i - 1]))
    }
}

fn check_grid(thresholds_db: &[f64]) -> Result<()> {
    if thresholds_db.iter().any(|t| !t.is_finite())
        || thresholds_db.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::NonIncreasingGrid);
    }
    Ok(())
}

/// Evenly spaced grid from `start_db` to `stop_db` inclusive.
pub fn threshold_grid(start_db: f64, stop_db: f64, step_db: f64) -> Result<Vec<f64>> {
    if !(step_db > 0.0) || !(stop_db > start_db) {
        return Err(Error::NonIncreasingGrid);
    }
    let count = ((stop_db - start_db) / step_db + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start_db + i as f64 * step_db).collect())
}

/// The default 4.0 to 13.0 dB grid in 0.1 dB steps.
pub fn default_grid() -> Vec<f64> {
    threshold_grid(4.0, 13.0, 0.1).expect("static grid")
}

/// Fraction of values strictly above each threshold.
pub fn ccdf_estimate(papr_db: &[f64], thresholds_db: &[f64]) -> Result<CcdfCurve> {
    if papr_db.is_empty() {
        return Err(Error::EmptyInput("PAPR values"));
    }
    if thresholds_db.is_empty() {
        return Err(Error::EmptyInput("threshold grid"));
    }
    check_grid(thresholds_db)?;
    let mut sorted = papr_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count = sorted.len() as f64;
    let probabilities = thresholds_db
        .iter()
        .map(|&t| {
            let at_or_below = sorted.partition_point(|&v| v <= t);
            (sorted.len() - at_or_below) as f64 / count
        })
        .collect();
    Ok(CcdfCurve {
        thresholds_db: thresholds_db.to_vec(),
        probabilities,
        n_symbols: papr_db.len(),
    })
}

/// Nyquist-rate closed form `1 - (1 - exp(-x))^N`, `x` the linear threshold.
pub fn ccdf_analytic(threshold_db: f64, n_subcarriers: usize) -> Result<f64> {
    if n_subcarriers < 2 {
        return Err(Error::InvalidSubcarrierCount(n_subcarriers));
    }
    let x = from_db(threshold_db);
    Ok(-(n_subcarriers as f64 * (-(-x).exp()).ln_1p()).exp_m1())
}

/// Inverse of [`ccdf_analytic`]: the threshold in dB exceeded with the given
/// probability.
pub fn analytic_threshold_db(probability: f64, n_subcarriers: usize) -> Result<f64> {
    if n_subcarriers < 2 {
        return Err(Error::InvalidSubcarrierCount(n_subcarriers));
    }
    if !(probability > 0.0 && probability < 1.0) {
        return Err(Error::InvalidParameter {
            name: "probability",
            reason: format!("{probability} is not in (0, 1)"),
        });
    }
    let tail = -((-probability).ln_1p() / n_subcarriers as f64).exp_m1();
    Ok(to_db(-tail.ln()))
}
