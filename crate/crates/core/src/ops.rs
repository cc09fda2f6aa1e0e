//! Orthogonal pilot sequences.
//!
//! The pilot subcarriers of each symbol carry one of `M` mutually orthogonal
//! Walsh-Hadamard sequences. The transmitter picks the sequence giving the
//! lowest PAPR; the receiver recovers the choice by correlating the pilot
//! tones against every sequence, so no side information is sent.
//!
//! Sequence indices are 0-based here (`m in 0..M`).

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::metrics::{papr_linear, Aux, PaprReport, Technique};
use crate::signal::{idft, FreqSymbols, TimeSignal};

/// Sorted pilot subcarrier positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PilotGrid {
    positions: Vec<usize>,
    n_subcarriers: usize,
}

impl PilotGrid {
    /// Comb pattern: every `N / N_p`-th subcarrier starting at 0.
    pub fn equispaced(n_subcarriers: usize, n_pilots: usize) -> Result<Self> {
        if n_pilots < 1 || n_pilots > n_subcarriers || !n_subcarriers.is_multiple_of(n_pilots) {
            return Err(invalid(
                "n_pilots",
                format!("{n_pilots} pilots do not tile {n_subcarriers} subcarriers"),
            ));
        }
        let spacing = n_subcarriers / n_pilots;
        Ok(Self {
            positions: (0..n_pilots).map(|i| i * spacing).collect(),
            n_subcarriers,
        })
    }

    pub fn from_positions(n_subcarriers: usize, mut positions: Vec<usize>) -> Result<Self> {
        positions.sort_unstable();
        positions.dedup();
        if positions.is_empty() {
            return Err(Error::EmptyInput("pilot positions"));
        }
        if let Some(&bad) = positions.iter().find(|&&k| k >= n_subcarriers) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: n_subcarriers,
            });
        }
        Ok(Self {
            positions,
            n_subcarriers,
        })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn n_pilots(&self) -> usize {
        self.positions.len()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    /// Zeroes the pilot positions of a symbol, leaving only data.
    pub fn clear(&self, freq: &mut FreqSymbols) {
        let values = freq.values_mut();
        for &k in &self.positions {
            if k < values.len() {
                values[k] = Complex64::ZERO;
            }
        }
    }

    fn check_data(&self, data: &FreqSymbols) -> Result<()> {
        if data.n_subcarriers() != self.n_subcarriers {
            return Err(Error::DimensionMismatch {
                expected: self.n_subcarriers,
                actual: data.n_subcarriers(),
            });
        }
        match self
            .positions
            .iter()
            .find(|&&k| data.values()[k] != Complex64::ZERO)
        {
            Some(&k) => Err(Error::OccupiedReservedTone(k)),
            None => Ok(()),
        }
    }
}

/// Sylvester construction of the order-`n` Hadamard matrix.
pub fn hadamard_matrix(order: usize) -> Result<Vec<Vec<i32>>> {
    if order == 0 || !order.is_power_of_two() {
        return Err(invalid(
            "n_pilots",
            format!("Hadamard order {order} is not a power of two"),
        ));
    }
    let mut h = vec![vec![1i32]];
    while h.len() < order {
        let size = h.len();
        let mut next = vec![vec![0i32; 2 * size]; 2 * size];
        for i in 0..size {
            for j in 0..size {
                let v = h[i][j];
                next[i][j] = v;
                next[i][j + size] = v;
                next[i + size][j] = v;
                next[i + size][j + size] = -v;
            }
        }
        h = next;
    }
    Ok(h)
}

/// `M` orthogonal pilot sequences placed on a [`PilotGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSequenceSet {
    rows: Vec<Vec<i32>>,
    grid: PilotGrid,
}

impl PilotSequenceSet {
    pub fn m_count(&self) -> usize {
        self.rows.len()
    }

    pub fn grid(&self) -> &PilotGrid {
        &self.grid
    }

    /// Pilot values of sequence `m` on the grid positions, in order.
    pub fn row(&self, m: usize) -> Option<&[i32]> {
        self.rows.get(m).map(Vec::as_slice)
    }

    /// Length-`N` frequency vector of sequence `m`, zero off the grid.
    pub fn sequence(&self, m: usize) -> Result<FreqSymbols> {
        let row = self.row(m).ok_or(Error::IndexOutOfRange {
            index: m,
            len: self.rows.len(),
        })?;
        let mut values = vec![Complex64::ZERO; self.grid.n_subcarriers];
        for (&k, &v) in self.grid.positions.iter().zip(row) {
            values[k] = Complex64::new(v as f64, 0.0);
        }
        FreqSymbols::new(values)
    }

    /// Integer Gram matrix of the length-`N` sequences.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|a| {
                self.rows
                    .iter()
                    .map(|b| a.iter().zip(b).map(|(&x, &y)| x as i64 * y as i64).sum())
                    .collect()
            })
            .collect()
    }

    /// `data` with sequence `m` written onto the pilot positions.
    pub fn insert(&self, data: &FreqSymbols, m: usize) -> Result<FreqSymbols> {
        self.grid.check_data(data)?;
        let pilots = self.sequence(m)?;
        FreqSymbols::new(
            data.values()
                .iter()
                .zip(pilots.values())
                .map(|(d, p)| d + p)
                .collect(),
        )
    }
}

/// First `M` rows of the order-`N_p` Walsh-Hadamard matrix, on `grid`.
pub fn hadamard_set(
    n_subcarriers: usize,
    grid: &PilotGrid,
    m_count: usize,
) -> Result<PilotSequenceSet> {
    if grid.n_subcarriers != n_subcarriers {
        return Err(Error::DimensionMismatch {
            expected: n_subcarriers,
            actual: grid.n_subcarriers,
        });
    }
    let n_p = grid.n_pilots();
    let h = hadamard_matrix(n_p)?;
    if m_count < 1 || m_count > n_p {
        return Err(invalid(
            "m_count",
            format!("need 1 <= M <= N_p = {n_p}, got {m_count}"),
        ));
    }
    Ok(PilotSequenceSet {
        rows: h.into_iter().take(m_count).collect(),
        grid: grid.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct OpsOutcome {
    pub signal: TimeSignal,
    pub index: usize,
    pub report: PaprReport,
}

/// Picks the pilot sequence minimizing PAPR; ties go to the smallest index.
/// The data waveform is synthesized once and each pilot waveform is added to
/// it.
pub fn ops_select(
    data: &FreqSymbols,
    pset: &PilotSequenceSet,
    oversampling: usize,
) -> Result<OpsOutcome> {
    pset.grid.check_data(data)?;
    let data_signal = idft(data, oversampling)?;
    let mut best: Option<(TimeSignal, usize, f64)> = None;
    for m in 0..pset.m_count() {
        let pilot_signal = idft(&pset.sequence(m)?, oversampling)?;
        let candidate = data_signal.add(&pilot_signal)?;
        let value = papr_linear(&candidate)?;
        if best.as_ref().is_none_or(|(_, _, b)| value < *b) {
            best = Some((candidate, m, value));
        }
    }
    let (signal, index, value) = best.expect("set has at least one sequence");
    Ok(OpsOutcome {
        signal,
        index,
        report: PaprReport::new(
            value,
            Technique::Ops,
            Aux::Ops {
                index,
                candidates: pset.m_count(),
            },
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetectionStatistic {
    /// `Re <r, P_m>`; matches real pilots on an unrotated channel.
    #[default]
    RealPart,
    /// `|<r, P_m>|`; insensitive to a common phase rotation.
    Magnitude,
}

pub fn ops_blind_detect(received: &FreqSymbols, pset: &PilotSequenceSet) -> usize {
    ops_blind_detect_with(received, pset, DetectionStatistic::RealPart)
}

/// Correlates the pilot tones of `received` with every sequence and returns
/// the best-matching index. Data tones are never read.
pub fn ops_blind_detect_with(
    received: &FreqSymbols,
    pset: &PilotSequenceSet,
    statistic: DetectionStatistic,
) -> usize {
    let values = received.values();
    let mut best = (0, f64::NEG_INFINITY);
    for (m, row) in pset.rows.iter().enumerate() {
        let corr: Complex64 = pset
            .grid
            .positions
            .iter()
            .zip(row)
            .map(|(&k, &p)| values.get(k).copied().unwrap_or_default() * p as f64)
            .sum();
        let score = match statistic {
            DetectionStatistic::RealPart => corr.re,
            DetectionStatistic::Magnitude => corr.norm(),
        };
        if score > best.1 {
            best = (m, score);
        }
    }
    best.0
}
