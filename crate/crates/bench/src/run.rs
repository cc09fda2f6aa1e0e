//! Seeded Monte-Carlo runner.
//!
//! Symbol `i` draws its bits from a ChaCha8 generator seeded with the master
//! seed and switched to stream `i`, so its result depends on `(seed, i)` only.
//! Symbols are processed on a rayon pool and collected back in index order;
//! all reductions then run sequentially, which makes every output byte
//! independent of the worker count.

use std::time::{Duration, Instant};

use papr_core::clipping::{clip_and_filter, ClipConfig};
use papr_core::metrics::{ccdf_estimate, papr, CcdfCurve};
use papr_core::ops::{hadamard_set, ops_select, PilotGrid, PilotSequenceSet};
use papr_core::pts::{partition, pts_exhaustive, pts_iterative, Partition};
use papr_core::qpsk::random_bits;
use papr_core::sap::{sap_predistort, SapConfig};
use papr_core::slm::{generate_bank, slm_select, PhaseSequenceBank};
use papr_core::tr::{tr_iterative, ClipTarget, PeakNorm, ReservedToneSet, TrConfig};
use papr_core::{idft, qpsk_map, Aux, FreqSymbols, PaprReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, PtsSearch, TechniqueConfig};
use crate::error::{BenchError, Result};

/// Probabilities at which the summary reports interpolated PAPR.
pub const SUMMARY_PROBABILITIES: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Generator for symbol `index` of a run with `seed`.
pub fn symbol_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Per-run structures built once from the config.
#[derive(Debug, Clone)]
pub enum Prepared {
    None,
    Clipping(ClipConfig),
    Slm(PhaseSequenceBank),
    Pts {
        partition: Partition,
        w: usize,
        search: PtsSearch,
    },
    Tr {
        tones: ReservedToneSet,
        cfg: TrConfig,
    },
    Sap(SapConfig),
    Ops(PilotSequenceSet),
}

impl Prepared {
    pub fn build(cfg: &ExperimentConfig) -> papr_core::Result<Self> {
        let n = cfg.n_subcarriers;
        let l = cfg.oversampling;
        Ok(match &cfg.technique {
            TechniqueConfig::None => Prepared::None,
            TechniqueConfig::Clipping {
                clip_ratio_db,
                iterations,
            } => {
                let c = ClipConfig {
                    clip_ratio_db: *clip_ratio_db,
                    oversampling: l,
                    iterations: *iterations,
                };
                c.validate()?;
                Prepared::Clipping(c)
            }
            TechniqueConfig::Slm {
                u_count,
                alphabet,
                seed,
            } => Prepared::Slm(generate_bank(
                *u_count,
                n,
                *alphabet,
                seed.unwrap_or(cfg.seed),
            )?),
            TechniqueConfig::Pts {
                v_count,
                w,
                scheme,
                search,
                seed,
            } => {
                // factor alphabet is checked by the core constructor
                papr_core::pts::PhaseFactors::identity(*v_count, *w)?;
                Prepared::Pts {
                    partition: partition(n, *v_count, *scheme, seed.unwrap_or(cfg.seed))?,
                    w: *w,
                    search: *search,
                }
            }
            TechniqueConfig::Tr {
                r_count,
                placement,
                target_db,
                max_iters,
                cap,
                seed,
            } => {
                let tr = TrConfig {
                    oversampling: l,
                    target: ClipTarget::AboveRms { db: *target_db },
                    max_iters: *max_iters,
                    cap: *cap,
                    norm: PeakNorm::Envelope,
                };
                tr.validate()?;
                Prepared::Tr {
                    tones: ReservedToneSet::new(n, *r_count, *placement, seed.unwrap_or(cfg.seed))?,
                    cfg: tr,
                }
            }
            TechniqueConfig::Sap(c) => {
                c.validate(n)?;
                Prepared::Sap(*c)
            }
            TechniqueConfig::Ops { n_pilots, m_count } => {
                let grid = PilotGrid::equispaced(n, *n_pilots)?;
                Prepared::Ops(hadamard_set(n, &grid, *m_count)?)
            }
        })
    }

    /// The data symbol for one trial: `N` QPSK points, with reserved and
    /// pilot tones cleared for the techniques that use them.
    pub fn data_symbol(&self, rng: &mut ChaCha8Rng, n: usize) -> papr_core::Result<FreqSymbols> {
        let bits = random_bits(rng, 2 * n);
        let mut freq = qpsk_map(&bits)?;
        match self {
            Prepared::Tr { tones, .. } => tones.clear(&mut freq),
            Prepared::Ops(set) => set.grid().clear(&mut freq),
            _ => {}
        }
        Ok(freq)
    }

    pub fn apply(&self, freq: &FreqSymbols, oversampling: usize) -> papr_core::Result<PaprReport> {
        Ok(match self {
            Prepared::None => papr(&idft(freq, oversampling)?)?,
            Prepared::Clipping(c) => clip_and_filter(freq, c)?.report,
            Prepared::Slm(bank) => slm_select(freq, bank, oversampling)?.report,
            Prepared::Pts {
                partition,
                w,
                search,
            } => match search {
                PtsSearch::Exhaustive => pts_exhaustive(freq, partition, *w, oversampling)?.report,
                PtsSearch::Iterative => pts_iterative(freq, partition, *w, oversampling)?.report,
            },
            Prepared::Tr { tones, cfg } => tr_iterative(freq, tones, cfg)?.report,
            Prepared::Sap(c) => sap_predistort(freq, c, oversampling)?.report,
            Prepared::Ops(set) => ops_select(freq, set, oversampling)?.report,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mean_papr_db: f64,
    pub max_papr_db: f64,
    /// `(probability, PAPR in dB)`; `None` where the curve never falls to
    /// that probability inside the grid.
    pub papr_at: Vec<(f64, Option<f64>)>,
}

impl Summary {
    pub fn at(&self, probability: f64) -> Option<f64> {
        self.papr_at
            .iter()
            .find(|(p, _)| *p == probability)
            .and_then(|(_, v)| *v)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub curve: CcdfCurve,
    pub summary: Summary,
    /// Named per-technique means, e.g. `mean_candidates`.
    pub aggregates: Vec<(&'static str, f64)>,
    /// Per-symbol PAPR in dB, in symbol order.
    pub papr_db: Vec<f64>,
    pub wall_time: Duration,
}

/// Worker count from the `PAPR_BENCH_THREADS` variable if set, else
/// `requested`, else rayon's default.
pub fn resolve_workers(requested: Option<usize>) -> Option<usize> {
    std::env::var("PAPR_BENCH_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .or(requested)
}

pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<RunResult> {
    let start = Instant::now();
    let prepared = Prepared::build(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    let reports: Vec<PaprReport> = pool.install(|| {
        (0..cfg.n_symbols as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = symbol_rng(cfg.seed, i);
                let freq = prepared.data_symbol(&mut rng, cfg.n_subcarriers)?;
                prepared.apply(&freq, cfg.oversampling)
            })
            .collect::<papr_core::Result<Vec<_>>>()
    })?;

    let papr_db: Vec<f64> = reports.iter().map(|r| r.papr_db).collect();
    let curve = ccdf_estimate(&papr_db, &cfg.grid)?;
    let summary = Summary {
        mean_papr_db: papr_db.iter().sum::<f64>() / papr_db.len() as f64,
        max_papr_db: papr_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        papr_at: SUMMARY_PROBABILITIES
            .iter()
            .map(|&p| (p, curve.papr_at_probability(p)))
            .collect(),
    };
    Ok(RunResult {
        config: cfg.clone(),
        curve,
        summary,
        aggregates: aggregate(&reports),
        papr_db,
        wall_time: start.elapsed(),
    })
}

fn aggregate(reports: &[PaprReport]) -> Vec<(&'static str, f64)> {
    let count = reports.len() as f64;
    let mean = |f: &dyn Fn(&Aux) -> f64| reports.iter().map(|r| f(&r.aux)).sum::<f64>() / count;
    match reports.first().map(|r| &r.aux) {
        Some(Aux::Clipping { .. }) => vec![(
            "mean_power_ratio",
            mean(&|a| match a {
                Aux::Clipping { power_ratio, .. } => *power_ratio,
                _ => 0.0,
            }),
        )],
        Some(Aux::Slm { candidates, .. }) | Some(Aux::Ops { candidates, .. }) => vec![
            ("candidates", *candidates as f64),
            (
                "mean_selected_index",
                mean(&|a| match a {
                    Aux::Slm { index, .. } | Aux::Ops { index, .. } => *index as f64,
                    _ => 0.0,
                }),
            ),
        ],
        Some(Aux::Pts { candidates, .. }) => vec![
            ("candidates", *candidates as f64),
            (
                "identity_rate",
                mean(&|a| match a {
                    Aux::Pts { factor_indices, .. } => {
                        factor_indices.iter().all(|&i| i == 0) as u8 as f64
                    }
                    _ => 0.0,
                }),
            ),
        ],
        Some(Aux::ToneReservation { .. }) => vec![
            (
                "mean_iterations",
                mean(&|a| match a {
                    Aux::ToneReservation { iterations, .. } => *iterations as f64,
                    _ => 0.0,
                }),
            ),
            (
                "mean_correction_energy",
                mean(&|a| match a {
                    Aux::ToneReservation {
                        correction_energy, ..
                    } => *correction_energy,
                    _ => 0.0,
                }),
            ),
            (
                "fallback_rate",
                mean(&|a| match a {
                    Aux::ToneReservation { fell_back, .. } => *fell_back as u8 as f64,
                    _ => 0.0,
                }),
            ),
        ],
        Some(Aux::Sap { .. }) => vec![
            (
                "mean_scaled",
                mean(&|a| match a {
                    Aux::Sap { scaled, .. } => scaled.len() as f64,
                    _ => 0.0,
                }),
            ),
            (
                "mean_energy_increase",
                mean(&|a| match a {
                    Aux::Sap {
                        energy_increase, ..
                    } => *energy_increase,
                    _ => 0.0,
                }),
            ),
        ],
        _ => vec![],
    }
}
