//! Partial transmit sequences.
//!
//! The subcarriers are split into `V` disjoint subblocks, each subblock is
//! transformed on its own, and the time-domain partial sequences are
//! recombined with per-subblock phase factors drawn from the `W`-th roots of
//! unity. Subblock 0 is the phase reference and always keeps factor 1.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::metrics::{papr_linear, Aux, PaprReport, Technique};
use crate::signal::{idft, FreqSymbols, TimeSignal};

pub const DEFAULT_MAX_SUBBLOCKS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionScheme {
    Adjacent,
    #[default]
    Interleaved,
    Pseudorandom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    scheme: PartitionScheme,
    v_count: usize,
}

impl Partition {
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn scheme(&self) -> PartitionScheme {
        self.scheme
    }

    pub fn v_count(&self) -> usize {
        self.v_count
    }

    pub fn n_subcarriers(&self) -> usize {
        self.assignment.len()
    }

    /// Copy of `freq` with every subcarrier outside subblock `v` zeroed.
    pub fn mask(&self, freq: &FreqSymbols, v: usize) -> Result<FreqSymbols> {
        self.check(freq)?;
        let values = freq
            .values()
            .iter()
            .zip(&self.assignment)
            .map(|(s, &b)| if b == v { *s } else { Complex64::ZERO })
            .collect();
        FreqSymbols::new(values)
    }

    fn check(&self, freq: &FreqSymbols) -> Result<()> {
        if freq.n_subcarriers() != self.assignment.len() {
            return Err(Error::DimensionMismatch {
                expected: self.assignment.len(),
                actual: freq.n_subcarriers(),
            });
        }
        Ok(())
    }
}

pub fn partition(
    n_subcarriers: usize,
    v_count: usize,
    scheme: PartitionScheme,
    seed: u64,
) -> Result<Partition> {
    if v_count < 1 {
        return Err(invalid("v_count", "at least one subblock is required"));
    }
    if v_count > n_subcarriers {
        return Err(invalid(
            "v_count",
            format!("{v_count} subblocks cannot cover {n_subcarriers} subcarriers"),
        ));
    }
    let structured = matches!(
        scheme,
        PartitionScheme::Adjacent | PartitionScheme::Interleaved
    );
    if structured && !n_subcarriers.is_multiple_of(v_count) {
        return Err(invalid(
            "v_count",
            format!("{v_count} does not divide {n_subcarriers}"),
        ));
    }
    let assignment = match scheme {
        PartitionScheme::Adjacent => {
            let width = n_subcarriers / v_count;
            (0..n_subcarriers).map(|k| k / width).collect()
        }
        PartitionScheme::Interleaved => (0..n_subcarriers).map(|k| k % v_count).collect(),
        PartitionScheme::Pseudorandom => pseudorandom(n_subcarriers, v_count, seed),
    };
    Ok(Partition {
        assignment,
        scheme,
        v_count,
    })
}

fn pseudorandom(n: usize, v: usize, seed: u64) -> Vec<usize> {
    const REDRAWS: usize = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REDRAWS {
        let draw: Vec<usize> = (0..n).map(|_| rng.random_range(0..v)).collect();
        let mut seen = vec![false; v];
        draw.iter().for_each(|&b| seen[b] = true);
        if seen.iter().all(|&s| s) {
            return draw;
        }
    }
    // Dense cases (V close to N) rarely cover every block by chance: seed one
    // subcarrier per block from a random permutation, draw the rest freely.
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut draw = vec![0; n];
    for (i, &k) in order.iter().enumerate() {
        draw[k] = if i < v { i } else { rng.random_range(0..v) };
    }
    draw
}

/// Per-subblock phase factors `exp(j 2 pi i_v / W)` with `i_0 = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseFactors {
    indices: Vec<usize>,
    alphabet_size: usize,
}

impl PhaseFactors {
    pub fn new(indices: Vec<usize>, alphabet_size: usize) -> Result<Self> {
        check_alphabet(alphabet_size)?;
        if indices.is_empty() {
            return Err(Error::EmptyInput("phase factors"));
        }
        if indices[0] != 0 {
            return Err(invalid(
                "phase factors",
                "reference subblock 0 must keep factor 1",
            ));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= alphabet_size) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: alphabet_size,
            });
        }
        Ok(Self {
            indices,
            alphabet_size,
        })
    }

    pub fn identity(v_count: usize, alphabet_size: usize) -> Result<Self> {
        Self::new(vec![0; v_count.max(1)], alphabet_size)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn factors(&self) -> Vec<Complex64> {
        self.indices
            .iter()
            .map(|&i| root_of_unity(i, self.alphabet_size))
            .collect()
    }

    /// Bits of side information the receiver needs for this factor vector.
    pub fn side_information_bits(&self) -> usize {
        (self.indices.len() - 1) * self.alphabet_size.trailing_zeros() as usize
    }
}

fn root_of_unity(i: usize, w: usize) -> Complex64 {
    // Exact values for quarter turns keep recovery bit-exact.
    if !(4 * i).is_multiple_of(w) {
        return Complex64::from_polar(1.0, TAU * i as f64 / w as f64);
    }
    match (4 * i / w) % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn check_alphabet(w: usize) -> Result<()> {
    if w != 2 && w != 4 {
        return Err(invalid("w_alphabet", format!("W must be 2 or 4, got {w}")));
    }
    Ok(())
}

/// Time-domain partial sequences, one per subblock.
pub fn partial_sequences(
    freq: &FreqSymbols,
    part: &Partition,
    oversampling: usize,
) -> Result<Vec<TimeSignal>> {
    (0..part.v_count)
        .map(|v| idft(&part.mask(freq, v)?, oversampling))
        .collect()
}

/// `sum_v b_v s_v`.
pub fn pts_combine(subsignals: &[TimeSignal], b: &PhaseFactors) -> Result<TimeSignal> {
    if subsignals.is_empty() {
        return Err(Error::EmptyInput("partial sequences"));
    }
    if subsignals.len() != b.indices.len() {
        return Err(Error::DimensionMismatch {
            expected: subsignals.len(),
            actual: b.indices.len(),
        });
    }
    let first = &subsignals[0];
    for s in &subsignals[1..] {
        first.check_same_shape(s)?;
    }
    let mut out = vec![Complex64::ZERO; first.len()];
    combine_into(subsignals, &b.factors(), &mut out);
    TimeSignal::new(out, first.oversampling())
}

fn combine_into(subsignals: &[TimeSignal], factors: &[Complex64], out: &mut [Complex64]) {
    out.iter_mut().for_each(|v| *v = Complex64::ZERO);
    for (s, b) in subsignals.iter().zip(factors) {
        for (o, x) in out.iter_mut().zip(s.samples()) {
            *o += b * x;
        }
    }
}

fn papr_of_samples(samples: &[Complex64]) -> f64 {
    let (peak, sum) = samples.iter().fold((0.0f64, 0.0), |(m, s), v| {
        let p = v.norm_sqr();
        (m.max(p), s + p)
    });
    if sum == 0.0 {
        f64::INFINITY
    } else {
        peak * samples.len() as f64 / sum
    }
}

#[derive(Debug, Clone)]
pub struct PtsOutcome {
    pub signal: TimeSignal,
    pub factors: PhaseFactors,
    pub report: PaprReport,
}

fn finish(
    subsignals: &[TimeSignal],
    factors: PhaseFactors,
    candidates: usize,
) -> Result<PtsOutcome> {
    let signal = pts_combine(subsignals, &factors)?;
    let report = PaprReport::new(
        papr_linear(&signal)?,
        Technique::Pts,
        Aux::Pts {
            factor_indices: factors.indices.clone(),
            candidates,
        },
    );
    Ok(PtsOutcome {
        signal,
        factors,
        report,
    })
}

pub fn pts_exhaustive(
    freq: &FreqSymbols,
    part: &Partition,
    alphabet_size: usize,
    oversampling: usize,
) -> Result<PtsOutcome> {
    pts_exhaustive_capped(
        freq,
        part,
        alphabet_size,
        oversampling,
        DEFAULT_MAX_SUBBLOCKS,
    )
}

/// Searches all `W^(V-1)` factor vectors in lexicographic order of their
/// index vectors; the first minimum found wins ties.
pub fn pts_exhaustive_capped(
    freq: &FreqSymbols,
    part: &Partition,
    alphabet_size: usize,
    oversampling: usize,
    max_subblocks: usize,
) -> Result<PtsOutcome> {
    check_alphabet(alphabet_size)?;
    let v = part.v_count;
    let size = (alphabet_size as u128).pow(v as u32 - 1);
    if v > max_subblocks {
        let cap = (alphabet_size as u128).pow(max_subblocks.max(1) as u32 - 1);
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    let subsignals = partial_sequences(freq, part, oversampling)?;
    let roots: Vec<Complex64> = (0..alphabet_size)
        .map(|i| root_of_unity(i, alphabet_size))
        .collect();
    let mut indices = vec![0usize; v];
    let mut best = indices.clone();
    let mut best_value = f64::INFINITY;
    let mut buf = vec![Complex64::ZERO; subsignals[0].len()];
    let mut factors = vec![Complex64::new(1.0, 0.0); v];
    loop {
        for (f, &i) in factors.iter_mut().zip(&indices) {
            *f = roots[i];
        }
        combine_into(&subsignals, &factors, &mut buf);
        let value = papr_of_samples(&buf);
        if value < best_value {
            best_value = value;
            best.copy_from_slice(&indices);
        }
        // odometer over positions 1..V, last position fastest
        let mut pos = v;
        loop {
            if pos <= 1 {
                return finish(
                    &subsignals,
                    PhaseFactors::new(best, alphabet_size)?,
                    size as usize,
                );
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < alphabet_size {
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// Greedy single pass: starting from all-ones, optimize one subblock factor
/// at a time while holding the others fixed.
pub fn pts_iterative(
    freq: &FreqSymbols,
    part: &Partition,
    alphabet_size: usize,
    oversampling: usize,
) -> Result<PtsOutcome> {
    check_alphabet(alphabet_size)?;
    let v = part.v_count;
    let subsignals = partial_sequences(freq, part, oversampling)?;
    let roots: Vec<Complex64> = (0..alphabet_size)
        .map(|i| root_of_unity(i, alphabet_size))
        .collect();
    let mut indices = vec![0usize; v];
    let mut factors = vec![Complex64::new(1.0, 0.0); v];
    let mut buf = vec![Complex64::ZERO; subsignals[0].len()];
    combine_into(&subsignals, &factors, &mut buf);
    let mut best_value = papr_of_samples(&buf);
    let mut evaluated = 1;
    for pos in 1..v {
        let keep = indices[pos];
        let mut chosen = keep;
        for (w, &root) in roots.iter().enumerate() {
            if w == keep {
                continue;
            }
            factors[pos] = root;
            combine_into(&subsignals, &factors, &mut buf);
            evaluated += 1;
            let value = papr_of_samples(&buf);
            if value < best_value {
                best_value = value;
                chosen = w;
            }
        }
        indices[pos] = chosen;
        factors[pos] = roots[chosen];
    }
    finish(
        &subsignals,
        PhaseFactors::new(indices, alphabet_size)?,
        evaluated,
    )
}

/// Removes the per-subblock rotation given the side information.
pub fn pts_recover(
    received: &FreqSymbols,
    part: &Partition,
    b: &PhaseFactors,
) -> Result<FreqSymbols> {
    part.check(received)?;
    if b.indices.len() != part.v_count {
        return Err(Error::DimensionMismatch {
            expected: part.v_count,
            actual: b.indices.len(),
        });
    }
    let factors = b.factors();
    let inverse: Vec<Complex64> = part.assignment.iter().map(|&v| factors[v].conj()).collect();
    received.rotated(&inverse)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_partitions() {
        let a = partition(8, 2, PartitionScheme::Adjacent, 0).unwrap();
        assert_eq!(a.assignment(), &[0, 0, 0, 0, 1, 1, 1, 1]);
        let i = partition(8, 2, PartitionScheme::Interleaved, 0).unwrap();
        assert_eq!(i.assignment(), &[0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn pseudorandom_is_seeded_and_covers_every_block() {
        for (n, v) in [(16, 4), (8, 8), (64, 32)] {
            let a = partition(n, v, PartitionScheme::Pseudorandom, 11).unwrap();
            let b = partition(n, v, PartitionScheme::Pseudorandom, 11).unwrap();
            assert_eq!(a, b);
            for block in 0..v {
                assert!(a.assignment().contains(&block), "block {block} empty");
            }
        }
    }

    #[test]
    fn partition_errors() {
        assert!(partition(8, 3, PartitionScheme::Adjacent, 0).is_err());
        assert!(partition(8, 3, PartitionScheme::Pseudorandom, 0).is_ok());
        assert!(partition(4, 5, PartitionScheme::Pseudorandom, 0).is_err());
        assert!(partition(4, 0, PartitionScheme::Interleaved, 0).is_err());
    }

    #[test]
    fn factor_validation() {
        assert!(PhaseFactors::new(vec![1, 0], 2).is_err());
        assert!(PhaseFactors::new(vec![0, 2], 2).is_err());
        assert!(PhaseFactors::new(vec![0, 1], 3).is_err());
        let b = PhaseFactors::new(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(
            b.factors(),
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0)
            ]
        );
        assert_eq!(b.side_information_bits(), 6);
    }

    #[test]
    fn search_cap_enforced() {
        let freq = FreqSymbols::new(vec![Complex64::new(1.0, 0.0); 16]).unwrap();
        let part = partition(16, 16, PartitionScheme::Interleaved, 0).unwrap();
        assert!(matches!(
            pts_exhaustive(&freq, &part, 2, 1),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }
}
