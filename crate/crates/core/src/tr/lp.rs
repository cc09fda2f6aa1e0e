//! Exact tone-reservation reference for small symbols.
//!
//! Minimizes `max_n max(|Re s[n]|, |Im s[n]|)` over corrections supported on
//! the reserved tones. The box peak lower-bounds the envelope peak and is
//! within a factor `sqrt(2)` of it, and it keeps the problem linear in the
//! real and imaginary parts of the reserved-tone values.

use std::f64::consts::TAU;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use num_complex::Complex64;

use super::{Correction, ReservedToneSet};
use crate::error::{Error, Result};
use crate::signal::{check_subcarrier_count, idft, signed_frequency, FreqSymbols};

pub const MAX_LP_SUBCARRIERS: usize = 32;

/// Values below this magnitude in the solver output are treated as zero.
const CLEAN_EPS: f64 = 1e-12;

pub fn tr_lp_oracle(
    freq: &FreqSymbols,
    tones: &ReservedToneSet,
    oversampling: usize,
) -> Result<Correction> {
    let n = freq.n_subcarriers();
    if n > MAX_LP_SUBCARRIERS {
        return Err(Error::InstanceTooLarge {
            n,
            limit: MAX_LP_SUBCARRIERS,
        });
    }
    check_subcarrier_count(n)?;
    if tones.is_empty() {
        return Err(Error::EmptyInput("reserved tone set"));
    }
    tones.check_data(freq)?;
    let data = idft(freq, oversampling)?;
    let len = data.len();
    let norm = 1.0 / (n as f64).sqrt();

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let free = (f64::NEG_INFINITY, f64::INFINITY);
    let vars: Vec<_> = tones
        .indices()
        .iter()
        .map(|_| (problem.add_var(0.0, free), problem.add_var(0.0, free)))
        .collect();
    let peak = problem.add_var(1.0, (0.0, f64::INFINITY));

    for (t, x) in data.samples().iter().enumerate() {
        let basis: Vec<Complex64> = tones
            .indices()
            .iter()
            .map(|&k| {
                let phase = TAU * (signed_frequency(k, n) * t as i64) as f64 / len as f64;
                Complex64::from_polar(norm, phase)
            })
            .collect();
        // Re s = Re x + sum(a.re * c.re - a.im * c.im)
        // Im s = Im x + sum(a.im * c.re + a.re * c.im)
        let mut re_terms = Vec::with_capacity(2 * vars.len() + 1);
        let mut im_terms = Vec::with_capacity(2 * vars.len() + 1);
        for (a, &(cr, ci)) in basis.iter().zip(&vars) {
            re_terms.push((cr, a.re));
            re_terms.push((ci, -a.im));
            im_terms.push((cr, a.im));
            im_terms.push((ci, a.re));
        }
        for (terms, offset) in [(re_terms, x.re), (im_terms, x.im)] {
            let mut upper = terms.clone();
            upper.push((peak, -1.0));
            problem.add_constraint(upper.as_slice(), ComparisonOp::Le, -offset);
            let mut lower: Vec<_> = terms.iter().map(|&(v, c)| (v, -c)).collect();
            lower.push((peak, -1.0));
            problem.add_constraint(lower.as_slice(), ComparisonOp::Le, offset);
        }
    }

    let solution = problem
        .solve()
        .map_err(|e| Error::Solver(e.to_string()))?
        .into_solution()
        .map_err(|_| Error::Solver("solve interrupted".into()))?;

    let clean = |v: f64| if v.abs() < CLEAN_EPS { 0.0 } else { v };
    let mut freq_values = vec![Complex64::ZERO; n];
    for (&k, &(cr, ci)) in tones.indices().iter().zip(&vars) {
        freq_values[k] =
            Complex64::new(clean(solution.var_value(cr)), clean(solution.var_value(ci)));
    }
    Ok(Correction {
        freq_values,
        per_tone_cap: f64::INFINITY,
    })
}
