//! Log-log rate fitting and operator-norm decay measurements.
//!
//! Decay exponents are measured the same way everywhere: sample a quantity
//! along a geometric ladder of times or step counts, fit a line to
//! `log(value)` against `log(abscissa)` over a trailing window, and report
//! slope, intercept, and RMS residual. Frequency sweeps bound operator
//! norms of the full lattice operator exactly: the operator is unitarily
//! equivalent to a direct integral of `m x m` symbols `diag + w sub` over
//! `|w| = 1`, so a maximum over a uniform grid of roots of unity is a
//! certified lower bound and, by continuity, a tight estimate.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::characteristic::{CoupledSystem, TimeKind};
use crate::error::{Error, Result};
use crate::expm::matrix_exp;
use crate::lattice::LatticeState;
use crate::matrix::{matrix_pow, ComplexMatrix};
use crate::util::{map_indexed, unit_root};

/// Floor applied to values before taking logarithms, so that exactly zero
/// differences (fully converged data) fit as a flat line instead of
/// failing.
const LOG_FLOOR: f64 = 1e-300;

/// Result of a least-squares power-law fit in log-log coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    /// Fitted exponent: `value ~ C * abscissa^slope`.
    pub slope: f64,
    /// `log(C)` in natural log coordinates.
    pub intercept: f64,
    /// RMS deviation of `log(value)` from the fitted line.
    pub residual: f64,
    /// Abscissa range `(first, last)` actually used by the fit.
    pub window: (f64, f64),
}

/// Least-squares fit of `log y` against `log x` over the trailing
/// `window_fraction` of the samples (at least 5 points).
///
/// Requirements: at least 8 samples, strictly increasing positive
/// abscissae, positive values, abscissae spanning at least two decades,
/// and a trailing window spanning at least a factor of four. (A
/// half-dyadic ladder anchored at its horizon has a trailing half just
/// shy of a decade, so the window gate sits below that.)
pub fn rate_fit(samples: &[(f64, f64)], window_fraction: f64) -> Result<RateFit> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::ParameterOutOfRange("window fraction must lie in (0, 1]"));
    }
    if samples.len() < 8 {
        return Err(Error::DegenerateFit("need at least 8 samples"));
    }
    for pair in samples.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(Error::DegenerateFit("abscissae must be strictly increasing"));
        }
    }
    if samples.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0) || !y.is_finite()) {
        return Err(Error::DegenerateFit("samples must be positive and finite"));
    }
    let span = samples.last().unwrap().0 / samples[0].0;
    if span < 100.0 * (1.0 - 1e-12) {
        return Err(Error::DegenerateFit("abscissae must span two decades"));
    }
    let count = ((window_fraction * samples.len() as f64).ceil() as usize)
        .max(5)
        .min(samples.len());
    let tail = &samples[samples.len() - count..];
    let tail_span = tail.last().unwrap().0 / tail[0].0;
    if tail_span < 4.0 * (1.0 - 1e-12) {
        return Err(Error::DegenerateFit("fit window must span a factor of four"));
    }
    Ok(fit_loglog(tail))
}

/// Unchecked log-log least squares over all given samples. Values are
/// floored at [`LOG_FLOOR`]; callers guarantee at least two samples with
/// distinct abscissae.
pub(crate) fn fit_loglog(samples: &[(f64, f64)]) -> RateFit {
    let n = samples.len() as f64;
    let logs: Vec<(f64, f64)> =
        samples.iter().map(|&(x, y)| (x.ln(), y.max(LOG_FLOOR).ln())).collect();
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = logs
        .iter()
        .map(|&(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    RateFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        window: (samples[0].0, samples.last().unwrap().0),
    }
}

/// Splits the samples in half and refits; a genuine power law has nearly
/// equal slopes on both halves.
pub fn is_power_law(samples: &[(f64, f64)], slope_tol: f64) -> bool {
    if samples.len() < 6 {
        return false;
    }
    let mid = samples.len() / 2;
    let first = fit_loglog(&samples[..mid]);
    let second = fit_loglog(&samples[mid..]);
    (first.slope - second.slope).abs() <= slope_tol
}

/// Geometric ladder from `lo` to `hi` with ratio `sqrt 2`, rounded to
/// integers, deduplicated, with `hi` always included.
pub fn half_dyadic_ladder(lo: u64, hi: u64) -> Vec<u64> {
    assert!(lo >= 1 && hi >= lo);
    let mut out = Vec::new();
    let mut j = 0u32;
    loop {
        let v = (lo as f64) * 2f64.powf(j as f64 / 2.0);
        let n = v.round() as u64;
        if n >= hi {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
        j += 1;
    }
    out.push(hi);
    out
}

/// Powers-of-two ladder `2^j` for `j` in `[lo_exp, log2(hi)]`.
pub fn dyadic_ladder(lo_exp: u32, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = 1u64 << lo_exp;
    while n <= hi {
        out.push(n);
        if n > hi / 2 {
            break;
        }
        n *= 2;
    }
    out
}

pub(crate) fn check_frequencies(n_freq: usize) -> Result<()> {
    if n_freq < 2 || !n_freq.is_power_of_two() {
        return Err(Error::ParameterOutOfRange("frequency count must be a power of two >= 2"));
    }
    Ok(())
}

/// Decay exponent of `||T^n (I - T)||` for a discrete system, measured
/// over a half-dyadic ladder in `[n_max / 100, n_max]` through the symbol
/// family `S(w) = diag + w sub`: the reported value at each `n` is
/// `max_w ||S(w)^n (I - S(w))||_2` over `n_freq` roots of unity.
pub fn operator_rate_discrete(
    system: &CoupledSystem,
    n_freq: usize,
    n_max: u64,
) -> Result<RateFit> {
    let samples = operator_decay_samples_discrete(system, n_freq, n_max)?;
    rate_fit(&samples, 0.5)
}

/// The ladder samples behind [`operator_rate_discrete`].
pub fn operator_decay_samples_discrete(
    system: &CoupledSystem,
    n_freq: usize,
    n_max: u64,
) -> Result<Vec<(f64, f64)>> {
    if system.kind() != TimeKind::Discrete {
        return Err(Error::InvalidInput("discrete decay needs a discrete system"));
    }
    check_frequencies(n_freq)?;
    if n_max < 100 {
        return Err(Error::ParameterOutOfRange("need n_max >= 100"));
    }
    let ladder = half_dyadic_ladder(n_max / 100, n_max);
    let per_freq: Vec<Vec<f64>> = map_indexed(n_freq, |j| {
        let s = symbol(system, j, n_freq);
        let defect = ComplexMatrix::identity(s.dim()).sub(&s);
        ladder
            .iter()
            .map(|&n| matrix_pow(&s, n).mul(&defect).op_norm2())
            .collect()
    });
    Ok(combine_max(&ladder, per_freq))
}

/// Decay exponent of `||A e^{tA}||` for a continuous system, measured over
/// a half-dyadic ladder in `[t_max / 100, t_max]` through the symbol
/// family `A(w) = diag + w sub`.
pub fn operator_rate_continuous(
    system: &CoupledSystem,
    n_freq: usize,
    t_max: f64,
) -> Result<RateFit> {
    let samples = operator_decay_samples_continuous(system, n_freq, t_max)?;
    rate_fit(&samples, 0.5)
}

/// The ladder samples behind [`operator_rate_continuous`].
pub fn operator_decay_samples_continuous(
    system: &CoupledSystem,
    n_freq: usize,
    t_max: f64,
) -> Result<Vec<(f64, f64)>> {
    if system.kind() != TimeKind::Continuous {
        return Err(Error::InvalidInput("continuous decay needs a continuous system"));
    }
    check_frequencies(n_freq)?;
    if !(t_max >= 100.0 && t_max.is_finite()) {
        return Err(Error::ParameterOutOfRange("need t_max >= 100"));
    }
    let ladder_int = half_dyadic_ladder((t_max / 100.0).round() as u64, t_max.round() as u64);
    let ladder: Vec<f64> = ladder_int.iter().map(|&n| n as f64).collect();
    let per_freq: Vec<Result<Vec<f64>>> = map_indexed(n_freq, |j| {
        let a = symbol(system, j, n_freq);
        ladder
            .iter()
            .map(|&t| Ok(a.mul(&matrix_exp(&a, t)?).op_norm2()))
            .collect()
    });
    let mut values = alloc::vec![0.0f64; ladder.len()];
    for row in per_freq {
        for (acc, v) in values.iter_mut().zip(row?) {
            *acc = acc.max(v);
        }
    }
    Ok(ladder.into_iter().zip(values).collect())
}

/// Decay of consecutive differences `||x(n+1) - x(n)||` along a dyadic
/// ladder up to `n_max`, fitted over its trailing half.
pub fn difference_rate(
    system: &CoupledSystem,
    state: &LatticeState,
    n_max: u64,
) -> Result<RateFit> {
    let samples = difference_samples(system, state, n_max)?;
    rate_fit(&samples, 0.5)
}

/// The ladder samples behind [`difference_rate`]: `(n, ||x(n+1) - x(n)||)`
/// for dyadic `n` from 4 to `n_max`.
pub fn difference_samples(
    system: &CoupledSystem,
    state: &LatticeState,
    n_max: u64,
) -> Result<Vec<(f64, f64)>> {
    if n_max < 4 {
        return Err(Error::ParameterOutOfRange("need n_max >= 4"));
    }
    let ladder = dyadic_ladder(2, n_max);
    let mut samples = Vec::with_capacity(ladder.len());
    let mut cur = state.clone();
    let mut n = 0u64;
    for &target in &ladder {
        while n < target {
            cur = cur.step(system)?;
            n += 1;
        }
        let next = cur.step(system)?;
        let diff = next.difference(&cur)?;
        samples.push((target as f64, diff.lp_norm()));
    }
    Ok(samples)
}

/// Decay of `||x(n) - z||` against a candidate constant limit profile,
/// along a dyadic ladder up to `n_max`, fitted over its trailing half.
pub fn state_error_rate(
    system: &CoupledSystem,
    state: &LatticeState,
    limit_entry: &[num_complex::Complex64],
    n_max: u64,
) -> Result<RateFit> {
    let samples = state_error_samples(system, state, limit_entry, n_max)?;
    rate_fit(&samples, 0.5)
}

/// The ladder samples behind [`state_error_rate`].
pub fn state_error_samples(
    system: &CoupledSystem,
    state: &LatticeState,
    limit_entry: &[num_complex::Complex64],
    n_max: u64,
) -> Result<Vec<(f64, f64)>> {
    if n_max < 4 {
        return Err(Error::ParameterOutOfRange("need n_max >= 4"));
    }
    if limit_entry.len() != state.block_dim() {
        return Err(Error::InvalidInput("limit profile has wrong block dimension"));
    }
    let target_state = if limit_entry.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
        LatticeState::zero(state.block_dim(), state.norm_p())
    } else {
        LatticeState::constant(limit_entry.to_vec())?
    };
    let ladder = dyadic_ladder(2, n_max);
    let mut samples = Vec::with_capacity(ladder.len());
    let mut cur = state.clone();
    let mut n = 0u64;
    for &target in &ladder {
        while n < target {
            cur = cur.step(system)?;
            n += 1;
        }
        samples.push((target as f64, cur.difference(&target_state)?.lp_norm()));
    }
    Ok(samples)
}

pub(crate) fn symbol(system: &CoupledSystem, j: usize, n_freq: usize) -> ComplexMatrix {
    system.diag().add(&system.sub().scale(unit_root(j, n_freq)))
}

fn combine_max(ladder: &[u64], per_freq: Vec<Vec<f64>>) -> Vec<(f64, f64)> {
    let mut values = alloc::vec![0.0f64; ladder.len()];
    for row in per_freq {
        for (acc, v) in values.iter_mut().zip(row) {
            *acc = acc.max(v);
        }
    }
    ladder.iter().map(|&n| n as f64).zip(values).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        // y = 3 x^{-1/2} over two decades.
        let samples: Vec<(f64, f64)> =
            (0..20).map(|j| {
                let x = 10.0 * 1.5f64.powi(j);
                (x, 3.0 * x.powf(-0.5))
            }).collect();
        let fit = rate_fit(&samples, 0.5).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-10);
        assert!(fit.residual < 1e-12);
        assert!(is_power_law(&samples, 0.1));
    }

    #[test]
    fn short_or_flat_ladders_are_rejected()  {
        let short: Vec<(f64, f64)> = (0..5).map(|j| (j as f64 + 1.0, 1.0)).collect();
        assert!(matches!(rate_fit(&short, 1.0), Err(Error::DegenerateFit(_))));
        let narrow: Vec<(f64, f64)> =
            (0..10).map(|j| (10.0 + j as f64, 1.0)).collect();
        assert!(matches!(rate_fit(&narrow, 1.0), Err(Error::DegenerateFit(_))));
        let negative: Vec<(f64, f64)> =
            (0..10).map(|j| (2f64.powi(j), -1.0)).collect();
        assert!(matches!(rate_fit(&negative, 1.0), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn geometric_decay_is_flagged_as_non_power_law() {
        let samples: Vec<(f64, f64)> =
            (0..16).map(|j| {
                let x = 2f64.powi(j);
                (x, (-0.01 * x).exp())
            }).collect();
        assert!(!is_power_law(&samples, 0.5));
    }

    #[test]
    fn ladders_have_expected_shape() {
        let l = half_dyadic_ladder(100, 10_000);
        assert_eq!(l.first(), Some(&100));
        assert_eq!(l.last(), Some(&10_000));
        assert!(l.len() >= 13);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
        let d = dyadic_ladder(2, 64);
        assert_eq!(d, alloc::vec![4, 8, 16, 32, 64]);
    }
}
