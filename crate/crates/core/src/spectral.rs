//! Spectral picture of a coupled system: spectrum sampling, resolvent
//! norm bounds, the tangency exponent that governs polynomial decay, and
//! explicit generalized eigen-sequences.
//!
//! Everything is driven by the characteristic function `phi`: the
//! spectrum of the two-banded block operator is carried by the level set
//! `|phi(lambda)| = 1` together with the symbol eigenvalue curves, the
//! resolvent norm blows up like `1 / (1 - |phi|)` as the level set is
//! approached, and the order of tangency of `|phi|` to 1 along the
//! unimodular boundary sets the algebraic decay rate of the dynamics.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::characteristic::{CoupledSystem, TimeKind};
use crate::error::{Error, Result};
use crate::lattice::{LatticeState, NormP, TailKind, DEFAULT_WINDOW_CAP};
use crate::matrix::{resolvent, ComplexMatrix};
use crate::rates::{check_frequencies, rate_fit, symbol, RateFit};
use crate::util::{map_indexed, unit_root};

/// Level-set membership tolerance for eigen-sequence construction.
const EIGEN_LEVEL_TOL: f64 = 1e-9;

/// Validation tolerance for level-set points returned by the polynomial
/// solve inside [`spectrum_curve`].
const CURVE_LEVEL_TOL: f64 = 1e-8;

/// How a spectrum sample was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleSource {
    /// Solution of `phi(lambda) = e^{i theta}`.
    PhiLevelSet,
    /// Eigenvalue of the symbol `diag + e^{i theta} sub`.
    SymbolEigenvalue,
}

/// One point of the spectrum sampling.
#[derive(Clone, Copy, Debug)]
pub struct SpectrumSample {
    /// Angle parameter in `[0, 2 pi)`.
    pub theta: f64,
    /// The sampled spectrum point.
    pub lambda: Complex64,
    pub source: SampleSource,
}

/// Samples the spectrum of the block operator over a uniform grid of
/// angles: for each angle both the eigenvalues of the symbol and the
/// solutions of `phi(lambda) = e^{i theta}` are collected. Level-set
/// solutions are validated against `phi` before being accepted.
pub fn spectrum_curve(system: &CoupledSystem, grid: usize) -> Result<Vec<SpectrumSample>> {
    if grid < 8 {
        return Err(Error::ParameterOutOfRange("need a grid of at least 8 angles"));
    }
    let phi = system.char_fn();
    let mut out = Vec::new();
    for j in 0..grid {
        let z = unit_root(j, grid);
        let theta = core::f64::consts::TAU * (j as f64) / (grid as f64);
        let s = symbol(system, j, grid);
        let (charpoly, _) = s.adjugate_resolvent();
        for root in charpoly.roots() {
            out.push(SpectrumSample { theta, lambda: root, source: SampleSource::SymbolEigenvalue });
        }
        if !phi.is_zero() {
            // phi(lambda) = z as a polynomial equation.
            let level = phi.num().sub(&phi.den().scale(z));
            for root in level.roots() {
                let val = match phi.eval(root) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                if (val.norm() - 1.0).abs() > CURVE_LEVEL_TOL {
                    return Err(Error::NotOnLevelSet);
                }
                out.push(SpectrumSample { theta, lambda: root, source: SampleSource::PhiLevelSet });
            }
        }
    }
    Ok(out)
}

/// Two-sided enclosure of the block operator's resolvent norm at a
/// regular point. The banded resolvent has blocks
/// `R (T1 R)^j = phi^{j-1} R T1 R` for `j >= 1`, so summing the geometric
/// band series gives `||R T1 R|| / (1 - |phi|)` up to one extra `||R||`
/// either way; the returned pair is that window.
pub fn resolvent_norm_bounds(
    system: &CoupledSystem,
    lambda: Complex64,
) -> Result<(f64, f64)> {
    let phi = system.char_fn().eval(lambda).map_err(|e| match e {
        Error::PoleEvaluation { .. } => Error::SpectrumHit,
        other => other,
    })?;
    let gap = 1.0 - phi.norm();
    if gap.abs() <= 1e-10 {
        return Err(Error::OnSpectrum);
    }
    let r = resolvent(system.diag(), lambda)?;
    let r_norm = r.op_norm2();
    let middle = r.mul(system.sub()).mul(&r).op_norm2() / gap.abs();
    Ok(((middle - r_norm).max(0.0), middle + r_norm))
}

/// Estimated order of tangency of `|phi|` to 1 at the boundary point of
/// the level set that controls the slow dynamics.
#[derive(Clone, Debug)]
pub struct GrowthEstimate {
    /// The (even) tangency order: the dynamics decays like
    /// `n^{-1/exponent}`.
    pub exponent: usize,
    /// The raw log-log fit behind the estimate.
    pub fit: RateFit,
}

/// Measures how fast `1 - |phi|` closes as the spectral boundary is
/// approached along the unimodular curve: `lambda = e^{i theta}` for
/// discrete systems, `lambda = i theta` for continuous ones, with
/// `theta = 2^{-j}`. The log-log slope is snapped to the nearest even
/// integer; a slope far from even, or outside `[2, 2 m]`, is reported as
/// ambiguous.
pub fn growth_parameter(system: &CoupledSystem) -> Result<GrowthEstimate> {
    let phi = system.char_fn();
    if phi.is_zero() {
        return Err(Error::DegenerateFit("uncoupled system has no tangency point"));
    }
    let mut samples = Vec::with_capacity(13);
    for j in (8..=20).rev() {
        let theta = (2.0f64).powi(-j);
        let lambda = match system.kind() {
            TimeKind::Discrete => Complex64::from_polar(1.0, theta),
            TimeKind::Continuous => Complex64::new(0.0, theta),
        };
        let value = 1.0 - phi.eval(lambda)?.norm();
        samples.push((theta, value));
    }
    let fit = rate_fit(&samples, 1.0)?;
    let snapped = 2.0 * (fit.slope / 2.0).round();
    let max_order = 2 * system.dim();
    if (fit.slope - snapped).abs() > 0.25
        || snapped < 2.0
        || snapped > max_order as f64
    {
        return Err(Error::FitAmbiguous { slope: fit.slope });
    }
    Ok(GrowthEstimate { exponent: snapped as usize, fit })
}

/// Builds the generalized eigen-sequence `x_k = phi(lambda)^k x0` on the
/// window `[lo, hi]`, with geometric tails continuing it across all of
/// the lattice. The block `x0` is the leading left singular vector of
/// `B = R(lambda, T0) T1`; the coupling identity makes every vector in
/// the range of `B` an eigenvector of `B` with eigenvalue `phi(lambda)`,
/// which is exactly what the recurrence needs.
///
/// The ratio is projected onto the unit circle so the state stays in the
/// representable class; for spectrum points the projection is a
/// sub-ulp adjustment.
pub fn eigen_sequence(
    system: &CoupledSystem,
    lambda: Complex64,
    lo: i64,
    hi: i64,
) -> Result<LatticeState> {
    if hi < lo {
        return Err(Error::InvalidInput("window must satisfy lo <= hi"));
    }
    let needed = (hi - lo + 1) as usize;
    if needed > DEFAULT_WINDOW_CAP {
        return Err(Error::WindowOverflow { needed, cap: DEFAULT_WINDOW_CAP });
    }
    let phi = system.char_fn().eval(lambda).map_err(|e| match e {
        Error::PoleEvaluation { .. } => Error::NotEigenvalue,
        other => other,
    })?;
    if (phi.norm() - 1.0).abs() > EIGEN_LEVEL_TOL {
        return Err(Error::NotEigenvalue);
    }
    let ratio = phi / phi.norm();
    let r = resolvent(system.diag(), lambda).map_err(|e| match e {
        Error::SpectrumHit => Error::NotEigenvalue,
        other => other,
    })?;
    let b = r.mul(system.sub());
    let (sigma, x0, _) = b.leading_singular_triplet();
    if sigma <= 1e-12 * b.max_norm().max(1.0) {
        return Err(Error::NotEigenvalue);
    }
    let m = system.dim();
    let mut values = Vec::with_capacity(needed * m);
    let mut factor = ratio.powi(lo as i32);
    for _ in lo..=hi {
        values.extend(x0.iter().map(|z| z * factor));
        factor *= ratio;
    }
    // factor now holds ratio^(hi + 1).
    let right_tail: Vec<Complex64> = x0.iter().map(|z| z * factor).collect();
    let left_factor = ratio.powi((lo - 1) as i32);
    let left_tail: Vec<Complex64> = x0.iter().map(|z| z * left_factor).collect();
    LatticeState::new(
        lo,
        m,
        values,
        left_tail,
        right_tail,
        TailKind::Geometric { ratio },
        NormP::Inf,
    )
}

/// `max_w ||S(w)^n||_2` over `n_freq` roots of unity, for one power `n`.
pub fn symbol_power_norm(system: &CoupledSystem, n_freq: usize, n: u64) -> Result<f64> {
    if system.kind() != TimeKind::Discrete {
        return Err(Error::InvalidInput("symbol powers need a discrete system"));
    }
    check_frequencies(n_freq)?;
    let norms = map_indexed(n_freq, |j| {
        crate::matrix::matrix_pow(&symbol(system, j, n_freq), n).op_norm2()
    });
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// `max_w ||S(w)^n||_2` for every `n = 0 ..= n_max` at once, sharing the
/// incremental powers per frequency. Entry `n` of the result is the norm
/// at power `n` (entry 0 is always 1).
pub fn symbol_power_norms(
    system: &CoupledSystem,
    n_freq: usize,
    n_max: u64,
) -> Result<Vec<f64>> {
    if system.kind() != TimeKind::Discrete {
        return Err(Error::InvalidInput("symbol powers need a discrete system"));
    }
    check_frequencies(n_freq)?;
    let len = (n_max + 1) as usize;
    let per_freq: Vec<Vec<f64>> = map_indexed(n_freq, |j| {
        let s = symbol(system, j, n_freq);
        let mut p = ComplexMatrix::identity(s.dim());
        let mut row = Vec::with_capacity(len);
        row.push(1.0);
        for _ in 1..len {
            p = s.mul(&p);
            row.push(p.op_norm2());
        }
        row
    });
    let mut out = alloc::vec![0.0f64; len];
    for row in per_freq {
        for (acc, v) in out.iter_mut().zip(row) {
            *acc = acc.max(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{platoon, rendezvous, second_order};

    #[test]
    fn rendezvous_spectrum_is_the_inner_circle() {
        let sys = rendezvous(0.4).unwrap();
        let samples = spectrum_curve(&sys, 32).unwrap();
        assert!(samples.iter().any(|s| s.source == SampleSource::PhiLevelSet));
        assert!(samples.iter().any(|s| s.source == SampleSource::SymbolEigenvalue));
        for s in &samples {
            let dist = (s.lambda - Complex64::new(0.6, 0.0)).norm();
            assert!((dist - 0.4).abs() < 1e-9, "off circle: {:?}", s);
        }
        assert!(spectrum_curve(&sys, 4).is_err());
    }

    #[test]
    fn resolvent_bounds_bracket_the_scalar_truth() {
        let sys = rendezvous(0.5).unwrap();
        // At lambda = 2 the exact operator resolvent norm is
        // 1 / dist(2, circle) = 1.
        let (lo, hi) = resolvent_norm_bounds(&sys, Complex64::new(2.0, 0.0)).unwrap();
        assert!(lo <= 1.0 + 1e-12 && 1.0 <= hi + 1e-12);
        assert!(hi < 1.5);
        let on = resolvent_norm_bounds(&sys, Complex64::new(1.0, 0.0));
        assert_eq!(on.err(), Some(Error::OnSpectrum));
        let pole = resolvent_norm_bounds(&sys, Complex64::new(0.5, 0.0));
        assert_eq!(pole.err(), Some(Error::SpectrumHit));
    }

    #[test]
    fn tangency_order_is_two_for_the_reference_models() {
        for sys in [rendezvous(0.5).unwrap(), second_order(0.25).unwrap()] {
            let est = growth_parameter(&sys).unwrap();
            assert_eq!(est.exponent, 2, "slope {}", est.fit.slope);
        }
        let est = growth_parameter(&platoon(1.0).unwrap()).unwrap();
        assert_eq!(est.exponent, 2, "slope {}", est.fit.slope);
    }

    #[test]
    fn eigen_sequence_satisfies_the_recurrence() {
        let sys = rendezvous(0.4).unwrap();
        let lambda = Complex64::new(0.6, 0.4);
        let state = eigen_sequence(&sys, lambda, -3, 5).unwrap();
        let stepped = state.step(&sys).unwrap();
        let residual = stepped.difference(&state.scale(lambda)).unwrap().lp_norm();
        assert!(residual < 1e-13, "residual {residual}");
        let off = eigen_sequence(&sys, Complex64::new(0.9, 0.4), 0, 4);
        assert_eq!(off.err(), Some(Error::NotEigenvalue));
    }

    #[test]
    fn symbol_power_norms_for_a_contraction() {
        let sys = rendezvous(0.5).unwrap();
        let single = symbol_power_norm(&sys, 8, 100).unwrap();
        assert!((single - 1.0).abs() < 1e-9);
        let all = symbol_power_norms(&sys, 8, 16).unwrap();
        assert_eq!(all.len(), 17);
        assert_eq!(all[0], 1.0);
        for v in &all {
            assert!(*v <= 1.0 + 1e-12 && *v > 0.9);
        }
    }
}
