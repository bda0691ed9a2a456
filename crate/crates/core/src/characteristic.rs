//! Coupled block pairs and their characteristic function.
//!
//! A system couples each lattice site to its left neighbour through a pair
//! of `m x m` blocks: `x_k(n+1) = T0 x_k(n) + T1 x_{k-1}(n)` in discrete
//! time, `x_k' = A0 x_k + A1 x_{k-1}` in continuous time. Whenever the
//! coupling block has rank one (and for some higher-rank pairs) there is a
//! scalar rational function `phi` with
//!
//! ```text
//! T1 (lambda I - T0)^{-1} T1 = phi(lambda) T1
//! ```
//!
//! for all `lambda` outside the spectrum of the diagonal block. All
//! spectral data of the full lattice operator reduces to `phi`: its poles
//! sit in the spectrum of `T0`, and the level set `|phi| = 1` carries the
//! rest of the spectrum.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{resolvent, ComplexMatrix};
use crate::poly::{cluster_points, Polynomial, RationalFunction};
use crate::util::SplitMix64;

/// Relative rank threshold for the coupling block.
const RANK_TOL: f64 = 1e-10;

/// Residual above which a constructed candidate is rejected.
const CONSTRUCT_TOL: f64 = 1e-8;

/// Samples drawn when a constructor validates the coupling identity.
const CONSTRUCT_SAMPLES: usize = 32;

/// Minimal distance kept between verification samples and poles.
const POLE_MARGIN: f64 = 1e-3;

/// Tolerances for recognizing the single-pole special form.
const SPECIAL_FORM_TOL: f64 = 1e-9;

/// Whether the pair describes a recursion or a differential equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeKind {
    Discrete,
    Continuous,
}

/// Single-pole characteristic function, `phi(lambda) =
/// param^k / (lambda - 1 + param)^k` in discrete time (with
/// `param` in `(0, 1)`) and `param^k / (lambda + param)^k` in continuous
/// time (with `param > 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecialForm {
    /// Pole parameter: distance from the pole to the tangency point
    /// (1 in discrete time, 0 in continuous time).
    pub param: f64,
    /// Pole order.
    pub multiplicity: usize,
}

/// A coupled pair of blocks together with its characteristic function.
#[derive(Clone, Debug)]
pub struct CoupledSystem {
    diag: ComplexMatrix,
    sub: ComplexMatrix,
    kind: TimeKind,
    char_fn: RationalFunction,
}

impl CoupledSystem {
    /// Builds a system and validates the coupling identity on random
    /// samples away from the poles. A pair admitting no scalar
    /// characteristic function is rejected with
    /// [`Error::NoCharacteristicFunction`].
    pub fn new(diag: ComplexMatrix, sub: ComplexMatrix, kind: TimeKind) -> Result<Self> {
        if diag.dim() != sub.dim() {
            return Err(Error::InvalidInput("diagonal and coupling blocks must match"));
        }
        let char_fn = characteristic_function(&diag, &sub)?;
        let sys = Self { diag, sub, kind, char_fn };
        let residual = sys.verify_characteristic(CONSTRUCT_SAMPLES)?;
        if residual > CONSTRUCT_TOL {
            return Err(Error::NoCharacteristicFunction { residual });
        }
        Ok(sys)
    }

    pub fn diag(&self) -> &ComplexMatrix {
        &self.diag
    }

    pub fn sub(&self) -> &ComplexMatrix {
        &self.sub
    }

    pub fn kind(&self) -> TimeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.diag.dim()
    }

    pub fn char_fn(&self) -> &RationalFunction {
        &self.char_fn
    }

    /// Largest eigenvalue modulus of the diagonal block.
    pub fn diag_spectral_radius(&self) -> f64 {
        let (p, _) = self.diag.adjugate_resolvent();
        p.roots().iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    /// Maximal relative residual of the coupling identity over `samples`
    /// points drawn deterministically from an annulus enclosing the
    /// spectrum of the diagonal block, every point at least
    /// [`POLE_MARGIN`] away from all poles.
    pub fn verify_characteristic(&self, samples: usize) -> Result<f64> {
        let sub_norm = self.sub.max_norm();
        if sub_norm == 0.0 {
            return Ok(0.0);
        }
        let (charpoly, _) = self.diag.adjugate_resolvent();
        let mut exclusions: Vec<Complex64> =
            cluster_points(&charpoly.roots(), 1e-6).into_iter().map(|(z, _)| z).collect();
        exclusions.extend(self.char_fn.poles().into_iter().map(|(z, _)| z));
        let rho = exclusions.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let (r_lo, r_hi) = (rho + 0.75, rho + 2.75);
        let mut rng = SplitMix64::new(42);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let lambda = loop {
                let angle = core::f64::consts::TAU * rng.next_f64();
                let radius = r_lo + (r_hi - r_lo) * rng.next_f64();
                let l = Complex64::new(radius * angle.cos(), radius * angle.sin());
                if exclusions.iter().all(|&p| (l - p).norm() > POLE_MARGIN) {
                    break l;
                }
            };
            let r = resolvent(&self.diag, lambda)?;
            let phi = self.char_fn.eval(lambda)?;
            let lhs = self.sub.mul(&r).mul(&self.sub);
            let residual = lhs.sub(&self.sub.scale(phi)).max_norm() / sub_norm;
            worst = worst.max(residual);
        }
        Ok(worst)
    }

    /// Recognizes the single-pole form of the characteristic function.
    pub fn special_form(&self) -> Option<SpecialForm> {
        special_form_detect(&self.char_fn, self.kind)
    }

    /// Contraction transform `T -> (T - beta) / (1 - beta)` for discrete
    /// systems in special form; the image has pole parameter
    /// `param / (1 - beta)` and the same pole order.
    pub fn dungey_transform(&self, beta: f64) -> Result<CoupledSystem> {
        if self.kind != TimeKind::Discrete {
            return Err(Error::InvalidInput("contraction transform needs discrete time"));
        }
        let sf = self.special_form().ok_or(Error::NotSpecialForm)?;
        if !(beta > 0.0 && beta < 1.0 - sf.param) {
            return Err(Error::ParameterOutOfRange("beta must lie in (0, 1 - param)"));
        }
        let scale = Complex64::new(1.0 / (1.0 - beta), 0.0);
        let mut diag = self.diag.clone();
        for i in 0..diag.dim() {
            let v = diag.get(i, i) - Complex64::new(beta, 0.0);
            diag.set(i, i, v);
        }
        CoupledSystem::new(diag.scale(scale), self.sub.scale(scale), TimeKind::Discrete)
    }

    /// Euler discretization `(I + eps A0, eps A1)` of a continuous system.
    /// For systems in special form the step must satisfy
    /// `0 < eps < 1 / param`, which keeps the image in special form with
    /// pole parameter `eps * param`.
    pub fn discretize(&self, eps: f64) -> Result<CoupledSystem> {
        if self.kind != TimeKind::Continuous {
            return Err(Error::InvalidInput("discretization needs continuous time"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::ParameterOutOfRange("step must be positive and finite"));
        }
        if let Some(sf) = self.special_form() {
            if eps >= 1.0 / sf.param {
                return Err(Error::ParameterOutOfRange("step must be below 1 / param"));
            }
        }
        let eps_c = Complex64::new(eps, 0.0);
        let mut diag = self.diag.scale(eps_c);
        for i in 0..diag.dim() {
            let v = diag.get(i, i) + Complex64::one();
            diag.set(i, i, v);
        }
        CoupledSystem::new(diag, self.sub.scale(eps_c), TimeKind::Discrete)
    }
}

/// Candidate characteristic function for a block pair.
///
/// For a rank-one coupling `sub = sigma u v*` the identity forces
/// `phi(lambda) = sigma v* R(lambda) u`, a rational function with the
/// characteristic polynomial of `diag` as denominator. For higher rank the
/// candidate is read off one entry of `sub R sub`; whether it actually
/// satisfies the identity is decided by the verification pass in
/// [`CoupledSystem::new`].
pub fn characteristic_function(
    diag: &ComplexMatrix,
    sub: &ComplexMatrix,
) -> Result<RationalFunction> {
    if diag.dim() != sub.dim() {
        return Err(Error::InvalidInput("diagonal and coupling blocks must match"));
    }
    if sub.is_zero() {
        return Ok(RationalFunction::zero());
    }
    let m = diag.dim();
    let (charpoly, adj) = diag.adjugate_resolvent();
    let rank = sub.rank(RANK_TOL);
    let mut num = Vec::with_capacity(m);
    if rank == 1 {
        let (sigma, u, v) = sub.leading_singular_triplet();
        for b in &adj {
            let bu = b.mul_vec(&u);
            let mut acc = Complex64::zero();
            for (vi, bi) in v.iter().zip(&bu) {
                acc += vi.conj() * bi;
            }
            num.push(acc * Complex64::new(sigma, 0.0));
        }
    } else {
        let (mut ai, mut bj, mut best) = (0, 0, 0.0f64);
        for i in 0..m {
            for j in 0..m {
                let v = sub.get(i, j).norm();
                if v > best {
                    best = v;
                    ai = i;
                    bj = j;
                }
            }
        }
        let row: Vec<Complex64> = sub.row(ai).to_vec();
        let colv = sub.col(bj);
        let pivot = sub.get(ai, bj);
        for b in &adj {
            let bc = b.mul_vec(&colv);
            let mut acc = Complex64::zero();
            for (ri, bi) in row.iter().zip(&bc) {
                acc += ri * bi;
            }
            num.push(acc / pivot);
        }
    }
    RationalFunction::new(Polynomial::new(num), charpoly)
}

/// Recognizes `param^k / (lambda - pole)^k` with the pole anchored at
/// `1 - param` (discrete) or `-param` (continuous).
///
/// The test is structural: the mean of the denominator roots is read off
/// the second-highest coefficient, the binomial expansion of
/// `(lambda - pole)^k` is compared coefficientwise, and the constant
/// numerator is compared against `param^k`, all to within
/// [`SPECIAL_FORM_TOL`].
pub fn special_form_detect(f: &RationalFunction, kind: TimeKind) -> Option<SpecialForm> {
    if f.is_zero() || f.num().degree() != Some(0) {
        return None;
    }
    let k = match f.den().degree() {
        Some(k) if k >= 1 => k,
        _ => return None,
    };
    let den = f.den().coeffs();
    let pole = -den[k - 1] / Complex64::new(k as f64, 0.0);
    // Coefficientwise binomial comparison at a shared absolute scale.
    let mut expected = Vec::with_capacity(k + 1);
    for j in 0..=k {
        expected.push(binomial(k, j) * (-pole).powu((k - j) as u32));
    }
    let scale = den
        .iter()
        .chain(expected.iter())
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    for (d, e) in den.iter().zip(&expected) {
        if (d - e).norm() > SPECIAL_FORM_TOL * scale {
            return None;
        }
    }
    if pole.im.abs() > SPECIAL_FORM_TOL {
        return None;
    }
    let param = match kind {
        TimeKind::Discrete => 1.0 - pole.re,
        TimeKind::Continuous => -pole.re,
    };
    let admissible = match kind {
        TimeKind::Discrete => param > 0.0 && param < 1.0,
        TimeKind::Continuous => param > 0.0,
    };
    if !admissible {
        return None;
    }
    let expected_num = param.powi(k as i32);
    if (f.num().coeffs()[0] - Complex64::new(expected_num, 0.0)).norm()
        > SPECIAL_FORM_TOL * expected_num
    {
        return None;
    }
    Some(SpecialForm { param, multiplicity: k })
}

fn binomial(n: usize, k: usize) -> Complex64 {
    let mut v = 1.0f64;
    for i in 0..k.min(n - k) {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    Complex64::new(v, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_pair(t0: f64, t1: f64) -> CoupledSystem {
        CoupledSystem::new(
            ComplexMatrix::from_real(1, &[t0]).unwrap(),
            ComplexMatrix::from_real(1, &[t1]).unwrap(),
            TimeKind::Discrete,
        )
        .unwrap()
    }

    #[test]
    fn scalar_pair_has_simple_pole_form() {
        let sys = scalar_pair(0.6, 0.4);
        let f = sys.char_fn();
        assert_eq!(f.num().degree(), Some(0));
        assert_eq!(f.den().degree(), Some(1));
        assert!((f.num().coeffs()[0] - c(0.4, 0.0)).norm() < 1e-14);
        assert!((f.den().coeffs()[0] - c(-0.6, 0.0)).norm() < 1e-14);
        let sf = sys.special_form().expect("special form");
        assert!((sf.param - 0.4).abs() < 1e-12);
        assert_eq!(sf.multiplicity, 1);
    }

    #[test]
    fn verification_residual_is_tiny_for_valid_pair() {
        let sys = scalar_pair(0.6, 0.4);
        assert!(sys.verify_characteristic(100).unwrap() < 1e-12);
    }

    #[test]
    fn pair_without_characteristic_function_is_rejected() {
        // Distinct diagonal entries with identity coupling: sub R sub = R
        // is not a scalar multiple of sub.
        let diag = ComplexMatrix::from_real(2, &[0.1, 0.0, 0.0, 0.2]).unwrap();
        let sub = ComplexMatrix::identity(2);
        let err = CoupledSystem::new(diag, sub, TimeKind::Discrete).err();
        assert!(matches!(err, Some(Error::NoCharacteristicFunction { .. })));
    }

    #[test]
    fn full_rank_coupling_over_scalar_diagonal_works() {
        // diag = 0.3 I gives sub R sub = sub^2 / (lambda - 0.3); with
        // sub = I the characteristic function is 1 / (lambda - 0.3),
        // exercising the higher-rank path and pole-root cancellation.
        let diag = ComplexMatrix::from_real(2, &[0.3, 0.0, 0.0, 0.3]).unwrap();
        let sys = CoupledSystem::new(diag, ComplexMatrix::identity(2), TimeKind::Discrete)
            .unwrap();
        let f = sys.char_fn();
        assert_eq!(f.num().degree(), Some(0));
        assert_eq!(f.den().degree(), Some(1));
        let at = f.eval(c(1.3, 0.0)).unwrap();
        assert!((at - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn zero_coupling_gives_zero_function() {
        let sys = CoupledSystem::new(
            ComplexMatrix::from_real(1, &[0.5]).unwrap(),
            ComplexMatrix::zeros(1),
            TimeKind::Discrete,
        )
        .unwrap();
        assert!(sys.char_fn().is_zero());
        assert_eq!(sys.verify_characteristic(10).unwrap(), 0.0);
        assert!(sys.special_form().is_none());
    }

    #[test]
    fn detect_rejects_non_binomial_denominator() {
        // 1 / (lambda^2 + 1): root mean 0, but lambda^2 differs from
        // lambda^2 + 1 in the constant coefficient.
        let f = RationalFunction::new(
            Polynomial::one(),
            Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        )
        .unwrap();
        assert!(special_form_detect(&f, TimeKind::Discrete).is_none());
    }

    #[test]
    fn detect_rejects_wrong_numerator_constant() {
        // 0.3 / (lambda - 0.6): pole parameter 0.4 but numerator != 0.4.
        let f = RationalFunction::new(
            Polynomial::constant(c(0.3, 0.0)),
            Polynomial::from_roots(&[c(0.6, 0.0)]),
        )
        .unwrap();
        assert!(special_form_detect(&f, TimeKind::Discrete).is_none());
    }

    #[test]
    fn contraction_transform_rescales_pole_parameter() {
        let sys = scalar_pair(0.5, 0.5);
        let q = sys.dungey_transform(0.25).unwrap();
        let sf = q.special_form().expect("special form");
        assert!((sf.param - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(sf.multiplicity, 1);
        assert!((q.diag().get(0, 0) - c(1.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!(matches!(
            sys.dungey_transform(0.6).err(),
            Some(Error::ParameterOutOfRange(_))
        ));
    }

    #[test]
    fn euler_discretization_of_scalar_flow() {
        let sys = CoupledSystem::new(
            ComplexMatrix::from_real(1, &[-2.0]).unwrap(),
            ComplexMatrix::from_real(1, &[2.0]).unwrap(),
            TimeKind::Continuous,
        )
        .unwrap();
        let sf = sys.special_form().expect("special form");
        assert!((sf.param - 2.0).abs() < 1e-12);
        let disc = sys.discretize(0.25).unwrap();
        assert_eq!(disc.kind(), TimeKind::Discrete);
        let dsf = disc.special_form().expect("special form");
        assert!((dsf.param - 0.5).abs() < 1e-12);
        assert!(matches!(
            sys.discretize(0.6).err(),
            Some(Error::ParameterOutOfRange(_))
        ));
    }
}
