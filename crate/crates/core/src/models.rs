//! Reference models: concrete coupled systems used throughout the tests
//! and the command line tool.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::characteristic::{CoupledSystem, TimeKind};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Scalar averaging chain: each agent moves a fraction `alpha` of the way
/// toward its left neighbour per step,
/// `x_k(n+1) = (1 - alpha) x_k(n) + alpha x_{k-1}(n)`.
pub fn rendezvous(alpha: f64) -> Result<CoupledSystem> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ParameterOutOfRange("need 0 < alpha < 1"));
    }
    let t0 = ComplexMatrix::from_real(1, &[1.0 - alpha])?;
    let t1 = ComplexMatrix::from_real(1, &[alpha])?;
    CoupledSystem::new(t0, t1, TimeKind::Discrete)
}

/// Position/velocity chain with spring feedback to the left neighbour:
/// blocks are `(position, velocity)` and
///
/// ```text
/// q_k(n+1) = q_k(n) + v_k(n) + (q_{k-1}(n) - something)  -- via T1
/// v_k(n+1) = -alpha0 q_k(n) + (1 - alpha1) v_k(n)
/// ```
///
/// with the critically damped gain `alpha1 = 2 sqrt(alpha0)`, which makes
/// the coupling admit the nested-pole characteristic function.
pub fn second_order(alpha0: f64) -> Result<CoupledSystem> {
    if !(alpha0 > 0.0 && alpha0 < 1.0) {
        return Err(Error::ParameterOutOfRange("need 0 < alpha0 < 1"));
    }
    let alpha1 = 2.0 * alpha0.sqrt();
    let t0 = ComplexMatrix::from_real(2, &[1.0, 1.0, -alpha0, 1.0 - alpha1])?;
    let t1 = ComplexMatrix::from_real(2, &[0.0, -1.0, 0.0, 0.0])?;
    CoupledSystem::new(t0, t1, TimeKind::Discrete)
}

/// Continuous-time vehicle chain: blocks are
/// `(position error, velocity, acceleration)`, the local dynamics is the
/// companion matrix of `(s + zeta)^3`, and each vehicle reads the velocity
/// of its predecessor.
pub fn platoon(zeta: f64) -> Result<CoupledSystem> {
    if !(zeta > 0.0) {
        return Err(Error::ParameterOutOfRange("need zeta > 0"));
    }
    let z2 = zeta * zeta;
    let a0 = ComplexMatrix::from_real(
        3,
        &[
            0.0, 1.0, 0.0, //
            0.0, 0.0, 1.0, //
            -z2 * zeta, -3.0 * z2, -3.0 * zeta,
        ],
    )?;
    let mut a1 = ComplexMatrix::zeros(3);
    a1.set(0, 1, Complex64::new(-1.0, 0.0));
    CoupledSystem::new(a0, a1, TimeKind::Continuous)
}

/// A buildable description of one of the reference models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelSpec {
    Rendezvous { alpha: f64 },
    SecondOrder { alpha0: f64 },
    Platoon { zeta: f64 },
}

impl ModelSpec {
    pub fn build(self) -> Result<CoupledSystem> {
        match self {
            ModelSpec::Rendezvous { alpha } => rendezvous(alpha),
            ModelSpec::SecondOrder { alpha0 } => second_order(alpha0),
            ModelSpec::Platoon { zeta } => platoon(zeta),
        }
    }
}
