//! Crate-wide error type.

use core::fmt;

use num_complex::Complex64;

/// Everything that can go wrong in this crate.
///
/// Variants are shared between modules because most operations bottom out in
/// the same few numeric primitives (resolvents, rational evaluation, fits).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Rational evaluation too close to a pole of the denominator.
    PoleEvaluation { at: Complex64 },
    /// The shifted matrix is singular to working precision, i.e. the point
    /// lies in (or numerically on) the spectrum of the diagonal block.
    SpectrumHit,
    /// A matrix factorization ran into a pivot that is zero to working
    /// precision outside of a resolvent context.
    Singular,
    /// A matrix exponential left the representable floating-point range.
    OverflowRisk,
    /// A model or transform parameter lies outside its admissible interval.
    ParameterOutOfRange(&'static str),
    /// No scalar rational function satisfies the coupling identity for this
    /// block pair; the reported residual is the best achieved.
    NoCharacteristicFunction { residual: f64 },
    /// The operation needs the single-pole special form of the
    /// characteristic function and the system does not have it.
    NotSpecialForm,
    /// The point lies on the level set `|phi| = 1`, where the resolvent of
    /// the full operator is unbounded.
    OnSpectrum,
    /// The tangency point (1 for discrete time, 0 for continuous time) does
    /// not lie on the level set `|phi| = 1`.
    NotOnLevelSet,
    /// A fitted growth exponent is not close to any admissible integer.
    FitAmbiguous { slope: f64 },
    /// The point fails the eigenvalue criteria of the full operator.
    NotEigenvalue,
    /// The evolution window would exceed the configured cap.
    WindowOverflow { needed: usize, cap: usize },
    /// The data is not an element of the requested sequence space
    /// (for example a nonzero tail with finite `p`).
    NotInSpace,
    /// The vector is not in the required range subspace; the reported
    /// residual is the distance to that subspace.
    NotInRange { residual: f64 },
    /// The derivative of the characteristic function vanishes at the
    /// tangency point, so the limit profile is not determined.
    DegenerateDerivative,
    /// The samples cannot support a log-log fit (too few, not positive,
    /// or spanning less than two decades).
    DegenerateFit(&'static str),
    /// The adaptive integrator could not meet its tolerance above the
    /// minimal step size.
    ToleranceNotMet,
    /// The operation is not defined for this tail kind.
    UnsupportedTail,
    /// Malformed input: dimension mismatch, non-finite entry, empty data.
    InvalidInput(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PoleEvaluation { at } => {
                write!(f, "evaluation point {at} is too close to a pole")
            }
            Error::SpectrumHit => write!(f, "point lies in the spectrum of the diagonal block"),
            Error::Singular => write!(f, "matrix is singular to working precision"),
            Error::OverflowRisk => write!(f, "matrix exponential overflowed"),
            Error::ParameterOutOfRange(what) => write!(f, "parameter out of range: {what}"),
            Error::NoCharacteristicFunction { residual } => write!(
                f,
                "no characteristic function for this pair (best residual {residual:.3e})"
            ),
            Error::NotSpecialForm => {
                write!(f, "characteristic function is not of single-pole form")
            }
            Error::OnSpectrum => write!(f, "point lies on the spectral level set |phi| = 1"),
            Error::NotOnLevelSet => write!(f, "tangency point is not on the level set |phi| = 1"),
            Error::FitAmbiguous { slope } => {
                write!(f, "fitted exponent {slope} is not near an admissible integer")
            }
            Error::NotEigenvalue => write!(f, "point is not an eigenvalue of the full operator"),
            Error::WindowOverflow { needed, cap } => {
                write!(f, "window of {needed} blocks exceeds cap {cap}")
            }
            Error::NotInSpace => write!(f, "data does not lie in the requested sequence space"),
            Error::NotInRange { residual } => {
                write!(f, "vector is not in the range subspace (residual {residual:.3e})")
            }
            Error::DegenerateDerivative => {
                write!(f, "characteristic derivative vanishes at the tangency point")
            }
            Error::DegenerateFit(what) => write!(f, "samples cannot support a fit: {what}"),
            Error::ToleranceNotMet => {
                write!(f, "adaptive integrator hit its minimal step size")
            }
            Error::UnsupportedTail => write!(f, "operation is not defined for this tail kind"),
            Error::InvalidInput(what) => write!(f, "invalid input: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
