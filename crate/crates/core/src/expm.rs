//! Matrix exponential `exp(t M)` by degree-13 Pade approximation with
//! scaling and squaring.
//!
//! The block dimension is tiny, so the degree selection machinery of the
//! usual algorithm is skipped: one fixed Pade degree with the matching
//! 1-norm threshold loses nothing measurable here. Overflow is detected on
//! the result rather than predicted from `||t M||`, because large stable
//! arguments (the main use case downstream) never overflow.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Pade-13 numerator coefficients, ascending.
pub(crate) const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm bound under which the degree-13 approximant reaches full
/// precision without scaling.
pub(crate) const THETA13: f64 = 5.371920351148152;

/// Number of halvings that brings `norm` under [`THETA13`].
pub(crate) fn scaling_exponent(norm: f64) -> i32 {
    if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    }
}

/// `exp(t m)`.
///
/// Fails with `OverflowRisk` when the result leaves the representable
/// range (entries of magnitude beyond roughly `1e308`); decay toward zero
/// underflows silently to zero instead.
pub fn matrix_exp(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::ParameterOutOfRange("time must be finite"));
    }
    let b = m.scale(Complex64::new(t, 0.0));
    let s = scaling_exponent(b.one_norm());
    let a = b.scale(Complex64::new(0.5f64.powi(s), 0.0));
    let n = m.dim();
    let id = ComplexMatrix::identity(n);
    let a2 = a.mul(&a);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);
    let cb = |k: usize| Complex64::new(PADE13[k], 0.0);
    let u_high = a6.scale(cb(13)).add(&a4.scale(cb(11))).add(&a2.scale(cb(9)));
    let u_poly = a6
        .mul(&u_high)
        .add(&a6.scale(cb(7)))
        .add(&a4.scale(cb(5)))
        .add(&a2.scale(cb(3)))
        .add(&id.scale(cb(1)));
    let u = a.mul(&u_poly);
    let v_high = a6.scale(cb(12)).add(&a4.scale(cb(10))).add(&a2.scale(cb(8)));
    let v = a6
        .mul(&v_high)
        .add(&a6.scale(cb(6)))
        .add(&a4.scale(cb(4)))
        .add(&a2.scale(cb(2)))
        .add(&id.scale(cb(0)));
    let p = v.add(&u);
    let q = v.sub(&u);
    let mut r = match q.lu() {
        Ok(f) => f.solve_mat(&p),
        // The Pade denominator is provably nonsingular for scaled input;
        // a singular factorization means the input was already degenerate.
        Err(_) => return Err(Error::OverflowRisk),
    };
    for _ in 0..s {
        r = r.mul(&r);
    }
    if !r.is_finite() {
        return Err(Error::OverflowRisk);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{vec_norm2, vec_sub};
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(3);
        let e = matrix_exp(&z, 1.0).unwrap();
        assert!(e.sub(&ComplexMatrix::identity(3)).max_norm() < 1e-15);
    }

    #[test]
    fn diagonal_matrix_exponentiates_entrywise() {
        let d = ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -2.0]).unwrap();
        let e = matrix_exp(&d, 1.0).unwrap();
        assert!((e.get(0, 0).re - 1.0f64.exp()).abs() < 1e-14 * 1.0f64.exp());
        assert!((e.get(1, 1).re - (-2.0f64).exp()).abs() < 1e-14);
        assert!(e.get(0, 1).norm() < 1e-16);
    }

    #[test]
    fn nilpotent_matrix_truncates() {
        let n = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let e = matrix_exp(&n, 3.0).unwrap();
        // exp(tN) = I + tN for N^2 = 0.
        assert!((e.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((e.get(0, 1) - c(3.0, 0.0)).norm() < 1e-14);
        assert!(e.get(1, 0).norm() < 1e-15);
    }

    #[test]
    fn rotation_generator_gives_sine_cosine() {
        let g = ComplexMatrix::from_real(2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let t = core::f64::consts::FRAC_PI_3;
        let e = matrix_exp(&g, t).unwrap();
        assert!((e.get(0, 0).re - t.cos()).abs() < 1e-14);
        assert!((e.get(0, 1).re + t.sin()).abs() < 1e-14);
        assert!((e.get(1, 0).re - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn semigroup_property_holds() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(-0.5, 0.3), c(1.0, 0.0)],
            vec![c(0.0, -1.0), c(-0.2, 0.0)],
        ])
        .unwrap();
        let e3 = matrix_exp(&m, 3.0).unwrap();
        let e1 = matrix_exp(&m, 1.0).unwrap();
        let e2 = matrix_exp(&m, 2.0).unwrap();
        let err = e1.mul(&e2).sub(&e3).max_norm();
        assert!(err < 1e-12 * e3.max_norm(), "residual {err}");
    }

    #[test]
    fn large_stable_argument_is_fine_and_unstable_overflows() {
        let stable = ComplexMatrix::from_real(1, &[-1.0]).unwrap();
        let e = matrix_exp(&stable, 4.0e4).unwrap();
        assert_eq!(e.get(0, 0), c(0.0, 0.0));
        let unstable = ComplexMatrix::from_real(1, &[720.0]).unwrap();
        assert_eq!(matrix_exp(&unstable, 1.0).err(), Some(Error::OverflowRisk));
    }

    #[test]
    fn matches_taylor_series_on_small_argument() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.1, 0.05), c(-0.2, 0.0)],
            vec![c(0.3, 0.0), c(0.0, 0.1)],
        ])
        .unwrap();
        let e = matrix_exp(&m, 1.0).unwrap();
        // Truncated Taylor with 30 terms is itself accurate to ~1e-16 here.
        let mut taylor = ComplexMatrix::identity(2);
        let mut term = ComplexMatrix::identity(2);
        for k in 1..30 {
            term = term.mul(&m).scale(c(1.0 / k as f64, 0.0));
            taylor = taylor.add(&term);
        }
        assert!(e.sub(&taylor).max_norm() < 1e-14);
        // Column action agrees too.
        let x = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let r = vec_sub(&e.mul_vec(&x), &taylor.mul_vec(&x));
        assert!(vec_norm2(&r) < 1e-14);
    }
}
