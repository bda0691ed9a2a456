//! Independent oracles: exact combinatorics, rational-arithmetic Taylor
//! sums, eigendecomposition cross-checks and closed-form norm curves.
//! Each one recomputes a quantity the library produces through a wholly
//! different route.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::traits::ToPrimitive;
use num_complex::Complex64;

use coupled_core::characteristic::{CoupledSystem, TimeKind};
use coupled_core::lattice::{LatticeState, NormP};
use coupled_core::matrix::ComplexMatrix;
use coupled_core::models::rendezvous;
use coupled_core::rates::operator_decay_samples_continuous;

type Rat = Ratio<BigInt>;

fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

fn binomial(n: u64, k: u64) -> u64 {
    // Products stay far below 2^53 for n <= 30.
    let mut acc = 1u64;
    for j in 0..k.min(n - k) {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

#[test]
fn impulse_trajectory_is_exactly_binomial_for_dyadic_alpha() {
    // With alpha = 1/2 every intermediate value is a dyadic rational with
    // denominator 2^n, n <= 30, so floating point arithmetic is exact and
    // the trajectory must match the binomial formula bit for bit.
    let sys = rendezvous(0.5).unwrap();
    let mut x = LatticeState::delta(1, NormP::one());
    for n in 1..=30u64 {
        x = x.step(&sys).unwrap();
        assert_eq!(x.lo(), 0);
        assert_eq!(x.window_len() as u64, n + 1);
        let scale = 0.5f64.powi(n as i32);
        for k in 0..=n {
            let expect = binomial(n, k) as f64 * scale;
            let got = x.window()[k as usize];
            assert_eq!(got, Complex64::new(expect, 0.0), "n={n} k={k}");
        }
        assert_eq!(x.lp_norm(), 1.0, "mass must be conserved exactly at n={n}");
    }
}

#[test]
fn matrix_exponential_matches_rational_taylor_sum() {
    // All entries are dyadic so the rational matrix and its float image
    // agree exactly; 40 Taylor terms leave a truncation error around
    // 1e-50 for this norm.
    let entries = [[rat(0, 1), rat(1, 4)], [rat(-3, 8), rat(1, 16)]];
    let mul = |a: &[[Rat; 2]; 2], b: &[[Rat; 2]; 2]| {
        let mut out = [[rat(0, 1), rat(0, 1)], [rat(0, 1), rat(0, 1)]];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0].clone() * b[0][j].clone()
                    + a[i][1].clone() * b[1][j].clone();
            }
        }
        out
    };
    let mut sum = [[rat(1, 1), rat(0, 1)], [rat(0, 1), rat(1, 1)]];
    let mut term = [[rat(1, 1), rat(0, 1)], [rat(0, 1), rat(1, 1)]];
    let mut factorial = rat(1, 1);
    for j in 1..=40u32 {
        term = mul(&term, &entries);
        factorial = factorial * rat(j as i64, 1);
        for r in 0..2 {
            for c in 0..2 {
                sum[r][c] = sum[r][c].clone() + term[r][c].clone() / factorial.clone();
            }
        }
    }
    let m = ComplexMatrix::from_real(2, &[0.0, 0.25, -0.375, 0.0625]).unwrap();
    let e = coupled_core::expm::matrix_exp(&m, 1.0).unwrap();
    for r in 0..2 {
        for c in 0..2 {
            let oracle = sum[r][c].to_f64().unwrap();
            let got = e.get(r, c);
            assert!(
                (got.re - oracle).abs() < 1e-14 && got.im.abs() < 1e-16,
                "entry ({r},{c}): {got} vs {oracle}"
            );
        }
    }
}

#[test]
fn matrix_exponential_matches_hermitian_eigendecomposition() {
    let h = ComplexMatrix::from_vec(
        3,
        vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.25),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, -0.25),
            Complex64::new(3.0, 0.0),
        ],
    )
    .unwrap();
    let t = 0.7;
    let (vals, vecs) = h.hermitian_eigen();
    // V diag(e^{t lambda}) V^*
    let mut diag = ComplexMatrix::zeros(3);
    for (i, &v) in vals.iter().enumerate() {
        diag.set(i, i, Complex64::new((t * v).exp(), 0.0));
    }
    let oracle = vecs.mul(&diag).mul(&vecs.adjoint());
    let direct = coupled_core::expm::matrix_exp(&h, t).unwrap();
    let dev = oracle.sub(&direct).max_norm();
    assert!(dev < 1e-12, "eigendecomposition and Pade disagree by {dev}");
}

#[test]
fn continuous_symbol_decay_matches_the_closed_form_peak() {
    // Scalar flow with A(w) = zeta (w - 1): the frequency-maximized norm
    // ||A e^{tA}|| equals sqrt(zeta / t) e^{-1/2} once the peak angle is
    // inside the grid.
    let zeta = 1.0;
    let sys = CoupledSystem::new(
        ComplexMatrix::from_real(1, &[-zeta]).unwrap(),
        ComplexMatrix::from_real(1, &[zeta]).unwrap(),
        TimeKind::Continuous,
    )
    .unwrap();
    let samples = operator_decay_samples_continuous(&sys, 1024, 100.0).unwrap();
    let (t, value) = *samples.last().unwrap();
    let closed = (zeta / t).sqrt() * (-0.5f64).exp();
    assert!(
        (value - closed).abs() < 0.01 * closed,
        "t={t}: {value} vs closed form {closed}"
    );
}

#[test]
fn level_tangency_matches_the_quadratic_expansion() {
    // 1 - |phi(e^{i theta})| = (1 - alpha) theta^2 / (2 alpha^2) + O(theta^4).
    let alpha = 0.4;
    let sys = rendezvous(alpha).unwrap();
    let phi = sys.char_fn();
    let y = |theta: f64| 1.0 - phi.eval(Complex64::from_polar(1.0, theta)).unwrap().norm();
    let theta = 0.5f64.powi(10);
    let expansion = (1.0 - alpha) * theta * theta / (2.0 * alpha * alpha);
    let got = y(theta);
    assert!(
        (got - expansion).abs() < 1e-3 * expansion,
        "{got} vs expansion {expansion}"
    );
    let ratio = y(2.0 * theta) / got;
    assert!((ratio - 4.0).abs() < 5e-3, "quadratic scaling broke: ratio {ratio}");
}

#[test]
fn cesaro_sup_norm_is_one_over_n_for_general_alpha() {
    // For impulse data the transported discrepancy is again an impulse,
    // so the n-average has sup norm 1/n; away from dyadic alpha this
    // holds to rounding rather than exactly.
    let sys = rendezvous(0.3).unwrap();
    let x = LatticeState::delta(1, NormP::Inf);
    for &n in &[10u64, 100, 1000] {
        let sup = x.cesaro_average(&sys, n).unwrap().lp_norm();
        let expect = 1.0 / n as f64;
        assert!(
            (sup - expect).abs() < 1e-13 * expect,
            "n={n}: {sup} vs {expect}"
        );
    }
}
