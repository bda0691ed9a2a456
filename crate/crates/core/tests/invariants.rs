//! Property tests for the structural identities the library is built on.

use num_complex::Complex64;
use proptest::prelude::*;

use coupled_core::characteristic::{CoupledSystem, TimeKind};
use coupled_core::expm::matrix_exp;
use coupled_core::lattice::{LatticeState, NormP};
use coupled_core::matrix::{resolvent, ComplexMatrix};
use coupled_core::poly::{Polynomial, RationalFunction};

fn complex_box(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(complex_box(1.0), dim * dim)
        .prop_map(move |v| ComplexMatrix::from_vec(dim, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resolvent_satisfies_its_identity(
        dim in 1usize..=3,
        entries in proptest::collection::vec(complex_box(1.0), 9),
        shift in complex_box(1.0),
    ) {
        let m = ComplexMatrix::from_vec(dim, entries[..dim * dim].to_vec()).unwrap();
        // Any |lambda| > max_norm * dim bound keeps lambda regular.
        let lambda = Complex64::new(4.0, 0.0) + shift;
        let r = resolvent(&m, lambda).unwrap();
        let dev = ComplexMatrix::identity(dim)
            .scale(lambda)
            .sub(&m)
            .mul(&r)
            .sub(&ComplexMatrix::identity(dim))
            .max_norm();
        prop_assert!(dev < 1e-15 * 100.0, "identity residual {dev}");
    }

    #[test]
    fn adjugate_resolvent_is_consistent(
        dim in 1usize..=3,
        entries in proptest::collection::vec(complex_box(1.0), 9),
        at in complex_box(2.0),
    ) {
        let m = ComplexMatrix::from_vec(dim, entries[..dim * dim].to_vec()).unwrap();
        let (charpoly, adj) = m.adjugate_resolvent();
        // adj(lambda) (lambda I - M) = p(lambda) I identically.
        let mut adj_at = ComplexMatrix::zeros(dim);
        let mut power = Complex64::new(1.0, 0.0);
        for coeff in &adj {
            adj_at = adj_at.add(&coeff.scale(power));
            power *= at;
        }
        let shifted = ComplexMatrix::identity(dim).scale(at).sub(&m);
        let lhs = adj_at.mul(&shifted);
        let rhs = ComplexMatrix::identity(dim).scale(charpoly.eval(at));
        let scale = 1.0 + lhs.max_norm().max(rhs.max_norm());
        let dev = lhs.sub(&rhs).max_norm();
        prop_assert!(dev < 1e-10 * scale, "adjugate residual {dev}");
    }

    #[test]
    fn exponential_semigroup_property(
        dim in 1usize..=3,
        entries in proptest::collection::vec(complex_box(1.0), 9),
        s in 0.05f64..1.5,
        t in 0.05f64..1.5,
    ) {
        let m = ComplexMatrix::from_vec(dim, entries[..dim * dim].to_vec()).unwrap();
        let whole = matrix_exp(&m, s + t).unwrap();
        let parts = matrix_exp(&m, s).unwrap().mul(&matrix_exp(&m, t).unwrap());
        let scale = 1.0 + whole.max_norm();
        let dev = whole.sub(&parts).max_norm();
        prop_assert!(dev < 1e-12 * scale, "semigroup residual {dev}");
    }

    #[test]
    fn characteristic_function_obeys_the_neumann_bound(
        dim in 1usize..=3,
        entries in proptest::collection::vec(complex_box(1.0), 9),
        left in proptest::collection::vec(complex_box(1.0), 3),
        right in proptest::collection::vec(complex_box(1.0), 3),
        margin in 0.5f64..2.0,
        angle in 0.0f64..6.28,
    ) {
        let t0 = ComplexMatrix::from_vec(dim, entries[..dim * dim].to_vec()).unwrap();
        // Rank-one coupling: u v^T.
        let mut t1 = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                t1.set(i, j, left[i] * right[j]);
            }
        }
        let system = CoupledSystem::new(t0.clone(), t1.clone(), TimeKind::Discrete).unwrap();
        let radius = t0.op_norm2() + margin;
        let lambda = Complex64::from_polar(radius, angle);
        let phi = system.char_fn().eval(lambda).unwrap();
        let bound = t1.op_norm2() / (radius - t0.op_norm2());
        prop_assert!(
            phi.norm() <= bound * (1.0 + 1e-9) + 1e-12,
            "|phi| = {} exceeds Neumann bound {}",
            phi.norm(),
            bound
        );
    }

    #[test]
    fn characteristic_poles_sit_on_diagonal_eigenvalues(
        dim in 1usize..=3,
        entries in proptest::collection::vec(complex_box(1.0), 9),
        left in proptest::collection::vec(complex_box(1.0), 3),
        right in proptest::collection::vec(complex_box(1.0), 3),
    ) {
        let t0 = ComplexMatrix::from_vec(dim, entries[..dim * dim].to_vec()).unwrap();
        let mut t1 = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                t1.set(i, j, left[i] * right[j]);
            }
        }
        let system = CoupledSystem::new(t0.clone(), t1, TimeKind::Discrete).unwrap();
        let spectrum = t0.adjugate_resolvent().0.roots();
        for (pole, _mult) in system.char_fn().poles() {
            let dist = spectrum
                .iter()
                .map(|e| (pole - e).norm())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(dist < 1e-6, "pole {pole} is {dist} away from the spectrum");
        }
    }

    #[test]
    fn step_shift_mass_and_padding_invariants(
        alpha in 0.05f64..0.95,
        data in proptest::collection::vec(complex_box(2.0), 1..6),
        pad in 1usize..4,
        steps in 1u64..6,
    ) {
        let sys = coupled_core::models::rendezvous(alpha).unwrap();
        let state = LatticeState::from_window(-2, 1, data.clone(), NormP::one()).unwrap();
        prop_assume!(state.window().first() != Some(&Complex64::new(0.0, 0.0)));

        // Shift equivariance, bitwise.
        let a = state.shift().step(&sys).unwrap();
        let b = state.step(&sys).unwrap().shift();
        prop_assert_eq!(a, b);

        // Padding with tail copies changes nothing, bitwise, under steps.
        let mut padded_data = vec![Complex64::new(0.0, 0.0); pad];
        padded_data.extend_from_slice(&data);
        padded_data.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(pad));
        let padded =
            LatticeState::from_window(-2 - pad as i64, 1, padded_data, NormP::one()).unwrap();
        prop_assert_eq!(&padded, &state);
        let mut lean = state.clone();
        let mut wide = padded;
        for _ in 0..steps {
            lean = lean.step(&sys).unwrap();
            wide = wide.step(&sys).unwrap();
            prop_assert_eq!(&lean, &wide);
        }

        // T0 + T1 = 1 conserves the algebraic mass.
        let mass = |s: &LatticeState| s.window().iter().sum::<Complex64>();
        let before = mass(&state);
        let after = mass(&lean);
        prop_assert!(
            (before - after).norm() <= 1e-12 * (1.0 + before.norm()),
            "mass drifted from {before} to {after}"
        );
    }

    #[test]
    fn rational_reduction_is_evaluation_invariant(
        shared_mask in 0u8..8,
        x in complex_box(3.0),
    ) {
        let pool = [
            Complex64::new(1.0, 0.5),
            Complex64::new(-1.5, 0.0),
            Complex64::new(0.0, 2.0),
        ];
        let shared: Vec<Complex64> = pool
            .iter()
            .enumerate()
            .filter(|(i, _)| shared_mask & (1 << i) != 0)
            .map(|(_, z)| *z)
            .collect();
        let num_own = [Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.7)];
        let den_own = [Complex64::new(3.0, 0.0), Complex64::new(-2.0, -1.0)];
        let mut num_roots = num_own.to_vec();
        num_roots.extend_from_slice(&shared);
        let mut den_roots = den_own.to_vec();
        den_roots.extend_from_slice(&shared);
        let full = RationalFunction::new(
            Polynomial::from_roots(&num_roots),
            Polynomial::from_roots(&den_roots),
        )
        .unwrap();
        let reduced = RationalFunction::new(
            Polynomial::from_roots(&num_own),
            Polynomial::from_roots(&den_own),
        )
        .unwrap();
        for z in den_roots.iter().chain(den_own.iter()) {
            prop_assume!((x - z).norm() > 0.2);
        }
        let a = full.eval(x).unwrap();
        let b = reduced.eval(x).unwrap();
        prop_assert!(
            (a - b).norm() <= 1e-9 * (1.0 + b.norm()),
            "reduction changed the value: {a} vs {b}"
        );
    }
}
