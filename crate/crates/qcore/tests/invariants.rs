//! Property tests over randomly generated states and operators.

use proptest::prelude::*;
use qcore::randgen::{random_density, random_hermitian, random_unitary};
use qcore::{fidelity, matrix_exp, max_abs_diff, von_neumann_entropy, CMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partial_trace_composes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(4, &mut rng);
        // Trace out {3} then {0 of the remainder} vs tracing out {0,3} at once.
        let step1 = rho.partial_trace(&[0, 1, 2]).unwrap();
        let step2 = step1.partial_trace(&[1, 2]).unwrap();
        let direct = rho.partial_trace(&[1, 2]).unwrap();
        prop_assert!(max_abs_diff(step2.matrix(), direct.matrix()) < 1e-12);
    }

    #[test]
    fn operations_preserve_state_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(3, &mut rng);
        let u = random_unitary(3, &mut rng);
        let rotated = rho.apply_unitary(&u).unwrap();
        prop_assert!(rotated.invariant_deviation() < 1e-10);
        let reduced = rotated.partial_trace(&[0, 2]).unwrap();
        prop_assert!(reduced.invariant_deviation() < 1e-10);
    }

    #[test]
    fn fidelity_symmetry(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density(2, &mut rng);
        let b = random_density(2, &mut rng);
        prop_assert!((fidelity(&a, &b).unwrap() - fidelity(&b, &a).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn exp_agrees_with_taylor(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h = random_hermitian(2, &mut rng);
        // Scale into ‖h‖ ≤ 5 territory.
        let norm = h.iter().map(|x| x.norm()).fold(0.0, f64::max) * 4.0;
        if norm > 5.0 {
            h = h.map(|x| x * (5.0 / norm));
        }
        let via_eigen = matrix_exp(&h).unwrap();
        let mut term = CMatrix::identity(4, 4);
        let mut taylor = CMatrix::identity(4, 4);
        for k in 1..=40 {
            term = (&term * &h).map(|x| x / k as f64);
            taylor += &term;
        }
        prop_assert!(max_abs_diff(&via_eigen, &taylor) < 1e-8);
    }

    #[test]
    fn entropy_unitary_invariance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(2, &mut rng);
        let u = random_unitary(2, &mut rng);
        let s1 = von_neumann_entropy(&rho);
        let s2 = von_neumann_entropy(&rho.apply_unitary(&u).unwrap());
        prop_assert!((s1 - s2).abs() < 1e-9);
    }
}
