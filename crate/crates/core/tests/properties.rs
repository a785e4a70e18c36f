mod common;

use std::sync::{Arc, OnceLock};

use common::symmetric_eigenvalues;
use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;
use qlrlab::fockspace::{
    build_excitation_matrix, build_hamiltonian, ExcitationKind, FermionOp, SectorBasis,
    TwoInTwoCoefficients,
};
use qlrlab::molint::boys_f0;
use qlrlab::orbrot::{rotate_integrals, KappaParams};
use qlrlab::response::{
    analytic_metric_2in2, analytic_metric_det_2in2, solve_response, Parameterization,
    ResponseMatrices, SolveOptions,
};
use qlrlab::sampler::{derive_seed, jw_map, sample_expectation, PauliString};
use qlrlab::systems::{h4_rectangle, helium, System};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn h4() -> &'static System {
    static SYS: OnceLock<System> = OnceLock::new();
    SYS.get_or_init(|| h4_rectangle(1.5, 1.8).unwrap())
}

fn he() -> &'static System {
    static SYS: OnceLock<System> = OnceLock::new();
    SYS.get_or_init(|| helium().unwrap())
}

fn h4_spectrum() -> &'static Vec<f64> {
    static E: OnceLock<Vec<f64>> = OnceLock::new();
    E.get_or_init(|| {
        symmetric_eigenvalues(h4().hamiltonian(&KappaParams::zeros(4)).unwrap().matrix())
    })
}

fn unit_coefficients() -> impl Strategy<Value = TwoInTwoCoefficients> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-zero", |(a, s, b)| a * a + s * s + b * b > 1e-6)
        .prop_map(|(a, s, b)| {
            let n = (a * a + s * s + b * b).sqrt();
            TwoInTwoCoefficients {
                c_1100: a / n,
                c_s: s / n,
                c_0011: b / n,
            }
        })
}

fn pauli_letters(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n)
        .prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn boys_is_positive_bounded_and_decreasing(t in 0.0..60.0f64, dt in 1e-6..5.0f64) {
        let (a, b) = (boys_f0(t).unwrap(), boys_f0(t + dt).unwrap());
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(b < a);
    }

    #[test]
    fn orbital_rotations_are_proper_orthogonal(v in proptest::collection::vec(-3.0..3.0f64, 6)) {
        let u = KappaParams::from_values(4, &v).unwrap().unitary();
        prop_assert!((u.transpose() * &u - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
        prop_assert!((u.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fci_spectrum_is_kappa_invariant(v in proptest::collection::vec(-3.2..3.2f64, 6)) {
        let sys = h4();
        let k = KappaParams::from_values(4, &v).unwrap();
        let h = build_hamiltonian(&rotate_integrals(&sys.mo, &k).unwrap(), &sys.sector).unwrap();
        let e = symmetric_eigenvalues(h.matrix());
        let d = e.iter().zip(h4_spectrum()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(d < 1e-10, "max spectral shift {}", d);
    }

    #[test]
    fn rotated_hamiltonian_stays_hermitian(k in -3.2..3.2f64) {
        let h = he().hamiltonian(&KappaParams::single(2, 0, 1, k).unwrap()).unwrap();
        prop_assert!((h.matrix() - h.matrix().transpose()).amax() < 1e-13);
    }

    #[test]
    fn singlet_operators_are_transposes(p in 0..4usize, q in 0..4usize) {
        let b = &h4().sector;
        let e = |p, q| build_excitation_matrix(b, ExcitationKind::Singlet(p, q)).unwrap().into_matrix();
        prop_assert!((e(p, q).transpose() - e(q, p)).amax() < 1e-15);
    }

    #[test]
    fn jordan_wigner_matches_dense_excitations(p in 0..3usize, q in 0..3usize, c in -2.0..2.0f64) {
        let full = Arc::new(SectorBasis::full_fock(3).unwrap());
        let op = FermionOp::e_pq(p, q).scaled(c);
        let dense = build_excitation_matrix(&full, ExcitationKind::Singlet(p, q)).unwrap().into_matrix() * c;
        let jw = jw_map(&op, 6).unwrap().to_matrix();
        let diff = (jw - dense.map(|x| Complex::new(x, 0.0))).iter().fold(0.0, |m: f64, z| m.max(z.norm()));
        prop_assert!(diff < 1e-13);
    }

    #[test]
    fn pauli_multiplication_is_associative(a in pauli_letters(3), b in pauli_letters(3), c in pauli_letters(3)) {
        let (pa, pb, pc) = (PauliString::parse(&a).unwrap(), PauliString::parse(&b).unwrap(), PauliString::parse(&c).unwrap());
        let left = pa.mul(&pb).mul(&pc);
        let right = pa.mul(&pb.mul(&pc));
        prop_assert_eq!((left.x, left.z), (right.x, right.z));
        prop_assert!((left.coeff - right.coeff).norm() < 1e-15);
        // every string squares to the identity
        let sq = pa.mul(&pa);
        prop_assert_eq!((sq.x, sq.z), (0, 0));
        prop_assert!((sq.coeff - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_in_two_coefficients_round_trip(c in unit_coefficients()) {
        let basis = SectorBasis::enumerate(2, 2, 0).unwrap();
        let back = TwoInTwoCoefficients::from_state(&basis, &c.to_state()).unwrap();
        prop_assert!((back.c_1100 - c.c_1100).abs() < 1e-15);
        prop_assert!((back.c_s - c.c_s).abs() < 1e-15);
        prop_assert!((back.c_0011 - c.c_0011).abs() < 1e-15);
        prop_assert!((c.to_state().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_determinants_match_closed_form_matrices(c in unit_coefficients()) {
        for param in Parameterization::ALL {
            let m = analytic_metric_2in2(param, &c).unwrap();
            let det = analytic_metric_det_2in2(param, c.c_1100, c.c_s, c.c_0011).unwrap();
            prop_assert!((m.determinant() - det).abs() < 1e-14);
            prop_assert!((&m - m.transpose()).amax() == 0.0);
        }
        // the naive metric is bisymmetric
        let n = analytic_metric_2in2(Parameterization::Naive, &c).unwrap();
        prop_assert!((n[(0, 0)] - n[(1, 1)]).abs() < 1e-15);
        // the projected metric is a covariance, hence positive semidefinite
        let p = analytic_metric_2in2(Parameterization::Proj, &c).unwrap();
        prop_assert!(symmetric_eigenvalues(&p)[0] > -1e-14);
    }

    #[test]
    fn response_roots_pair_up(
        a in proptest::collection::vec(-0.3..0.3f64, 9),
        b in proptest::collection::vec(-0.1..0.1f64, 9),
        s in proptest::collection::vec(-0.2..0.2f64, 9),
    ) {
        let sym = |v: &[f64], shift: f64| {
            let m = DMatrix::from_row_slice(3, 3, v);
            (&m + m.transpose()) * 0.5 + DMatrix::<f64>::identity(3, 3) * shift
        };
        let rm = ResponseMatrices::from_raw(
            Parameterization::Naive,
            sym(&a, 1.5),
            sym(&b, 0.0),
            sym(&s, 1.0),
            DMatrix::zeros(3, 3),
        ).unwrap();
        let pairs = qlrlab::linalg::generalized_eigen(&rm.e2(), &rm.s2()).unwrap();
        let mut w: Vec<f64> = pairs.iter().map(|p| p.value(1e-14).unwrap().re).collect();
        w.sort_by(f64::total_cmp);
        for i in 0..3 {
            prop_assert!((w[i] + w[5 - i]).abs() < 1e-8, "{:?}", w);
        }
        let sol = solve_response(&rm, &SolveOptions::default()).unwrap();
        prop_assert_eq!(sol.omegas.len(), 3);
        for (x, want) in sol.omegas.iter().zip(&w[3..]) {
            prop_assert!((x - want).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_estimates_are_valid_outcomes(exact in -1.0..1.0f64, shots in 1..5000u64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = sample_expectation(exact, shots, &mut rng);
        prop_assert!((-1.0..=1.0).contains(&e));
        // (e + 1)·shots/2 is the integer number of +1 outcomes
        let k = (e + 1.0) * shots as f64 / 2.0;
        prop_assert!((k - k.round()).abs() < 1e-6);
    }

    #[test]
    fn seed_derivation_is_a_pure_function(master in any::<u64>(), parts in proptest::collection::vec(any::<u64>(), 0..4)) {
        prop_assert_eq!(derive_seed(master, &parts), derive_seed(master, &parts));
    }
}

#[test]
fn two_in_two_state_layout() {
    let c = TwoInTwoCoefficients {
        c_1100: 0.6,
        c_s: 0.0,
        c_0011: -0.8,
    };
    assert_eq!(c.to_state(), DVector::from_vec(vec![0.6, 0.0, -0.0, -0.8]));
}
