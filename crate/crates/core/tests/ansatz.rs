mod common;

use std::sync::Arc;

use common::random_unit_vector;
use nalgebra::{Complex, DMatrix};
use qlrlab::ansatz::{
    build_cluster_generators, check_kappa_redundancy, optimize_ground_state, AnsatzProgram,
    ClusterGenerator, ExcitationLabel, GroundStateOptions, Truncation,
};
use qlrlab::fockspace::{
    build_excitation_matrix, number_operator, sz_operator, ExcitationKind, Hermiticity,
    OperatorMatrix, SectorBasis,
};
use qlrlab::systems::{h4_rectangle, helium, System};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fci_energy(sys: &System) -> f64 {
    sys.solve_at(&sys.zero_kappa(), None, &Default::default(), None)
        .unwrap()
        .fci
        .e0
}

fn kappa_grid(n: usize) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    (0..n)
        .map(|i| -pi + 2.0 * pi * i as f64 / (n - 1) as f64)
        .collect()
}

#[test]
fn two_in_two_has_one_single_and_one_double() {
    let he = helium().unwrap();
    let set =
        build_cluster_generators(&he.sector, he.reference(), Truncation::SinglesDoubles).unwrap();
    let labels: Vec<_> = set.generators.iter().map(|g| g.label).collect();
    assert_eq!(
        labels,
        [
            ExcitationLabel::Single { i: 0, a: 1 },
            ExcitationLabel::Double {
                i: 0,
                j: 0,
                a: 1,
                b: 1
            }
        ]
    );
    for m in set.matrices() {
        assert!((&m + m.transpose()).amax() < 1e-15);
    }
}

#[test]
fn h4_generator_counts() {
    let h4 = h4_rectangle(1.5, 1.8).unwrap();
    let count = |t| {
        build_cluster_generators(&h4.sector, h4.reference(), t)
            .unwrap()
            .len()
    };
    // 4 singles; doubles: 3 (i≤j) × 3 (a≤b) = 9 plus 1 primed
    assert_eq!(count(Truncation::Singles), 4);
    assert_eq!(count(Truncation::Doubles), 10);
    assert_eq!(count(Truncation::SinglesDoubles), 14);
}

#[test]
fn single_excitation_is_scaled_singlet_operator() {
    let h4 = h4_rectangle(1.5, 1.8).unwrap();
    for (i, a) in [(0, 2), (1, 3), (0, 3)] {
        let t = ExcitationLabel::Single { i, a }
            .matrix(&h4.sector)
            .unwrap()
            .into_matrix();
        let e = build_excitation_matrix(&h4.sector, ExcitationKind::Singlet(a, i))
            .unwrap()
            .into_matrix();
        assert!((t - e * std::f64::consts::FRAC_1_SQRT_2).amax() < 1e-15);
    }
}

#[test]
fn paired_double_moves_both_electrons() {
    let he = helium().unwrap();
    let t = ExcitationLabel::Double {
        i: 0,
        j: 0,
        a: 1,
        b: 1,
    }
    .matrix(&he.sector)
    .unwrap()
    .into_matrix();
    let from = he.sector.index_of(0b0011).unwrap();
    let to = he.sector.index_of(0b1100).unwrap();
    // (E_10 E_10)/2 |1100⟩ = |0011⟩ with unit amplitude
    assert!((t[(to, from)].abs() - 1.0).abs() < 1e-14);
    assert!((t.column(from).norm() - 1.0).abs() < 1e-14);
}

#[test]
fn zero_parameters_give_the_reference() {
    let h4 = h4_rectangle(1.5, 1.8).unwrap();
    for program in [
        AnsatzProgram::uccsd(&h4.sector, 2).unwrap(),
        AnsatzProgram::tups(&h4.sector, 2, 2).unwrap(),
    ] {
        let psi = program.state(&vec![0.0; program.n_params()]).unwrap();
        let i = h4.sector.index_of(h4.reference()).unwrap();
        assert!((psi[i] - 1.0).abs() < 1e-14, "{}", psi[i] - 1.0);
        assert!((psi.norm() - 1.0).abs() < 1e-14);
        let h = h4.hamiltonian(&h4.zero_kappa()).unwrap();
        let e = program
            .energy(h.matrix(), &vec![0.0; program.n_params()])
            .unwrap();
        assert!((e - h4.scf.e_hf).abs() < 1e-10);
    }
}

#[test]
fn generators_preserve_particle_number_and_spin() {
    let full = Arc::new(SectorBasis::full_fock(3).unwrap());
    let n = OperatorMatrix::from_fermion_op(&full, &number_operator(3), Hermiticity::General)
        .unwrap()
        .into_matrix();
    let sz = OperatorMatrix::from_fermion_op(&full, &sz_operator(3), Hermiticity::General)
        .unwrap()
        .into_matrix();
    let set = build_cluster_generators(
        &full,
        SectorBasis::closed_shell_reference(1),
        Truncation::SinglesDoubles,
    )
    .unwrap();
    assert!(!set.is_empty());
    for g in set.matrices() {
        assert!((&g * &n - &n * &g).amax() < 1e-14);
        assert!((&g * &sz - &sz * &g).amax() < 1e-14);
    }
}

/// `exp(θσ) = exp(−iθ·(iσ))` through the Hermitian eigendecomposition of `iσ`.
fn exp_via_hermitian(sigma: &DMatrix<f64>, theta: f64) -> DMatrix<f64> {
    let h: DMatrix<Complex<f64>> = sigma.map(|x| Complex::new(0.0, x));
    let eig = h.symmetric_eigen();
    let phases = eig.eigenvalues.map(|l| Complex::new(0.0, -theta * l).exp());
    let u = &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
    assert!(u.map(|z| z.im.abs()).amax() < 1e-12);
    u.map(|z| z.re)
}

#[test]
fn single_generator_exponential_matches_spectral_oracle() {
    let h4 = h4_rectangle(1.5, 1.8).unwrap();
    let set =
        build_cluster_generators(&h4.sector, h4.reference(), Truncation::SinglesDoubles).unwrap();
    for (k, g) in set.generators.iter().enumerate() {
        let program =
            AnsatzProgram::single_exponential(&h4.sector, h4.reference(), vec![g.clone()]).unwrap();
        for theta in [0.3, -1.7, 2.9] {
            let u = program.unitary(&[theta]).unwrap();
            let oracle = exp_via_hermitian(g.matrix.matrix(), theta);
            assert!((u - oracle).amax() < 1e-12, "generator {k} at {theta}");
        }
    }
}

#[test]
fn ansatz_unitaries_are_orthogonal() {
    let h4 = h4_rectangle(1.5, 1.8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for program in [
        AnsatzProgram::uccsd(&h4.sector, 2).unwrap(),
        AnsatzProgram::tups(&h4.sector, 2, 3).unwrap(),
    ] {
        let theta: Vec<f64> = (0..program.n_params())
            .map(|_| rng.random_range(-1.5..1.5))
            .collect();
        let u = program.unitary(&theta).unwrap();
        let d = u.nrows();
        assert!((u.transpose() * &u - DMatrix::<f64>::identity(d, d)).amax() < 1e-12);
        let psi = program.state(&theta).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn generator_exponentials_do_not_commute() {
    let h4 = h4_rectangle(1.5, 1.8).unwrap();
    let a = ClusterGenerator::new(&h4.sector, ExcitationLabel::Single { i: 1, a: 2 }).unwrap();
    let b = ClusterGenerator::new(&h4.sector, ExcitationLabel::Single { i: 0, a: 2 }).unwrap();
    let (ma, mb) = (a.matrix.matrix() * 0.7, b.matrix.matrix() * 0.9);
    let separate = exp_via_hermitian(&ma, 1.0) * exp_via_hermitian(&mb, 1.0);
    let joint = exp_via_hermitian(&(&ma + &mb), 1.0);
    assert!((separate - joint).amax() > 1e-6);
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let h4 = h4_rectangle(1.5, 1.8).unwrap();
    let h = h4.hamiltonian(&h4.zero_kappa()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for program in [
        AnsatzProgram::uccsd(&h4.sector, 2).unwrap(),
        AnsatzProgram::tups(&h4.sector, 2, 2).unwrap(),
    ] {
        let theta: Vec<f64> = (0..program.n_params())
            .map(|_| rng.random_range(-0.8..0.8))
            .collect();
        let (e, grad) = program.energy_and_gradient(h.matrix(), &theta).unwrap();
        assert!((e - program.energy(h.matrix(), &theta).unwrap()).abs() < 1e-13);
        let step = 1e-5;
        for k in 0..theta.len() {
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[k] += step;
            tm[k] -= step;
            let fd = (program.energy(h.matrix(), &tp).unwrap()
                - program.energy(h.matrix(), &tm).unwrap())
                / (2.0 * step);
            assert!((fd - grad[k]).abs() < 1e-8, "slot {k}: {fd} vs {}", grad[k]);
        }
    }
}

#[test]
fn energy_is_a_rayleigh_quotient() {
    let he = helium().unwrap();
    let h = he.hamiltonian(&he.zero_kappa()).unwrap();
    let program = AnsatzProgram::uccsd(&he.sector, 1).unwrap();
    let theta = [0.4, -0.25];
    let psi = program.state(&theta).unwrap();
    let e = program.energy(h.matrix(), &theta).unwrap();
    assert!((e - psi.dot(&(h.matrix() * &psi))).abs() < 1e-13);
    // any normalized vector lies above the ground state
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = random_unit_vector(&mut rng, he.sector.dim());
    assert!(v.dot(&(h.matrix() * &v)) >= fci_energy(&he) - 1e-12);
}

#[test]
fn helium_ansatze_reach_fci() {
    let he = helium().unwrap();
    let e_fci = fci_energy(&he);
    let h = he.hamiltonian(&he.zero_kappa()).unwrap();
    let opts = GroundStateOptions::default();
    for program in [
        AnsatzProgram::uccsd(&he.sector, 1).unwrap(),
        AnsatzProgram::tups(&he.sector, 1, 1).unwrap(),
    ] {
        let gs = optimize_ground_state(&program, &h, &opts, Some(e_fci)).unwrap();
        assert!(
            (gs.energy - e_fci).abs() < 1e-9,
            "{:?}: {} vs {e_fci}",
            program.kind(),
            gs.energy
        );
        assert!((gs.state.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn h4_tups_three_layers_reaches_fci() {
    let h4 = h4_rectangle(1.5, 1.8).unwrap();
    let e_fci = fci_energy(&h4);
    let h = h4.hamiltonian(&h4.zero_kappa()).unwrap();
    let program = AnsatzProgram::tups(&h4.sector, 2, 3).unwrap();
    assert_eq!(program.n_params(), 27);
    let gs =
        optimize_ground_state(&program, &h, &GroundStateOptions::default(), Some(e_fci)).unwrap();
    assert!((gs.energy - e_fci).abs() < 1e-7, "{} vs {e_fci}", gs.energy);
}

#[test]
fn empty_program_returns_reference_energy() {
    let he = helium().unwrap();
    let program =
        AnsatzProgram::single_exponential(&he.sector, he.reference(), Vec::new()).unwrap();
    assert_eq!(program.n_params(), 0);
    let h = he.hamiltonian(&he.zero_kappa()).unwrap();
    let gs = optimize_ground_state(&program, &h, &GroundStateOptions::default(), None).unwrap();
    assert!((gs.energy - he.scf.e_hf).abs() < 1e-10);
}

#[test]
fn helium_uccsd_is_kappa_redundant() {
    let he = helium().unwrap();
    let program = AnsatzProgram::uccsd(&he.sector, 1).unwrap();
    let h = he.hamiltonian(&he.zero_kappa()).unwrap();
    let opts = GroundStateOptions::default();
    let baseline = optimize_ground_state(&program, &h, &opts, Some(fci_energy(&he))).unwrap();
    let report =
        check_kappa_redundancy(&program, &he.mo, (0, 1), &kappa_grid(33), &baseline, &opts)
            .unwrap();
    assert_eq!(report.points.len(), 33);
    assert!(report.redundant, "max deviation {}", report.max_deviation);
}

#[test]
fn doubles_only_ansatz_is_not_kappa_redundant() {
    let he = helium().unwrap();
    let program = AnsatzProgram::ucc(&he.sector, 1, Truncation::Doubles).unwrap();
    assert_eq!(program.n_params(), 1);
    let h = he.hamiltonian(&he.zero_kappa()).unwrap();
    let opts = GroundStateOptions::default();
    let baseline = optimize_ground_state(&program, &h, &opts, None).unwrap();
    let report =
        check_kappa_redundancy(&program, &he.mo, (0, 1), &kappa_grid(33), &baseline, &opts)
            .unwrap();
    assert!(!report.redundant);
    assert!(report.max_deviation > 1e-4, "{}", report.max_deviation);
}

/// With two electrons in two orbitals a singlet single excitation is an
/// orbital rotation of the reference, so singles alone absorb `κ`.
#[test]
fn singles_only_two_in_two_is_kappa_redundant() {
    let he = helium().unwrap();
    let program = AnsatzProgram::ucc(&he.sector, 1, Truncation::Singles).unwrap();
    let h = he.hamiltonian(&he.zero_kappa()).unwrap();
    let opts = GroundStateOptions::default();
    let baseline = optimize_ground_state(&program, &h, &opts, None).unwrap();
    let report =
        check_kappa_redundancy(&program, &he.mo, (0, 1), &kappa_grid(33), &baseline, &opts)
            .unwrap();
    assert!(report.redundant, "{}", report.max_deviation);
}

#[test]
fn redundancy_rejects_bad_inputs() {
    let he = helium().unwrap();
    let program = AnsatzProgram::uccsd(&he.sector, 1).unwrap();
    let h = he.hamiltonian(&he.zero_kappa()).unwrap();
    let opts = GroundStateOptions::default();
    let baseline = optimize_ground_state(&program, &h, &opts, None).unwrap();
    assert!(check_kappa_redundancy(&program, &he.mo, (1, 0), &[0.0], &baseline, &opts).is_err());
    let tups = AnsatzProgram::tups(&he.sector, 1, 1).unwrap();
    assert!(check_kappa_redundancy(&tups, &he.mo, (0, 1), &[0.0], &baseline, &opts).is_err());
}
