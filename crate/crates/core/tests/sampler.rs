mod common;

use std::sync::Arc;

use common::random_unit_vector;
use nalgebra::{Complex, DMatrix, DVector};
use qlrlab::ansatz::{AnsatzProgram, GroundStateOptions};
use qlrlab::fockspace::{
    build_hamiltonian, hamiltonian_op, number_operator, FermionOp, Ladder, SectorBasis,
};
use qlrlab::orbrot::KappaParams;
use qlrlab::response::{
    build_excitation_basis, build_response_matrices, dipole_operators, solve_response,
    Parameterization, PropertyGradient, SolveOptions,
};
use qlrlab::sampler::{
    derive_seed, exact_pauli_expectation, jw_map, mean_std, run_noise_ensemble, sample_expectation,
    NoiseEnsembleConfig, NoisyResponseModel, PauliString, PauliTable, ShotPlan,
};
use qlrlab::systems::{helium, hydrogen_molecule, KappaPoint, System};
use qlrlab::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_diff_c(a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn real(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    m.map(|x| Complex::new(x, 0.0))
}

#[test]
fn parse_puts_qubit_zero_first() {
    let p = PauliString::parse("IXYZ").unwrap();
    assert_eq!(p.n_qubits, 4);
    assert_eq!((0..4).map(|k| p.letter(k)).collect::<String>(), "IXYZ");
    assert_eq!(p.x, 0b0110);
    assert_eq!(p.z, 0b1100);
    assert_eq!(p.to_string(), "IXYZ");
    assert!(matches!(PauliString::parse("IXA"), Err(Error::Domain(_))));
}

/// Single-qubit Pauli matrices on qubit `k` of `n` via Kronecker products (qubit 0 least significant).
fn kron_oracle(letters: &str) -> DMatrix<Complex<f64>> {
    let c = |re: f64, im: f64| Complex::new(re, im);
    let single = |ch: char| match ch {
        'I' => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
        'X' => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        'Y' => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        _ => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    };
    letters
        .chars()
        .fold(DMatrix::from_element(1, 1, c(1., 0.)), |acc, ch| {
            single(ch).kronecker(&acc)
        })
}

#[test]
fn pauli_matrices_match_kronecker_products() {
    for s in ["X", "Y", "Z", "XY", "ZIY", "YYXZ"] {
        let p = PauliString::parse(s).unwrap();
        assert!(max_diff_c(&p.to_matrix(), &kron_oracle(s)) < 1e-15, "{s}");
    }
}

#[test]
fn pauli_products_close_with_phases() {
    let letters = ['I', 'X', 'Y', 'Z'];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let a: String = (0..3).map(|_| letters[rng.random_range(0..4)]).collect();
        let b: String = (0..3).map(|_| letters[rng.random_range(0..4)]).collect();
        let (pa, pb) = (
            PauliString::parse(&a).unwrap(),
            PauliString::parse(&b).unwrap(),
        );
        let prod = pa.mul(&pb);
        assert!(
            max_diff_c(&prod.to_matrix(), &(pa.to_matrix() * pb.to_matrix())) < 1e-15,
            "{a}·{b}"
        );
        let c = prod.coeff;
        assert!((c.norm() - 1.0).abs() < 1e-15 && (c.re == 0.0 || c.im == 0.0));
    }
}

#[test]
fn number_operator_maps_to_half_identity_minus_z() {
    for k in 0..4 {
        let n_k = FermionOp::term(1.0, vec![Ladder::create(k), Ladder::annihilate(k)]);
        let s = jw_map(&n_k, 4).unwrap();
        assert_eq!(s.len(), 2);
        let z = PauliString::new(4, 0, 1 << k);
        let oracle =
            (PauliString::identity(4).to_matrix() - z.to_matrix()) * Complex::new(0.5, 0.0);
        assert!(max_diff_c(&s.to_matrix(), &oracle) < 1e-15);
    }
    let n = jw_map(&number_operator(2), 4).unwrap().to_matrix();
    for b in 0..16usize {
        assert!((n[(b, b)].re - b.count_ones() as f64).abs() < 1e-15);
    }
}

#[test]
fn jordan_wigner_hamiltonian_equals_dense_fock_matrix() {
    for sys in [helium().unwrap(), hydrogen_molecule(1.4).unwrap()] {
        let full = Arc::new(SectorBasis::full_fock(sys.n_mo()).unwrap());
        let dense = build_hamiltonian(&sys.mo, &full).unwrap().into_matrix();
        let jw = jw_map(&hamiltonian_op(&sys.mo), 2 * sys.n_mo()).unwrap();
        assert!(
            max_diff_c(&jw.to_matrix(), &real(&dense)) < 1e-10,
            "{}",
            sys.name
        );
        // Hermitian image
        let adj = jw.adjoint().to_matrix();
        assert!(max_diff_c(&adj, &jw.to_matrix()) < 1e-12);
    }
}

#[test]
fn adjoint_of_ladder_images() {
    let a = jw_map(&FermionOp::term(1.0, vec![Ladder::annihilate(2)]), 4).unwrap();
    let c = jw_map(&FermionOp::term(1.0, vec![Ladder::create(2)]), 4).unwrap();
    assert!(max_diff_c(&a.adjoint().to_matrix(), &c.to_matrix()) < 1e-15);
    assert!(max_diff_c(&a.to_matrix().adjoint(), &c.to_matrix()) < 1e-15);
    // {a, a†} = 1 survives the mapping
    let ac = a.mul(&c).to_matrix() + c.mul(&a).to_matrix();
    assert!(max_diff_c(&ac, &PauliString::identity(4).to_matrix()) < 1e-15);
}

#[test]
fn jw_rejects_too_few_qubits() {
    let op = FermionOp::term(1.0, vec![Ladder::create(5)]);
    assert!(jw_map(&op, 4).is_err());
}

#[test]
fn basic_expectations() {
    let mut psi = DVector::zeros(16);
    psi[0b0011] = 1.0;
    assert_eq!(
        exact_pauli_expectation(&psi, &PauliString::identity(4)).unwrap(),
        1.0
    );
    assert_eq!(
        exact_pauli_expectation(&psi, &PauliString::parse("ZIII").unwrap()).unwrap(),
        -1.0
    );
    assert_eq!(
        exact_pauli_expectation(&psi, &PauliString::parse("IIZI").unwrap()).unwrap(),
        1.0
    );
    assert_eq!(
        exact_pauli_expectation(&psi, &PauliString::parse("XIII").unwrap()).unwrap(),
        0.0
    );
    assert!(exact_pauli_expectation(&DVector::zeros(8), &PauliString::identity(4)).is_err());
}

#[test]
fn expectations_match_dense_quadratic_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let psi = random_unit_vector(&mut rng, 16);
    let table = PauliTable::exact(&psi).unwrap();
    let letters = ['I', 'X', 'Y', 'Z'];
    for _ in 0..100 {
        let s: String = (0..4).map(|_| letters[rng.random_range(0..4)]).collect();
        let p = PauliString::parse(&s).unwrap();
        let cpsi = real(&DMatrix::from_column_slice(16, 1, psi.as_slice()));
        let oracle = (cpsi.adjoint() * p.to_matrix() * &cpsi)[(0, 0)];
        // real states give real expectations (zero for odd Y count)
        assert!(oracle.im.abs() < 1e-14);
        assert!(
            (exact_pauli_expectation(&psi, &p).unwrap() - oracle.re).abs() < 1e-14,
            "{s}"
        );
        assert!((table.get(&p) - oracle.re).abs() < 1e-13, "{s}");
    }
    let h = jw_map(&hamiltonian_op(&helium().unwrap().mo), 4).unwrap();
    let cpsi = real(&DMatrix::from_column_slice(16, 1, psi.as_slice()));
    let oracle = (cpsi.adjoint() * h.to_matrix() * &cpsi)[(0, 0)];
    assert!((h.expectation(&psi) - oracle).norm() < 1e-12);
}

#[test]
fn deterministic_outcomes_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for shots in [1, 10, 1000] {
        assert_eq!(sample_expectation(1.0, shots, &mut rng), 1.0);
        assert_eq!(sample_expectation(-1.0, shots, &mut rng), -1.0);
    }
}

#[test]
fn sampled_expectations_are_unbiased_with_binomial_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 10_000;
    for (exact, shots) in [(0.3, 1000u64), (-0.72, 1_000_000), (0.0, 100)] {
        let sigma = ((1.0 - exact * exact) / shots as f64).sqrt();
        let xs: Vec<f64> = (0..trials)
            .map(|_| sample_expectation(exact, shots, &mut rng))
            .collect();
        let mean = xs.iter().sum::<f64>() / trials as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        assert!(
            (mean - exact).abs() < 5.0 * sigma / (trials as f64).sqrt(),
            "mean {mean} vs {exact}"
        );
        assert!(
            (var / (sigma * sigma) - 1.0).abs() < 0.1,
            "variance ratio {}",
            var / (sigma * sigma)
        );
        assert!(xs.iter().all(|x| (x - exact).abs() < 6.0 * sigma));
    }
}

#[test]
fn shot_plan_and_seeds() {
    assert!(matches!(ShotPlan::new(0, 1, 0), Err(Error::Domain(_))));
    assert!(matches!(ShotPlan::new(1, 0, 0), Err(Error::Domain(_))));
    let plan = ShotPlan::new(100, 3, 7).unwrap();
    assert_eq!(plan.derived_seed(1, 2, 3), derive_seed(7, &[1, 2, 3]));
    let mut seen = std::collections::HashSet::new();
    for s in 0..4 {
        for r in 0..4 {
            for t in 0..16 {
                assert!(seen.insert(plan.derived_seed(s, r, t)));
            }
        }
    }
    assert_ne!(derive_seed(7, &[1, 2]), derive_seed(8, &[1, 2]));
}

#[test]
fn mean_std_skips_missing_values() {
    let (m, s) = mean_std(&[Some(1.0), None, Some(3.0)]);
    assert_eq!(m, Some(2.0));
    assert!((s.unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(mean_std(&[None, None]), (None, None));
    assert_eq!(mean_std(&[Some(4.0)]), (Some(4.0), None));
}

fn tups_point(sys: &System, kappa: f64) -> KappaPoint {
    let program = AnsatzProgram::tups(&sys.sector, sys.n_occ(), 1).unwrap();
    let k = KappaParams::single(sys.n_mo(), 0, 1, kappa).unwrap();
    sys.solve_at(&k, Some(&program), &GroundStateOptions::default(), None)
        .unwrap()
}

#[test]
fn zero_noise_model_reproduces_dense_matrices() {
    for sys in [helium().unwrap(), hydrogen_molecule(1.4).unwrap()] {
        for kappa in [0.0, 0.5, -1.1] {
            let p = tups_point(&sys, kappa);
            let g = build_excitation_basis(&sys.sector, sys.reference()).unwrap();
            let dip = dipole_operators(&p.mo, &sys.sector).unwrap();
            for param in [Parameterization::Naive, Parameterization::Proj] {
                let model = NoisyResponseModel::new(param, &p.ground, &p.mo, &g).unwrap();
                let (rm, pg) = model.exact().unwrap();
                let dense = build_response_matrices(param, &p.ground, &p.h, &g).unwrap();
                for (a, b) in [
                    (&rm.a, &dense.a),
                    (&rm.b, &dense.b),
                    (&rm.sigma, &dense.sigma),
                    (&rm.delta, &dense.delta),
                ] {
                    assert!((a - b).amax() < 1e-10, "{} {param} κ={kappa}", sys.name);
                }
                let exact_pg = PropertyGradient::exact(param, &p.ground, &g, &dip).unwrap();
                for k in 0..3 {
                    assert!((&pg.v[k] - &exact_pg.v[k]).amax() < 1e-10);
                    assert!((&pg.w[k] - &exact_pg.w[k]).amax() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn unitary_parameterizations_have_no_noise_model() {
    let he = helium().unwrap();
    let p = tups_point(&he, 0.0);
    let g = build_excitation_basis(&he.sector, he.reference()).unwrap();
    for param in [Parameterization::Sc, Parameterization::St] {
        assert!(matches!(
            NoisyResponseModel::new(param, &p.ground, &p.mo, &g),
            Err(Error::Unsupported(_))
        ));
    }
}

#[test]
fn samples_are_seed_deterministic() {
    let he = helium().unwrap();
    let p = tups_point(&he, 0.5);
    let g = build_excitation_basis(&he.sector, he.reference()).unwrap();
    let model = NoisyResponseModel::new(Parameterization::Naive, &p.ground, &p.mo, &g).unwrap();
    let plan = ShotPlan::new(1000, 4, 11).unwrap();
    let (a, _) = model.sample(&plan, 0, 2).unwrap();
    let (b, _) = model.sample(&plan, 0, 2).unwrap();
    assert_eq!(a.e2(), b.e2());
    assert_eq!(a.s2(), b.s2());
    let (c, _) = model.sample(&plan, 0, 3).unwrap();
    assert_ne!(a.e2(), c.e2());
    let other = ShotPlan::new(1000, 4, 12).unwrap();
    assert_ne!(a.e2(), model.sample(&other, 0, 2).unwrap().0.e2());
}

fn omega_std(model: &NoisyResponseModel, shots: u64, reps: usize) -> f64 {
    let plan = ShotPlan::new(shots, reps, 99).unwrap();
    let omegas: Vec<Option<f64>> = (0..reps)
        .map(|r| {
            let (rm, _) = model.sample(&plan, 0, r).unwrap();
            solve_response(&rm, &SolveOptions::default())
                .unwrap()
                .lowest_real(1e-9)
        })
        .collect();
    assert!(omegas.iter().all(|w| w.is_some()));
    mean_std(&omegas).1.unwrap()
}

#[test]
fn noise_scales_with_inverse_root_of_shots() {
    let he = helium().unwrap();
    let p = tups_point(&he, 0.0);
    let g = build_excitation_basis(&he.sector, he.reference()).unwrap();
    let model = NoisyResponseModel::new(Parameterization::Naive, &p.ground, &p.mo, &g).unwrap();
    let s1 = omega_std(&model, 20_000, 400);
    let s2 = omega_std(&model, 40_000, 400);
    let ratio = s1 / s2;
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn zero_noise_ensemble_has_no_spread() {
    let he = helium().unwrap();
    let cfg = NoiseEnsembleConfig {
        params: vec![Parameterization::Naive, Parameterization::Proj],
        pq: (0, 1),
        kappas: vec![0.0, 0.5],
        layers: 1,
        plan: ShotPlan::new(1000, 3, 5).unwrap(),
        zero_noise: true,
        solve: SolveOptions::default(),
        ground: GroundStateOptions::default(),
    };
    let stats = run_noise_ensemble(&he, &cfg).unwrap();
    assert_eq!(stats.len(), 4);
    for s in &stats {
        let w0 = s.noiseless_omega.unwrap();
        assert!((s.mean_omega.unwrap() - w0).abs() < 1e-10);
        assert!(s.std_omega.unwrap() < 1e-10);
        assert_eq!(s.n_excluded, 0);
        assert_eq!(s.seed, 5);
    }
    // identical runs are bitwise identical, noisy or not
    let noisy = NoiseEnsembleConfig {
        zero_noise: false,
        ..cfg
    };
    let a = run_noise_ensemble(&he, &noisy).unwrap();
    let b = run_noise_ensemble(&he, &noisy).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.omegas, y.omegas);
    }
}
