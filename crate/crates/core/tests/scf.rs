mod common;

use common::inverse_sqrt;
use nalgebra::{DMatrix, DVector};
use qlrlab::molint::{build_ao_integrals, builtin_basis, AOIntegrals, Molecule};
use qlrlab::scf::{rhf_solve, ScfOptions};
use qlrlab::systems::{h4_rectangle, helium, hydrogen_molecule};
use qlrlab::Error;

/// Closed-shell energy with one doubly occupied orbital `c`, evaluated directly.
fn one_orbital_energy(ao: &AOIntegrals, c: &DVector<f64>) -> f64 {
    let h = ao.core_hamiltonian();
    let n = ao.n_ao;
    let mut j = 0.0;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    j += c[p] * c[q] * c[r] * c[s] * ao.eri[[p, q, r, s]];
                }
            }
        }
    }
    2.0 * c.dot(&(&h * c)) + j + ao.e_nuc
}

#[test]
fn helium_energy_matches_rotation_scan() {
    let he = helium().unwrap();
    let ao = &he.ao;
    assert_eq!(ao.n_ao, 2);
    let x = inverse_sqrt(&ao.s);
    let energy =
        |phi: f64| one_orbital_energy(ao, &(&x * DVector::from_vec(vec![phi.cos(), phi.sin()])));
    let n = 4000;
    let step = std::f64::consts::PI / n as f64;
    let best = (0..n)
        .map(|i| i as f64 * step)
        .min_by(|a, b| energy(*a).total_cmp(&energy(*b)))
        .unwrap();
    // golden-section refinement inside the bracketing cell
    let (mut lo, mut hi) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if energy(m1) < energy(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let oracle = energy(0.5 * (lo + hi));
    assert!(
        (he.scf.e_hf - oracle).abs() < 1e-8,
        "{} vs {oracle}",
        he.scf.e_hf
    );
}

/// At 50 bohr the orbitals are the symmetric/antisymmetric AO combinations
/// and their one-electron energies coincide. The Fock eigenvalues differ by
/// exactly `1/R`: with on-site repulsion `U` and `(aa|bb) = 1/R`,
/// `ε_g = h + U/2 + 1/(2R)` and `ε_u = h + U/2 + 3/(2R)`.
#[test]
fn stretched_h2_orbitals_are_symmetric_combinations() {
    let r = 50.0;
    let h2 = hydrogen_molecule(r).unwrap();
    let c = &h2.scf.c;
    for col in c.column_iter() {
        assert!((col[0].abs() - col[1].abs()).abs() < 1e-6);
    }
    let h = &h2.mo.h;
    assert!((h[(0, 0)] - h[(1, 1)]).abs() < 1e-6, "{h}");
    let e = &h2.scf.orbital_energies;
    assert!((e[1] - e[0] - 1.0 / r).abs() < 1e-6, "{e}");
}

#[test]
fn odd_electron_count_is_rejected() {
    let mol = Molecule::new(&[("H", [0.0; 3]), ("H", [0.0, 0.0, 1.4])], 0).unwrap();
    let ao = build_ao_integrals(&mol, &builtin_basis("sto-3g", &["H"]).unwrap()).unwrap();
    assert!(matches!(
        rhf_solve(&ao, 3, &ScfOptions::default()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn too_many_electrons_are_rejected() {
    let mol = Molecule::new(&[("H", [0.0; 3]), ("H", [0.0, 0.0, 1.4])], 0).unwrap();
    let ao = build_ao_integrals(&mol, &builtin_basis("sto-3g", &["H"]).unwrap()).unwrap();
    assert!(rhf_solve(&ao, 6, &ScfOptions::default()).is_err());
}

#[test]
fn non_convergence_is_reported() {
    let h4 = h4_rectangle(1.5, 1.8).unwrap();
    let opts = ScfOptions {
        max_iter: 1,
        ..ScfOptions::default()
    };
    let res = rhf_solve(&h4.ao, 4, &opts).unwrap();
    assert!(!res.converged);
    assert!(matches!(
        res.require_converged(),
        Err(Error::OptimizationFailed(_))
    ));
}

#[test]
fn orbitals_are_orthonormal_and_density_idempotent() {
    let systems = [
        helium().unwrap(),
        hydrogen_molecule(1.4).unwrap(),
        h4_rectangle(1.5, 1.8).unwrap(),
    ];
    for sys in &systems {
        let c = &sys.scf.c;
        let s = &sys.ao.s;
        let n = c.ncols();
        assert!(
            (c.transpose() * s * c - DMatrix::<f64>::identity(n, n)).amax() < 1e-10,
            "{}",
            sys.name
        );
        let d = sys.scf.density();
        assert!((&d * s * &d - &d * 2.0).amax() < 1e-8, "{}", sys.name);
        // phase convention: largest-magnitude coefficient positive
        for col in c.column_iter() {
            let top = col.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let first = col
                .iter()
                .copied()
                .find(|v| v.abs() >= top - 1e-12)
                .unwrap();
            assert!(first > 0.0);
        }
        // Aufbau ordering
        let e = &sys.scf.orbital_energies;
        assert!(e.as_slice().windows(2).all(|w| w[0] <= w[1] + 1e-12));
    }
}

#[test]
fn hartree_fock_lies_above_fci() {
    let mut systems = vec![helium().unwrap(), h4_rectangle(1.5, 1.8).unwrap()];
    for r in [0.8, 1.4, 2.5, 4.0, 8.0] {
        systems.push(hydrogen_molecule(r).unwrap());
    }
    for sys in &systems {
        let fci = sys
            .solve_at(&sys.zero_kappa(), None, &Default::default(), None)
            .unwrap()
            .fci;
        assert!(
            sys.scf.e_hf >= fci.e0 - 1e-12,
            "{}: {} < {}",
            sys.name,
            sys.scf.e_hf,
            fci.e0
        );
    }
}
