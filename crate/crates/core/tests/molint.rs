mod common;

use common::{adaptive_simpson, gaussian_trapezoid, half_line_nodes};
use nalgebra::DMatrix;
use qlrlab::molint::{
    basis_functions, boys_f0, build_ao_integrals, builtin_basis, load_basis, parse_basis,
    AOIntegrals, ContractedShell, Molecule,
};
use qlrlab::Error;

#[test]
fn boys_at_zero_is_one() {
    assert_eq!(boys_f0(0.0).unwrap(), 1.0);
}

#[test]
fn boys_approaches_large_t_asymptote() {
    let t = 50.0;
    let asym = (std::f64::consts::PI / (4.0 * t)).sqrt();
    assert!((boys_f0(t).unwrap() / asym - 1.0).abs() < 1e-10);
}

#[test]
fn boys_matches_adaptive_quadrature() {
    for &t in &[
        1e-9, 1e-4, 0.01, 0.3, 1.0, 2.5, 7.0, 15.0, 29.9, 30.1, 45.0, 80.0,
    ] {
        let f = move |u: f64| (-t * u * u).exp();
        let oracle = adaptive_simpson(&f, 0.0, 1.0, 1e-16);
        let got = boys_f0(t).unwrap();
        assert!(
            ((got - oracle) / oracle).abs() < 1e-12,
            "t = {t}: {got} vs {oracle}"
        );
    }
}

#[test]
fn boys_rejects_negative_argument() {
    assert!(matches!(boys_f0(-1e-3), Err(Error::Domain(_))));
}

#[test]
fn sto3g_hydrogen_has_one_three_primitive_shell() {
    let b = builtin_basis("sto-3g", &["H"]).unwrap();
    let h = &b["H"];
    assert_eq!(h.len(), 1);
    assert_eq!(h[0].n_primitives(), 3);
    assert!((h[0].self_overlap() - 1.0).abs() < 1e-12);
}

#[test]
fn six31g_helium_has_split_valence_shells() {
    let b = builtin_basis("6-31g", &["He"]).unwrap();
    let he = &b["He"];
    assert_eq!(
        he.iter()
            .map(ContractedShell::n_primitives)
            .collect::<Vec<_>>(),
        vec![3, 1]
    );
    for s in he {
        assert!((s.self_overlap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn empty_basis_file_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.gbs");
    std::fs::write(&path, "").unwrap();
    assert!(matches!(
        load_basis(&path, &["H"]),
        Err(Error::BasisFormat { .. })
    ));
}

#[test]
fn p_shell_is_rejected_with_its_line() {
    let text = "H 0\nS 1 1.00\n 1.0 1.0\nP 1 1.00\n 0.8 1.0\n****\n";
    match parse_basis(text, &["H"]) {
        Err(Error::UnsupportedAngularMomentum { shell, line, .. }) => {
            assert_eq!(shell, "P");
            assert_eq!(line, 4);
        }
        other => panic!("expected an angular-momentum error, got {other:?}"),
    }
}

#[test]
fn malformed_number_reports_line() {
    let text = "H 0\nS 1 1.00\n 1.0 abc\n****\n";
    assert!(matches!(
        parse_basis(text, &["H"]),
        Err(Error::BasisFormat { line: 3, .. })
    ));
}

#[test]
fn missing_element_is_reported() {
    assert!(matches!(
        builtin_basis("sto-3g", &["Xe"]),
        Err(Error::MissingElement(_))
    ));
}

fn h2(r: f64) -> (Molecule, AOIntegrals, Vec<ContractedShell>) {
    let mol = Molecule::new(&[("H", [0.0; 3]), ("H", [0.0, 0.0, r])], 0).unwrap();
    let basis = builtin_basis("sto-3g", &["H"]).unwrap();
    let ao = build_ao_integrals(&mol, &basis).unwrap();
    let shells = basis_functions(&mol, &basis).unwrap();
    (mol, ao, shells)
}

#[test]
fn single_s_function_is_normalized() {
    let mol = Molecule::new(&[("H", [0.3, -0.2, 0.1])], -1).unwrap();
    let ao = build_ao_integrals(&mol, &builtin_basis("sto-3g", &["H"]).unwrap()).unwrap();
    assert!((ao.s[(0, 0)] - 1.0).abs() < 1e-12);
    assert!(ao.eri[[0, 0, 0, 0]] > 0.0);
}

#[test]
fn overlap_vanishes_at_large_separation() {
    let (_, ao, _) = h2(50.0);
    assert!(ao.s[(0, 1)].abs() < 1e-12);
}

#[test]
fn coincident_nuclei_are_a_geometry_error() {
    let r = Molecule::new(&[("H", [0.0; 3]), ("H", [0.0; 3])], 0);
    let err = r.and_then(|m| build_ao_integrals(&m, &builtin_basis("sto-3g", &["H"]).unwrap()));
    assert!(matches!(err, Err(Error::Geometry(_))));
}

#[test]
fn nuclear_repulsion_matches_point_charges() {
    let (mol, ao, _) = h2(1.4);
    assert!((ao.e_nuc - 1.0 / 1.4).abs() < 1e-15);
    assert_eq!(mol.nuclear_repulsion(), ao.e_nuc);
}

/// One primitive `c exp(-α |r - A|²)`.
#[derive(Clone, Copy)]
struct Prim {
    alpha: f64,
    coef: f64,
    center: [f64; 3],
}

fn prims(shell: &ContractedShell, mol: &Molecule) -> Vec<Prim> {
    let center = mol.atoms()[shell.center].position;
    shell
        .exponents
        .iter()
        .zip(&shell.coefficients)
        .map(|(&alpha, &coef)| Prim {
            alpha,
            coef,
            center,
        })
        .collect()
}

fn g1(p: &Prim, x: f64, k: usize) -> f64 {
    (-p.alpha * (x - p.center[k]).powi(2)).exp()
}

/// `∫ g_a g_b w(x) dx` along axis `k`, integrated numerically.
fn axis_integral(a: &Prim, b: &Prim, k: usize, w: impl Fn(f64) -> f64) -> f64 {
    let p = a.alpha + b.alpha;
    let c = (a.alpha * a.center[k] + b.alpha * b.center[k]) / p;
    gaussian_trapezoid(|x| g1(a, x, k) * g1(b, x, k) * w(x), c, p, 0.0)
}

fn overlap_oracle(a: &Prim, b: &Prim) -> f64 {
    (0..3).map(|k| axis_integral(a, b, k, |_| 1.0)).product()
}

/// `-½ ⟨a|∇²|b⟩` with `∇² g_b = Σ_k (4β²(x_k−B_k)² − 2β) g_b`.
fn kinetic_oracle(a: &Prim, b: &Prim) -> f64 {
    let s: Vec<f64> = (0..3).map(|k| axis_integral(a, b, k, |_| 1.0)).collect();
    let beta = b.alpha;
    (0..3)
        .map(|k| {
            let d2 = axis_integral(a, b, k, |x| {
                4.0 * beta * beta * (x - b.center[k]).powi(2) - 2.0 * beta
            });
            -0.5 * d2 * s[(k + 1) % 3] * s[(k + 2) % 3]
        })
        .sum()
}

/// `⟨a| 1/|r − C| |b⟩` via `1/r = (2/√π) ∫₀^∞ exp(−s² r²) ds`, every integral numerical.
fn coulomb_oracle(a: &Prim, b: &Prim, c: [f64; 3], nodes: &[(f64, f64)]) -> f64 {
    let p = a.alpha + b.alpha;
    let mut total = 0.0;
    for &(s, w) in nodes {
        let s2 = s * s;
        let mut prod = 1.0;
        for k in 0..3 {
            let q = p + s2;
            let centre = (a.alpha * a.center[k] + b.alpha * b.center[k] + s2 * c[k]) / q;
            prod *= gaussian_trapezoid(
                |x| g1(a, x, k) * g1(b, x, k) * (-s2 * (x - c[k]).powi(2)).exp(),
                centre,
                q,
                0.0,
            );
        }
        total += w * prod;
    }
    2.0 / std::f64::consts::PI.sqrt() * total
}

/// `(ab|cd)` with the same kernel representation and a nested 2-D trapezoid per axis.
fn eri_oracle(a: &Prim, b: &Prim, c: &Prim, d: &Prim, nodes: &[(f64, f64)]) -> f64 {
    let p = a.alpha + b.alpha;
    let q = c.alpha + d.alpha;
    let mut total = 0.0;
    for &(s, w) in nodes {
        let s2 = s * s;
        let mut prod = 1.0;
        let mut previous: Option<(usize, f64)> = None;
        for k in 0..3 {
            // identical coordinates along two axes give identical factors
            if let Some((j, v)) = previous {
                if [a, b, c, d].iter().all(|p| p.center[k] == p.center[j]) {
                    prod *= v;
                    continue;
                }
            }
            let pc = (a.alpha * a.center[k] + b.alpha * b.center[k]) / p;
            let qc = (c.alpha * c.center[k] + d.alpha * d.center[k]) / q;
            let inner = |x1: f64| {
                let prec = q + s2;
                let centre = (q * qc + s2 * x1) / prec;
                gaussian_trapezoid(
                    |x2| g1(c, x2, k) * g1(d, x2, k) * (-s2 * (x1 - x2).powi(2)).exp(),
                    centre,
                    prec,
                    0.0,
                )
            };
            let outer_prec = p + q;
            let lo = pc.min(qc);
            let hi = pc.max(qc);
            let extra = 0.5 * (hi - lo) + 9.5 * (1.0 / p.sqrt() - 1.0 / outer_prec.sqrt()).max(0.0);
            let v = gaussian_trapezoid(
                |x1| g1(a, x1, k) * g1(b, x1, k) * inner(x1),
                0.5 * (lo + hi),
                outer_prec,
                extra,
            );
            prod *= v;
            previous = Some((k, v));
        }
        total += w * prod;
    }
    2.0 / std::f64::consts::PI.sqrt() * total
}

fn contract2(sa: &[Prim], sb: &[Prim], f: impl Fn(&Prim, &Prim) -> f64) -> f64 {
    let mut v = 0.0;
    for a in sa {
        for b in sb {
            v += a.coef * b.coef * f(a, b);
        }
    }
    v
}

#[test]
fn h2_one_electron_integrals_match_quadrature() {
    let (mol, ao, shells) = h2(1.4);
    let nodes = half_line_nodes();
    let p: Vec<Vec<Prim>> = shells.iter().map(|s| prims(s, &mol)).collect();
    for i in 0..2 {
        for j in 0..2 {
            let s = contract2(&p[i], &p[j], overlap_oracle);
            let t = contract2(&p[i], &p[j], kinetic_oracle);
            let v: f64 = mol
                .atoms()
                .iter()
                .map(|atom| {
                    -(atom.charge as f64)
                        * contract2(&p[i], &p[j], |a, b| {
                            coulomb_oracle(a, b, atom.position, &nodes)
                        })
                })
                .sum();
            let z = contract2(&p[i], &p[j], |a, b| {
                axis_integral(a, b, 2, |x| x)
                    * axis_integral(a, b, 0, |_| 1.0)
                    * axis_integral(a, b, 1, |_| 1.0)
            });
            assert!(
                (ao.s[(i, j)] - s).abs() < 1e-8,
                "S[{i}{j}] {} vs {s}",
                ao.s[(i, j)]
            );
            assert!(
                (ao.t[(i, j)] - t).abs() < 1e-8,
                "T[{i}{j}] {} vs {t}",
                ao.t[(i, j)]
            );
            assert!(
                (ao.v[(i, j)] - v).abs() < 1e-8,
                "V[{i}{j}] {} vs {v}",
                ao.v[(i, j)]
            );
            assert!(
                (ao.dipole[2][(i, j)] - z).abs() < 1e-8,
                "z[{i}{j}] {} vs {z}",
                ao.dipole[2][(i, j)]
            );
            assert!(ao.dipole[0][(i, j)].abs() < 1e-12 && ao.dipole[1][(i, j)].abs() < 1e-12);
        }
    }
}

#[test]
fn h2_two_electron_integrals_match_quadrature() {
    let (mol, ao, shells) = h2(1.4);
    let nodes = half_line_nodes();
    let p: Vec<Vec<Prim>> = shells.iter().map(|s| prims(s, &mol)).collect();
    for &(i, j, k, l) in &[(0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 0, 1), (0, 0, 0, 1)] {
        let mut v = 0.0;
        for a in &p[i] {
            for b in &p[j] {
                for c in &p[k] {
                    for d in &p[l] {
                        v += a.coef * b.coef * c.coef * d.coef * eri_oracle(a, b, c, d, &nodes);
                    }
                }
            }
        }
        let got = ao.eri[[i, j, k, l]];
        assert!((got - v).abs() < 1e-8, "({i}{j}|{k}{l}) {got} vs {v}");
    }
}

fn eri_symmetry_residual(ao: &AOIntegrals) -> f64 {
    let n = ao.n_ao;
    let mut worst: f64 = 0.0;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ao.eri[[p, q, r, s]];
                    for w in [
                        ao.eri[[q, p, r, s]],
                        ao.eri[[p, q, s, r]],
                        ao.eri[[q, p, s, r]],
                        ao.eri[[r, s, p, q]],
                        ao.eri[[s, r, p, q]],
                        ao.eri[[r, s, q, p]],
                        ao.eri[[s, r, q, p]],
                    ] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
    }
    worst
}

fn h4_molecule(shift: [f64; 3]) -> Molecule {
    let pts = [
        [0.0, 0.0, 0.0],
        [1.5, 0.0, 0.0],
        [0.0, 1.8, 0.0],
        [1.5, 1.8, 0.0],
    ];
    let atoms: Vec<(&str, [f64; 3])> = pts
        .iter()
        .map(|p| ("H", [p[0] + shift[0], p[1] + shift[1], p[2] + shift[2]]))
        .collect();
    Molecule::from_angstrom(&atoms, 0).unwrap()
}

#[test]
fn ao_integral_symmetries_and_positive_overlap() {
    let mol = h4_molecule([0.0; 3]);
    let ao = build_ao_integrals(&mol, &builtin_basis("sto-3g", &["H"]).unwrap()).unwrap();
    for m in [
        &ao.s,
        &ao.t,
        &ao.v,
        &ao.dipole[0],
        &ao.dipole[1],
        &ao.dipole[2],
    ] {
        assert!((m - m.transpose()).amax() < 1e-14);
    }
    assert!(eri_symmetry_residual(&ao) < 1e-14);
    let min_eig = ao.s.clone().symmetric_eigen().eigenvalues.min();
    assert!(min_eig > 0.0);
    for i in 0..ao.n_ao {
        assert!((ao.s[(i, i)] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn translation_leaves_integrals_unchanged_and_shifts_dipoles() {
    let basis = builtin_basis("sto-3g", &["H"]).unwrap();
    let shift = [0.7, -1.3, 2.1];
    let a = build_ao_integrals(&h4_molecule([0.0; 3]), &basis).unwrap();
    let mol_b = h4_molecule([0.0; 3]).translated(shift);
    let b = build_ao_integrals(&mol_b, &basis).unwrap();
    let close = |x: &DMatrix<f64>, y: &DMatrix<f64>| (x - y).amax() < 1e-12;
    assert!(close(&a.s, &b.s) && close(&a.t, &b.t) && close(&a.v, &b.v));
    assert!((&a.eri - &b.eri).iter().all(|d| d.abs() < 1e-12));
    assert!((a.e_nuc - b.e_nuc).abs() < 1e-12);
    for k in 0..3 {
        assert!(close(&(&a.dipole[k] + &a.s * shift[k]), &b.dipole[k]));
    }
}

#[test]
fn nuclear_repulsion_is_order_independent() {
    let a = Molecule::new(
        &[
            ("H", [0.0; 3]),
            ("He", [0.0, 0.0, 1.1]),
            ("H", [0.9, 0.4, -0.2]),
        ],
        0,
    )
    .unwrap();
    let b = Molecule::new(
        &[
            ("H", [0.9, 0.4, -0.2]),
            ("H", [0.0; 3]),
            ("He", [0.0, 0.0, 1.1]),
        ],
        0,
    )
    .unwrap();
    assert!((a.nuclear_repulsion() - b.nuclear_repulsion()).abs() < 1e-14);
}
