use std::f64::consts::PI;

use nalgebra::DMatrix;
use ndarray::Array4;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::molint::basis::{BasisSet, ContractedShell};
use crate::molint::boys::boys_f0_unchecked;
use crate::molint::molecule::{dist2, Molecule};

/// Atomic-orbital integrals in atomic units. ERIs use chemists' notation `(pq|rs)`.
#[derive(Debug, Clone)]
pub struct AOIntegrals {
    pub n_ao: usize,
    pub s: DMatrix<f64>,
    pub t: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub eri: Array4<f64>,
    /// Position-operator matrices `<p|x|q>`, `<p|y|q>`, `<p|z|q>` about the origin.
    pub dipole: [DMatrix<f64>; 3],
    pub e_nuc: f64,
}

impl AOIntegrals {
    /// Core Hamiltonian `T + V`.
    pub fn core_hamiltonian(&self) -> DMatrix<f64> {
        &self.t + &self.v
    }
}

/// Shells of the molecule in atom order, each tagged with its atom index.
pub fn basis_functions(molecule: &Molecule, basis: &BasisSet) -> Result<Vec<ContractedShell>> {
    let mut out = Vec::new();
    for (idx, atom) in molecule.atoms().iter().enumerate() {
        let shells = basis
            .get(&atom.symbol)
            .ok_or_else(|| Error::MissingElement(atom.symbol.clone()))?;
        out.extend(shells.iter().map(|s| s.on_center(idx)));
    }
    Ok(out)
}

struct Prim {
    alpha: f64,
    coef: f64,
    center: [f64; 3],
}

struct Pair {
    p: f64,
    centre: [f64; 3],
    /// `c_a c_b exp(-μ R_AB²)`
    prefactor: f64,
    mu: f64,
    /// `μ R_AB²`
    mu_r2: f64,
}

fn primitives(shell: &ContractedShell, molecule: &Molecule) -> Vec<Prim> {
    let center = molecule.atoms()[shell.center].position;
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

fn pairs(a: &[Prim], b: &[Prim]) -> Vec<Pair> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for pa in a {
        for pb in b {
            let p = pa.alpha + pb.alpha;
            let mu = pa.alpha * pb.alpha / p;
            let r2 = dist2(&pa.center, &pb.center);
            let centre = [0, 1, 2].map(|k| (pa.alpha * pa.center[k] + pb.alpha * pb.center[k]) / p);
            out.push(Pair {
                p,
                centre,
                prefactor: pa.coef * pb.coef * (-mu * r2).exp(),
                mu,
                mu_r2: mu * r2,
            });
        }
    }
    out
}

/// Fills every AO integral for an all-s basis.
pub fn build_ao_integrals(molecule: &Molecule, basis: &BasisSet) -> Result<AOIntegrals> {
    let shells = basis_functions(molecule, basis)?;
    let n = shells.len();
    if n == 0 {
        return Err(Error::Precondition(
            "molecule has no basis functions".into(),
        ));
    }
    let e_nuc = molecule.nuclear_repulsion();
    if !e_nuc.is_finite() {
        return Err(Error::Geometry("nuclear repulsion is not finite".into()));
    }
    let prims: Vec<Vec<Prim>> = shells.iter().map(|s| primitives(s, molecule)).collect();
    let pair_data: Vec<Vec<Pair>> = (0..n * n)
        .map(|ij| pairs(&prims[ij / n], &prims[ij % n]))
        .collect();

    let mut s = DMatrix::zeros(n, n);
    let mut t = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    let mut dipole = [
        DMatrix::zeros(n, n),
        DMatrix::zeros(n, n),
        DMatrix::zeros(n, n),
    ];
    for i in 0..n {
        for j in 0..=i {
            let (mut sij, mut tij, mut vij) = (0.0, 0.0, 0.0);
            let mut dij = [0.0; 3];
            for pr in &pair_data[i * n + j] {
                let ov = pr.prefactor * (PI / pr.p).powf(1.5);
                sij += ov;
                tij += pr.mu * (3.0 - 2.0 * pr.mu_r2) * ov;
                for k in 0..3 {
                    dij[k] += pr.centre[k] * ov;
                }
                for atom in molecule.atoms() {
                    let arg = pr.p * dist2(&pr.centre, &atom.position);
                    vij -= atom.charge as f64 * 2.0 * PI / pr.p
                        * pr.prefactor
                        * boys_f0_unchecked(arg);
                }
            }
            for (m, val) in [(&mut s, sij), (&mut t, tij), (&mut v, vij)] {
                m[(i, j)] = val;
                m[(j, i)] = val;
            }
            for k in 0..3 {
                dipole[k][(i, j)] = dij[k];
                dipole[k][(j, i)] = dij[k];
            }
        }
    }

    let eri = electron_repulsion(n, &pair_data);
    Ok(AOIntegrals {
        n_ao: n,
        s,
        t,
        v,
        eri,
        dipole,
        e_nuc,
    })
}

fn electron_repulsion(n: usize, pair_data: &[Vec<Pair>]) -> Array4<f64> {
    let unique: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let values: Vec<Vec<f64>> = unique
        .par_iter()
        .enumerate()
        .map(|(ij, &(i, j))| {
            unique[..=ij]
                .iter()
                .map(|&(k, l)| eri_contracted(&pair_data[i * n + j], &pair_data[k * n + l]))
                .collect()
        })
        .collect();
    let mut eri = Array4::zeros((n, n, n, n));
    for (ij, &(i, j)) in unique.iter().enumerate() {
        for (kl, &(k, l)) in unique[..=ij].iter().enumerate() {
            let val = values[ij][kl];
            for (a, b, c, d) in [
                (i, j, k, l),
                (j, i, k, l),
                (i, j, l, k),
                (j, i, l, k),
                (k, l, i, j),
                (l, k, i, j),
                (k, l, j, i),
                (l, k, j, i),
            ] {
                eri[[a, b, c, d]] = val;
            }
        }
    }
    eri
}

fn eri_contracted(bra: &[Pair], ket: &[Pair]) -> f64 {
    let mut sum = 0.0;
    for a in bra {
        for b in ket {
            let pq = a.p + b.p;
            let rho = a.p * b.p / pq;
            let arg = rho * dist2(&a.centre, &b.centre);
            sum += a.prefactor * b.prefactor * 2.0 * PI.powf(2.5) / (a.p * b.p * pq.sqrt())
                * boys_f0_unchecked(arg);
        }
    }
    sum
}
