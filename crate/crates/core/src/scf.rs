//! Closed-shell restricted Hartree–Fock.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{expm, inverse_sqrt_spd, max_abs, sym_eigen_sorted};
use crate::molint::AOIntegrals;

/// Largest tolerated condition number of the AO overlap.
pub const MAX_OVERLAP_COND: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfOptions {
    pub max_iter: usize,
    /// Bound on `max |FDS − SDF|`.
    pub conv_threshold: f64,
    pub energy_threshold: f64,
    /// Weight of the previous density while damping is active.
    pub damping: f64,
    pub damping_iterations: usize,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            conv_threshold: 1e-10,
            energy_threshold: 1e-12,
            damping: 0.5,
            damping_iterations: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScfResult {
    /// MO coefficients, one orbital per column, orthonormal under S.
    pub c: DMatrix<f64>,
    pub orbital_energies: DVector<f64>,
    pub e_hf: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Final `max |FDS − SDF|`.
    pub commutator_norm: f64,
    pub n_occupied: usize,
}

impl ScfResult {
    /// Turns a non-converged result into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::OptimizationFailed(format!(
                "SCF did not converge in {} iterations (|[F,D]| = {:.3e})",
                self.iterations, self.commutator_norm
            )))
        }
    }

    /// Closed-shell density `D = 2 C_occ C_occᵀ`.
    pub fn density(&self) -> DMatrix<f64> {
        density(&self.c, self.n_occupied)
    }
}

fn density(c: &DMatrix<f64>, n_occ: usize) -> DMatrix<f64> {
    let occ = c.columns(0, n_occ);
    occ * occ.transpose() * 2.0
}

/// Coulomb minus half exchange for density `d`.
fn two_electron_part(ao: &AOIntegrals, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = ao.n_ao;
    DMatrix::from_fn(n, n, |p, q| {
        let mut g = 0.0;
        for r in 0..n {
            for s in 0..n {
                g += d[(r, s)] * (ao.eri[[p, q, r, s]] - 0.5 * ao.eri[[p, r, q, s]]);
            }
        }
        g
    })
}

/// Largest-magnitude coefficient of every column made positive.
pub fn fix_orbital_phases(c: &mut DMatrix<f64>) {
    for mut col in c.column_iter_mut() {
        let mut best = 0.0_f64;
        let mut sign = 1.0;
        for v in col.iter() {
            if v.abs() > best + 1e-12 {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            col.neg_mut();
        }
    }
}

/// Orbital energies closer than this are rotated by the tie-breaker.
const ORBITAL_DEGENERACY_TOL: f64 = 1e-8;

/// Diagonalizes the Fock matrix in the orthogonalized basis.
///
/// Inside an exactly degenerate cluster the eigenvectors are arbitrary, which
/// at dissociation yields localized orbitals. Such clusters are rotated to
/// diagonalize the projector on the sum of all AOs, highest weight first; for
/// symmetric molecules this picks the symmetric/antisymmetric combinations.
fn diagonalize_fock(f: &DMatrix<f64>, x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let fp = x.transpose() * f * x;
    let (eps, mut cp) = sym_eigen_sorted(&fp);
    let n = eps.len();
    let ones = x.transpose() * DVector::from_element(x.nrows(), 1.0);
    let tie = &ones * ones.transpose();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eps[end] - eps[end - 1] < ORBITAL_DEGENERACY_TOL * eps[end].abs().max(1.0)
        {
            end += 1;
        }
        if end - start > 1 {
            let block = cp.columns(start, end - start).into_owned();
            let (_, rot) = sym_eigen_sorted(&(-(block.transpose() * &tie * &block)));
            cp.columns_mut(start, end - start).copy_from(&(block * rot));
        }
        start = end;
    }
    let mut c = x * cp;
    fix_orbital_phases(&mut c);
    (eps, c)
}

/// Runs RHF from a core-Hamiltonian guess.
///
/// Non-convergence is reported through [`ScfResult::converged`], never hidden.
pub fn rhf_solve(ao: &AOIntegrals, n_electrons: usize, options: &ScfOptions) -> Result<ScfResult> {
    if !n_electrons.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "restricted Hartree-Fock needs an even electron count, got {n_electrons}"
        )));
    }
    let n_occ = n_electrons / 2;
    if n_occ > ao.n_ao {
        return Err(Error::Precondition(format!(
            "{n_occ} doubly occupied orbitals do not fit in {} basis functions",
            ao.n_ao
        )));
    }
    let x = inverse_sqrt_spd(&ao.s, MAX_OVERLAP_COND)?;
    let h = ao.core_hamiltonian();
    let (mut eps, mut c) = diagonalize_fock(&h, &x);
    let mut d = density(&c, n_occ);
    let mut energy = f64::NAN;
    let mut commutator_norm = f64::INFINITY;

    for iter in 1..=options.max_iter {
        let f = &h + two_electron_part(ao, &d);
        let e_new = 0.5 * d.component_mul(&(&h + &f)).sum() + ao.e_nuc;
        commutator_norm = max_abs(&(&f * &d * &ao.s - &ao.s * &d * &f));
        let de = (e_new - energy).abs();
        energy = e_new;
        if commutator_norm <= options.conv_threshold && de <= options.energy_threshold {
            return Ok(ScfResult {
                c,
                orbital_energies: eps,
                e_hf: energy,
                converged: true,
                iterations: iter,
                commutator_norm,
                n_occupied: n_occ,
            });
        }
        (eps, c) = diagonalize_fock(&f, &x);
        let d_new = density(&c, n_occ);
        d = if iter <= options.damping_iterations {
            &d * options.damping + d_new * (1.0 - options.damping)
        } else {
            d_new
        };
    }
    // Roothaan iterations can oscillate between symmetry-broken densities when
    // the HOMO–LUMO gap is small relative to the Coulomb response (stretched
    // bonds). Newton steps on the exact orbital Hessian from the same core
    // guess converge to the nearest minimum instead.
    if let Some(res) = newton_scf(ao, &x, n_occ, options) {
        return Ok(res);
    }
    Ok(ScfResult {
        c,
        orbital_energies: eps,
        e_hf: energy,
        converged: false,
        iterations: options.max_iter,
        commutator_norm,
        n_occupied: n_occ,
    })
}

fn fock_and_energy(ao: &AOIntegrals, c: &DMatrix<f64>, n_occ: usize) -> (DMatrix<f64>, f64, f64) {
    let d = density(c, n_occ);
    let h = ao.core_hamiltonian();
    let f = &h + two_electron_part(ao, &d);
    let e = 0.5 * d.component_mul(&(&h + &f)).sum() + ao.e_nuc;
    let comm = max_abs(&(&f * &d * &ao.s - &ao.s * &d * &f));
    (f, e, comm)
}

/// Closed-shell RHF by Newton steps in the occupied–virtual rotations.
///
/// With `φ'_i = φ_i + Δ_ai φ_a`, the gradient is `4 F_ai` and the Hessian
/// `4 [F_ab δ_ij − F_ij δ_ab + 4 (ai|bj) − (ab|ij) − (aj|bi)]`. Indefinite
/// Hessians are replaced by their absolute value; every step is backtracked
/// until the energy does not rise.
fn newton_scf(
    ao: &AOIntegrals,
    x: &DMatrix<f64>,
    n_occ: usize,
    options: &ScfOptions,
) -> Option<ScfResult> {
    let (_, mut c) = diagonalize_fock(&ao.core_hamiltonian(), x);
    let n = c.ncols();
    let nv = n - n_occ;
    if nv == 0 || n_occ == 0 {
        return None;
    }
    let idx = |a: usize, i: usize| (a - n_occ) * n_occ + i;
    let m = nv * n_occ;
    let (mut f_ao, mut energy, mut comm) = fock_and_energy(ao, &c, n_occ);
    let mut last_de = f64::INFINITY;
    for iter in 1..=options.max_iter {
        if comm <= options.conv_threshold && last_de <= options.energy_threshold {
            let (eps, c_can) = diagonalize_fock(&f_ao, x);
            let (_, e_can, comm_can) = fock_and_energy(ao, &c_can, n_occ);
            return Some(ScfResult {
                c: c_can,
                orbital_energies: eps,
                e_hf: e_can,
                converged: comm_can <= options.conv_threshold,
                iterations: options.max_iter + iter,
                commutator_norm: comm_can,
                n_occupied: n_occ,
            });
        }
        let f = c.transpose() * &f_ao * &c;
        let g = crate::orbrot::transform_eri(&ao.eri, &c);
        let grad = DVector::from_fn(m, |k, _| {
            let (a, i) = (n_occ + k / n_occ, k % n_occ);
            4.0 * f[(a, i)]
        });
        let mut hess = DMatrix::zeros(m, m);
        for a in n_occ..n {
            for i in 0..n_occ {
                for b in n_occ..n {
                    for j in 0..n_occ {
                        let mut v = 4.0 * g[[a, i, b, j]] - g[[a, b, i, j]] - g[[a, j, b, i]];
                        if i == j {
                            v += f[(a, b)];
                        }
                        if a == b {
                            v -= f[(i, j)];
                        }
                        hess[(idx(a, i), idx(b, j))] = 4.0 * v;
                    }
                }
            }
        }
        let (w, v) = sym_eigen_sorted(&hess);
        let floor = 1e-8 * w.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
        let proj = v.transpose() * &grad;
        let mut step = -(&v * DVector::from_fn(m, |k, _| proj[k] / w[k].abs().max(floor)));
        let norm = step.norm();
        if norm > 0.5 {
            step *= 0.5 / norm;
        }
        let mut accepted = None;
        for _ in 0..30 {
            let mut k = DMatrix::zeros(n, n);
            for a in n_occ..n {
                for i in 0..n_occ {
                    k[(a, i)] = step[idx(a, i)];
                    k[(i, a)] = -step[idx(a, i)];
                }
            }
            let c_new = &c * expm(&k);
            let (f_new, e_new, comm_new) = fock_and_energy(ao, &c_new, n_occ);
            if e_new <= energy + 1e-14 * energy.abs().max(1.0) {
                accepted = Some((c_new, f_new, e_new, comm_new));
                break;
            }
            step *= 0.5;
        }
        let (c_new, f_new, e_new, comm_new) = accepted?;
        last_de = (e_new - energy).abs();
        c = c_new;
        f_ao = f_new;
        energy = e_new;
        comm = comm_new;
    }
    None
}

/// Closed-shell energy of the determinant built from the first `n_occ` columns of `c`.
pub fn closed_shell_energy(ao: &AOIntegrals, c: &DMatrix<f64>, n_occ: usize) -> f64 {
    let d = density(c, n_occ);
    let h = ao.core_hamiltonian();
    let f = &h + two_electron_part(ao, &d);
    0.5 * d.component_mul(&(&h + &f)).sum() + ao.e_nuc
}
