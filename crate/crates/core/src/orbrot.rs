//! MO integral transformation and orbital rotations `C(κ) = C exp(K)`.

use nalgebra::DMatrix;
use ndarray::Array4;

use crate::error::{Error, Result};
use crate::linalg::{expm, max_abs};
use crate::molint::AOIntegrals;

/// Orbital-rotation parameters `κ_pq`, stored for `p < q` only.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaParams {
    n_mo: usize,
    values: Vec<f64>,
    redundant: Vec<bool>,
}

impl KappaParams {
    pub fn zeros(n_mo: usize) -> Self {
        let m = n_mo * n_mo.saturating_sub(1) / 2;
        Self {
            n_mo,
            values: vec![0.0; m],
            redundant: vec![false; m],
        }
    }

    /// Single non-zero entry `κ_pq = value`.
    pub fn single(n_mo: usize, p: usize, q: usize, value: f64) -> Result<Self> {
        let mut k = Self::zeros(n_mo);
        k.set(p, q, value)?;
        Ok(k)
    }

    /// Builds from values listed in [`KappaParams::pairs`] order.
    pub fn from_values(n_mo: usize, values: &[f64]) -> Result<Self> {
        let mut k = Self::zeros(n_mo);
        if values.len() != k.values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} kappa values given, {} expected for {n_mo} orbitals",
                values.len(),
                k.values.len()
            )));
        }
        k.values.copy_from_slice(values);
        Ok(k)
    }

    pub fn n_mo(&self) -> usize {
        self.n_mo
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(p, q)` pairs with `p < q`, row-major.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        pairs(self.n_mo)
    }

    /// Position of `(p, q)`, `p < q`, in [`KappaParams::values`].
    pub fn index_of(&self, p: usize, q: usize) -> Result<usize> {
        if p >= q || q >= self.n_mo {
            return Err(Error::IndexOutOfRange(format!(
                "kappa index ({p}, {q}) needs p < q < {}",
                self.n_mo
            )));
        }
        Ok(p * self.n_mo - p * (p + 1) / 2 + (q - p - 1))
    }

    pub fn get(&self, p: usize, q: usize) -> Result<f64> {
        Ok(self.values[self.index_of(p, q)?])
    }

    pub fn set(&mut self, p: usize, q: usize, value: f64) -> Result<()> {
        let i = self.index_of(p, q)?;
        self.values[i] = value;
        Ok(())
    }

    pub fn is_redundant(&self, p: usize, q: usize) -> Result<bool> {
        Ok(self.redundant[self.index_of(p, q)?])
    }

    pub fn mark_redundant(&mut self, p: usize, q: usize, redundant: bool) -> Result<()> {
        let i = self.index_of(p, q)?;
        self.redundant[i] = redundant;
        Ok(())
    }

    /// Antisymmetric `K` with `K_pq = κ_pq`, `K_qp = −κ_pq`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut k = DMatrix::zeros(self.n_mo, self.n_mo);
        for (&(p, q), &v) in self.pairs().iter().zip(&self.values) {
            k[(p, q)] = v;
            k[(q, p)] = -v;
        }
        k
    }

    /// `exp(K)`.
    pub fn unitary(&self) -> DMatrix<f64> {
        expm(&self.matrix())
    }
}

/// `(p, q)` pairs with `p < q < n_mo`, row-major.
pub fn pairs(n_mo: usize) -> Vec<(usize, usize)> {
    (0..n_mo)
        .flat_map(|p| (p + 1..n_mo).map(move |q| (p, q)))
        .collect()
}

/// One-, two-electron and dipole integrals over molecular orbitals.
#[derive(Debug, Clone)]
pub struct MOIntegrals {
    pub n_mo: usize,
    pub h: DMatrix<f64>,
    /// Chemists' notation `(pq|rs)`.
    pub g: Array4<f64>,
    pub d: [DMatrix<f64>; 3],
    pub e_nuc: f64,
}

impl MOIntegrals {
    /// Integrals in the orbital basis `U`: `h' = Uᵀ h U` and likewise for every index.
    pub fn transformed(&self, u: &DMatrix<f64>) -> MOIntegrals {
        MOIntegrals {
            n_mo: u.ncols(),
            h: u.transpose() * &self.h * u,
            g: transform_eri(&self.g, u),
            d: [0, 1, 2].map(|k| u.transpose() * &self.d[k] * u),
            e_nuc: self.e_nuc,
        }
    }

    /// Largest deviation from the symmetries of real-orbital integrals.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n_mo;
        let mut worst = max_abs(&(&self.h - self.h.transpose()));
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g[[p, q, r, s]];
                        for w in [
                            self.g[[q, p, r, s]],
                            self.g[[p, q, s, r]],
                            self.g[[r, s, p, q]],
                        ] {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }
}

/// `(pq|rs)' = Σ C_ap C_bq C_cr C_ds (ab|cd)` by four quarter transformations.
pub fn transform_eri(g: &Array4<f64>, c: &DMatrix<f64>) -> Array4<f64> {
    let n = c.nrows();
    let m = c.ncols();
    let mut t1 = Array4::<f64>::zeros((m, n, n, n));
    for p in 0..m {
        for a in 0..n {
            let cap = c[(a, p)];
            if cap == 0.0 {
                continue;
            }
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        t1[[p, b, cc, d]] += cap * g[[a, b, cc, d]];
                    }
                }
            }
        }
    }
    let mut t2 = Array4::<f64>::zeros((m, m, n, n));
    for p in 0..m {
        for q in 0..m {
            for b in 0..n {
                let cbq = c[(b, q)];
                if cbq == 0.0 {
                    continue;
                }
                for cc in 0..n {
                    for d in 0..n {
                        t2[[p, q, cc, d]] += cbq * t1[[p, b, cc, d]];
                    }
                }
            }
        }
    }
    let mut t3 = Array4::<f64>::zeros((m, m, m, n));
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for cc in 0..n {
                    let ccr = c[(cc, r)];
                    if ccr == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        t3[[p, q, r, d]] += ccr * t2[[p, q, cc, d]];
                    }
                }
            }
        }
    }
    let mut out = Array4::<f64>::zeros((m, m, m, m));
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let mut acc = 0.0;
                    for d in 0..n {
                        acc += c[(d, s)] * t3[[p, q, r, d]];
                    }
                    out[[p, q, r, s]] = acc;
                }
            }
        }
    }
    out
}

/// `CᵀSC = I` residual above which coefficients are rejected.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;

/// Transforms AO integrals to the MO basis `C` (columns orthonormal under S).
pub fn transform_to_mo(ao: &AOIntegrals, c: &DMatrix<f64>) -> Result<MOIntegrals> {
    if c.nrows() != ao.n_ao {
        return Err(Error::DimensionMismatch(format!(
            "C has {} rows but there are {} AOs",
            c.nrows(),
            ao.n_ao
        )));
    }
    let m = c.ncols();
    let dev = max_abs(&(c.transpose() * &ao.s * c - DMatrix::<f64>::identity(m, m)));
    if dev > ORTHONORMALITY_TOL {
        return Err(Error::Precondition(format!(
            "MO coefficients are not S-orthonormal (max |CᵀSC − I| = {dev:.3e})"
        )));
    }
    Ok(MOIntegrals {
        n_mo: m,
        h: c.transpose() * ao.core_hamiltonian() * c,
        g: transform_eri(&ao.eri, c),
        d: [0, 1, 2].map(|k| c.transpose() * &ao.dipole[k] * c),
        e_nuc: ao.e_nuc,
    })
}

/// `h(κ) = exp(−K) h exp(K)` and the same rotation on every index of `g` and `d`.
pub fn rotate_integrals(mo: &MOIntegrals, kappa: &KappaParams) -> Result<MOIntegrals> {
    if kappa.n_mo() != mo.n_mo {
        return Err(Error::DimensionMismatch(format!(
            "kappa is for {} orbitals, integrals have {}",
            kappa.n_mo(),
            mo.n_mo
        )));
    }
    Ok(mo.transformed(&kappa.unitary()))
}

/// `C' = C exp(K)`.
pub fn rotate_mo_coefficients(c: &DMatrix<f64>, kappa: &KappaParams) -> Result<DMatrix<f64>> {
    if kappa.n_mo() != c.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "kappa is for {} orbitals, C has {} columns",
            kappa.n_mo(),
            c.ncols()
        )));
    }
    Ok(c * kappa.unitary())
}
