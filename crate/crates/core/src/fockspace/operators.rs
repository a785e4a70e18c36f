use std::ops::{Add, Mul};
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fockspace::basis::{spin_orbital, SectorBasis};
use crate::linalg::{antisymmetry_residual, max_abs, symmetry_residual};

/// Creation (`dagger = true`) or annihilation operator on spin-orbital `mode`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub const fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub const fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }

    /// Applies to a determinant; `None` when the result vanishes.
    pub fn apply(self, bits: u64) -> Option<(f64, u64)> {
        let mask = 1u64 << self.mode;
        let occupied = bits & mask != 0;
        if occupied == self.dagger {
            return None;
        }
        let sign = if (bits & (mask - 1)).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        Some((sign, bits ^ mask))
    }
}

/// Linear combination of products of ladder operators.
///
/// Each product is written left to right as in `a†_p a_q` and acts on kets
/// right to left.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FermionOp {
    pub terms: Vec<(f64, Vec<Ladder>)>,
}

impl FermionOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity(coeff: f64) -> Self {
        Self {
            terms: vec![(coeff, Vec::new())],
        }
    }

    pub fn term(coeff: f64, ops: Vec<Ladder>) -> Self {
        Self {
            terms: vec![(coeff, ops)],
        }
    }

    /// `a†_p a_q` on spin-orbitals.
    pub fn hopping(p: usize, q: usize) -> Self {
        Self::term(1.0, vec![Ladder::create(p), Ladder::annihilate(q)])
    }

    /// Singlet excitation `E_pq = Σ_σ a†_pσ a_qσ` on spatial orbitals.
    pub fn e_pq(p: usize, q: usize) -> Self {
        let mut out = Self::zero();
        for beta in [false, true] {
            out.push(
                1.0,
                vec![
                    Ladder::create(spin_orbital(p, beta)),
                    Ladder::annihilate(spin_orbital(q, beta)),
                ],
            );
        }
        out
    }

    /// Two-electron excitation `e_pqrs = Σ_στ a†_pσ a†_rτ a_sτ a_qσ`.
    pub fn e_pqrs(p: usize, q: usize, r: usize, s: usize) -> Self {
        let mut out = Self::zero();
        for sigma in [false, true] {
            for tau in [false, true] {
                out.push(
                    1.0,
                    vec![
                        Ladder::create(spin_orbital(p, sigma)),
                        Ladder::create(spin_orbital(r, tau)),
                        Ladder::annihilate(spin_orbital(s, tau)),
                        Ladder::annihilate(spin_orbital(q, sigma)),
                    ],
                );
            }
        }
        out
    }

    pub fn push(&mut self, coeff: f64, ops: Vec<Ladder>) {
        if coeff != 0.0 {
            self.terms.push((coeff, ops));
        }
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for t in &mut self.terms {
            t.0 *= s;
        }
        self
    }

    /// Hermitian adjoint (real coefficients).
    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(c, ops)| {
                    let rev = ops
                        .iter()
                        .rev()
                        .map(|l| Ladder {
                            mode: l.mode,
                            dagger: !l.dagger,
                        })
                        .collect();
                    (*c, rev)
                })
                .collect(),
        }
    }

    /// Largest spin-orbital index referenced, plus one.
    pub fn n_modes(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|(_, ops)| ops.iter().map(|l| l.mode + 1))
            .max()
            .unwrap_or(0)
    }

    /// Acts on a single determinant, pushing `(amplitude, bits)` pairs.
    pub fn apply_to(&self, bits: u64, out: &mut Vec<(f64, u64)>) {
        'terms: for (c, ops) in &self.terms {
            let mut amp = *c;
            let mut b = bits;
            for l in ops.iter().rev() {
                match l.apply(b) {
                    Some((s, nb)) => {
                        amp *= s;
                        b = nb;
                    }
                    None => continue 'terms,
                }
            }
            out.push((amp, b));
        }
    }
}

impl Add for FermionOp {
    type Output = FermionOp;
    fn add(mut self, rhs: FermionOp) -> FermionOp {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Mul for &FermionOp {
    type Output = FermionOp;
    fn mul(self, rhs: &FermionOp) -> FermionOp {
        let mut out = FermionOp::zero();
        for (a, ops_a) in &self.terms {
            for (b, ops_b) in &rhs.terms {
                let mut ops = ops_a.clone();
                ops.extend_from_slice(ops_b);
                out.push(a * b, ops);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hermiticity {
    Hermitian,
    AntiHermitian,
    General,
}

/// Dense real matrix of an operator in a determinant basis.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    basis: Arc<SectorBasis>,
    matrix: DMatrix<f64>,
    hermiticity: Hermiticity,
}

/// Tolerance for the Hermiticity tag check.
pub const HERMITICITY_TOL: f64 = 1e-12;

impl OperatorMatrix {
    /// Wraps a matrix, checking the dimension and (anti-)Hermiticity tag.
    pub fn new(
        basis: Arc<SectorBasis>,
        matrix: DMatrix<f64>,
        hermiticity: Hermiticity,
    ) -> Result<Self> {
        let n = basis.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a basis of dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = max_abs(&matrix).max(1.0);
        let residual = match hermiticity {
            Hermiticity::Hermitian => symmetry_residual(&matrix),
            Hermiticity::AntiHermitian => antisymmetry_residual(&matrix),
            Hermiticity::General => 0.0,
        };
        if residual > HERMITICITY_TOL * scale {
            return Err(Error::Precondition(format!(
                "matrix tagged {hermiticity:?} has residual {residual:.3e}"
            )));
        }
        Ok(Self {
            basis,
            matrix,
            hermiticity,
        })
    }

    /// Matrix of a symbolic operator; fails if the operator leaves the basis.
    pub fn from_fermion_op(
        basis: &Arc<SectorBasis>,
        op: &FermionOp,
        hermiticity: Hermiticity,
    ) -> Result<Self> {
        if op.n_modes() > basis.n_modes() {
            return Err(Error::IndexOutOfRange(format!(
                "operator acts on mode {} but the basis has {} spin-orbitals",
                op.n_modes() - 1,
                basis.n_modes()
            )));
        }
        let n = basis.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut buf = Vec::new();
        for j in 0..n {
            buf.clear();
            op.apply_to(basis.onv(j), &mut buf);
            for &(amp, bits) in &buf {
                let i = basis.index_of(bits).ok_or_else(|| {
                    Error::Precondition("operator maps out of the determinant basis".into())
                })?;
                m[(i, j)] += amp;
            }
        }
        Self::new(basis.clone(), m, hermiticity)
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn hermiticity(&self) -> Hermiticity {
        self.hermiticity
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            matrix: self.matrix.transpose(),
            hermiticity: self.hermiticity,
        }
    }
}

/// Kinds accepted by [`build_excitation_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExcitationKind {
    /// `a†_p a_q` on spin-orbitals `p`, `q`.
    SpinOrbital(usize, usize),
    /// `E_pq`.
    Singlet(usize, usize),
    /// `e_pqrs`.
    TwoElectron(usize, usize, usize, usize),
    /// `E⁻_pq = E_pq − E_qp`.
    AntiSymmetric(usize, usize),
}

/// Matrix of an elementary excitation operator in `basis`.
pub fn build_excitation_matrix(
    basis: &Arc<SectorBasis>,
    kind: ExcitationKind,
) -> Result<OperatorMatrix> {
    let n = basis.n_mo();
    let check = |idx: &[usize], bound: usize| -> Result<()> {
        match idx.iter().find(|&&i| i >= bound) {
            Some(i) => Err(Error::IndexOutOfRange(format!(
                "index {i} with bound {bound}"
            ))),
            None => Ok(()),
        }
    };
    let (op, herm) = match kind {
        ExcitationKind::SpinOrbital(p, q) => {
            check(&[p, q], 2 * n)?;
            let h = if p == q {
                Hermiticity::Hermitian
            } else {
                Hermiticity::General
            };
            (FermionOp::hopping(p, q), h)
        }
        ExcitationKind::Singlet(p, q) => {
            check(&[p, q], n)?;
            let h = if p == q {
                Hermiticity::Hermitian
            } else {
                Hermiticity::General
            };
            (FermionOp::e_pq(p, q), h)
        }
        ExcitationKind::TwoElectron(p, q, r, s) => {
            check(&[p, q, r, s], n)?;
            (FermionOp::e_pqrs(p, q, r, s), Hermiticity::General)
        }
        ExcitationKind::AntiSymmetric(p, q) => {
            check(&[p, q], n)?;
            (
                FermionOp::e_pq(p, q) + FermionOp::e_pq(q, p).scaled(-1.0),
                Hermiticity::AntiHermitian,
            )
        }
    };
    OperatorMatrix::from_fermion_op(basis, &op, herm)
}

/// Total number operator `Σ_p E_pp`.
pub fn number_operator(n_mo: usize) -> FermionOp {
    (0..n_mo).fold(FermionOp::zero(), |acc, p| acc + FermionOp::e_pq(p, p))
}

/// `S_z = ½ Σ_p (n_pα − n_pβ)`.
pub fn sz_operator(n_mo: usize) -> FermionOp {
    let mut out = FermionOp::zero();
    for p in 0..n_mo {
        out.push(0.5, vec![Ladder::create(2 * p), Ladder::annihilate(2 * p)]);
        out.push(
            -0.5,
            vec![Ladder::create(2 * p + 1), Ladder::annihilate(2 * p + 1)],
        );
    }
    out
}

/// `S² = S₋S₊ + S_z + S_z²`.
pub fn s_squared_operator(n_mo: usize) -> FermionOp {
    let mut s_plus = FermionOp::zero();
    for p in 0..n_mo {
        s_plus.push(
            1.0,
            vec![Ladder::create(2 * p), Ladder::annihilate(2 * p + 1)],
        );
    }
    let s_minus = s_plus.adjoint();
    let sz = sz_operator(n_mo);
    &s_minus * &s_plus + sz.clone() + &sz * &sz
}
