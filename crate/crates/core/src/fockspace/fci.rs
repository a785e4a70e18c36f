use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fockspace::basis::{parse_onv, SectorBasis};
use crate::fockspace::operators::{s_squared_operator, Hermiticity, OperatorMatrix};
use crate::linalg::sym_eigen_sorted;

/// Energies closer than this are treated as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Named amplitudes of a two-electron, two-orbital state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoInTwoCoefficients {
    pub c_1100: f64,
    /// `(ψ_1001 − ψ_0110)/√2`, the open-shell singlet weight.
    pub c_s: f64,
    pub c_0011: f64,
}

impl TwoInTwoCoefficients {
    /// Reads the named amplitudes from a state in the (2, 2, 0) sector.
    pub fn from_state(basis: &SectorBasis, psi: &DVector<f64>) -> Option<Self> {
        if basis.n_mo() != 2 || basis.n_electrons() != Some(2) || basis.dim() != 4 {
            return None;
        }
        let at = |s: &str| basis.index_of(parse_onv(s).ok()?).map(|i| psi[i]);
        Some(Self {
            c_1100: at("1100")?,
            c_s: (at("1001")? - at("0110")?) / std::f64::consts::SQRT_2,
            c_0011: at("0011")?,
        })
    }

    /// Sector vector `(1100, 1001, 0110, 0011)` for these singlet amplitudes.
    pub fn to_state(&self) -> DVector<f64> {
        let s = self.c_s / std::f64::consts::SQRT_2;
        DVector::from_vec(vec![self.c_1100, s, -s, self.c_0011])
    }

    pub fn norm_squared(&self) -> f64 {
        self.c_1100.powi(2) + self.c_s.powi(2) + self.c_0011.powi(2)
    }
}

#[derive(Debug, Clone)]
pub struct FciSolution {
    pub e0: f64,
    /// All eigenvalues, ascending.
    pub energies: DVector<f64>,
    /// Eigenvectors matching `energies`; column 0 is the selected ground state.
    pub vectors: DMatrix<f64>,
    pub ground: DVector<f64>,
    /// Number of states within [`DEGENERACY_TOL`] of the ground level.
    pub degeneracy: usize,
    /// `⟨S²⟩` of the selected ground state.
    pub s_squared: f64,
    pub two_in_two: Option<TwoInTwoCoefficients>,
}

impl FciSolution {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy > 1
    }
}

/// Makes the reference (index 0) amplitude non-negative, or the first non-zero one.
pub fn fix_state_phase(v: &mut DVector<f64>) {
    let lead = if v[0].abs() > 1e-14 {
        v[0]
    } else {
        v.iter().copied().find(|x| x.abs() > 1e-14).unwrap_or(1.0)
    };
    if lead < 0.0 {
        v.neg_mut();
    }
}

/// Dense diagonalization of a Hermitian sector Hamiltonian.
///
/// A degenerate ground level is resolved by diagonalizing `S²` inside it and
/// keeping the lowest-spin state, so dissociated singlets are not mixed with
/// triplets.
pub fn fci_solve(h: &OperatorMatrix) -> Result<FciSolution> {
    if h.hermiticity() != Hermiticity::Hermitian {
        return Err(Error::Precondition(
            "FCI needs a Hamiltonian tagged Hermitian".into(),
        ));
    }
    let basis = h.basis().clone();
    let (energies, mut vectors) = sym_eigen_sorted(h.matrix());
    let s2 = OperatorMatrix::from_fermion_op(
        &basis,
        &s_squared_operator(basis.n_mo()),
        Hermiticity::Hermitian,
    )?;
    let s2m = s2.matrix();

    let degeneracy = energies
        .iter()
        .take_while(|&&e| e - energies[0] < DEGENERACY_TOL)
        .count();
    if degeneracy > 1 {
        let block = vectors.columns(0, degeneracy).into_owned();
        let projected = block.transpose() * s2m * &block;
        let (_, rot) = sym_eigen_sorted(&projected);
        let rotated = &block * rot;
        vectors.columns_mut(0, degeneracy).copy_from(&rotated);
    }
    for mut col in vectors.column_iter_mut() {
        let mut v = col.clone_owned();
        fix_state_phase(&mut v);
        col.copy_from(&v);
    }
    let ground = vectors.column(0).into_owned();
    let s_squared = ground.dot(&(s2m * &ground));
    let two_in_two = TwoInTwoCoefficients::from_state(&basis, &ground);
    Ok(FciSolution {
        e0: energies[0],
        energies,
        vectors,
        ground,
        degeneracy,
        s_squared,
        two_in_two,
    })
}
