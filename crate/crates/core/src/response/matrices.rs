use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::ansatz::GroundState;
use crate::error::{Error, Result};
use crate::fockspace::OperatorMatrix;
use crate::linalg::{antisymmetry_residual, matmul_sparse_left, symmetry_residual};
use crate::response::excitation::ExcitationOperatorSet;

/// Choice of response operators `R_I` built from the base operators `G_I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parameterization {
    /// `R = G`
    Naive,
    /// `R = G|0⟩⟨0| − ⟨0|G|0⟩`
    Proj,
    /// `R = U G U†`
    Sc,
    /// `R = U G |CSF⟩⟨0|`
    St,
}

impl Parameterization {
    pub const ALL: [Parameterization; 4] = [Self::Naive, Self::Proj, Self::Sc, Self::St];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Naive => "naive",
            Self::Proj => "proj",
            Self::Sc => "sc",
            Self::St => "st",
        }
    }

    /// Whether the operators need the state-preparation unitary.
    pub fn needs_unitary(&self) -> bool {
        matches!(self, Self::Sc | Self::St)
    }
}

impl fmt::Display for Parameterization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Parameterization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(Self::Naive),
            "proj" | "projected" => Ok(Self::Proj),
            "sc" | "self-consistent" => Ok(Self::Sc),
            "st" | "state-transfer" => Ok(Self::St),
            other => Err(Error::Config(format!(
                "unknown parameterization '{other}' (expected naive, proj, sc or st)"
            ))),
        }
    }
}

/// Antisymmetric/asymmetric parts removed when the matrices were symmetrized.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymmetryResiduals {
    /// `max |A − Aᵀ|`
    pub a: f64,
    /// `max |B − Bᵀ|`
    pub b: f64,
    /// `max |Σ − Σᵀ|`
    pub sigma: f64,
    /// `max |Δ + Δᵀ|`
    pub delta: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.a.max(self.b).max(self.sigma).max(self.delta)
    }
}

/// Hessian and metric blocks of the response problem.
#[derive(Debug, Clone)]
pub struct ResponseMatrices {
    pub param: Parameterization,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
    pub delta: DMatrix<f64>,
    pub residuals: SymmetryResiduals,
    /// `Some(eps)` when `eps·I` was added to Σ.
    pub regularization: Option<f64>,
}

impl ResponseMatrices {
    /// Symmetrizes raw blocks (A, B, Σ symmetric; Δ antisymmetric), recording what was removed.
    pub fn from_raw(
        param: Parameterization,
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        sigma: DMatrix<f64>,
        delta: DMatrix<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        for (name, m) in [("A", &a), ("B", &b), ("Sigma", &sigma), ("Delta", &delta)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let residuals = SymmetryResiduals {
            a: symmetry_residual(&a),
            b: symmetry_residual(&b),
            sigma: symmetry_residual(&sigma),
            delta: antisymmetry_residual(&delta),
        };
        let sym = |m: &DMatrix<f64>| (m + m.transpose()) * 0.5;
        Ok(Self {
            param,
            a: sym(&a),
            b: sym(&b),
            sigma: sym(&sigma),
            delta: (&delta - delta.transpose()) * 0.5,
            residuals,
            regularization: None,
        })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// `[[A, B], [B, A]]`.
    pub fn e2(&self) -> DMatrix<f64> {
        block(&self.a, &self.b, &self.b, &self.a)
    }

    /// `[[Σ, Δ], [−Δ, −Σ]]`.
    pub fn s2(&self) -> DMatrix<f64> {
        block(&self.sigma, &self.delta, &(-&self.delta), &(-&self.sigma))
    }

    /// Copy with `eps·I` added to Σ. The returned matrices are marked as regularized.
    pub fn regularized(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.sigma += DMatrix::<f64>::identity(self.n(), self.n()) * eps;
        out.regularization = Some(self.regularization.unwrap_or(0.0) + eps);
        out
    }

    pub fn is_finite(&self) -> bool {
        [&self.a, &self.b, &self.sigma, &self.delta]
            .iter()
            .all(|m| m.iter().all(|v| v.is_finite()))
    }
}

fn block(
    tl: &DMatrix<f64>,
    tr: &DMatrix<f64>,
    bl: &DMatrix<f64>,
    br: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = tl.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(tl);
    m.view_mut((0, n), (n, n)).copy_from(tr);
    m.view_mut((n, 0), (n, n)).copy_from(bl);
    m.view_mut((n, n), (n, n)).copy_from(br);
    m
}

/// Dense sector matrices of the response operators `R_I`.
pub fn response_operators(
    param: Parameterization,
    ground: &GroundState,
    g: &ExcitationOperatorSet,
) -> Result<Vec<DMatrix<f64>>> {
    let psi = &ground.state;
    if psi.len() != g.basis.dim() {
        return Err(Error::DimensionMismatch(
            "ground state and operator basis differ".into(),
        ));
    }
    let d = psi.len();
    let eye = DMatrix::<f64>::identity(d, d);
    let unitary = || {
        ground.unitary().ok_or_else(|| {
            Error::Precondition(format!(
                "the {param} parameterization needs the state-preparation unitary, \
                 but the ground state was taken directly from FCI"
            ))
        })
    };
    Ok(match param {
        Parameterization::Naive => g.matrices.clone(),
        Parameterization::Proj => g
            .matrices
            .iter()
            .map(|gm| {
                let gpsi = gm * psi;
                let expval = psi.dot(&gpsi);
                &gpsi * psi.transpose() - &eye * expval
            })
            .collect(),
        Parameterization::Sc => {
            let u = unitary()?;
            g.matrices
                .iter()
                .map(|gm| &u * matmul_sparse_left(gm, &u.transpose()))
                .collect()
        }
        Parameterization::St => {
            let u = unitary()?;
            let program = ground.program.as_ref().expect("unitary implies a program");
            let csf = program.reference_state();
            g.matrices
                .iter()
                .map(|gm| (&u * (gm * &csf)) * psi.transpose())
                .collect()
        }
    })
}

/// Exact response matrices over `|0⟩` for the chosen parameterization.
pub fn build_response_matrices(
    param: Parameterization,
    ground: &GroundState,
    h: &OperatorMatrix,
    g: &ExcitationOperatorSet,
) -> Result<ResponseMatrices> {
    let r = response_operators(param, ground, g)?;
    response_matrices_from_operators(param, &ground.state, h.matrix(), &r)
}

/// A, B, Σ, Δ from explicit operators `R_I` and state `ψ`.
pub fn response_matrices_from_operators(
    param: Parameterization,
    psi: &DVector<f64>,
    h: &DMatrix<f64>,
    r: &[DMatrix<f64>],
) -> Result<ResponseMatrices> {
    let n = r.len();
    let hpsi = h * psi;
    struct Cols {
        u: DVector<f64>,
        v: DVector<f64>,
        hu: DVector<f64>,
        hv: DVector<f64>,
        rh: DVector<f64>,
        rth: DVector<f64>,
        rt: DMatrix<f64>,
    }
    let cols: Vec<Cols> = r
        .par_iter()
        .map(|rj| {
            let rt = rj.transpose();
            let u = rj * psi;
            let v = &rt * psi;
            Cols {
                hu: h * &u,
                hv: h * &v,
                rh: rj * &hpsi,
                rth: &rt * &hpsi,
                u,
                v,
                rt,
            }
        })
        .collect();
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    let mut sigma = DMatrix::zeros(n, n);
    let mut delta = DMatrix::zeros(n, n);
    for i in 0..n {
        let ci = &cols[i];
        for j in 0..n {
            let cj = &cols[j];
            // ⟨[R_I†,[H,R_J]]⟩ = ⟨R_I† H R_J⟩ − ⟨R_I† R_J H⟩ − ⟨H R_J R_I†⟩ + ⟨R_J H R_I†⟩
            a[(i, j)] = ci.u.dot(&cj.hu) - ci.u.dot(&cj.rh) - cj.rth.dot(&ci.v) + cj.v.dot(&ci.hv);
            // ⟨[R_I†,[H,R_J†]]⟩
            let rjt_h = &cj.rth;
            let rjt_vi = &cj.rt * &ci.v;
            b[(i, j)] = ci.u.dot(&cj.hv) - ci.u.dot(rjt_h) - hpsi.dot(&rjt_vi) + cj.u.dot(&ci.hv);
            sigma[(i, j)] = ci.u.dot(&cj.u) - cj.v.dot(&ci.v);
            delta[(i, j)] = ci.u.dot(&cj.v) - cj.u.dot(&ci.v);
        }
    }
    ResponseMatrices::from_raw(param, a, b, sigma, delta)
}

/// Metric `Σ_IJ = ⟨0|[R_I†, R_J]|0⟩` alone, without the Hessian blocks.
pub fn metric_matrix(
    param: Parameterization,
    ground: &GroundState,
    g: &ExcitationOperatorSet,
) -> Result<DMatrix<f64>> {
    let r = response_operators(param, ground, g)?;
    let psi = &ground.state;
    let u: Vec<DVector<f64>> = r.iter().map(|m| m * psi).collect();
    let v: Vec<DVector<f64>> = r.iter().map(|m| m.tr_mul(psi)).collect();
    let n = r.len();
    let s = DMatrix::from_fn(n, n, |i, j| u[i].dot(&u[j]) - v[j].dot(&v[i]));
    Ok((&s + s.transpose()) * 0.5)
}

/// `cond₂(Σ)`, accurate beyond `1/ε` for parameterizations with `R_J†|0⟩ = 0`.
///
/// For proj and st, Σ is the Gram matrix of `X = [R_1|0⟩, …]`, so
/// `cond₂(Σ) = cond₂(X)²`; forming Σ first would cap the result near `1e16`.
pub fn metric_condition(
    param: Parameterization,
    ground: &GroundState,
    g: &ExcitationOperatorSet,
) -> Result<f64> {
    match param {
        Parameterization::Proj | Parameterization::St => {
            let r = response_operators(param, ground, g)?;
            let cols: Vec<DVector<f64>> = r.iter().map(|m| m * &ground.state).collect();
            if cols.is_empty() {
                return Ok(1.0);
            }
            Ok(crate::linalg::cond2(&DMatrix::from_columns(&cols)).powi(2))
        }
        _ => Ok(crate::linalg::cond2(&metric_matrix(param, ground, g)?)),
    }
}
