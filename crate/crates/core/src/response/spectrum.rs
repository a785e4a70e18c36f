use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::ansatz::GroundState;
use crate::error::{Error, Result};
use crate::fockspace::{FciSolution, FermionOp, Hermiticity, OperatorMatrix, SectorBasis};
use crate::orbrot::MOIntegrals;
use crate::response::excitation::ExcitationOperatorSet;
use crate::response::matrices::{response_operators, Parameterization};
use crate::response::solve::ResponseSolution;

/// Sector matrices of `μ_α = Σ_pq d^α_pq E_pq`, α = x, y, z.
pub fn dipole_operators(mo: &MOIntegrals, basis: &Arc<SectorBasis>) -> Result<[DMatrix<f64>; 3]> {
    let mut out: [DMatrix<f64>; 3] = Default::default();
    for (k, slot) in out.iter_mut().enumerate() {
        let mut op = FermionOp::zero();
        for p in 0..mo.n_mo {
            for q in 0..mo.n_mo {
                let d = mo.d[k][(p, q)];
                if d != 0.0 {
                    op = op + FermionOp::e_pq(p, q).scaled(d);
                }
            }
        }
        let m = OperatorMatrix::from_fermion_op(basis, &op, Hermiticity::General)?.into_matrix();
        *slot = (&m + m.transpose()) * 0.5;
    }
    Ok(out)
}

/// `V_J = ⟨0|[μ, R_J]|0⟩` and `W_J = ⟨0|[μ, R_J†]|0⟩` per Cartesian component.
#[derive(Debug, Clone)]
pub struct PropertyGradient {
    pub v: [DVector<f64>; 3],
    pub w: [DVector<f64>; 3],
}

impl PropertyGradient {
    /// Exact gradients from the dense response operators.
    pub fn exact(
        param: Parameterization,
        ground: &GroundState,
        g: &ExcitationOperatorSet,
        dipole: &[DMatrix<f64>; 3],
    ) -> Result<Self> {
        let r = response_operators(param, ground, g)?;
        let psi = &ground.state;
        let n = r.len();
        let mut v: [DVector<f64>; 3] = Default::default();
        let mut w: [DVector<f64>; 3] = Default::default();
        for k in 0..3 {
            let mpsi = &dipole[k] * psi;
            v[k] = DVector::from_fn(n, |j, _| {
                mpsi.dot(&(&r[j] * psi)) - psi.dot(&(&r[j] * &mpsi))
            });
            w[k] = DVector::from_fn(n, |j, _| {
                mpsi.dot(&(r[j].tr_mul(psi))) - psi.dot(&(r[j].tr_mul(&mpsi)))
            });
        }
        Ok(Self { v, w })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            v: Default::default(),
            w: Default::default(),
        }
        .resized(n)
    }

    fn resized(mut self, n: usize) -> Self {
        for k in 0..3 {
            self.v[k] = DVector::zeros(n);
            self.w[k] = DVector::zeros(n);
        }
        self
    }
}

/// One excitation with its oscillator strength; `strength` is `None` when
/// the eigenvector has (near-)zero or negative metric norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stick {
    pub omega: f64,
    pub strength: Option<f64>,
    pub moment: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Broadening {
    /// Gaussian full width at half maximum (Hartree).
    pub fwhm: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
}

impl Default for Broadening {
    fn default() -> Self {
        Self {
            fwhm: 0.05,
            e_min: 0.0,
            e_max: 2.5,
            n_points: 1001,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumData {
    pub sticks: Vec<Stick>,
    pub energies: Vec<f64>,
    pub intensities: Vec<f64>,
}

/// Metric norms below this make an intensity unreliable.
pub const MIN_METRIC_NORM: f64 = 1e-12;

/// Oscillator strengths `f = (2/3) ω Σ_α t_α²` with `t = (Z·V + W·W') / √(Xᵀ S2 X)`,
/// plus a Gaussian-broadened curve (area-normalized lines scaled by `f`).
pub fn compute_spectrum(
    sol: &ResponseSolution,
    pg: &PropertyGradient,
    broadening: &Broadening,
    allow_flagged: bool,
) -> Result<SpectrumData> {
    if sol.flagged() && !allow_flagged {
        return Err(Error::Precondition(
            "response solution is flagged singular".into(),
        ));
    }
    let mut sticks = Vec::with_capacity(sol.omegas.len());
    for ((omega, x), norm) in sol.omegas.iter().zip(&sol.vectors).zip(&sol.metric_norms) {
        let n = x.len() / 2;
        if pg.v[0].len() != n {
            return Err(Error::DimensionMismatch(
                "property gradient and eigenvector sizes differ".into(),
            ));
        }
        let z = x.rows(0, n);
        let w = x.rows(n, n);
        let mut moment = [0.0; 3];
        for k in 0..3 {
            moment[k] = z.dot(&pg.v[k]) + w.dot(&pg.w[k]);
        }
        let strength = if *norm > MIN_METRIC_NORM {
            for m in &mut moment {
                *m /= norm.sqrt();
            }
            Some(2.0 / 3.0 * omega * moment.iter().map(|m| m * m).sum::<f64>())
        } else {
            None
        };
        sticks.push(Stick {
            omega: *omega,
            strength,
            moment,
        });
    }
    let (energies, intensities) = broaden(&sticks, broadening);
    Ok(SpectrumData {
        sticks,
        energies,
        intensities,
    })
}

/// Gaussian broadening of the reliable sticks on a uniform grid.
pub fn broaden(sticks: &[Stick], b: &Broadening) -> (Vec<f64>, Vec<f64>) {
    let sigma = b.fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let step = if b.n_points > 1 {
        (b.e_max - b.e_min) / (b.n_points - 1) as f64
    } else {
        0.0
    };
    let energies: Vec<f64> = (0..b.n_points).map(|i| b.e_min + step * i as f64).collect();
    let intensities = energies
        .iter()
        .map(|e| {
            sticks
                .iter()
                .filter_map(|s| {
                    s.strength
                        .map(|f| f * norm * (-(e - s.omega).powi(2) / (2.0 * sigma * sigma)).exp())
                })
                .sum()
        })
        .collect();
    (energies, intensities)
}

/// Reference `(E_n − E_0, f_n)` from explicit FCI eigenstates.
pub fn fci_oscillator_strengths(fci: &FciSolution, dipole: &[DMatrix<f64>; 3]) -> Vec<(f64, f64)> {
    let psi0 = &fci.ground;
    (1..fci.energies.len())
        .map(|n| {
            let psin = fci.vectors.column(n);
            let omega = fci.energies[n] - fci.e0;
            let t2: f64 = dipole.iter().map(|m| psin.dot(&(m * psi0)).powi(2)).sum();
            (omega, 2.0 / 3.0 * omega * t2)
        })
        .collect()
}
