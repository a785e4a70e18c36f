use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::ansatz::generators::{
    build_cluster_generators, closed_shell_occupation, ClusterGenerator, ExcitationLabel,
    Truncation,
};
use crate::error::{Error, Result};
use crate::fockspace::SectorBasis;
use crate::linalg::{expm, AntisymmetricExp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzKind {
    /// `exp(Σ θ_i σ_i)` — one exponential of the whole generator sum.
    SingleExponential,
    /// Tiled unitary product state with `layers` layers.
    Tups { layers: usize },
    /// Arbitrary ordered product of single-generator exponentials.
    Product,
}

/// One exponential `exp(θ_slot σ_generator)` of a product ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    pub generator: usize,
    pub slot: usize,
}

/// Ordered exponential factors acting on the reference determinant.
///
/// Factors are stored in application order: `factors[0]` acts on the
/// reference first.
#[derive(Debug, Clone)]
pub struct AnsatzProgram {
    kind: AnsatzKind,
    basis: Arc<SectorBasis>,
    reference: u64,
    generators: Vec<ClusterGenerator>,
    exps: Vec<AntisymmetricExp>,
    factors: Vec<Factor>,
    n_params: usize,
}

impl AnsatzProgram {
    fn assemble(
        kind: AnsatzKind,
        basis: &Arc<SectorBasis>,
        reference: u64,
        generators: Vec<ClusterGenerator>,
        factors: Vec<Factor>,
        n_params: usize,
    ) -> Result<Self> {
        closed_shell_occupation(basis, reference)?;
        if let Some(f) = factors
            .iter()
            .find(|f| f.generator >= generators.len() || f.slot >= n_params)
        {
            return Err(Error::IndexOutOfRange(format!("factor {f:?} out of range")));
        }
        let exps = generators
            .iter()
            .map(|g| AntisymmetricExp::new(g.matrix.matrix().clone()))
            .collect();
        Ok(Self {
            kind,
            basis: basis.clone(),
            reference,
            generators,
            exps,
            factors,
            n_params,
        })
    }

    /// `exp(Σ θ_i σ_i)` over the given generators.
    pub fn single_exponential(
        basis: &Arc<SectorBasis>,
        reference: u64,
        generators: Vec<ClusterGenerator>,
    ) -> Result<Self> {
        let n = generators.len();
        let factors = (0..n)
            .map(|i| Factor {
                generator: i,
                slot: i,
            })
            .collect();
        Self::assemble(
            AnsatzKind::SingleExponential,
            basis,
            reference,
            generators,
            factors,
            n,
        )
    }

    /// Spin-adapted UCCSD on the closed-shell reference with `n_occ` doubly occupied orbitals.
    pub fn uccsd(basis: &Arc<SectorBasis>, n_occ: usize) -> Result<Self> {
        Self::ucc(basis, n_occ, Truncation::SinglesDoubles)
    }

    /// Single-exponential UCC with an arbitrary truncation.
    pub fn ucc(basis: &Arc<SectorBasis>, n_occ: usize, truncation: Truncation) -> Result<Self> {
        let reference = SectorBasis::closed_shell_reference(n_occ);
        let set = build_cluster_generators(basis, reference, truncation)?;
        Self::single_exponential(basis, reference, set.generators)
    }

    /// Ordered product of single-generator exponentials with explicit parameter slots.
    pub fn product(
        basis: &Arc<SectorBasis>,
        reference: u64,
        generators: Vec<ClusterGenerator>,
        factors: Vec<Factor>,
    ) -> Result<Self> {
        let n_params = factors.iter().map(|f| f.slot + 1).max().unwrap_or(0);
        Self::assemble(
            AnsatzKind::Product,
            basis,
            reference,
            generators,
            factors,
            n_params,
        )
    }

    /// tUPS: per layer, tiles on orbital pairs `(0,1), (2,3), …` then `(1,2), (3,4), …`.
    ///
    /// A tile on `(p, p+1)` is `exp(θ_A σ¹) exp(θ_B σᵖᵃⁱʳ) exp(θ_C σ¹)` with
    /// `σ¹` the singlet single `p → p+1` and `σᵖᵃⁱʳ` the paired double
    /// `pp → (p+1)(p+1)`; `θ_C` acts first. Every factor has its own parameter.
    pub fn tups(basis: &Arc<SectorBasis>, n_occ: usize, layers: usize) -> Result<Self> {
        let n_mo = basis.n_mo();
        if n_mo < 2 {
            return Err(Error::Unsupported(
                "tUPS needs at least two orbitals".into(),
            ));
        }
        let reference = SectorBasis::closed_shell_reference(n_occ);
        let mut generators = Vec::new();
        let mut tile_gens = Vec::new();
        for p in 0..n_mo - 1 {
            let single = generators.len();
            generators.push(ClusterGenerator::new(
                basis,
                ExcitationLabel::Single { i: p, a: p + 1 },
            )?);
            let pair = generators.len();
            generators.push(ClusterGenerator::new(
                basis,
                ExcitationLabel::Double {
                    i: p,
                    j: p,
                    a: p + 1,
                    b: p + 1,
                },
            )?);
            tile_gens.push((single, pair));
        }
        let order: Vec<usize> = (0..n_mo - 1)
            .step_by(2)
            .chain((1..n_mo - 1).step_by(2))
            .collect();
        let mut factors = Vec::new();
        let mut slot = 0;
        for _ in 0..layers {
            for &p in &order {
                let (single, pair) = tile_gens[p];
                for generator in [single, pair, single] {
                    factors.push(Factor { generator, slot });
                    slot += 1;
                }
            }
        }
        Self::assemble(
            AnsatzKind::Tups { layers },
            basis,
            reference,
            generators,
            factors,
            slot,
        )
    }

    pub fn kind(&self) -> AnsatzKind {
        self.kind
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn reference(&self) -> u64 {
        self.reference
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn generators(&self) -> &[ClusterGenerator] {
        &self.generators
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Sector vector of the reference determinant.
    pub fn reference_state(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.basis.dim());
        v[self
            .basis
            .index_of(self.reference)
            .expect("validated at construction")] = 1.0;
        v
    }

    fn check_len(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters given, program has {}",
                theta.len(),
                self.n_params
            )));
        }
        Ok(())
    }

    fn generator_sum(&self, theta: &[f64]) -> DMatrix<f64> {
        let d = self.basis.dim();
        let mut a = DMatrix::zeros(d, d);
        for f in &self.factors {
            a += self.generators[f.generator].matrix.matrix() * theta[f.slot];
        }
        a
    }

    /// `U(θ)|CSF⟩`.
    pub fn state(&self, theta: &[f64]) -> Result<DVector<f64>> {
        self.check_len(theta)?;
        let r = self.reference_state();
        Ok(match self.kind {
            AnsatzKind::SingleExponential => expm(&self.generator_sum(theta)) * r,
            _ => self
                .factors
                .iter()
                .fold(r, |v, f| self.exps[f.generator].apply(theta[f.slot], &v)),
        })
    }

    /// Dense `U(θ)` on the sector.
    pub fn unitary(&self, theta: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(theta)?;
        let d = self.basis.dim();
        Ok(match self.kind {
            AnsatzKind::SingleExponential => expm(&self.generator_sum(theta)),
            _ => self.factors.iter().fold(DMatrix::identity(d, d), |u, f| {
                self.exps[f.generator].matrix(theta[f.slot]) * u
            }),
        })
    }

    /// `E(θ) = ⟨ψ(θ)|H|ψ(θ)⟩` and its analytic gradient.
    pub fn energy_and_gradient(&self, h: &DMatrix<f64>, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_len(theta)?;
        let mut grad = vec![0.0; self.n_params];
        match self.kind {
            AnsatzKind::SingleExponential => {
                let a = self.generator_sum(theta);
                let d = a.nrows();
                let r = self.reference_state();
                let psi = expm(&a) * &r;
                let hpsi = h * &psi;
                let energy = psi.dot(&hpsi);
                // d/dθ exp(A) = top-right block of exp([[A, σ], [0, A]])
                let mut block = DMatrix::zeros(2 * d, 2 * d);
                block.view_mut((0, 0), (d, d)).copy_from(&a);
                block.view_mut((d, d), (d, d)).copy_from(&a);
                for f in &self.factors {
                    block
                        .view_mut((0, d), (d, d))
                        .copy_from(self.generators[f.generator].matrix.matrix());
                    let e = expm(&block);
                    let dpsi = e.view((0, d), (d, d)) * &r;
                    grad[f.slot] += 2.0 * hpsi.dot(&dpsi);
                }
                Ok((energy, grad))
            }
            _ => {
                let mut states = Vec::with_capacity(self.factors.len() + 1);
                states.push(self.reference_state());
                for f in &self.factors {
                    let next = self.exps[f.generator]
                        .apply(theta[f.slot], states.last().expect("non-empty"));
                    states.push(next);
                }
                let psi = states.last().expect("non-empty");
                let mut lambda = h * psi;
                let energy = psi.dot(&lambda);
                for (k, f) in self.factors.iter().enumerate().rev() {
                    let sigma = self.generators[f.generator].matrix.matrix();
                    grad[f.slot] += 2.0 * lambda.dot(&(sigma * &states[k + 1]));
                    lambda = self.exps[f.generator].apply(-theta[f.slot], &lambda);
                }
                Ok((energy, grad))
            }
        }
    }

    pub fn energy(&self, h: &DMatrix<f64>, theta: &[f64]) -> Result<f64> {
        let psi = self.state(theta)?;
        Ok(psi.dot(&(h * &psi)))
    }
}
