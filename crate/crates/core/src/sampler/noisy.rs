use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::GroundState;
use crate::error::{Error, Result};
use crate::fockspace::{hamiltonian_op, FermionOp, Hermiticity, OperatorMatrix, SectorBasis};
use crate::linalg::{matmul_sparse_left, matmul_sparse_right};
use crate::orbrot::MOIntegrals;
use crate::response::{
    ExcitationOperatorSet, Parameterization, PropertyGradient, ResponseMatrices,
};
use crate::sampler::pauli::{PauliTable, RealPauliSum};
use crate::sampler::shots::{sample_expectation, ShotPlan};

/// One matrix element as a polynomial in operator expectations:
/// `Σ coeff · Π ⟨ops[k]⟩`.
#[derive(Debug, Clone)]
struct Recipe {
    monomials: Vec<(f64, Vec<usize>)>,
}

impl Recipe {
    fn single(op: usize) -> Self {
        Self {
            monomials: vec![(1.0, vec![op])],
        }
    }

    fn zero() -> Self {
        Self {
            monomials: Vec::new(),
        }
    }
}

/// How Pauli expectations are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Exact `⟨P⟩`; reproduces the dense matrices.
    Exact,
    /// Binomial sampling with the plan's shots; `repetition` selects the RNG streams.
    Sampled { stream: u64, repetition: usize },
}

/// Pauli-expanded response problem for one ground state.
///
/// Every distinct operator entering any matrix element is decomposed once;
/// sampling then only redraws estimates. Within one element each distinct
/// Pauli string is measured once and reused by all factors of that element;
/// different elements never share estimates.
#[derive(Debug, Clone)]
pub struct NoisyResponseModel {
    param: Parameterization,
    n: usize,
    n_qubits: usize,
    table: PauliTable,
    ops: Vec<RealPauliSum>,
    /// `A`, `B`, `Σ`, `Δ` row-major, then `V_x, V_y, V_z`.
    recipes: Vec<Recipe>,
}

fn full_fock_matrix(basis: &Arc<SectorBasis>, op: &FermionOp) -> Result<DMatrix<f64>> {
    Ok(OperatorMatrix::from_fermion_op(basis, op, Hermiticity::General)?.into_matrix())
}

fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    matmul_sparse_left(a, b) - matmul_sparse_left(b, a)
}

impl NoisyResponseModel {
    /// Builds the expansion for `param ∈ {naive, proj}`.
    ///
    /// `mo` must be the integrals the ground state was optimized for.
    pub fn new(
        param: Parameterization,
        ground: &GroundState,
        mo: &MOIntegrals,
        g: &ExcitationOperatorSet,
    ) -> Result<Self> {
        if !matches!(param, Parameterization::Naive | Parameterization::Proj) {
            return Err(Error::Unsupported(format!(
                "noisy response matrices are only built for naive and proj, not {param} (its metric is the identity)"
            )));
        }
        if ground.state.len() != g.basis.dim() {
            return Err(Error::DimensionMismatch(
                "ground state and operator basis differ".into(),
            ));
        }
        let full = Arc::new(SectorBasis::full_fock(g.basis.n_mo())?);
        let n_qubits = full.n_modes();
        let psi = g.basis.embed(&ground.state);
        let table = PauliTable::exact(&psi)?;

        let h = full_fock_matrix(&full, &hamiltonian_op(mo))?;
        let gs: Vec<DMatrix<f64>> = g
            .labels
            .iter()
            .map(|l| full_fock_matrix(&full, &l.fermion_op()))
            .collect::<Result<_>>()?;
        let mut mu = Vec::with_capacity(3);
        for k in 0..3 {
            let mut op = FermionOp::zero();
            for p in 0..mo.n_mo {
                for q in 0..mo.n_mo {
                    if mo.d[k][(p, q)] != 0.0 {
                        op = op + FermionOp::e_pq(p, q).scaled(mo.d[k][(p, q)]);
                    }
                }
            }
            mu.push(full_fock_matrix(&full, &op)?);
        }

        let n = gs.len();
        let mut dense: Vec<DMatrix<f64>> = Vec::new();
        let mut recipes = Vec::with_capacity(4 * n * n + 3 * n);
        match param {
            Parameterization::Naive => {
                let hg: Vec<DMatrix<f64>> = gs.iter().map(|gj| commutator(&h, gj)).collect();
                let hgt: Vec<DMatrix<f64>> = gs
                    .iter()
                    .map(|gj| commutator(&h, &gj.transpose()))
                    .collect();
                let gt: Vec<DMatrix<f64>> = gs.iter().map(|gi| gi.transpose()).collect();
                // A, B, Σ, Δ are formed in parallel then appended in fixed order.
                let blocks: [Vec<DMatrix<f64>>; 4] = [
                    pairs(n)
                        .par_iter()
                        .map(|&(i, j)| commutator(&gt[i], &hg[j]))
                        .collect(),
                    pairs(n)
                        .par_iter()
                        .map(|&(i, j)| commutator(&gt[i], &hgt[j]))
                        .collect(),
                    pairs(n)
                        .par_iter()
                        .map(|&(i, j)| commutator(&gt[i], &gs[j]))
                        .collect(),
                    pairs(n)
                        .par_iter()
                        .map(|&(i, j)| commutator(&gt[i], &gt[j]))
                        .collect(),
                ];
                for block in blocks {
                    for m in block {
                        recipes.push(Recipe::single(dense.len()));
                        dense.push(m);
                    }
                }
                for m in &mu {
                    for gj in &gs {
                        recipes.push(Recipe::single(dense.len()));
                        dense.push(commutator(m, gj));
                    }
                }
            }
            Parameterization::Proj => {
                let i_h = 0;
                dense.push(h.clone());
                let i_g = dense.len();
                dense.extend(gs.iter().cloned());
                let i_hg = dense.len();
                dense.extend(gs.iter().map(|gj| matmul_sparse_right(&h, gj)));
                let i_gtg = dense.len();
                dense.extend(
                    pairs(n)
                        .par_iter()
                        .map(|&(i, j)| matmul_sparse_left(&gs[i].transpose(), &gs[j]))
                        .collect::<Vec<_>>(),
                );
                let i_gthg = dense.len();
                let hgs: Vec<DMatrix<f64>> = dense[i_hg..i_hg + n].to_vec();
                dense.extend(
                    pairs(n)
                        .par_iter()
                        .map(|&(i, j)| matmul_sparse_left(&gs[i].transpose(), &hgs[j]))
                        .collect::<Vec<_>>(),
                );
                let i_mu = dense.len();
                dense.extend(mu.iter().cloned());
                let i_mug = dense.len();
                for m in &mu {
                    for gj in &gs {
                        dense.push(matmul_sparse_right(m, gj));
                    }
                }
                let gi = |i: usize| i_g + i;
                for (i, j) in pairs(n) {
                    recipes.push(Recipe {
                        monomials: vec![
                            (1.0, vec![i_gthg + i * n + j]),
                            (-1.0, vec![i_h, i_gtg + i * n + j]),
                            (-1.0, vec![gi(i), i_hg + j]),
                            (1.0, vec![gi(i), i_h, gi(j)]),
                        ],
                    });
                }
                for (i, j) in pairs(n) {
                    recipes.push(Recipe {
                        monomials: vec![
                            (1.0, vec![gi(j), i_hg + i]),
                            (-1.0, vec![gi(j), gi(i), i_h]),
                        ],
                    });
                }
                for (i, j) in pairs(n) {
                    recipes.push(Recipe {
                        monomials: vec![(1.0, vec![i_gtg + i * n + j]), (-1.0, vec![gi(i), gi(j)])],
                    });
                }
                for _ in 0..n * n {
                    recipes.push(Recipe::zero());
                }
                for k in 0..3 {
                    for j in 0..n {
                        recipes.push(Recipe {
                            monomials: vec![
                                (1.0, vec![i_mug + k * n + j]),
                                (-1.0, vec![gi(j), i_mu + k]),
                            ],
                        });
                    }
                }
            }
            _ => unreachable!(),
        }
        let ops = dense
            .into_par_iter()
            .map(|m| RealPauliSum::from_symmetric(&m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            param,
            n,
            n_qubits,
            table,
            ops,
            recipes,
        })
    }

    pub fn param(&self) -> Parameterization {
        self.param
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of distinct decomposed operators.
    pub fn n_operators(&self) -> usize {
        self.ops.len()
    }

    /// Total Pauli terms over all decomposed operators.
    pub fn n_pauli_terms(&self) -> usize {
        self.ops.iter().map(RealPauliSum::len).sum()
    }

    /// Number of sampled matrix elements.
    pub fn n_elements(&self) -> usize {
        self.recipes.len()
    }

    /// Exact expectations of every Pauli string in the ground state.
    pub fn table(&self) -> &PauliTable {
        &self.table
    }

    /// Evaluates all element values with the given estimator.
    fn element_values(&self, plan: Option<&ShotPlan>, estimator: Estimator) -> Result<Vec<f64>> {
        if let Estimator::Sampled { .. } = estimator {
            if plan.is_none() {
                return Err(Error::Precondition("sampling needs a shot plan".into()));
            }
        }
        let size = self.table.values.len();
        let values = (0..self.recipes.len())
            .into_par_iter()
            .map_init(
                || (vec![0.0f64; size], vec![u32::MAX; size]),
                |(cache, stamp), e| {
                    let recipe = &self.recipes[e];
                    let e32 = e as u32;
                    let mut rng = match (estimator, plan) {
                        (Estimator::Sampled { stream, repetition }, Some(p)) => Some((
                            ChaCha8Rng::seed_from_u64(p.derived_seed(stream, repetition, e)),
                            p.shots,
                        )),
                        _ => None,
                    };
                    let mut op_value = |k: usize| -> f64 {
                        self.ops[k]
                            .terms
                            .iter()
                            .map(|&(idx, c)| {
                                let idx = idx as usize;
                                let est = match rng.as_mut() {
                                    None => self.table.values[idx],
                                    Some((r, shots)) => {
                                        if stamp[idx] != e32 {
                                            stamp[idx] = e32;
                                            cache[idx] = if idx == 0 {
                                                1.0
                                            } else {
                                                sample_expectation(
                                                    self.table.values[idx],
                                                    *shots,
                                                    r,
                                                )
                                            };
                                        }
                                        cache[idx]
                                    }
                                };
                                c * est
                            })
                            .sum()
                    };
                    // Each factor within this element is evaluated once.
                    let mut factor_cache: Vec<(usize, f64)> = Vec::new();
                    let mut total = 0.0;
                    for (coeff, factors) in &recipe.monomials {
                        let mut prod = *coeff;
                        for &k in factors {
                            let v = match factor_cache.iter().find(|(kk, _)| *kk == k) {
                                Some(&(_, v)) => v,
                                None => {
                                    let v = op_value(k);
                                    factor_cache.push((k, v));
                                    v
                                }
                            };
                            prod *= v;
                        }
                        total += prod;
                    }
                    total
                },
            )
            .collect();
        Ok(values)
    }

    /// Response matrices and property gradients from the estimator.
    pub fn build(
        &self,
        plan: Option<&ShotPlan>,
        estimator: Estimator,
    ) -> Result<(ResponseMatrices, PropertyGradient)> {
        let vals = self.element_values(plan, estimator)?;
        let n = self.n;
        let block = |b: usize| DMatrix::from_fn(n, n, |i, j| vals[b * n * n + i * n + j]);
        let rm = ResponseMatrices::from_raw(self.param, block(0), block(1), block(2), block(3))?;
        let off = 4 * n * n;
        let mut pg = PropertyGradient::zeros(n);
        for k in 0..3 {
            pg.v[k] = DVector::from_fn(n, |j, _| vals[off + k * n + j]);
            pg.w[k] = -&pg.v[k];
        }
        Ok((rm, pg))
    }

    /// Exact (zero-noise) matrices.
    pub fn exact(&self) -> Result<(ResponseMatrices, PropertyGradient)> {
        self.build(None, Estimator::Exact)
    }

    /// One noisy draw: repetition `repetition` of stream `stream`.
    pub fn sample(
        &self,
        plan: &ShotPlan,
        stream: u64,
        repetition: usize,
    ) -> Result<(ResponseMatrices, PropertyGradient)> {
        self.build(Some(plan), Estimator::Sampled { stream, repetition })
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
}

/// Shot-noise response matrices for one repetition (convenience wrapper).
pub fn build_noisy_response_matrices(
    param: Parameterization,
    ground: &GroundState,
    mo: &MOIntegrals,
    g: &ExcitationOperatorSet,
    plan: &ShotPlan,
    repetition: usize,
) -> Result<ResponseMatrices> {
    Ok(NoisyResponseModel::new(param, ground, mo, g)?
        .sample(plan, 0, repetition)?
        .0)
}
