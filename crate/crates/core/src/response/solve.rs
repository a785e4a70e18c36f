use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cond2, generalized_eigen, norm2};
use crate::response::matrices::ResponseMatrices;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Σ is flagged singular when cond₂(Σ) exceeds this.
    pub singularity_threshold: f64,
    /// ... or when `|det S2| < det_rel_tol · max(‖S2‖₂, 1)^(2n)`.
    pub det_rel_tol: f64,
    /// `|β|` below `beta_tol · ‖S2‖₂` counts as an infinite eigenvalue.
    pub beta_tol: f64,
    /// Opt-in `eps·I` shift of Σ before solving; results carry the value.
    pub regularize: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            singularity_threshold: 1e8,
            det_rel_tol: 1e-14,
            beta_tol: 1e-14,
            regularize: None,
        }
    }
}

/// Metric diagnostics computed independently of the eigensolve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDiagnostics {
    pub det_sigma: f64,
    pub cond_sigma: f64,
    pub det_s2: f64,
    pub norm_s2: f64,
    pub singular: bool,
}

/// Positive-branch solutions of `E2 X = ω S2 X`.
#[derive(Debug, Clone)]
pub struct ResponseSolution {
    /// Real parts of the positive excitation energies, ascending (Hartree).
    pub omegas: Vec<f64>,
    /// Eigenvectors `X = (Z; W)` matching `omegas`, phase-fixed to be real.
    pub vectors: Vec<DVector<f64>>,
    /// `Xᵀ S2 X` per state.
    pub metric_norms: Vec<f64>,
    /// `Im ω` per kept root.
    pub imag: Vec<f64>,
    /// Largest `|Im ω|` among the kept roots.
    pub max_imag: f64,
    /// Eigenvalues discarded as infinite (`β ≈ 0`).
    pub n_infinite: usize,
    pub diagnostics: MetricDiagnostics,
    /// Total `eps` added to Σ, if any.
    pub regularization: Option<f64>,
}

impl ResponseSolution {
    pub fn flagged(&self) -> bool {
        self.diagnostics.singular
    }

    pub fn lowest(&self) -> Option<f64> {
        self.omegas.first().copied()
    }

    /// Lowest root whose imaginary part is below `rel_tol · max(1, ω)`.
    pub fn lowest_real(&self, rel_tol: f64) -> Option<f64> {
        self.omegas
            .iter()
            .zip(&self.imag)
            .find(|(w, im)| im.abs() <= rel_tol * w.abs().max(1.0))
            .map(|(w, _)| *w)
    }
}

/// `cond₂(Σ)`; `+inf` when the smallest singular value is exactly zero.
pub fn condition_number(sigma: &DMatrix<f64>) -> f64 {
    cond2(sigma)
}

pub fn metric_diagnostics(rm: &ResponseMatrices, opts: &SolveOptions) -> MetricDiagnostics {
    let s2 = rm.s2();
    let n = rm.n();
    let det_sigma = if n == 0 {
        1.0
    } else {
        rm.sigma.clone().determinant()
    };
    let cond_sigma = condition_number(&rm.sigma);
    let det_s2 = if n == 0 {
        1.0
    } else {
        s2.clone().determinant()
    };
    let norm_s2 = norm2(&s2);
    let scale = norm_s2.max(1.0).powi(2 * n as i32);
    let singular =
        cond_sigma > opts.singularity_threshold || det_s2.abs() < opts.det_rel_tol * scale;
    MetricDiagnostics {
        det_sigma,
        cond_sigma,
        det_s2,
        norm_s2,
        singular,
    }
}

/// Rotates a complex eigenvector so its largest component is real and returns the real part.
fn realify(v: &DVector<Complex64>) -> DVector<f64> {
    let lead = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = if lead.norm() > 0.0 {
        lead.conj() / lead.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    v.map(|c| (c * phase).re)
}

/// Solves the paired problem with QZ. Singular metrics are flagged; Σ is only
/// shifted when `opts.regularize` asks for it.
pub fn solve_response(rm: &ResponseMatrices, opts: &SolveOptions) -> Result<ResponseSolution> {
    let shifted;
    let rm = match opts.regularize {
        Some(eps) => {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::Domain(format!(
                    "regularization must be positive, got {eps}"
                )));
            }
            shifted = rm.regularized(eps);
            &shifted
        }
        None => rm,
    };
    if !rm.is_finite() {
        return Err(Error::NonFinite("response matrices".into()));
    }
    let diagnostics = metric_diagnostics(rm, opts);
    let e2 = rm.e2();
    let s2 = rm.s2();
    let pairs = generalized_eigen(&e2, &s2)?;
    let beta_floor = opts.beta_tol * diagnostics.norm_s2.max(f64::MIN_POSITIVE);
    let mut kept: Vec<(Complex64, DVector<f64>)> = Vec::new();
    let mut n_infinite = 0;
    for p in &pairs {
        match p.value(beta_floor) {
            None => n_infinite += 1,
            Some(w) if !w.re.is_finite() => n_infinite += 1,
            Some(w) if w.re > 0.0 => kept.push((w, realify(&p.vector))),
            Some(_) => {}
        }
    }
    kept.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    let max_imag = kept.iter().map(|(w, _)| w.im.abs()).fold(0.0, f64::max);
    let metric_norms = kept.iter().map(|(_, x)| x.dot(&(&s2 * x))).collect();
    Ok(ResponseSolution {
        omegas: kept.iter().map(|(w, _)| w.re).collect(),
        imag: kept.iter().map(|(w, _)| w.im).collect(),
        vectors: kept.into_iter().map(|(_, x)| x).collect(),
        metric_norms,
        max_imag,
        n_infinite,
        diagnostics,
        regularization: rm.regularization,
    })
}
