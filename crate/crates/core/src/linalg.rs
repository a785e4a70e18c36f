//! Dense linear-algebra helpers shared by the physics modules.
//!
//! Everything lives on `nalgebra` dense matrices except the generalized
//! eigensolver, which delegates to the QZ implementation in `faer` so that
//! singular metric pencils produce infinite eigenvalues instead of garbage
//! from an explicit inverse.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Symmetric eigendecomposition with eigenvalues in ascending order.
///
/// Eigenvector columns follow the sorted eigenvalues.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Spectral-norm condition number; `+inf` when the smallest singular value is exactly zero.
pub fn cond2(m: &DMatrix<f64>) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) => {
            if min == 0.0 {
                f64::INFINITY
            } else {
                max / min
            }
        }
        _ => 1.0,
    }
}

/// Spectral norm.
pub fn norm2(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `S^{-1/2}` for a symmetric positive-definite matrix.
///
/// Fails with [`Error::LinearDependence`] when the condition number exceeds `max_cond`.
pub fn inverse_sqrt_spd(s: &DMatrix<f64>, max_cond: f64) -> Result<DMatrix<f64>> {
    let (values, vectors) = sym_eigen_sorted(s);
    let n = values.len();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let min = values[0];
    let max = values[n - 1];
    if min <= 0.0 || max / min > max_cond {
        let cond = if min <= 0.0 { f64::INFINITY } else { max / min };
        return Err(Error::LinearDependence(cond));
    }
    let d = DMatrix::from_diagonal(&values.map(|v| 1.0 / v.sqrt()));
    Ok(&vectors * d * vectors.transpose())
}

/// Matrix exponential (scaling and squaring with Padé approximants).
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().exp()
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `max |M - M^T|`.
pub fn symmetry_residual(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// `max |M + M^T|`.
pub fn antisymmetry_residual(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m + m.transpose()))
}

/// Product `a * b` that skips zero entries of `a`.
///
/// Operator matrices in the determinant basis are extremely sparse, so this is
/// far cheaper than a dense GEMM for the commutator builds.
pub fn matmul_sparse_left(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), b.ncols());
    for k in 0..a.ncols() {
        for i in 0..a.nrows() {
            let aik = a[(i, k)];
            if aik == 0.0 {
                continue;
            }
            for j in 0..b.ncols() {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    out
}

/// Product `a * b` that skips zero entries of `b`.
pub fn matmul_sparse_right(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        for k in 0..b.nrows() {
            let bkj = b[(k, j)];
            if bkj == 0.0 {
                continue;
            }
            for i in 0..a.nrows() {
                out[(i, j)] += a[(i, k)] * bkj;
            }
        }
    }
    out
}

/// Cached exponential of a real antisymmetric generator.
///
/// The real Schur form of an antisymmetric matrix is block diagonal with
/// `[[0, mu], [-mu, 0]]` blocks, so `exp(theta * G) = Q R(theta) Q^T` with
/// `R` a direct sum of plane rotations. When the Schur form does not
/// reconstruct the generator to `1e-12` the dense Padé exponential is used.
#[derive(Debug, Clone)]
pub struct AntisymmetricExp {
    generator: DMatrix<f64>,
    schur: Option<SchurRotations>,
}

#[derive(Debug, Clone)]
struct SchurRotations {
    q: DMatrix<f64>,
    blocks: Vec<Block>,
}

#[derive(Debug, Clone, Copy)]
enum Block {
    Fixed(usize),
    Rotation(usize, f64),
}

impl AntisymmetricExp {
    pub fn new(generator: DMatrix<f64>) -> Self {
        let schur = Self::decompose(&generator);
        Self { generator, schur }
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    fn decompose(g: &DMatrix<f64>) -> Option<SchurRotations> {
        let n = g.nrows();
        if n == 0 {
            return Some(SchurRotations {
                q: DMatrix::zeros(0, 0),
                blocks: Vec::new(),
            });
        }
        let scale = max_abs(g).max(1.0);
        let (q, t) = g.clone().try_schur(1e-15, 10_000)?.unpack();
        let mut blocks = Vec::new();
        let mut clean = DMatrix::zeros(n, n);
        let mut i = 0;
        while i < n {
            if i + 1 < n && t[(i + 1, i)].abs() > 1e-13 * scale {
                let mu = 0.5 * (t[(i, i + 1)] - t[(i + 1, i)]);
                clean[(i, i + 1)] = mu;
                clean[(i + 1, i)] = -mu;
                blocks.push(Block::Rotation(i, mu));
                i += 2;
            } else {
                blocks.push(Block::Fixed(i));
                i += 1;
            }
        }
        let recon = &q * &clean * q.transpose();
        if max_abs(&(recon - g)) > 1e-12 * scale {
            return None;
        }
        Some(SchurRotations { q, blocks })
    }

    /// Dense `exp(theta * G)`.
    pub fn matrix(&self, theta: f64) -> DMatrix<f64> {
        match &self.schur {
            Some(s) => {
                let n = s.q.nrows();
                let mut r = DMatrix::<f64>::zeros(n, n);
                for b in &s.blocks {
                    match *b {
                        Block::Fixed(i) => r[(i, i)] = 1.0,
                        Block::Rotation(i, mu) => {
                            let (sn, cs) = (theta * mu).sin_cos();
                            r[(i, i)] = cs;
                            r[(i, i + 1)] = sn;
                            r[(i + 1, i)] = -sn;
                            r[(i + 1, i + 1)] = cs;
                        }
                    }
                }
                &s.q * r * s.q.transpose()
            }
            None => expm(&(&self.generator * theta)),
        }
    }

    /// `exp(theta * G) v` without forming the dense exponential.
    pub fn apply(&self, theta: f64, v: &DVector<f64>) -> DVector<f64> {
        match &self.schur {
            Some(s) => {
                let mut y = s.q.tr_mul(v);
                for b in &s.blocks {
                    if let Block::Rotation(i, mu) = *b {
                        let (sn, cs) = (theta * mu).sin_cos();
                        let (a, c) = (y[i], y[i + 1]);
                        y[i] = cs * a + sn * c;
                        y[i + 1] = -sn * a + cs * c;
                    }
                }
                &s.q * y
            }
            None => expm(&(&self.generator * theta)) * v,
        }
    }
}

/// One eigenpair of the pencil `(A, B)`: `A x = (alpha / beta) B x`.
#[derive(Debug, Clone)]
pub struct GeneralizedEigenpair {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub vector: DVector<Complex64>,
}

impl GeneralizedEigenpair {
    /// `alpha / beta`, or `None` for an infinite eigenvalue (`|beta| <= tol`).
    pub fn value(&self, tol: f64) -> Option<Complex64> {
        if self.beta.norm() <= tol {
            None
        } else {
            Some(self.alpha / self.beta)
        }
    }
}

/// QZ-based generalized eigendecomposition of a real square pencil.
pub fn generalized_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<GeneralizedEigenpair>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "pencil shapes {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let fa = faer::Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)]);
    let fb = faer::Mat::<f64>::from_fn(n, n, |i, j| b[(i, j)]);
    let gevd = fa
        .generalized_eigen(&fb)
        .map_err(|e| Error::Linalg(format!("QZ did not converge: {e:?}")))?;
    let u = gevd.U();
    let sa = gevd.S_a().column_vector();
    let sb = gevd.S_b().column_vector();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let vector = DVector::from_fn(n, |i, _| u[(i, k)]);
        out.push(GeneralizedEigenpair {
            alpha: sa[k],
            beta: sb[k],
            vector,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn random_antisym(n: usize, seed: u64) -> DMatrix<f64> {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = next();
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        m
    }

    #[test]
    fn schur_exponential_matches_pade() {
        for (n, seed) in [(2, 1), (5, 2), (8, 3)] {
            let g = random_antisym(n, seed);
            let cached = AntisymmetricExp::new(g.clone());
            for theta in [0.0, 0.3, -1.7, 4.0] {
                let reference = expm(&(&g * theta));
                assert!(max_abs(&(cached.matrix(theta) - &reference)) < 1e-12);
                let v = DVector::from_fn(n, |i, _| (i as f64 + 1.0).sin());
                let applied = cached.apply(theta, &v);
                assert!((applied - &reference * &v).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn exponential_of_antisymmetric_is_orthogonal() {
        let g = random_antisym(6, 11);
        let u = AntisymmetricExp::new(g).matrix(0.9);
        let eye = DMatrix::<f64>::identity(6, 6);
        assert!(max_abs(&(u.transpose() * &u - eye)) < 1e-12);
    }

    #[test]
    fn cond2_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![10.0, 1e-3]));
        assert_relative_eq!(cond2(&m), 1e4, max_relative = 1e-12);
        assert_eq!(cond2(&DMatrix::identity(3, 3)), 1.0);
        assert!(cond2(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]))).is_infinite());
    }

    #[test]
    fn qz_reports_infinite_eigenvalue_for_singular_metric() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let pairs = generalized_eigen(&a, &b).unwrap();
        let finite: Vec<_> = pairs.iter().filter_map(|p| p.value(1e-12)).collect();
        assert_eq!(finite.len(), 1);
        assert_relative_eq!(finite[0].re, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn sparse_products_match_dense() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 3.0]);
        let b = DMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        assert_eq!(matmul_sparse_left(&a, &b), &a * &b);
        assert_eq!(matmul_sparse_right(&b, &a), &b * &a);
    }
}
