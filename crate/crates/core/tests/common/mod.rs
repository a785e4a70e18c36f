#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Gauss–Legendre nodes and weights on `[lo, hi]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        let half = 0.5 * (hi - lo);
        out.push((lo + half * (x + 1.0), w * half));
    }
    out
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Trapezoid rule for a Gaussian-like integrand of precision `prec` centered at `center`.
///
/// For integrands that decay like `exp(-prec (x - center)^2)` the rule is
/// spectrally accurate; the step and range leave errors far below 1e-12.
pub fn gaussian_trapezoid(f: impl Fn(f64) -> f64, center: f64, prec: f64, extra: f64) -> f64 {
    let width = 1.0 / prec.sqrt();
    let h = 0.45 * width;
    let half = 9.5 * width + extra;
    let n = (half / h).ceil() as i64;
    (-n..=n).map(|k| f(center + k as f64 * h)).sum::<f64>() * h
}

/// Nodes for `∫₀^∞ g(s) ds` via `s = w/(1−w)`, Gauss–Legendre panels in `w`.
pub fn half_line_nodes() -> Vec<(f64, f64)> {
    let panels = [0.0, 0.2, 0.4, 0.6, 0.75, 0.85, 0.92, 0.96, 0.985, 1.0];
    let mut out = Vec::new();
    for w in panels.windows(2) {
        for (x, wt) in gauss_legendre(16, w[0], w[1]) {
            let s = x / (1.0 - x);
            out.push((s, wt / (1.0 - x).powi(2)));
        }
    }
    out
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let norm = v.norm();
    v / norm
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).amax()
}

pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `S^{-1/2}` from an eigendecomposition.
pub fn inverse_sqrt(s: &DMatrix<f64>) -> DMatrix<f64> {
    let e = s.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| 1.0 / l.sqrt()));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}
