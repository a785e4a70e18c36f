//! Small dense optimizers: BFGS with a Newton polish, and Nelder–Mead.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub f: f64,
    /// `‖∇f‖∞` at `x` (NaN for derivative-free runs).
    pub grad_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop once `‖∇f‖∞` falls below this.
    pub gtol: f64,
    /// Newton steps with a finite-difference Hessian after BFGS.
    pub polish_steps: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            gtol: 1e-10,
            polish_steps: 3,
        }
    }
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.amax()
}

/// BFGS with backtracking line search on a function returning `(f, ∇f)`.
pub fn bfgs<F>(fg: F, x0: &[f64], opts: &BfgsOptions) -> OptimResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &DVector<f64>| {
        evaluations += 1;
        let (f, g) = fg(x.as_slice());
        (f, DVector::from_vec(g))
    };
    let mut x = DVector::from_column_slice(x0);
    let (mut f, mut g) = eval(&x);
    if n == 0 {
        return OptimResult {
            x: Vec::new(),
            f,
            grad_norm: 0.0,
            iterations: 0,
            evaluations,
            converged: true,
        };
    }
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut iterations = 0;
    let mut stalled = 0;
    let mut flat = 0;
    while iterations < opts.max_iter && inf_norm(&g) > opts.gtol {
        iterations += 1;
        let mut p = -(&hinv * &g);
        let mut slope = g.dot(&p);
        if slope >= 0.0 {
            hinv = DMatrix::identity(n, n);
            p = -g.clone();
            slope = g.dot(&p);
        }
        // keep trial steps bounded: parameters are angles
        let pn = p.amax();
        if pn > 1.0 {
            p /= pn;
            slope /= pn;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn = &x + &p * alpha;
            let (fn_, gn) = eval(&xn);
            if fn_ <= f + 1e-4 * alpha * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            stalled += 1;
            hinv = DMatrix::identity(n, n);
            if stalled > 2 {
                break;
            }
            continue;
        };
        stalled = 0;
        // at machine precision the Armijo test accepts noise; stop after a few such steps
        if f - fn_ <= 4.0 * f64::EPSILON * f.abs().max(1.0) {
            flat += 1;
        } else {
            flat = 0;
        }
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let eye = DMatrix::<f64>::identity(n, n);
            let a = &eye - &s * y.transpose() * rho;
            hinv = &a * &hinv * a.transpose() + &s * s.transpose() * rho;
        }
        x = xn;
        f = fn_;
        g = gn;
        if flat >= 5 {
            break;
        }
    }

    for _ in 0..opts.polish_steps {
        if inf_norm(&g) <= opts.gtol * 1e-2 {
            break;
        }
        let h = 1e-5;
        let mut hess = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut xp = x.clone();
            xp[k] += h;
            let mut xm = x.clone();
            xm[k] -= h;
            let (_, gp) = eval(&xp);
            let (_, gm) = eval(&xm);
            hess.set_column(k, &((gp - gm) / (2.0 * h)));
        }
        let hess = (&hess + hess.transpose()) * 0.5;
        let svd = hess.svd(true, true);
        let smax = svd.singular_values.max();
        let Ok(step) = svd.solve(&g, smax * 1e-10) else {
            break;
        };
        let xn = &x - step;
        let (fn_, gn) = eval(&xn);
        if inf_norm(&gn) < inf_norm(&g) && fn_ <= f + 1e-13 * f.abs().max(1.0) {
            x = xn;
            f = fn_;
            g = gn;
        } else {
            break;
        }
    }

    let grad_norm = inf_norm(&g);
    OptimResult {
        x: x.as_slice().to_vec(),
        f,
        grad_norm,
        iterations,
        evaluations,
        converged: grad_norm <= opts.gtol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Converged when the simplex's function spread falls below this.
    pub ftol: f64,
    /// ... and its largest vertex distance below this.
    pub xtol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 20_000,
            ftol: 1e-12,
            xtol: 1e-10,
            initial_step: 0.1,
        }
    }
}

/// Nelder–Mead with dimension-adaptive coefficients.
///
/// Non-finite objective values are treated as `+inf`, so a caller can reject
/// trial points by returning `f64::INFINITY`.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let mut f = f;
    let n = x0.len();
    let evaluations = std::cell::Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let v = eval(x0);
        return OptimResult {
            x: Vec::new(),
            f: v,
            grad_norm: f64::NAN,
            iterations: 0,
            evaluations: evaluations.get(),
            converged: true,
        };
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for k in 0..n {
        let mut v = x0.to_vec();
        v[k] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut iterations = 0;
    let mut converged = false;

    while evaluations.get() < opts.max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = (values[n] - values[0]).abs();
        let size = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.ftol && size <= opts.xtol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / nf)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|k| centroid[k] + t * (simplex[n][k] - centroid[k]))
                .collect()
        };
        let xr = along(-alpha);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(-alpha * gamma);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(-alpha * rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let shrunk: Vec<f64> = (0..n)
                .map(|k| simplex[0][k] + sigma * (simplex[i][k] - simplex[0][k]))
                .collect();
            values[i] = eval(&shrunk);
            simplex[i] = shrunk;
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    OptimResult {
        x: simplex[best].clone(),
        f: values[best],
        grad_norm: f64::NAN,
        iterations,
        evaluations: evaluations.get(),
        converged,
    }
}
