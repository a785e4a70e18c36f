/// Bisects a sign change of `f` on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// Returns the final bracket. `f(lo)` and `f(hi)` must have opposite signs
/// (or one of them must be zero).
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    if flo == 0.0 {
        return (lo, lo);
    }
    if f(hi) == 0.0 {
        return (hi, hi);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return (mid, mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Golden-section minimization of a unimodal `f` on `[lo, hi]` down to width `tol`.
pub fn golden_min<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
        if !(x1 > lo && x2 < hi) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Indices `i` where `values[i]` and `values[i + 1]` differ in sign (a zero counts on its left interval only).
pub fn sign_changes(values: &[f64]) -> Vec<usize> {
    (0..values.len().saturating_sub(1))
        .filter(|&i| {
            let (a, b) = (values[i], values[i + 1]);
            (a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0) || (a == 0.0 && i == 0 && b != 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let (lo, hi) = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!(hi - lo <= 1e-12);
        assert!((0.5 * (lo + hi) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_v_minimum() {
        let x = golden_min(|x| (x - 0.3).abs(), -1.0, 1.0, 1e-13);
        assert!((x - 0.3).abs() < 1e-12);
    }

    #[test]
    fn sign_changes_counts_crossings() {
        assert_eq!(sign_changes(&[1.0, -1.0, -2.0, 3.0]), vec![0, 2]);
        assert_eq!(sign_changes(&[1.0, 0.0, -1.0]), vec![0]);
    }
}
