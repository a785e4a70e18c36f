use crate::error::{Error, Result};

const TAYLOR_CUTOFF: f64 = 1e-10;

/// Zeroth-order Boys function `F0(t) = ∫₀¹ exp(-t u²) du`.
pub fn boys_f0(t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!(
            "Boys function argument must be >= 0, got {t}"
        )));
    }
    Ok(boys_f0_unchecked(t))
}

/// Same as [`boys_f0`] without the domain check; callers guarantee `t >= 0`.
pub(crate) fn boys_f0_unchecked(t: f64) -> f64 {
    if t <= TAYLOR_CUTOFF {
        // Σ (-t)^k / (k! (2k+1)), k = 0..5
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..6 {
            sum += term / (2 * k + 1) as f64;
            term *= -t / (k + 1) as f64;
        }
        sum
    } else if t.is_infinite() {
        0.0
    } else {
        let st = t.sqrt();
        0.5 * (std::f64::consts::PI / t).sqrt() * libm::erf(st)
    }
}
