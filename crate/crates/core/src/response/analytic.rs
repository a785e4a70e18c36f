use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fockspace::TwoInTwoCoefficients;
use crate::response::matrices::Parameterization;

/// Closed-form metric Σ of a two-electron, two-orbital state for the basis `{G1, G2}`.
pub fn analytic_metric_2in2(
    param: Parameterization,
    c: &TwoInTwoCoefficients,
) -> Result<DMatrix<f64>> {
    check_normalized(c)?;
    let TwoInTwoCoefficients {
        c_1100: a,
        c_s: s,
        c_0011: b,
    } = *c;
    match param {
        Parameterization::Naive => {
            let d = a * a - b * b;
            let o = (a - b) * s;
            Ok(DMatrix::from_row_slice(2, 2, &[d, o, o, d]))
        }
        Parameterization::Proj => {
            let g1 = a * s + b * s;
            let s00 = a * a + s * s - g1 * g1;
            let s11 = a * a - a * a * b * b;
            let s01 = a * s - a * b * g1;
            Ok(DMatrix::from_row_slice(2, 2, &[s00, s01, s01, s11]))
        }
        Parameterization::Sc | Parameterization::St => Ok(DMatrix::identity(2, 2)),
    }
}

/// Closed-form `det Σ` for naive/proj (and 1 for sc/st).
pub fn analytic_metric_det_2in2(
    param: Parameterization,
    c_1100: f64,
    c_s: f64,
    c_0011: f64,
) -> Result<f64> {
    let c = TwoInTwoCoefficients {
        c_1100,
        c_s,
        c_0011,
    };
    check_normalized(&c)?;
    let (a, s, b) = (c_1100, c_s, c_0011);
    Ok(match param {
        Parameterization::Naive => (a * a - b * b).powi(2) - ((a - b) * s).powi(2),
        Parameterization::Proj => {
            let g1 = a * s + b * s;
            (a * a + s * s - g1 * g1) * (a * a - a * a * b * b) - (a * s - a * b * g1).powi(2)
        }
        Parameterization::Sc | Parameterization::St => 1.0,
    })
}

fn check_normalized(c: &TwoInTwoCoefficients) -> Result<()> {
    let n = c.norm_squared();
    if !n.is_finite() || (n - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "CI coefficients are not normalized (sum of squares {n})"
        )));
    }
    Ok(())
}
