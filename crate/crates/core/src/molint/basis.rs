use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// A normalized contracted s-type Gaussian.
///
/// Coefficients already carry the primitive normalization, so the function is
/// `Σ_k c_k exp(-α_k r²)` with unit self-overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractedShell {
    pub center: usize,
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl ContractedShell {
    /// Builds a normalized shell from raw (unnormalized) basis-file data.
    pub fn from_raw(center: usize, exponents: Vec<f64>, raw_coefficients: &[f64]) -> Result<Self> {
        if exponents.is_empty() || exponents.len() != raw_coefficients.len() {
            return Err(Error::DimensionMismatch(
                "shell needs equally many exponents and coefficients".into(),
            ));
        }
        if let Some(bad) = exponents.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::Domain(format!(
                "Gaussian exponent must be positive, got {bad}"
            )));
        }
        let mut coefficients: Vec<f64> = exponents
            .iter()
            .zip(raw_coefficients)
            .map(|(&a, &c)| c * (2.0 * a / std::f64::consts::PI).powf(0.75))
            .collect();
        let norm = Self::raw_self_overlap(&exponents, &coefficients).sqrt();
        for c in &mut coefficients {
            *c /= norm;
        }
        Ok(Self {
            center,
            exponents,
            coefficients,
        })
    }

    fn raw_self_overlap(exps: &[f64], coefs: &[f64]) -> f64 {
        let mut s = 0.0;
        for (a, ca) in exps.iter().zip(coefs) {
            for (b, cb) in exps.iter().zip(coefs) {
                s += ca * cb * (std::f64::consts::PI / (a + b)).powf(1.5);
            }
        }
        s
    }

    pub fn self_overlap(&self) -> f64 {
        Self::raw_self_overlap(&self.exponents, &self.coefficients)
    }

    pub fn n_primitives(&self) -> usize {
        self.exponents.len()
    }

    /// Same shell placed on another atom.
    pub fn on_center(&self, center: usize) -> Self {
        Self {
            center,
            ..self.clone()
        }
    }
}

/// Shells per element, keyed by capitalized symbol (`"He"`).
pub type BasisSet = BTreeMap<String, Vec<ContractedShell>>;

const STO_3G: &str = include_str!("../../data/basis/sto-3g.gbs");
const SIX_31G: &str = include_str!("../../data/basis/6-31g.gbs");

/// Canonical element spelling: first letter upper, rest lower.
pub fn canonical_symbol(symbol: &str) -> String {
    let mut chars = symbol.trim().chars();
    match chars.next() {
        Some(first) => {
            first.to_ascii_uppercase().to_string() + &chars.as_str().to_ascii_lowercase()
        }
        None => String::new(),
    }
}

/// Loads the requested elements from a Gaussian94 basis file.
pub fn load_basis(path: impl AsRef<Path>, elements: &[&str]) -> Result<BasisSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_basis(&text, elements)
}

/// Basis sets bundled with the crate (`"sto-3g"`, `"6-31g"`).
pub fn builtin_basis(name: &str, elements: &[&str]) -> Result<BasisSet> {
    let text = match name.to_ascii_lowercase().as_str() {
        "sto-3g" | "sto3g" => STO_3G,
        "6-31g" | "631g" => SIX_31G,
        other => {
            return Err(Error::Unsupported(format!(
                "no bundled basis set named '{other}'"
            )))
        }
    };
    parse_basis(text, elements)
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    token
        .replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| Error::BasisFormat {
            line,
            message: format!("expected a number, found '{token}'"),
        })
}

/// Parses Gaussian94 text. Only the requested elements are returned; a
/// requested element that is absent is an error.
pub fn parse_basis(text: &str, elements: &[&str]) -> Result<BasisSet> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('!'))
        .collect();
    if lines.is_empty() {
        return Err(Error::BasisFormat {
            line: 1,
            message: "file contains no basis data".into(),
        });
    }

    let mut all = BasisSet::new();
    let mut i = 0;
    while i < lines.len() {
        let (lineno, line) = lines[i];
        if line.starts_with("****") {
            i += 1;
            continue;
        }
        let mut head = line.split_whitespace();
        let element = canonical_symbol(head.next().unwrap_or_default());
        if head.next().is_none() {
            return Err(Error::BasisFormat {
                line: lineno,
                message: format!("expected '<element> 0' header, found '{line}'"),
            });
        }
        i += 1;
        let mut shells = Vec::new();
        while i < lines.len() && !lines[i].1.starts_with("****") {
            let (shell_line, shell_header) = lines[i];
            let fields: Vec<&str> = shell_header.split_whitespace().collect();
            if fields.len() < 2 {
                return Err(Error::BasisFormat {
                    line: shell_line,
                    message: format!("malformed shell header '{shell_header}'"),
                });
            }
            let kind = fields[0].to_ascii_uppercase();
            if kind != "S" {
                return Err(Error::UnsupportedAngularMomentum {
                    element: element.clone(),
                    shell: kind,
                    line: shell_line,
                });
            }
            let n_prim: usize = fields[1].parse().map_err(|_| Error::BasisFormat {
                line: shell_line,
                message: format!("bad primitive count '{}'", fields[1]),
            })?;
            if n_prim == 0 {
                return Err(Error::BasisFormat {
                    line: shell_line,
                    message: "shell with zero primitives".into(),
                });
            }
            let mut exps = Vec::with_capacity(n_prim);
            let mut coefs = Vec::with_capacity(n_prim);
            for k in 0..n_prim {
                let Some(&(pl, prim)) = lines.get(i + 1 + k) else {
                    return Err(Error::BasisFormat {
                        line: shell_line,
                        message: "unexpected end of file inside shell".into(),
                    });
                };
                let nums: Vec<&str> = prim.split_whitespace().collect();
                if nums.len() < 2 {
                    return Err(Error::BasisFormat {
                        line: pl,
                        message: format!("expected exponent and coefficient, found '{prim}'"),
                    });
                }
                exps.push(parse_number(nums[0], pl)?);
                coefs.push(parse_number(nums[1], pl)?);
            }
            let shell =
                ContractedShell::from_raw(0, exps, &coefs).map_err(|e| Error::BasisFormat {
                    line: shell_line,
                    message: e.to_string(),
                })?;
            shells.push(shell);
            i += 1 + n_prim;
        }
        if i >= lines.len() {
            return Err(Error::BasisFormat {
                line: lineno,
                message: format!("block for {element} is not terminated by '****'"),
            });
        }
        all.insert(element, shells);
    }

    let mut out = BasisSet::new();
    for e in elements {
        let key = canonical_symbol(e);
        let shells = all
            .get(&key)
            .ok_or_else(|| Error::MissingElement(key.clone()))?;
        out.insert(key, shells.clone());
    }
    Ok(out)
}
