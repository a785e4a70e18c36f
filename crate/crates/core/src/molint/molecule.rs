use crate::error::{Error, Result};
use crate::molint::basis::canonical_symbol;

/// Bohr per Ångström.
pub const BOHR_PER_ANGSTROM: f64 = 1.8897261246;

const MIN_SEPARATION: f64 = 1e-6;

const ELEMENTS: [&str; 10] = ["H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne"];

/// Nuclear charge for an element symbol (case-insensitive).
pub fn nuclear_charge(symbol: &str) -> Result<u32> {
    let key = canonical_symbol(symbol);
    ELEMENTS
        .iter()
        .position(|&e| e == key)
        .map(|i| i as u32 + 1)
        .ok_or(Error::MissingElement(key))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub symbol: String,
    pub charge: u32,
    /// Position in Bohr.
    pub position: [f64; 3],
}

/// Closed-shell molecule; coordinates in Bohr.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    charge: i32,
    n_electrons: usize,
}

impl Molecule {
    /// `atoms` are (symbol, position in Bohr).
    pub fn new(atoms: &[(&str, [f64; 3])], charge: i32) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Geometry("molecule has no atoms".into()));
        }
        let mut list = Vec::with_capacity(atoms.len());
        for (symbol, position) in atoms {
            if position.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite(format!("coordinates of {symbol}")));
            }
            list.push(Atom {
                symbol: canonical_symbol(symbol),
                charge: nuclear_charge(symbol)?,
                position: *position,
            });
        }
        for i in 0..list.len() {
            for j in 0..i {
                if distance(&list[i].position, &list[j].position) < MIN_SEPARATION {
                    return Err(Error::Geometry(format!(
                        "atoms {j} ({}) and {i} ({}) coincide",
                        list[j].symbol, list[i].symbol
                    )));
                }
            }
        }
        let total: i64 = list.iter().map(|a| a.charge as i64).sum::<i64>() - charge as i64;
        if total < 0 {
            return Err(Error::Precondition(format!(
                "charge {charge} leaves a negative electron count"
            )));
        }
        if total % 2 != 0 {
            return Err(Error::Precondition(format!(
                "{total} electrons: a closed-shell reference needs an even count"
            )));
        }
        Ok(Self {
            atoms: list,
            charge,
            n_electrons: total as usize,
        })
    }

    /// Same as [`Molecule::new`] with positions given in Ångström.
    pub fn from_angstrom(atoms: &[(&str, [f64; 3])], charge: i32) -> Result<Self> {
        let bohr: Vec<(&str, [f64; 3])> = atoms
            .iter()
            .map(|(s, p)| (*s, p.map(|c| c * BOHR_PER_ANGSTROM)))
            .collect();
        Self::new(&bohr, charge)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn charge(&self) -> i32 {
        self.charge
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    /// Distinct element symbols in order of first appearance.
    pub fn elements(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for a in &self.atoms {
            if !out.contains(&a.symbol.as_str()) {
                out.push(&a.symbol);
            }
        }
        out
    }

    /// `Σ_{A<B} Z_A Z_B / R_AB`.
    pub fn nuclear_repulsion(&self) -> f64 {
        let mut e = 0.0;
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[..i] {
                e += (a.charge * b.charge) as f64 / distance(&a.position, &b.position);
            }
        }
        e
    }

    /// Rigid translation by `shift` (Bohr).
    pub fn translated(&self, shift: [f64; 3]) -> Self {
        let mut out = self.clone();
        for a in &mut out.atoms {
            for k in 0..3 {
                a.position[k] += shift[k];
            }
        }
        out
    }
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    dist2(a, b).sqrt()
}

pub(crate) fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn electron_count_and_parity() {
        let he = Molecule::new(&[("He", [0.0; 3])], 0).unwrap();
        assert_eq!(he.n_electrons(), 2);
        assert!(matches!(
            Molecule::new(&[("H", [0.0; 3])], 0),
            Err(Error::Precondition(_))
        ));
        assert_eq!(
            Molecule::new(&[("H", [0.0; 3])], -1).unwrap().n_electrons(),
            2
        );
    }

    #[test]
    fn coincident_nuclei_are_a_geometry_error() {
        let r = Molecule::new(&[("H", [0.0; 3]), ("h", [0.0; 3])], 0);
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn nuclear_repulsion_of_h2() {
        let h2 = Molecule::new(&[("H", [0.0; 3]), ("H", [0.0, 0.0, 1.4])], 0).unwrap();
        assert!((h2.nuclear_repulsion() - 1.0 / 1.4).abs() < 1e-15);
    }
}
