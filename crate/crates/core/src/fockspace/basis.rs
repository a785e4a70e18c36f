use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Spin-orbital index of spatial orbital `p` with spin `beta`: `2p + σ`.
pub const fn spin_orbital(p: usize, beta: bool) -> usize {
    2 * p + beta as usize
}

/// Occupation string in `|1α 1β 2α 2β …⟩` order; character `k` is bit `k`.
pub fn onv_string(bits: u64, n_modes: usize) -> String {
    (0..n_modes)
        .map(|k| if bits >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`onv_string`].
pub fn parse_onv(s: &str) -> Result<u64> {
    let mut bits = 0u64;
    for (k, ch) in s.chars().enumerate() {
        match ch {
            '1' => bits |= 1 << k,
            '0' => {}
            _ => return Err(Error::Domain(format!("'{s}' is not an occupation string"))),
        }
    }
    Ok(bits)
}

/// Determinant basis: either one particle-number/`S_z` sector or the full Fock space.
///
/// Sector determinants are ordered lexicographically on their occupation
/// strings, highest first, so the Aufbau determinant `11…100…0` is index 0.
/// The full Fock space is indexed by the bit pattern itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    n_mo: usize,
    n_electrons: Option<usize>,
    onvs: Vec<u64>,
    lookup: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

/// Largest supported number of spatial orbitals (2^(2n) lookup table).
pub const MAX_ORBITALS: usize = 10;

fn string_order(a: u64, b: u64, n_modes: usize) -> Ordering {
    // highest string first: compare from character 0 (bit 0) onwards
    for k in 0..n_modes {
        let (x, y) = (a >> k & 1, b >> k & 1);
        if x != y {
            return y.cmp(&x);
        }
    }
    Ordering::Equal
}

impl SectorBasis {
    fn build(n_mo: usize, n_electrons: Option<usize>, mut onvs: Vec<u64>) -> Self {
        let mut lookup = vec![ABSENT; 1usize << (2 * n_mo)];
        for (i, &b) in onvs.iter().enumerate() {
            lookup[b as usize] = i;
        }
        onvs.shrink_to_fit();
        Self {
            n_mo,
            n_electrons,
            onvs,
            lookup,
        }
    }

    /// Every determinant with `n_electrons` electrons and `2 S_z = two_sz`.
    pub fn enumerate(n_mo: usize, n_electrons: usize, two_sz: i32) -> Result<Self> {
        if n_mo == 0 || n_mo > MAX_ORBITALS {
            return Err(Error::Unsupported(format!(
                "{n_mo} orbitals (supported: 1..={MAX_ORBITALS})"
            )));
        }
        if n_electrons > 2 * n_mo {
            return Err(Error::Precondition(format!(
                "{n_electrons} electrons do not fit in {n_mo} orbitals"
            )));
        }
        let n_modes = 2 * n_mo;
        let alpha_mask: u64 = (0..n_mo).map(|p| 1u64 << (2 * p)).sum();
        let mut onvs: Vec<u64> = (0..1u64 << n_modes)
            .filter(|&b| {
                let na = (b & alpha_mask).count_ones() as i32;
                let nb = (b & !alpha_mask).count_ones() as i32;
                (na + nb) as usize == n_electrons && na - nb == two_sz
            })
            .collect();
        if onvs.is_empty() {
            return Err(Error::EmptySector {
                n_mo,
                n_electrons,
                two_sz,
            });
        }
        onvs.sort_by(|&a, &b| string_order(a, b, n_modes));
        Ok(Self::build(n_mo, Some(n_electrons), onvs))
    }

    /// All `2^(2 n_mo)` determinants, indexed by bit pattern.
    pub fn full_fock(n_mo: usize) -> Result<Self> {
        if n_mo == 0 || n_mo > MAX_ORBITALS {
            return Err(Error::Unsupported(format!(
                "{n_mo} orbitals (supported: 1..={MAX_ORBITALS})"
            )));
        }
        Ok(Self::build(n_mo, None, (0..1u64 << (2 * n_mo)).collect()))
    }

    pub fn n_mo(&self) -> usize {
        self.n_mo
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_mo
    }

    /// `None` for the full Fock space.
    pub fn n_electrons(&self) -> Option<usize> {
        self.n_electrons
    }

    pub fn dim(&self) -> usize {
        self.onvs.len()
    }

    pub fn onvs(&self) -> &[u64] {
        &self.onvs
    }

    pub fn onv(&self, i: usize) -> u64 {
        self.onvs[i]
    }

    pub fn index_of(&self, bits: u64) -> Option<usize> {
        match self.lookup.get(bits as usize) {
            Some(&i) if i != ABSENT => Some(i),
            _ => None,
        }
    }

    pub fn label(&self, i: usize) -> String {
        onv_string(self.onvs[i], self.n_modes())
    }

    /// Closed-shell Aufbau determinant with `n_occ` doubly occupied orbitals.
    pub fn closed_shell_reference(n_occ: usize) -> u64 {
        (1u64 << (2 * n_occ)) - 1
    }

    /// Embedding of sector amplitudes into the full Fock space.
    pub fn embed(&self, amplitudes: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        let mut out = nalgebra::DVector::zeros(1usize << self.n_modes());
        for (i, &b) in self.onvs.iter().enumerate() {
            out[b as usize] = amplitudes[i];
        }
        out
    }

    /// Restriction of a full-Fock vector to this sector.
    pub fn restrict(&self, full: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_iterator(self.dim(), self.onvs.iter().map(|&b| full[b as usize]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_in_two_order() {
        let b = SectorBasis::enumerate(2, 2, 0).unwrap();
        let labels: Vec<String> = (0..b.dim()).map(|i| b.label(i)).collect();
        assert_eq!(labels, ["1100", "1001", "0110", "0011"]);
        assert_eq!(b.onv(0), SectorBasis::closed_shell_reference(1));
    }

    #[test]
    fn sector_sizes() {
        assert_eq!(SectorBasis::enumerate(4, 4, 0).unwrap().dim(), 36);
        let one = SectorBasis::enumerate(1, 2, 0).unwrap();
        assert_eq!(one.dim(), 1);
        assert_eq!(one.label(0), "11");
        assert!(matches!(
            SectorBasis::enumerate(2, 1, 0),
            Err(Error::EmptySector { .. })
        ));
    }

    #[test]
    fn onv_strings_round_trip() {
        assert_eq!(parse_onv("1001").unwrap(), 0b1001);
        assert_eq!(onv_string(0b0110, 4), "0110");
    }
}
