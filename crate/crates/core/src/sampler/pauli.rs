use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::{FermionOp, Ladder};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `i^k`.
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// Pauli string on qubits `0..n_qubits`, qubit `k` = spin-orbital `k`.
///
/// Letter on qubit `k`: `(x_k, z_k)` = `(0,0)` I, `(1,0)` X, `(0,1)` Z,
/// `(1,1)` Y, so the operator is `coeff · i^{|x∧z|} X^x Z^z` and acts on a
/// basis state as `P|b⟩ = i^{|x∧z|} (−1)^{|b∧z|} |b ⊕ x⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    pub n_qubits: usize,
    pub x: u64,
    pub z: u64,
    pub coeff: Complex64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            x: 0,
            z: 0,
            coeff: ONE,
        }
    }

    pub fn new(n_qubits: usize, x: u64, z: u64) -> Self {
        Self {
            n_qubits,
            x,
            z,
            coeff: ONE,
        }
    }

    /// Parses letters such as `"IXYZ"` (qubit 0 first).
    pub fn parse(letters: &str) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        for (k, c) in letters.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << k,
                'Z' => z |= 1 << k,
                'Y' => {
                    x |= 1 << k;
                    z |= 1 << k;
                }
                _ => return Err(Error::Domain(format!("'{letters}' is not a Pauli string"))),
            }
        }
        Ok(Self::new(letters.chars().count(), x, z))
    }

    pub fn letter(&self, k: usize) -> char {
        match (self.x >> k & 1, self.z >> k & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    pub fn with_coeff(mut self, coeff: Complex64) -> Self {
        self.coeff = coeff;
        self
    }

    /// Number of `Y` letters.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Product `self · other`; the phase lands in the coefficient.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = self.y_count() + other.y_count() + 4 - (x & z).count_ones() % 4;
        let sign = if (self.z & other.x).count_ones().is_multiple_of(2) {
            ONE
        } else {
            -ONE
        };
        PauliString {
            n_qubits: self.n_qubits.max(other.n_qubits),
            x,
            z,
            coeff: self.coeff * other.coeff * i_pow(k) * sign,
        }
    }

    /// `(amplitude, target)` with `P|b⟩ = amplitude |target⟩` (coefficient included).
    pub fn apply_basis(&self, b: u64) -> (Complex64, u64) {
        let sign = if (b & self.z).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        (self.coeff * i_pow(self.y_count()) * sign, b ^ self.x)
    }

    /// Dense matrix on `2^n_qubits` states.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let d = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(d, d);
        for b in 0..d as u64 {
            let (amp, t) = self.apply_basis(b);
            m[(t as usize, b as usize)] += amp;
        }
        m
    }

    /// Packed index `x · 2^n + z` used by [`PauliTable`].
    pub fn table_index(&self) -> usize {
        ((self.x as usize) << self.n_qubits) | self.z as usize
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.n_qubits {
            write!(f, "{}", self.letter(k))?;
        }
        Ok(())
    }
}

/// Coefficients below this magnitude are pruned.
pub const PRUNE_TOL: f64 = 1e-14;

/// Sum of Pauli strings keyed by `(x, z)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    pub n_qubits: usize,
    pub terms: BTreeMap<(u64, u64), Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_string(&mut self, p: &PauliString) {
        *self
            .terms
            .entry((p.x, p.z))
            .or_insert(Complex64::new(0.0, 0.0)) += p.coeff;
    }

    pub fn add(&mut self, other: &PauliSum) {
        for (&(x, z), &c) in &other.terms {
            *self.terms.entry((x, z)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }

    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let n = self.n_qubits.max(other.n_qubits);
        let mut out = PauliSum::zero(n);
        for (&(x1, z1), &c1) in &self.terms {
            let a = PauliString::new(n, x1, z1).with_coeff(c1);
            for (&(x2, z2), &c2) in &other.terms {
                out.add_string(&a.mul(&PauliString::new(n, x2, z2).with_coeff(c2)));
            }
        }
        out.pruned()
    }

    pub fn scaled(mut self, s: Complex64) -> Self {
        for c in self.terms.values_mut() {
            *c *= s;
        }
        self
    }

    pub fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() > PRUNE_TOL);
        self
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(&k, &c)| (k, c.conj())).collect(),
        }
    }

    pub fn strings(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms
            .iter()
            .map(|(&(x, z), &c)| PauliString::new(self.n_qubits, x, z).with_coeff(c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let d = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(d, d);
        for p in self.strings() {
            for b in 0..d as u64 {
                let (amp, t) = p.apply_basis(b);
                m[(t as usize, b as usize)] += amp;
            }
        }
        m
    }

    /// `⟨ψ|O|ψ⟩` for a real full-Fock state.
    pub fn expectation(&self, psi: &DVector<f64>) -> Complex64 {
        self.strings()
            .map(|p| p.coeff * exact_pauli_expectation_unit(psi, &p))
            .sum()
    }
}

fn ladder_image(l: Ladder, n_qubits: usize) -> PauliSum {
    let parity: u64 = (1u64 << l.mode) - 1;
    let bit = 1u64 << l.mode;
    // a = ½ Z…Z (X + iY), a† = ½ Z…Z (X − iY)
    let mut s = PauliSum::zero(n_qubits);
    s.add_string(&PauliString::new(n_qubits, bit, parity).with_coeff(Complex64::new(0.5, 0.0)));
    let y = if l.dagger { -0.5 } else { 0.5 };
    s.add_string(&PauliString::new(n_qubits, bit, parity | bit).with_coeff(I * y));
    s
}

/// Jordan–Wigner image of a fermionic operator on `n_qubits` spin-orbitals.
pub fn jw_map(op: &FermionOp, n_qubits: usize) -> Result<PauliSum> {
    if op.n_modes() > n_qubits || n_qubits > 31 {
        return Err(Error::IndexOutOfRange(format!(
            "operator on {} modes does not fit {n_qubits} qubits",
            op.n_modes()
        )));
    }
    let mut total = PauliSum::zero(n_qubits);
    for (c, ops) in &op.terms {
        let mut prod = PauliSum::zero(n_qubits);
        prod.add_string(&PauliString::identity(n_qubits).with_coeff(Complex64::new(*c, 0.0)));
        for l in ops {
            prod = prod.mul(&ladder_image(*l, n_qubits));
        }
        total.add(&prod);
    }
    Ok(total.pruned())
}

/// `⟨ψ|P|ψ⟩/coeff`, i.e. the expectation of the bare string.
fn exact_pauli_expectation_unit(psi: &DVector<f64>, p: &PauliString) -> Complex64 {
    let mut acc = 0.0;
    for b in 0..psi.len() {
        let pb = psi[b];
        if pb == 0.0 {
            continue;
        }
        let sign = if ((b as u64) & p.z).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        acc += psi[b ^ p.x as usize] * sign * pb;
    }
    i_pow(p.y_count()) * acc
}

/// `⟨ψ|P|ψ⟩` of the bare string (coefficient ignored) for a real unit-norm full-Fock state.
pub fn exact_pauli_expectation(psi: &DVector<f64>, p: &PauliString) -> Result<f64> {
    if psi.len() != 1usize << p.n_qubits {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} for {} qubits",
            psi.len(),
            p.n_qubits
        )));
    }
    Ok(exact_pauli_expectation_unit(psi, p).re)
}

/// In-place Walsh–Hadamard transform: `W[z] = Σ_c (−1)^{|c∧z|} v[c]`.
fn walsh_hadamard(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Pauli decomposition of a real symmetric dense operator, `M = Σ c_P P`.
///
/// For each `x` the column `v[c] = M[c, c⊕x]` is Walsh–Hadamard transformed,
/// giving `Tr(P M)` for every `z` at once; cost `4^n · n`. Real symmetric
/// matrices only contain strings with an even number of `Y`, all with real
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPauliSum {
    pub n_qubits: usize,
    /// `(table index, coefficient)`, ascending by index.
    pub terms: Vec<(u32, f64)>,
}

impl RealPauliSum {
    pub fn from_symmetric(m: &DMatrix<f64>) -> Result<Self> {
        let d = m.nrows();
        if d == 0 || !d.is_power_of_two() || m.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not a qubit operator",
                d,
                m.ncols()
            )));
        }
        let n_qubits = d.trailing_zeros() as usize;
        let mut terms = Vec::new();
        let mut v = vec![0.0; d];
        for x in 0..d {
            for (c, slot) in v.iter_mut().enumerate() {
                *slot = 0.5 * (m[(c, c ^ x)] + m[(c ^ x, c)]);
            }
            walsh_hadamard(&mut v);
            for (z, &w) in v.iter().enumerate() {
                let ycount = (x & z).count_ones();
                if ycount % 2 == 1 {
                    continue;
                }
                let coeff = if ycount % 4 == 0 { w } else { -w } / d as f64;
                if coeff.abs() > PRUNE_TOL {
                    terms.push((((x << n_qubits) | z) as u32, coeff));
                }
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn string(&self, index: u32) -> PauliString {
        let mask = (1u64 << self.n_qubits) - 1;
        PauliString::new(
            self.n_qubits,
            (index as u64) >> self.n_qubits,
            index as u64 & mask,
        )
    }

    /// `Σ c_P ⟨P⟩` with expectations looked up in `table`.
    pub fn evaluate(&self, table: &PauliTable) -> f64 {
        self.terms
            .iter()
            .map(|&(i, c)| c * table.values[i as usize])
            .sum()
    }
}

/// Exact expectations `⟨ψ|P|ψ⟩` of every Pauli string for one real state.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTable {
    pub n_qubits: usize,
    /// Indexed by [`PauliString::table_index`].
    pub values: Vec<f64>,
}

impl PauliTable {
    /// One decomposition of `ψψᵀ` yields all `4^n` expectations.
    pub fn exact(psi: &DVector<f64>) -> Result<Self> {
        let d = psi.len();
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!("state of length {d}")));
        }
        let n_qubits = d.trailing_zeros() as usize;
        let mut values = vec![0.0; d * d];
        let mut v = vec![0.0; d];
        for x in 0..d {
            for (c, slot) in v.iter_mut().enumerate() {
                *slot = psi[c] * psi[c ^ x];
            }
            walsh_hadamard(&mut v);
            for (z, &w) in v.iter().enumerate() {
                let ycount = (x & z).count_ones();
                values[(x << n_qubits) | z] = match ycount % 4 {
                    0 => w,
                    2 => -w,
                    _ => 0.0,
                };
            }
        }
        Ok(Self { n_qubits, values })
    }

    pub fn get(&self, p: &PauliString) -> f64 {
        self.values[p.table_index()]
    }
}
