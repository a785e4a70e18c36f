//! Jordan–Wigner mapping of fermionic operators to Pauli sums.

use nalgebra::DVector;
use qlrlab::fockspace::{hamiltonian_op, FermionOp, Ladder};
use qlrlab::sampler::{jw_map, PauliString};
use qlrlab::systems::hydrogen_molecule;

fn letters(p: &PauliString) -> String {
    (0..p.n_qubits).map(|k| p.letter(k)).collect()
}

fn main() -> qlrlab::Result<()> {
    for (name, op) in [
        ("a†_0", FermionOp::term(1.0, vec![Ladder::create(0)])),
        (
            "a†_0 a_2",
            FermionOp::term(1.0, vec![Ladder::create(0), Ladder::annihilate(2)]),
        ),
        ("E_10", FermionOp::e_pq(1, 0)),
    ] {
        let terms: Vec<String> = jw_map(&op, 4)?
            .strings()
            .map(|p| format!("({:+.2}{:+.2}i) {}", p.coeff.re, p.coeff.im, letters(&p)))
            .collect();
        println!("{name:>9} -> {}", terms.join(" "));
    }

    let h2 = hydrogen_molecule(1.4)?;
    let h = jw_map(&hamiltonian_op(&h2.mo), 4)?.pruned();
    println!("\nH2 Hamiltonian: {} Pauli strings on 4 qubits", h.len());
    // |1100⟩: both electrons in orbital 0 (qubits 0 and 1 occupied)
    let mut hf = DVector::zeros(16);
    hf[0b0011] = 1.0;
    println!(
        "⟨HF|H|HF⟩ = {:.10} Eh (E_HF = {:.10})",
        h.expectation(&hf).re,
        h2.scf.e_hf
    );
    let prod = PauliString::parse("ZZII")?.mul(&PauliString::parse("XXII")?);
    println!(
        "ZZII · XXII = ({:+}{:+}i) {}",
        prod.coeff.re,
        prod.coeff.im,
        letters(&prod)
    );
    Ok(())
}
