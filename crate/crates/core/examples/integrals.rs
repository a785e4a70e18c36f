//! One- and two-electron integrals of H₂ in STO-3G, plus the Boys function.

use qlrlab::molint::{boys_f0, build_ao_integrals, builtin_basis, Molecule};

fn main() -> qlrlab::Result<()> {
    let h2 = Molecule::from_angstrom(&[("H", [0.0, 0.0, 0.0]), ("H", [0.0, 0.0, 0.74])], 0)?;
    let basis = builtin_basis("sto-3g", &h2.elements())?;
    let ao = build_ao_integrals(&h2, &basis)?;

    println!("H2 / STO-3G at 0.74 Å ({} basis functions)", ao.n_ao);
    println!("overlap S:{}", ao.s);
    println!("core Hamiltonian T + V:{}", ao.core_hamiltonian());
    println!(
        "(00|00) = {:.8}  (00|11) = {:.8}  (01|01) = {:.8}",
        ao.eri[[0, 0, 0, 0]],
        ao.eri[[0, 0, 1, 1]],
        ao.eri[[0, 1, 0, 1]]
    );
    println!("nuclear repulsion = {:.8} Eh", ao.e_nuc);

    println!("\nBoys function F0(t):");
    for t in [0.0, 0.5, 2.0, 10.0, 50.0] {
        println!("  F0({t:>4}) = {:.12}", boys_f0(t)?);
    }
    Ok(())
}
