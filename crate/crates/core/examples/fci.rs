//! Full CI in the S_z = 0 determinant sector and the two-in-two CI coefficients along H₂ dissociation.

use qlrlab::fockspace::onv_string;
use qlrlab::systems::{h4_rectangle, hydrogen_molecule};

fn main() -> qlrlab::Result<()> {
    let h4 = h4_rectangle(1.5, 1.8)?;
    let p = h4.solve_at(&h4.zero_kappa(), None, &Default::default(), None)?;
    println!(
        "H4 rectangle: {} determinants, E_FCI = {:.10} Eh, <S²> = {:.2e}",
        h4.sector.dim(),
        p.fci.e0,
        p.fci.s_squared
    );
    let mut largest: Vec<(f64, u64)> = p
        .fci
        .ground
        .iter()
        .zip(h4.sector.onvs())
        .map(|(c, &o)| (*c, o))
        .collect();
    largest.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
    for (c, onv) in largest.iter().take(4) {
        println!("  {:+.6} |{}⟩", c, onv_string(*onv, 8));
    }

    println!("\nH2 / STO-3G:  R (bohr)   c_1100      c_s        c_0011");
    for r in [1.4, 3.0, 6.0, 12.0, 50.0] {
        let h2 = hydrogen_molecule(r)?;
        let c = h2
            .solve_at(&h2.zero_kappa(), None, &Default::default(), None)?
            .fci
            .two_in_two
            .expect("2-in-2");
        println!(
            "              {r:>6.1}   {:+.6}  {:+.6}  {:+.6}",
            c.c_1100, c.c_s, c.c_0011
        );
    }
    Ok(())
}
