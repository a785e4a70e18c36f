//! Orbital rotations exp(κ) leave the FCI spectrum unchanged but move weight between determinants.

use qlrlab::orbrot::KappaParams;
use qlrlab::systems::helium;

fn main() -> qlrlab::Result<()> {
    let he = helium()?;
    println!("He / 6-31G, rotating orbitals 0 and 1");
    println!("   κ       E0 (Eh)          E1 (Eh)          c_1100     c_s        c_0011");
    for k in [0.0, 0.3, 0.6, std::f64::consts::FRAC_PI_4, 1.2, 1.5] {
        let kappa = KappaParams::single(2, 0, 1, k)?;
        let p = he.solve_at(&kappa, None, &Default::default(), None)?;
        let c = p.fci.two_in_two.expect("2-in-2");
        println!(
            "{k:6.3}  {:.12}  {:.12}  {:+.6}  {:+.6}  {:+.6}",
            p.fci.energies[0], p.fci.energies[1], c.c_1100, c.c_s, c.c_0011
        );
    }
    let u = KappaParams::from_values(2, &[0.4])?.unitary();
    println!("\nU = exp(κ) for κ_01 = 0.4:{u}");
    Ok(())
}
