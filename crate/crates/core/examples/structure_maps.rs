//! Equivariance, compatibility with totally geodesic embeddings, the ℂHⁿ
//! specialization and inverses of Ψ and Φ.

use cartan_hartogs::hartogs::{xi_inverse, xi_map};
use cartan_hartogs::verify::structure_maps;
use cartan_hartogs::{DomainSpec, HartogsSpec, C64};

fn main() -> cartan_hartogs::Result<()> {
    for (base, mu) in [
        (DomainSpec::polydisc(3)?, 0.5),
        (DomainSpec::complex_hyperbolic(2)?, 1.0),
        (DomainSpec::type_one(2, 3)?, 2.0),
    ] {
        let h = HartogsSpec::new(base, mu)?;
        println!("{}", h.label());
        for c in structure_maps(&h, 100, 3)? {
            println!("    {:<18} {:.2e} (tol {:.0e})", c.name, c.worst_residual, c.tolerance);
        }
    }
    let zeta = [C64::new(0.3, -0.2), C64::new(0.1, 0.5)];
    let image = xi_map(&zeta)?;
    let show = |v: &[C64]| v.iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(", ");
    println!("Ξ({}) = ({}), inverse gives ({})", show(&zeta), show(&image), show(&xi_inverse(&image)));
    Ok(())
}
