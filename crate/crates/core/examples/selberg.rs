//! Selberg-type integrals by Gauss-Legendre quadrature against the Gamma
//! closed form F(s).

use cartan_hartogs::measures::{capital_f, selberg_for_domain};
use cartan_hartogs::DomainSpec;

fn main() -> cartan_hartogs::Result<()> {
    for d in [
        DomainSpec::complex_hyperbolic(2)?,
        DomainSpec::polydisc(2)?,
        DomainSpec::type_one(2, 2)?,
        DomainSpec::type_one(2, 3)?,
        DomainSpec::polydisc(3)?,
    ] {
        for s in [0.0, 1.0, 2.5] {
            let exact = capital_f(&d, s);
            let (simplex, cube) = selberg_for_domain(&d, s, 1e-9)?;
            println!(
                "{:<16} s = {s:<4} F = {exact:.10e}   simplex rel. err {:.1e} (m = {})   cube rel. err {:.1e} (m = {})",
                d.label(),
                (simplex.value - exact).abs() / exact,
                simplex.resolution,
                (cube.value - exact).abs() / exact,
                cube.resolution
            );
        }
    }
    Ok(())
}
