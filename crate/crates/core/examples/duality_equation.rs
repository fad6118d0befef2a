//! Solves F(μ)/F(0) = μⁿ/(n+1) for μ. The root is 1 exactly when the base is
//! a complex hyperbolic space.

use cartan_hartogs::measures::{duality_gap, duality_root, gennaio_check};
use cartan_hartogs::DomainSpec;

fn main() -> cartan_hartogs::Result<()> {
    for d in [
        DomainSpec::complex_hyperbolic(1)?,
        DomainSpec::complex_hyperbolic(2)?,
        DomainSpec::complex_hyperbolic(3)?,
        DomainSpec::polydisc(2)?,
        DomainSpec::polydisc(3)?,
        DomainSpec::type_one(2, 2)?,
        DomainSpec::type_one(2, 3)?,
    ] {
        let root = duality_root(&d)?;
        let g = gennaio_check(&d);
        println!(
            "{:<16} root μ = {root:.12}   g(1) = {:+.3e}   F(1)/F(0) = {:.6} ≤ 1/(n+1) = {:.6}{}",
            d.label(),
            duality_gap(&d, 1.0)?,
            g.value,
            g.bound,
            if g.equality { " (equality)" } else { "" }
        );
    }
    Ok(())
}
