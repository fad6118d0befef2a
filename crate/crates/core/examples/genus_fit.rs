//! Recovers the genus from the scaling of det ω*_{Ω,1} and compares it with
//! 2 + a(r−1) + b.

use cartan_hartogs::measures::fit_genus;
use cartan_hartogs::DomainSpec;

fn main() -> cartan_hartogs::Result<()> {
    for d in [
        DomainSpec::polydisc(1)?,
        DomainSpec::polydisc(3)?,
        DomainSpec::complex_hyperbolic(2)?,
        DomainSpec::type_one(2, 2)?,
        DomainSpec::type_one(2, 3)?,
    ] {
        println!("{:<16} fitted {:.6}   invariants give {}", d.label(), fit_genus(&d)?, d.genus);
    }
    Ok(())
}
