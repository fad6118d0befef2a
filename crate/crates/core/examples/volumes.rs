//! Monte Carlo volumes of M_{Ω,μ} and of its dual, against the closed forms.

use std::f64::consts::PI;

use cartan_hartogs::measures::{dual_flat_ratio, mc_volume_dual, mc_volume_flat};
use cartan_hartogs::verify::analytic_flat_volume;
use cartan_hartogs::{DomainSpec, HartogsSpec};

fn main() -> cartan_hartogs::Result<()> {
    let samples = 1_000_000;
    println!("flat volume, polydisc(1), μ = 1: exact π²/2 = {:.6}", PI * PI / 2.0);
    for (base, mu) in [
        (DomainSpec::polydisc(1)?, 1.0),
        (DomainSpec::polydisc(2)?, 2.0),
        (DomainSpec::type_one(1, 2)?, 0.5),
    ] {
        let h = HartogsSpec::new(base, mu)?;
        let flat = mc_volume_flat(&h, samples, 7)?;
        let exact = analytic_flat_volume(&h).expect("closed form known for these bases");
        let dual = mc_volume_dual(&h, samples, 8)?;
        let ratio = dual.value / flat.value;
        println!(
            "{:<26} flat {:.5} ± {:.1e} (exact {:.5}, {:+.2}σ)   dual/flat {:.5} (predicted {:.5})",
            h.label(),
            flat.value,
            flat.standard_error,
            exact,
            (flat.value - exact) / flat.standard_error,
            ratio,
            dual_flat_ratio(&h)
        );
    }
    Ok(())
}
