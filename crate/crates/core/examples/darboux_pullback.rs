//! Checks Ψ*ω₀ = ω_{Ω,μ} at random member points over several bases.

use std::time::Instant;

use cartan_hartogs::forms::{darboux_residual, FdConfig};
use cartan_hartogs::sampling::{chunk_rng, member_point};
use cartan_hartogs::{DomainSpec, HartogsSpec};

fn main() -> cartan_hartogs::Result<()> {
    let bases = [
        DomainSpec::polydisc(1)?,
        DomainSpec::polydisc(2)?,
        DomainSpec::polydisc(3)?,
        DomainSpec::type_one(1, 2)?,
        DomainSpec::type_one(2, 2)?,
        DomainSpec::type_one(2, 3)?,
    ];
    let cfg = FdConfig::default();
    let start = Instant::now();
    for base in &bases {
        for mu in [0.5, 1.0, 2.0] {
            let h = HartogsSpec::new(base.clone(), mu)?;
            let mut rng = chunk_rng(2024, 0);
            let (mut worst_abs, mut worst_scaled) = (0.0_f64, 0.0_f64);
            for _ in 0..100 {
                let p = member_point(&mut rng, &h, 1e-3);
                let r = darboux_residual(&h, &p, &cfg)?;
                worst_abs = worst_abs.max(r.max_abs_diff);
                worst_scaled = worst_scaled.max(r.scaled());
            }
            println!("{:<24} max |Ψ*ω₀ − ω| = {worst_abs:.2e}  scaled = {worst_scaled:.2e}", h.label());
        }
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
