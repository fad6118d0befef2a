//! Gromov width and cylindrical capacity certificates for M_{Ω,μ} and for
//! the image of the dual map.

use cartan_hartogs::capacity::{capacity_certificate, Side};
use cartan_hartogs::{DomainSpec, HartogsSpec};

fn main() -> cartan_hartogs::Result<()> {
    let base = DomainSpec::type_one(2, 2)?;
    for (mu, side) in [
        (0.5, Side::FlatHartogs),
        (1.0, Side::FlatHartogs),
        (4.0, Side::Dual),
        (1.0, Side::Dual),
        (0.25, Side::Dual),
    ] {
        let h = HartogsSpec::new(base.clone(), mu)?;
        let c = capacity_certificate(&h, side, 100_000, 5, 1e-3)?;
        println!(
            "{:<26} {:?}: B({:.4}) inside, inside Z({:.4}); capacity in [{:.5}, {:.5}], {} samples, {} failures",
            h.label(),
            side,
            c.r_in,
            c.r_out,
            c.lower,
            c.upper,
            c.sampled_points,
            c.failures.len()
        );
        if let Some(note) = c.note {
            println!("    {note}");
        }
    }
    Ok(())
}
