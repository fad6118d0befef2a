//! Runs a batch of checks from a JSON config, the same way `chd` does, and
//! prints the CSV report.

use cartan_hartogs::cli::{render, run, Format, RunConfig};

fn main() -> cartan_hartogs::Result<()> {
    let cfg: RunConfig = serde_json::from_str(
        r#"{
            "domain": "type-I", "p": 2, "q": 2,
            "mu": [0.5, 2.0],
            "checks": ["darboux", "dual-darboux", "duality", "equivariance"],
            "points": 50,
            "seed": 11
        }"#,
    )
    .expect("valid config");
    let report = run(&cfg)?;
    print!("{}", render(&report, Format::Csv)?);
    println!("{} of {} checks passed", report.summary.passed, report.summary.total);
    Ok(())
}
