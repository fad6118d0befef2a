//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use cartan_hartogs::capacity::{capacity_certificate, dual_image_bounds, Side};
use cartan_hartogs::forms::FdConfig;
use cartan_hartogs::measures::{capital_f, duality_root, fit_genus, gennaio_check, mc_volume_flat, selberg_quadrature, SelbergScheme};
use cartan_hartogs::verify::{self, CheckResult};
use cartan_hartogs::{DomainSpec, HartogsSpec};
use rayon::prelude::*;

const MUS: [f64; 3] = [0.5, 1.0, 2.0];
const EPS: f64 = 1e-3;

fn bases() -> Vec<DomainSpec> {
    vec![
        DomainSpec::polydisc(1).unwrap(),
        DomainSpec::polydisc(2).unwrap(),
        DomainSpec::polydisc(3).unwrap(),
        DomainSpec::type_one(1, 2).unwrap(),
        DomainSpec::type_one(2, 2).unwrap(),
        DomainSpec::type_one(2, 3).unwrap(),
    ]
}

fn grid() -> Vec<HartogsSpec> {
    bases()
        .into_iter()
        .flat_map(|d| MUS.map(|mu| HartogsSpec::new(d.clone(), mu).unwrap()))
        .collect()
}

struct Outcome {
    pass: bool,
    summary: String,
}

/// Runs `check` over the grid in parallel and reduces to the worst case.
fn over_grid<F>(check: F) -> (bool, f64, String)
where
    F: Fn(&HartogsSpec) -> cartan_hartogs::Result<CheckResult> + Sync,
{
    let results: Vec<(String, cartan_hartogs::Result<CheckResult>)> =
        grid().par_iter().map(|h| (h.label(), check(h))).collect();
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = String::new();
    for (label, r) in results {
        match r {
            Ok(r) => {
                pass &= r.passed();
                if r.worst_residual > worst {
                    worst = r.worst_residual;
                    worst_at = label;
                }
            }
            Err(e) => {
                pass = false;
                worst = f64::INFINITY;
                worst_at = format!("{label}: {e}");
            }
        }
    }
    (pass, worst, worst_at)
}

fn darboux_grid() -> Outcome {
    let start = Instant::now();
    let cfg = FdConfig::default();
    let (pass, worst, at) = over_grid(|h| verify::darboux(h, 100, 11, &cfg, 1e-5));
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: pass && secs <= 60.0,
        summary: format!("18 configs x 100 points, worst scaled residual {worst:.2e} at {at}, {secs:.1} s (limit 60 s)"),
    }
}

fn dual_darboux_grid() -> Outcome {
    let cfg = FdConfig::default();
    let (pass, worst, at) = over_grid(|h| verify::dual_darboux(h, 100, 12, &cfg, 1e-5));
    Outcome {
        pass,
        summary: format!("18 configs x 100 heavy-tailed points, worst scaled residual {worst:.2e} at {at}"),
    }
}

fn plurisubharmonic() -> Outcome {
    let cfg = FdConfig::for_determinants();
    let (pass, worst, at) = over_grid(|h| verify::psh(h, 1000, 13, &cfg));
    Outcome {
        pass,
        summary: format!("18 configs x 1000 points, smallest eigenvalue {:.3e} at {at}", -worst),
    }
}

fn determinant() -> Outcome {
    let cfg = FdConfig::for_determinants();
    let (pass, worst, at) = over_grid(|h| verify::det_formula(h, 50, 14, &cfg, 1e-5));
    let genus = fit_genus(&DomainSpec::type_one(2, 2).unwrap());
    let genus_ok = matches!(genus, Ok(g) if (g - 4.0).abs() <= 1e-3);
    Outcome {
        pass: pass && genus_ok,
        summary: format!(
            "worst relative det error {worst:.2e} at {at}; fitted genus of type-I(2,2) = {}",
            genus.map_or_else(|e| e.to_string(), |g| format!("{g:.6}"))
        ),
    }
}

fn volumes() -> Outcome {
    let start = Instant::now();
    let cases = [(1, 1.0, PI.powi(2) / 2.0), (2, 2.0, PI.powi(3) / 9.0)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, mu, exact) in cases {
        let h = HartogsSpec::new(DomainSpec::polydisc(n).unwrap(), mu).unwrap();
        match mc_volume_flat(&h, 1_000_000, 7) {
            Ok(e) => {
                let z = (e.value - exact).abs() / e.standard_error;
                pass &= z <= 3.0;
                parts.push(format!("n={n} mu={mu}: {:.5} ± {:.1e} vs {exact:.5} ({z:.2}σ)", e.value, e.standard_error));
            }
            Err(err) => {
                pass = false;
                parts.push(format!("n={n}: {err}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: pass && secs <= 30.0,
        summary: format!("{}; {secs:.1} s (limit 30 s)", parts.join("; ")),
    }
}

fn volume_ratio() -> Outcome {
    let mut pass = true;
    let mut worst = 0.0_f64;
    for d in [DomainSpec::polydisc(1).unwrap(), DomainSpec::type_one(1, 2).unwrap()] {
        for mu in MUS {
            let h = HartogsSpec::new(d.clone(), mu).unwrap();
            match verify::volume_ratio(&h, 1_000_000, 21, 3.0) {
                Ok(r) => {
                    pass &= r.passed();
                    worst = worst.max(r.worst_residual);
                }
                Err(_) => {
                    pass = false;
                    worst = f64::INFINITY;
                }
            }
        }
    }
    Outcome {
        pass,
        summary: format!("polydisc(1), type-I(1,2) x mu in {{0.5,1,2}}, worst deviation {worst:.2}σ (limit 3σ)"),
    }
}

fn selberg() -> Outcome {
    let domains = [
        DomainSpec::polydisc(1).unwrap(),
        DomainSpec::complex_hyperbolic(2).unwrap(),
        DomainSpec::complex_hyperbolic(3).unwrap(),
        DomainSpec::polydisc(2).unwrap(),
        DomainSpec::type_one(2, 2).unwrap(),
        DomainSpec::type_one(2, 3).unwrap(),
    ];
    let mut pass = true;
    let (mut worst1, mut worst2) = (0.0_f64, 0.0_f64);
    for d in &domains {
        let tol = if d.rank == 1 { 1e-6 } else { 1e-3 };
        for s in [0.0, 1.0, 2.5] {
            let exact = capital_f(d, s);
            for scheme in [SelbergScheme::OrderedSimplex, SelbergScheme::SymmetricCube] {
                let rel = selberg_quadrature(d.rank, d.a, d.b as f64, s, 8, tol * 1e-2, scheme)
                    .map_or(f64::INFINITY, |q| (q.value - exact).abs() / exact);
                pass &= rel <= tol;
                if d.rank == 1 {
                    worst1 = worst1.max(rel);
                } else {
                    worst2 = worst2.max(rel);
                }
            }
        }
    }
    Outcome {
        pass,
        summary: format!("worst relative error r=1: {worst1:.1e} (limit 1e-6), r=2: {worst2:.1e} (limit 1e-3)"),
    }
}

fn duality() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let d = DomainSpec::complex_hyperbolic(n).unwrap();
        let root = duality_root(&d).unwrap_or(f64::NAN);
        pass &= (root - 1.0).abs() <= 1e-9;
        parts.push(format!("{}: {root:.12}", d.label()));
    }
    for d in [DomainSpec::polydisc(2).unwrap(), DomainSpec::polydisc(3).unwrap(), DomainSpec::type_one(2, 2).unwrap()] {
        let root = duality_root(&d).unwrap_or(f64::NAN);
        pass &= root > 0.0 && root < 1.0;
        parts.push(format!("{}: {root:.6}", d.label()));
    }
    let mut all = bases();
    all.push(DomainSpec::complex_hyperbolic(3).unwrap());
    for d in &all {
        let g = gennaio_check(d);
        pass &= g.pass && g.equality == (d.rank == 1);
    }
    parts.push(format!("bound holds on {} domains, equality exactly at rank one", all.len()));
    Outcome { pass, summary: parts.join("; ") }
}

fn capacities() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let samples = 100_000;
    for d in [DomainSpec::polydisc(2).unwrap(), DomainSpec::type_one(1, 2).unwrap(), DomainSpec::type_one(2, 2).unwrap()] {
        for mu in [0.25, 0.5, 1.0] {
            let h = HartogsSpec::new(d.clone(), mu).unwrap();
            match capacity_certificate(&h, Side::FlatHartogs, samples, 31, EPS) {
                Ok(c) => {
                    pass &= c.is_valid()
                        && (c.lower - PI * (1.0 - EPS).powi(2)).abs() < 1e-12
                        && (c.upper - PI).abs() < 1e-12;
                }
                Err(_) => pass = false,
            }
        }
    }
    parts.push("flat side [π(1−ε)², π] on 9 configs".to_string());
    let dual = |mu: f64, bound: f64| -> (bool, String) {
        let h = HartogsSpec::new(DomainSpec::type_one(2, 2).unwrap(), mu).unwrap();
        match capacity_certificate(&h, Side::Dual, samples, 32, EPS) {
            Ok(c) => (
                c.is_valid() && c.r_in >= bound,
                format!(
                    "dual mu={mu}: r_in {:.4}, capacity in [{:.4}, {:.4}]{}",
                    c.r_in,
                    c.lower,
                    c.upper,
                    c.note.as_deref().map_or(String::new(), |n| format!(" (note: {n})"))
                ),
            ),
            Err(e) => (false, format!("dual mu={mu}: {e}")),
        }
    };
    let (ok, s) = dual(4.0, 1.0 - EPS);
    pass &= ok;
    parts.push(s);
    let (ok, s) = dual(0.25, 0.5 - EPS);
    pass &= ok;
    parts.push(s);
    let h = HartogsSpec::new(DomainSpec::type_one(2, 2).unwrap(), 0.25).unwrap();
    match dual_image_bounds(&h, samples, 33) {
        Ok(b) => {
            pass &= b.pass && b.max_xi_sq < 0.25;
            parts.push(format!("max ξ² = 0.25 − {:.3e}", 0.25 - b.max_xi_sq));
        }
        Err(e) => {
            pass = false;
            parts.push(e.to_string());
        }
    }
    Outcome { pass, summary: parts.join("; ") }
}

fn structure_maps() -> Outcome {
    let mut configs = grid();
    configs.extend((1..=3).map(|n| HartogsSpec::new(DomainSpec::complex_hyperbolic(n).unwrap(), 1.0).unwrap()));
    let results: Vec<_> = configs.par_iter().map(|h| verify::structure_maps(h, 100, 41)).collect();
    let mut pass = true;
    let mut worst: Vec<(String, f64, f64)> = Vec::new();
    for r in results {
        match r {
            Ok(checks) => {
                for c in checks {
                    pass &= c.passed();
                    match worst.iter_mut().find(|(n, _, _)| *n == c.name) {
                        Some(w) => w.1 = w.1.max(c.worst_residual),
                        None => worst.push((c.name.clone(), c.worst_residual, c.tolerance)),
                    }
                }
            }
            Err(_) => pass = false,
        }
    }
    Outcome {
        pass,
        summary: worst.iter().map(|(n, w, t)| format!("{n} {w:.1e}/{t:.0e}")).collect::<Vec<_>>().join(", "),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("Darboux pullback of the flat form", darboux_grid),
        ("dual Darboux pullback", dual_darboux_grid),
        ("strict plurisubharmonicity of the dual potential", plurisubharmonic),
        ("dual determinant formula and genus", determinant),
        ("Monte Carlo flat volumes", volumes),
        ("dual/flat volume ratio", volume_ratio),
        ("Selberg quadrature", selberg),
        ("duality characterization", duality),
        ("capacity certificates", capacities),
        ("equivariance, hereditary property and inverses", structure_maps),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{:.1} s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.summary,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
