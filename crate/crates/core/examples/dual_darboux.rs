//! Checks Φ*ω₀ = ω*_{Ω,μ} on ℂⁿ⁺¹, strict plurisubharmonicity of the dual
//! potential, and the closed-form determinant of ω*.

use cartan_hartogs::forms::{
    det_dual_hessian, det_dual_hessian_numeric, dual_darboux_residual, dual_hessian, is_positive_definite,
    FdConfig,
};
use cartan_hartogs::sampling::{chunk_rng, heavy_tailed_point};
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
    let det_cfg = FdConfig::for_determinants();
    for base in &bases {
        for mu in [0.5, 1.0, 2.0] {
            let h = HartogsSpec::new(base.clone(), mu)?;
            let mut rng = chunk_rng(7, 0);
            let (mut pullback, mut det_err, mut min_eig) = (0.0_f64, 0.0_f64, f64::INFINITY);
            for k in 0..100 {
                let p = heavy_tailed_point(&mut rng, &h.base, 10.0);
                pullback = pullback.max(dual_darboux_residual(&h, &p, &cfg)?.scaled());
                min_eig = min_eig.min(is_positive_definite(&dual_hessian(&h, &p, &det_cfg)?).min_eigenvalue);
                if k < 50 {
                    let exact = det_dual_hessian(&h, &p)?;
                    let numeric = det_dual_hessian_numeric(&h, &p, &det_cfg)?;
                    det_err = det_err.max((numeric - exact).abs() / exact);
                }
            }
            println!(
                "{:<24} Φ*ω₀ vs ω*: {pullback:.2e}   det rel. error: {det_err:.2e}   min eigenvalue: {min_eig:.3e}",
                h.label()
            );
        }
    }
    Ok(())
}
