//! Verification sweeps. Each function runs one check over sampled points and
//! returns a [`CheckResult`] whose status is `pass` exactly when the worst
//! residual is within tolerance.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{capacity_certificate, Side};
use crate::error::Result;
use crate::forms::{
    darboux_residual, det_dual_hessian, det_dual_hessian_numeric, dual_darboux_residual, dual_hessian,
    is_positive_definite, FdConfig,
};
use crate::hartogs::{hartogs_isotropy_apply, lift_embedding, xi_map, Embedding, HartogsPoint, HartogsSpec};
use crate::jtsys::{DomainKind, DomainSpec};
use crate::measures::{
    capital_f, duality_root, fit_genus, gennaio_check, mc_volume_dual, mc_volume_flat, selberg_quadrature,
    SelbergScheme,
};
use crate::sampling::{chunk_rng, heavy_tailed_point, member_point, random_isotropy};

/// Member points are kept at `N^μ − |w|² ≥ MEMBER_MARGIN`.
pub const MEMBER_MARGIN: f64 = 1e-3;
/// Heavy-tailed samples of `ℂⁿ⁺¹` are kept at norm at most `DUAL_MAX_NORM`.
pub const DUAL_MAX_NORM: f64 = 10.0;
pub const MAX_WITNESSES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub parameters: Value,
    pub status: Status,
    pub worst_residual: f64,
    pub tolerance: f64,
    pub witnesses: Vec<HartogsPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    pub wall_time_s: f64,
}

impl CheckResult {
    fn new(name: &str, parameters: Value, worst: f64, tolerance: f64, start: Instant) -> Self {
        Self {
            name: name.to_string(),
            parameters,
            status: if worst <= tolerance { Status::Pass } else { Status::Fail },
            worst_residual: worst,
            tolerance,
            witnesses: Vec::new(),
            detail: None,
            wall_time_s: start.elapsed().as_secs_f64(),
        }
    }

    fn with_witnesses(mut self, w: Vec<HartogsPoint>) -> Self {
        if self.status == Status::Fail {
            self.witnesses = w;
        }
        self
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn params(h: &HartogsSpec, extra: Value) -> Value {
    let mut v = json!({ "domain": h.base.label(), "mu": h.mu });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

/// Worst residual over sampled points, keeping the worst few as witnesses.
fn pointwise<S, F>(points: usize, seed: u64, mut sample: S, residual: F, tolerance: f64) -> Result<(f64, Vec<HartogsPoint>)>
where
    S: FnMut(&mut rand_chacha::ChaCha8Rng) -> HartogsPoint,
    F: Fn(&HartogsPoint) -> Result<f64>,
{
    let mut rng = chunk_rng(seed, 0);
    let mut worst = f64::NEG_INFINITY;
    let mut witnesses = Vec::new();
    for _ in 0..points {
        let p = sample(&mut rng);
        let r = residual(&p)?;
        if !(r <= tolerance) && witnesses.len() < MAX_WITNESSES {
            witnesses.push(p);
        }
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
    }
    Ok((worst, witnesses))
}

/// `Ψ*ω₀ = ω_{Ω,μ}` at member points; residual `max|A−B| / max(1, max|B|)`.
pub fn darboux(h: &HartogsSpec, points: usize, seed: u64, cfg: &FdConfig, tolerance: f64) -> Result<CheckResult> {
    let start = Instant::now();
    let (worst, wit) = pointwise(
        points,
        seed,
        |rng| member_point(rng, h, MEMBER_MARGIN),
        |p| Ok(darboux_residual(h, p, cfg)?.scaled()),
        tolerance,
    )?;
    Ok(CheckResult::new(
        "darboux_residual",
        params(h, json!({ "points": points, "seed": seed, "fd_step": cfg.step })),
        worst,
        tolerance,
        start,
    )
    .with_witnesses(wit))
}

/// `Φ*ω₀ = ω*_{Ω,μ}` at heavy-tailed points of norm at most 10.
pub fn dual_darboux(h: &HartogsSpec, points: usize, seed: u64, cfg: &FdConfig, tolerance: f64) -> Result<CheckResult> {
    let start = Instant::now();
    let (worst, wit) = pointwise(
        points,
        seed,
        |rng| heavy_tailed_point(rng, &h.base, DUAL_MAX_NORM),
        |p| Ok(dual_darboux_residual(h, p, cfg)?.scaled()),
        tolerance,
    )?;
    Ok(CheckResult::new(
        "dual_darboux_residual",
        params(h, json!({ "points": points, "seed": seed, "fd_step": cfg.step })),
        worst,
        tolerance,
        start,
    )
    .with_witnesses(wit))
}

/// Smallest eigenvalue of the dual Hessian; the residual is its negative and
/// the check passes when every eigenvalue is at least `f64::MIN_POSITIVE`.
pub fn psh(h: &HartogsSpec, points: usize, seed: u64, cfg: &FdConfig) -> Result<CheckResult> {
    let start = Instant::now();
    let tolerance = -f64::MIN_POSITIVE;
    let (worst, wit) = pointwise(
        points,
        seed,
        |rng| heavy_tailed_point(rng, &h.base, DUAL_MAX_NORM),
        |p| Ok(-is_positive_definite(&dual_hessian(h, p, cfg)?).min_eigenvalue),
        tolerance,
    )?;
    Ok(CheckResult::new(
        "is_positive_definite",
        params(h, json!({ "points": points, "seed": seed, "fd_step": cfg.step })),
        worst,
        tolerance,
        start,
    )
    .with_witnesses(wit)
    .with_detail(json!({ "min_eigenvalue": -worst })))
}

/// Closed-form `det(ω*)` against the finite-difference determinant
/// (relative error).
pub fn det_formula(h: &HartogsSpec, points: usize, seed: u64, cfg: &FdConfig, tolerance: f64) -> Result<CheckResult> {
    let start = Instant::now();
    let (worst, wit) = pointwise(
        points,
        seed,
        |rng| heavy_tailed_point(rng, &h.base, DUAL_MAX_NORM),
        |p| {
            let exact = det_dual_hessian(h, p)?;
            Ok((det_dual_hessian_numeric(h, p, cfg)? - exact).abs() / exact)
        },
        tolerance,
    )?;
    Ok(CheckResult::new(
        "det_dual_hessian",
        params(h, json!({ "points": points, "seed": seed, "fd_step": cfg.step })),
        worst,
        tolerance,
        start,
    )
    .with_witnesses(wit))
}

/// Fitted genus against the invariant `γ = 2 + a(r−1) + b`.
pub fn genus(d: &DomainSpec, tolerance: f64) -> Result<CheckResult> {
    let start = Instant::now();
    let fitted = fit_genus(d)?;
    Ok(CheckResult::new(
        "fit_genus",
        json!({ "domain": d.label() }),
        (fitted - d.genus).abs(),
        tolerance,
        start,
    )
    .with_detail(json!({ "fitted": fitted, "genus": d.genus })))
}

/// Closed-form flat volume where the boundary constant is known: the
/// polydisc and rank-one bases.
pub fn analytic_flat_volume(h: &HartogsSpec) -> Option<f64> {
    use std::f64::consts::PI;
    use statrs::function::gamma::ln_gamma;
    match h.base.kind {
        DomainKind::Polydisc { n } => Some(crate::measures::polydisc_flat_volume(n, h.mu)),
        DomainKind::TypeI { p: 1, q } => {
            let n = q as f64;
            Some(((n + 1.0) * PI.ln() + ln_gamma(h.mu + 1.0) - ln_gamma(h.mu + n + 1.0)).exp())
        }
        DomainKind::TypeI { .. } => None,
    }
}

/// Monte Carlo flat volume against the closed form, in standard errors.
pub fn volume_flat(h: &HartogsSpec, samples: usize, seed: u64, sigmas: f64) -> Result<Option<CheckResult>> {
    let start = Instant::now();
    let Some(exact) = analytic_flat_volume(h) else {
        return Ok(None);
    };
    let est = mc_volume_flat(h, samples, seed)?;
    let z = (est.value - exact).abs() / est.standard_error;
    Ok(Some(
        CheckResult::new(
            "mc_volume_flat",
            params(h, json!({ "samples": samples, "seed": seed })),
            z,
            sigmas,
            start,
        )
        .with_detail(json!({ "estimate": est.value, "standard_error": est.standard_error, "exact": exact })),
    ))
}

/// Ratio of the Monte Carlo dual and flat volumes against
/// `μⁿ F(0) / ((n+1) F(μ))`, in combined standard errors.
pub fn volume_ratio(h: &HartogsSpec, samples: usize, seed: u64, sigmas: f64) -> Result<CheckResult> {
    let start = Instant::now();
    let flat = mc_volume_flat(h, samples, seed)?;
    let dual = mc_volume_dual(h, samples, seed.wrapping_add(1))?;
    if flat.value == 0.0 {
        return Ok(CheckResult::new(
            "mc_volume_dual",
            params(h, json!({ "samples": samples, "seed": seed })),
            f64::INFINITY,
            sigmas,
            start,
        )
        .with_detail(json!({ "error": "no flat sample fell inside the domain; raise the sample count" })));
    }
    let ratio = dual.value / flat.value;
    let rel = ((dual.standard_error / dual.value).powi(2) + (flat.standard_error / flat.value).powi(2)).sqrt();
    let predicted = crate::measures::dual_flat_ratio(h);
    let z = (ratio - predicted).abs() / (ratio * rel);
    Ok(CheckResult::new(
        "mc_volume_dual",
        params(h, json!({ "samples": samples, "seed": seed })),
        z,
        sigmas,
        start,
    )
    .with_detail(json!({
        "flat": flat.value,
        "flat_standard_error": flat.standard_error,
        "dual": dual.value,
        "dual_standard_error": dual.standard_error,
        "ratio": ratio,
        "predicted": predicted,
    })))
}

/// Both Selberg quadrature schemes against `F(s)` for `s ∈ {0, 1, 2.5}`.
pub fn selberg(d: &DomainSpec, tolerance: f64) -> Result<CheckResult> {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut rows = Vec::new();
    for s in [0.0, 1.0, 2.5] {
        let exact = capital_f(d, s);
        for scheme in [SelbergScheme::OrderedSimplex, SelbergScheme::SymmetricCube] {
            let q = selberg_quadrature(d.rank, d.a, d.b as f64, s, 8, tolerance * 1e-2, scheme)?;
            let rel = (q.value - exact).abs() / exact;
            worst = worst.max(rel);
            rows.push(json!({ "s": s, "scheme": scheme, "quadrature": q.value, "capital_f": exact, "resolution": q.resolution }));
        }
    }
    Ok(
        CheckResult::new("selberg_quadrature", json!({ "domain": d.label() }), worst, tolerance, start)
            .with_detail(Value::Array(rows)),
    )
}

/// Rank one: `|root − 1|` within `1e−9`. Higher rank: `root − 1`, which must
/// be negative (root in `(0, 1)`).
pub fn duality(d: &DomainSpec) -> Result<CheckResult> {
    let start = Instant::now();
    let root = duality_root(d)?;
    let (residual, tolerance) = if d.rank == 1 {
        ((root - 1.0).abs(), 1e-9)
    } else {
        (root - 1.0, -1e-9)
    };
    Ok(
        CheckResult::new("duality_root", json!({ "domain": d.label() }), residual, tolerance, start)
            .with_detail(json!({ "root": root })),
    )
}

/// `F(1)/F(0) ≤ 1/(n+1)` with equality exactly in rank one; the residual is
/// `|value − bound|` for rank one and `value − bound` otherwise.
pub fn gennaio(d: &DomainSpec) -> Result<CheckResult> {
    let start = Instant::now();
    let r = gennaio_check(d);
    let forms_agree = (r.value - r.gamma_value).abs() <= 1e-12;
    let (residual, tolerance) = if d.rank == 1 {
        ((r.value - r.bound).abs(), 1e-12)
    } else {
        (r.value - r.bound, -1e-12)
    };
    let residual = if forms_agree { residual } else { f64::INFINITY };
    Ok(CheckResult::new("gennaio_check", json!({ "domain": d.label() }), residual, tolerance, start)
        .with_detail(serde_json::to_value(r).unwrap_or(Value::Null)))
}

/// Capacity certificate; the residual is the number of failed samples.
pub fn capacity(h: &HartogsSpec, side: Side, samples: usize, seed: u64, epsilon: f64) -> Result<CheckResult> {
    let start = Instant::now();
    let cert = capacity_certificate(h, side, samples, seed, epsilon)?;
    let failures = cert.failures.len() as f64;
    let witnesses = cert.failures.clone();
    Ok(CheckResult::new(
        "capacity_certificate",
        params(h, json!({ "side": side, "samples": samples, "seed": seed, "epsilon": epsilon })),
        if cert.r_in <= cert.r_out { failures } else { f64::INFINITY },
        0.0,
        start,
    )
    .with_witnesses(witnesses)
    .with_detail(json!({
        "r_in": cert.r_in,
        "r_out": cert.r_out,
        "lower": cert.lower,
        "upper": cert.upper,
        "note": cert.note,
    })))
}

/// The embedding used for the hereditary check on a given base.
pub fn embedding_into(d: &DomainSpec) -> Embedding {
    match d.kind {
        DomainKind::Polydisc { n } => Embedding::CoordinateInclusion { m: n.saturating_sub(1).max(1), n },
        DomainKind::TypeI { p, q } => Embedding::DiagonalIntoTypeI { p, q },
    }
}

/// Equivariance of `Ψ`, `Φ` under the isotropy group, compatibility with a
/// lifted totally geodesic embedding, the `Ξ` specialization on `ℂHⁿ` at
/// `μ = 1`, and the Newton inverses. Residuals involving `Ψ` are divided by
/// `max(1, |Ψ(p)|)`, since `Ψ` is unbounded towards the boundary.
pub fn structure_maps(h: &HartogsSpec, points: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let base = &h.base;

    let start = Instant::now();
    let mut rng = chunk_rng(seed, 0);
    let (mut psi_worst, mut phi_worst) = (0.0_f64, 0.0_f64);
    let (mut psi_wit, mut phi_wit) = (Vec::new(), Vec::new());
    for _ in 0..points {
        let tau = random_isotropy(&mut rng, base);
        let p = member_point(&mut rng, h, MEMBER_MARGIN);
        let image = h.psi_map(&p)?;
        let r = h
            .psi_map(&hartogs_isotropy_apply(h, &tau, &p)?)?
            .distance(&hartogs_isotropy_apply(h, &tau, &image)?)
            / image.norm().max(1.0);
        if r > 1e-10 && psi_wit.len() < MAX_WITNESSES {
            psi_wit.push(p);
        }
        psi_worst = psi_worst.max(r);
        let q = heavy_tailed_point(&mut rng, base, DUAL_MAX_NORM);
        let r = h
            .phi_map(&hartogs_isotropy_apply(h, &tau, &q)?)?
            .distance(&hartogs_isotropy_apply(h, &tau, &h.phi_map(&q)?)?);
        if r > 1e-10 && phi_wit.len() < MAX_WITNESSES {
            phi_wit.push(q);
        }
        phi_worst = phi_worst.max(r);
    }
    let p = params(h, json!({ "points": points, "seed": seed }));
    out.push(CheckResult::new("psi_equivariance", p.clone(), psi_worst, 1e-10, start).with_witnesses(psi_wit));
    out.push(CheckResult::new("phi_equivariance", p.clone(), phi_worst, 1e-10, start).with_witnesses(phi_wit));

    let start = Instant::now();
    let f = embedding_into(base);
    let small = HartogsSpec::new(f.source()?, h.mu)?;
    let big = HartogsSpec::new(f.target()?, h.mu)?;
    let mut rng = chunk_rng(seed, 1);
    let mut worst = 0.0_f64;
    let mut wit = Vec::new();
    for _ in 0..points {
        let p = member_point(&mut rng, &small, MEMBER_MARGIN);
        let lifted = lift_embedding(&f, &p)?;
        let image = small.psi_map(&p)?;
        let r_psi = big.psi_map(&lifted)?.distance(&lift_embedding(&f, &image)?) / image.norm().max(1.0);
        let q = heavy_tailed_point(&mut rng, &small.base, DUAL_MAX_NORM);
        let r_phi = big
            .phi_map(&lift_embedding(&f, &q)?)?
            .distance(&lift_embedding(&f, &small.phi_map(&q)?)?);
        let r = r_psi.max(r_phi);
        if r > 1e-10 && wit.len() < MAX_WITNESSES {
            wit.push(p);
        }
        worst = worst.max(r);
    }
    out.push(
        CheckResult::new(
            "lift_embedding",
            params(h, json!({ "points": points, "seed": seed, "embedding": f })),
            worst,
            1e-10,
            start,
        )
        .with_witnesses(wit),
    );

    if matches!(base.kind, DomainKind::TypeI { p: 1, .. }) && h.mu == 1.0 {
        let start = Instant::now();
        let mut rng = chunk_rng(seed, 2);
        let mut worst = 0.0_f64;
        for _ in 0..points {
            let p = member_point(&mut rng, h, MEMBER_MARGIN);
            let mut zeta = p.z.0.clone();
            zeta.push(p.w);
            let xi = xi_map(&zeta)?;
            let psi = h.psi_map(&p)?;
            let mut img = psi.z.0.clone();
            img.push(psi.w);
            let diff = img.iter().zip(&xi).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(diff / psi.norm().max(1.0));
        }
        out.push(CheckResult::new("xi_map", params(h, json!({ "points": points, "seed": seed })), worst, 1e-12, start));
    }

    let start = Instant::now();
    let mut rng = chunk_rng(seed, 3);
    let (mut psi_worst, mut phi_worst) = (0.0_f64, 0.0_f64);
    let (mut psi_wit, mut phi_wit) = (Vec::new(), Vec::new());
    for _ in 0..points {
        let p = member_point(&mut rng, h, MEMBER_MARGIN);
        let r = h.psi_inverse(&h.psi_map(&p)?).map(|q| q.distance(&p)).unwrap_or(f64::INFINITY);
        if r > 1e-8 && psi_wit.len() < MAX_WITNESSES {
            psi_wit.push(p);
        }
        psi_worst = psi_worst.max(r);
        let q = heavy_tailed_point(&mut rng, base, DUAL_MAX_NORM);
        let r = h.phi_inverse(&h.phi_map(&q)?).map(|x| x.distance(&q)).unwrap_or(f64::INFINITY);
        if r > 1e-8 && phi_wit.len() < MAX_WITNESSES {
            phi_wit.push(q);
        }
        phi_worst = phi_worst.max(r);
    }
    out.push(CheckResult::new("psi_inverse", p.clone(), psi_worst, 1e-8, start).with_witnesses(psi_wit));
    out.push(CheckResult::new("phi_inverse", p, phi_worst, 1e-8, start).with_witnesses(phi_wit));
    Ok(out)
}
