//! Capacity certificates from sampled embedding inclusions.
//!
//! A capacity is monotone under inclusion and equals `πr²` on both the ball
//! `B(r)` and the cylinder `Z(r) = {|ζ₁| < r}`. Verifying `B(r_in) ⊂ X ⊂ Z(r_out)`
//! therefore pins any capacity of `X` to `[π r_in², π r_out²]`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hartogs::{HartogsPoint, HartogsSpec};
use crate::jtsys::{spectral_decompose, DomainPoint, C64};
use crate::sampling::{chunk_rng, chunks, heavy_tailed_point, member_point, uniform_ball};

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const MAX_WITNESSES: usize = 8;
/// Round-trip tolerance for points of the inner ball of the dual image.
pub const TARGET_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    FlatHartogs,
    Dual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionCheck {
    pub pass: bool,
    pub sampled_points: usize,
    pub witnesses: Vec<HartogsPoint>,
    /// Smallest observed margin of the defining inequality (positive on success).
    pub min_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityCertificate {
    pub side: Side,
    pub mu: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub lower: f64,
    pub upper: f64,
    pub sampled_points: usize,
    pub failures: Vec<HartogsPoint>,
    pub note: Option<String>,
}

impl CapacityCertificate {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty() && self.r_in <= self.r_out && self.lower <= self.upper
    }
}

/// Per-chunk sweep: `probe` returns the margin of a sample (failure if ≤ 0)
/// and the sample itself.
fn sweep<F>(samples: usize, seed: u64, probe: F) -> Result<InclusionCheck>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<(f64, HartogsPoint)> + Sync,
{
    let parts: Vec<Result<(f64, Vec<HartogsPoint>)>> = chunks(samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, len)| {
            let mut rng = chunk_rng(seed, k);
            let mut min_margin = f64::INFINITY;
            let mut witnesses = Vec::new();
            for _ in 0..len {
                let (margin, p) = probe(&mut rng)?;
                min_margin = min_margin.min(margin);
                if !(margin > 0.0) && witnesses.len() < MAX_WITNESSES {
                    witnesses.push(p);
                }
            }
            Ok((min_margin, witnesses))
        })
        .collect();
    let mut min_margin = f64::INFINITY;
    let mut witnesses = Vec::new();
    for part in parts {
        let (m, w) = part?;
        min_margin = min_margin.min(m);
        witnesses.extend(w);
    }
    witnesses.truncate(MAX_WITNESSES);
    Ok(InclusionCheck {
        pass: witnesses.is_empty() && samples > 0,
        sampled_points: samples,
        witnesses,
        min_margin,
    })
}

fn split_last(mut coords: Vec<C64>) -> HartogsPoint {
    let w = coords.pop().unwrap_or_default();
    HartogsPoint { z: DomainPoint(coords), w }
}

/// `Σλ_j² + ∏(1−λ_j²) − 1`, nonnegative for spectra in `[0, 1)`.
pub fn ball_inequality_margin(lambdas: &[f64]) -> f64 {
    let sum: f64 = lambdas.iter().map(|l| l * l).sum();
    let prod: f64 = lambdas.iter().map(|l| 1.0 - l * l).product();
    sum + prod - 1.0
}

fn require_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    Ok(())
}

/// Samples the ball of the given radius in `ℂⁿ⁺¹` and tests membership in
/// `M_{Ω,μ}`. The margin reported is `N^μ − |w|²` at each sample, and the
/// scalar inequality `1 ≤ Σλ² + ∏(1−λ²)` is checked on the same spectra.
pub fn ball_in_hartogs(h: &HartogsSpec, radius: f64, samples: usize, seed: u64) -> Result<InclusionCheck> {
    require_radius(radius)?;
    let m = h.dim();
    sweep(samples, seed, |rng| {
        let p = split_last(uniform_ball(rng, m, radius));
        if !h.contains(&p)? {
            return Ok((-1.0, p));
        }
        let spec = spectral_decompose(&h.base, &p.z)?;
        let ineq = ball_inequality_margin(&spec.eigenvalues);
        let gap = h.gap(&p)?;
        Ok((if ineq < -1e-12 { ineq } else { gap }, p))
    })
}

/// Checks `|z₁| < radius` on sampled member points of `M_{Ω,μ}`.
pub fn hartogs_in_cylinder(h: &HartogsSpec, radius: f64, samples: usize, seed: u64) -> Result<InclusionCheck> {
    require_radius(radius)?;
    sweep(samples, seed, |rng| {
        let p = member_point(rng, h, 0.0);
        let first = p.z.0.first().copied().unwrap_or_default();
        Ok((radius - first.norm(), p))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualBoundsReport {
    pub pass: bool,
    pub sampled_points: usize,
    /// Largest observed `ξ_j²`.
    pub max_xi_sq: f64,
    /// Largest observed `|ξ₀ w|`.
    pub max_last_modulus: f64,
    pub witnesses: Vec<HartogsPoint>,
}

/// `ln μ − ln ξ_j²` and `−ln |ξ₀ w|²` at the largest spectral value, both
/// computed as sums of positive logarithms so that they stay strictly
/// positive for finite inputs.
fn dual_log_margins(h: &HartogsSpec, p: &HartogsPoint) -> Result<(f64, f64, f64, f64)> {
    let spec = spectral_decompose(&h.base, &p.z)?;
    let ln_n: f64 = spec.eigenvalues.iter().map(|l| (l * l).ln_1p()).sum();
    let ln_p = h.mu * ln_n;
    let w2 = p.w.norm_sqr();
    // ln(1 + |w|²/N^μ) and ln(1 + N^μ/|w|²)
    let ln_w_ratio = if w2 > 0.0 { w2.ln() - ln_p } else { f64::NEG_INFINITY };
    let soft_plus = |x: f64| if x > 30.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() };
    let xi_margin = match spec.eigenvalues.first() {
        Some(&l) => soft_plus(ln_w_ratio) + (l * l).recip().ln_1p(),
        None => f64::INFINITY,
    };
    let w_margin = if w2 > 0.0 { soft_plus(-ln_w_ratio) } else { f64::INFINITY };
    let image = h.phi_map_spectral(p)?;
    let top = spectral_decompose(&h.base, &image.z)?.max_eigenvalue();
    Ok((xi_margin, w_margin, top * top, image.w.norm()))
}

/// Checks `ξ_j² < μ` and `|ξ₀ w| < 1` on heavy-tailed samples of `ℂⁿ⁺¹`.
pub fn dual_image_bounds(h: &HartogsSpec, samples: usize, seed: u64) -> Result<DualBoundsReport> {
    let maxima = std::sync::Mutex::new((0.0_f64, 0.0_f64));
    let check = sweep(samples, seed, |rng| {
        let p = heavy_tailed_point(rng, &h.base, f64::INFINITY);
        let (xi_margin, w_margin, xi_sq, last) = dual_log_margins(h, &p)?;
        let mut m = maxima.lock().expect("no poisoning");
        m.0 = m.0.max(xi_sq);
        m.1 = m.1.max(last);
        Ok((xi_margin.min(w_margin), p))
    })?;
    let (max_xi_sq, max_last_modulus) = maxima.into_inner().expect("no poisoning");
    Ok(DualBoundsReport {
        pass: check.pass,
        sampled_points: check.sampled_points,
        max_xi_sq,
        max_last_modulus,
        witnesses: check.witnesses,
    })
}

/// Solves for `(λ, |w|)` with prescribed spectral coordinates `x` and
/// `|ξ₀ w| = δ` of `Φ(z, w)`:
/// `λ_j² = x_j² / (μ(1−δ²) − x_j²)`, `|w|² = ∏(1+λ_j²)^μ δ²/(1−δ²)`.
/// The point is returned in diagonal position (`z = Σ λ_j e_j` for the
/// polydisc, `z = diag(λ)` for type I).
pub fn solve_target_system(h: &HartogsSpec, delta: f64, x: &[f64]) -> Result<HartogsPoint> {
    let (lambdas, w_abs) = solve_spectral(h, delta, x)?;
    let frame = crate::sampling::point_with_spectrum_fixed(&h.base, &lambdas);
    Ok(HartogsPoint {
        z: frame,
        w: C64::new(w_abs, 0.0),
    })
}

fn solve_spectral(h: &HartogsSpec, delta: f64, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    if x.len() > h.base.rank {
        return Err(Error::ShapeMismatch {
            expected: h.base.rank,
            got: x.len(),
        });
    }
    if !(0.0..1.0).contains(&delta.abs()) {
        return Err(Error::DomainViolation(format!("δ = {delta} must satisfy δ² < 1")));
    }
    let d2 = delta * delta;
    let cap = h.mu * (1.0 - d2);
    let mut lambdas = Vec::with_capacity(x.len());
    for &xj in x {
        let x2 = xj * xj;
        if x2 >= cap {
            return Err(Error::DomainViolation(format!(
                "x² = {x2} is not below μ(1−δ²) = {cap}"
            )));
        }
        lambdas.push((x2 / (cap - x2)).sqrt());
    }
    let ln_n: f64 = lambdas.iter().map(|l| (l * l).ln_1p()).sum();
    let w_abs = (h.mu * ln_n + d2.ln() - (1.0 - d2).ln()).exp().sqrt();
    Ok((lambdas, if delta == 0.0 { 0.0 } else { w_abs }))
}

/// Checks that random points of the ball of radius `c` are hit by `Φ`:
/// each target `(ζ_z, ζ_w)` is decomposed as `ζ_z = Σ x_j c_j`, the system
/// is solved for `(λ, |w|)`, and `Φ(Σ λ_j c_j, |w| ζ_w/|ζ_w|)` is compared
/// with the target.
pub fn ball_in_dual_image(h: &HartogsSpec, c: f64, samples: usize, seed: u64) -> Result<InclusionCheck> {
    require_radius(c)?;
    let m = h.dim();
    sweep(samples, seed, |rng| {
        let target = split_last(uniform_ball(rng, m, c));
        let spec = spectral_decompose(&h.base, &target.z)?;
        let delta = target.w.norm();
        let (lambdas, w_abs) = match solve_spectral(h, delta, &spec.eigenvalues) {
            Ok(v) => v,
            Err(_) => return Ok((-1.0, target)),
        };
        let rescaled = crate::jtsys::SpectralDecomposition {
            eigenvalues: lambdas,
            tripotents: spec.tripotents.clone(),
        };
        let z = rescaled.reconstruct(h.base.dim);
        let phase = if delta > 0.0 { target.w / delta } else { C64::new(1.0, 0.0) };
        let source = HartogsPoint { z, w: phase * w_abs };
        let image = h.phi_map(&source)?;
        let err = image.distance(&target);
        Ok((TARGET_TOLERANCE - err, target))
    })
}

/// Certified capacity interval.
///
/// Flat side (`μ ≤ 1`): `B(1−ε) ⊂ M_{Ω,μ} ⊂ Z(1)`.
/// Dual side: `B(min{1,√μ} − ε) ⊂ Im Φ ⊂ Z(min{1,√μ})`, the outer bound
/// coming from `|ζ₁| ≤ max ξ_j < √μ` and `|ξ₀ w| < 1`.
pub fn capacity_certificate(
    h: &HartogsSpec,
    side: Side,
    samples: usize,
    seed: u64,
    epsilon: f64,
) -> Result<CapacityCertificate> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    let (r_in, r_out, inner, outer, note) = match side {
        Side::FlatHartogs => {
            if h.mu > 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "flat-side certificate needs μ ≤ 1, got {}",
                    h.mu
                )));
            }
            let r_in = 1.0 - epsilon;
            let inner = ball_in_hartogs(h, r_in, samples, seed)?;
            let outer = hartogs_in_cylinder(h, 1.0, samples, seed ^ 0x5a5a)?;
            (r_in, 1.0, inner, outer, None)
        }
        Side::Dual => {
            let radius = h.mu.sqrt().min(1.0);
            let r_in = radius - epsilon;
            let inner = ball_in_dual_image(h, r_in, samples, seed)?;
            let bounds = dual_image_bounds(h, samples, seed ^ 0x5a5a)?;
            let outer = InclusionCheck {
                pass: bounds.pass,
                sampled_points: bounds.sampled_points,
                witnesses: bounds.witnesses,
                min_margin: f64::NAN,
            };
            let note = (h.mu < 1.0).then(|| {
                format!(
                    "certified interval is [π(√μ−ε)², πμ] = [{:.6}, {:.6}]; the value μ²π = {:.6} lies below it",
                    PI * r_in * r_in,
                    PI * h.mu,
                    PI * h.mu * h.mu
                )
            });
            (r_in, radius, inner, outer, note)
        }
    };
    let mut failures = inner.witnesses;
    failures.extend(outer.witnesses);
    Ok(CapacityCertificate {
        side,
        mu: h.mu,
        r_in,
        r_out,
        lower: PI * r_in * r_in,
        upper: PI * r_out * r_out,
        sampled_points: inner.sampled_points + outer.sampled_points,
        failures,
        note,
    })
}
