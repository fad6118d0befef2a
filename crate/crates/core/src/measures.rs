//! Volume constants, the Selberg quadrature, Monte Carlo volumes and the
//! duality equation `F(μ)/F(0) = μⁿ/(n+1)`.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::forms::{complex_hessian, det_dual_hessian, FdConfig};
use crate::hartogs::{HartogsPoint, HartogsSpec};
use crate::jtsys::{ln_generic_norm, DomainPoint, DomainSpec, Sign, C64};
use crate::sampling::{chunk_rng, chunks, point_with_spectrum, unit_phase};

pub const MIN_MC_SAMPLES: usize = 10_000;

fn ln_capital_f(d: &DomainSpec, s: f64) -> f64 {
    let (r, a, b) = (d.rank as f64, d.a, d.b as f64);
    let mut acc = -(r * 2f64.ln()) - ln_gamma(r + 1.0);
    for j in 1..=d.rank {
        let j = j as f64;
        acc += ln_gamma(b + 1.0 + (j - 1.0) * a / 2.0) + ln_gamma(s + 1.0 + (j - 1.0) * a / 2.0)
            + ln_gamma(j * a / 2.0 + 1.0)
            - ln_gamma(s + b + 2.0 + (r + j - 2.0) * a / 2.0)
            - ln_gamma(a / 2.0 + 1.0);
    }
    acc
}

/// `F(s)`, the Selberg-type integral over the ordered spectral simplex.
pub fn capital_f(d: &DomainSpec, s: f64) -> f64 {
    ln_capital_f(d, s).exp()
}

/// `F(s)/F(t)` as the exponential of a log difference.
pub fn capital_f_ratio(d: &DomainSpec, s: f64, t: f64) -> f64 {
    (ln_capital_f(d, s) - ln_capital_f(d, t)).exp()
}

/// Analytic `Vol(M, ω₀) / ∫Θ`.
pub fn flat_volume_over_theta(h: &HartogsSpec) -> f64 {
    let n = h.base.dim as f64;
    ((n + 1.0) * PI.ln() - ln_gamma(n + 1.0) + ln_capital_f(&h.base, h.mu)).exp()
}

/// Analytic `Vol(ℂⁿ⁺¹, ω*) / ∫Θ`.
pub fn dual_volume_over_theta(h: &HartogsSpec) -> f64 {
    let n = h.base.dim as f64;
    ((n + 1.0) * PI.ln() + n * h.mu.ln() - ln_gamma(n + 2.0) + ln_capital_f(&h.base, 0.0)).exp()
}

/// Predicted `Vol(ℂⁿ⁺¹, ω*) / Vol(M, ω₀) = μⁿ F(0) / ((n+1) F(μ))`.
pub fn dual_flat_ratio(h: &HartogsSpec) -> f64 {
    let n = h.base.dim as f64;
    (n * h.mu.ln() - (n + 1.0).ln() + ln_capital_f(&h.base, 0.0) - ln_capital_f(&h.base, h.mu)).exp()
}

/// `π^{n+1} / (μ+1)ⁿ`, the flat volume over the polydisc.
pub fn polydisc_flat_volume(n: usize, mu: f64) -> f64 {
    PI.powi(n as i32 + 1) / (mu + 1.0).powi(n as i32)
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 0 { 1.0 } else { p1 };
            dp = m as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelbergScheme {
    /// Tensor Gauss–Legendre on the ordered simplex through the map
    /// `t_k = u₁⋯u_k`.
    OrderedSimplex,
    /// Tensor Gauss–Legendre of the symmetric integrand on the cube,
    /// divided by `r!`.
    SymmetricCube,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelbergEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub resolution: usize,
}

/// Integrand in the variables `t = λ²`, including the `2^{-r}` from `dt = 2λ dλ`.
fn selberg_integrand(t: &[f64], a: f64, b: f64, s: f64) -> f64 {
    let mut v = 1.0;
    for (j, &tj) in t.iter().enumerate() {
        v *= 0.5 * tj.powf(b) * (1.0 - tj).powf(s);
        for &tk in &t[j + 1..] {
            v *= (tj - tk).abs().powf(a);
        }
    }
    v
}

fn selberg_rule(r: usize, a: f64, b: f64, s: f64, m: usize, scheme: SelbergScheme) -> f64 {
    let rule = gauss_legendre(m);
    let mut idx = vec![0usize; r];
    let mut t = vec![0.0; r];
    let mut sum = 0.0;
    let factorial: f64 = (1..=r).map(|k| k as f64).product();
    loop {
        let mut weight = 1.0;
        match scheme {
            SelbergScheme::OrderedSimplex => {
                let mut prod = 1.0;
                for k in 0..r {
                    let (u, w) = rule[idx[k]];
                    prod *= u;
                    t[k] = prod;
                    weight *= w * u.powi((r - 1 - k) as i32);
                }
            }
            SelbergScheme::SymmetricCube => {
                for k in 0..r {
                    let (u, w) = rule[idx[k]];
                    t[k] = u;
                    weight *= w;
                }
                weight /= factorial;
            }
        }
        sum += weight * selberg_integrand(&t, a, b, s);
        let mut k = 0;
        loop {
            if k == r {
                return sum;
            }
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn selberg_max_resolution(r: usize) -> usize {
    match r {
        1 => 4096,
        2 => 512,
        _ => 96,
    }
}

/// `∫ ∏(1−λ_j²)^s ∏λ_j^{2b+1} ∏_{j<k}(λ_j²−λ_k²)^a dλ` over
/// `1 > λ₁ > … > λ_r > 0`. The resolution is doubled from `resolution` until
/// two successive estimates agree to `tolerance` (relative).
pub fn selberg_quadrature(
    r: usize,
    a: f64,
    b: f64,
    s: f64,
    resolution: usize,
    tolerance: f64,
    scheme: SelbergScheme,
) -> Result<SelbergEstimate> {
    if r == 0 || r > 3 {
        return Err(Error::InvalidArgument(format!("Selberg quadrature supports 1 ≤ r ≤ 3, got {r}")));
    }
    if a < 0.0 || b < 0.0 || s < 0.0 || resolution == 0 {
        return Err(Error::InvalidArgument("Selberg parameters must be nonnegative".into()));
    }
    let max = selberg_max_resolution(r).max(resolution);
    let mut m = resolution;
    let mut previous = selberg_rule(r, a, b, s, m, scheme);
    let mut estimate = f64::INFINITY;
    while 2 * m <= max {
        m *= 2;
        let current = selberg_rule(r, a, b, s, m, scheme);
        estimate = (current - previous).abs() / current.abs().max(f64::MIN_POSITIVE);
        previous = current;
        if estimate <= tolerance {
            return Ok(SelbergEstimate {
                value: current,
                error_estimate: estimate,
                resolution: m,
            });
        }
    }
    Err(Error::QuadratureTolerance { tolerance, estimate })
}

/// Both schemes at a domain's invariants; they must agree with each other.
pub fn selberg_for_domain(d: &DomainSpec, s: f64, tolerance: f64) -> Result<(SelbergEstimate, SelbergEstimate)> {
    let run = |scheme| selberg_quadrature(d.rank, d.a, d.b as f64, s, 8, tolerance, scheme);
    Ok((run(SelbergScheme::OrderedSimplex)?, run(SelbergScheme::SymmetricCube)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Mean and standard error of `f` over `samples` draws, chunked so the
/// result does not depend on the number of threads.
fn chunked_mean<F>(samples: usize, seed: u64, f: F) -> Result<(f64, f64)>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
{
    let parts: Vec<Result<(f64, f64)>> = chunks(samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, len)| {
            let mut rng = chunk_rng(seed, k);
            let (mut s1, mut s2) = (KahanSum::default(), KahanSum::default());
            for _ in 0..len {
                let v = f(&mut rng)?;
                s1.add(v);
                s2.add(v * v);
            }
            Ok((s1.value(), s2.value()))
        })
        .collect();
    let (mut s1, mut s2) = (KahanSum::default(), KahanSum::default());
    for part in parts {
        let (a, b) = part?;
        s1.add(a);
        s2.add(b);
    }
    let n = samples as f64;
    let mean = s1.value() / n;
    let var = (s2.value() / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_MC_SAMPLES} samples required, got {samples}"
        )));
    }
    Ok(())
}

/// Lebesgue volume of `M_{Ω,μ}` by rejection sampling in
/// `[−1,1]²ⁿ × {|w| ≤ 1}`.
pub fn mc_volume_flat(h: &HartogsSpec, samples: usize, seed: u64) -> Result<MCEstimate> {
    check_samples(samples)?;
    let n = h.base.dim;
    let box_volume = 4f64.powi(n as i32) * PI;
    let (mean, se) = chunked_mean(samples, seed, |rng| {
        let z = DomainPoint(
            (0..n)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        );
        let w = unit_phase(rng) * rng.random::<f64>().sqrt();
        Ok(if h.contains(&HartogsPoint { z, w })? { 1.0 } else { 0.0 })
    })?;
    Ok(MCEstimate {
        value: box_volume * mean,
        standard_error: box_volume * se,
        samples,
        seed,
    })
}

/// `∫_{ℂⁿ⁺¹} det(ω*) dV`, each complex coordinate drawn as `ρ e^{iθ}` with
/// `ρ = t/(1−t)`, `t` and `θ` uniform.
pub fn mc_volume_dual(h: &HartogsSpec, samples: usize, seed: u64) -> Result<MCEstimate> {
    check_samples(samples)?;
    let m = h.dim();
    let (mean, se) = chunked_mean(samples, seed, |rng| {
        let mut weight = 1.0;
        let mut coords = Vec::with_capacity(m);
        for _ in 0..m {
            let t: f64 = rng.random();
            let rho = t / (1.0 - t);
            weight *= 2.0 * PI * rho / ((1.0 - t) * (1.0 - t));
            coords.push(unit_phase(rng) * rho);
        }
        let w = coords.pop().expect("m ≥ 1");
        let det = det_dual_hessian(h, &HartogsPoint { z: DomainPoint(coords), w })?;
        let v = weight * det;
        Ok(if v.is_finite() { v } else { 0.0 })
    })?;
    Ok(MCEstimate {
        value: mean,
        standard_error: se,
        samples,
        seed,
    })
}

/// `g(μ) = F(μ)/F(0) − μⁿ/(n+1)`.
pub fn duality_gap(d: &DomainSpec, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("μ must be positive, got {mu}")));
    }
    let n = d.dim as f64;
    Ok(capital_f_ratio(d, mu, 0.0) - mu.powf(n) / (n + 1.0))
}

pub const DUALITY_BRACKET: (f64, f64) = (1e-12, 2.0);

/// The unique positive root of the duality gap, by bisection to `1e−10`.
pub fn duality_root(d: &DomainSpec) -> Result<f64> {
    duality_root_in(d, DUALITY_BRACKET.0, DUALITY_BRACKET.1)
}

pub fn duality_root_in(d: &DomainSpec, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (duality_gap(d, a)?, duality_gap(d, b)?);
    if ga.signum() == gb.signum() || ga == 0.0 || gb == 0.0 {
        if ga == 0.0 {
            return Ok(a);
        }
        if gb == 0.0 {
            return Ok(b);
        }
        return Err(Error::NoRoot {
            what: "duality gap".into(),
            lo,
            hi,
        });
    }
    while b - a > 1e-12 {
        let mid = 0.5 * (a + b);
        let g = duality_gap(d, mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if g.signum() == ga.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GennaioReport {
    /// `F(1)/F(0)` from the product formula.
    pub value: f64,
    /// `F(1)/F(0)` from the Gamma form.
    pub gamma_value: f64,
    pub bound: f64,
    pub pass: bool,
    pub equality: bool,
}

/// `F(1)/F(0) ≤ 1/(n+1)`, with equality exactly in rank one.
pub fn gennaio_check(d: &DomainSpec) -> GennaioReport {
    let (r, a, b) = (d.rank as f64, d.a, d.b as f64);
    let value: f64 = (1..=d.rank)
        .map(|j| {
            let j = j as f64;
            (1.0 + (j - 1.0) * a / 2.0) / (b + 2.0 + (r + j - 2.0) * a / 2.0)
        })
        .product();
    let gamma_value = capital_f_ratio(d, 1.0, 0.0);
    let bound = 1.0 / (d.dim as f64 + 1.0);
    let tol = 1e-12 * bound;
    GennaioReport {
        value,
        gamma_value,
        bound,
        pass: value <= bound + tol && (value - gamma_value).abs() <= 1e-12,
        equality: (value - bound).abs() <= tol,
    }
}

/// Fits `γ` from `det ∂∂̄(μ log N(z,−z̄)) = μⁿ N(z,−z̄)^{−γ}` at points with
/// spectral values spread over `[0.3, 1.5]`.
pub fn fit_genus(d: &DomainSpec) -> Result<f64> {
    let mu = 1.0;
    let n = d.dim as f64;
    let cfg = FdConfig::default();
    let mut rng = chunk_rng(0x6e6e, 0);
    let mut fits = Vec::new();
    for k in 0..6 {
        let lambdas: Vec<f64> = (0..d.rank).map(|j| 0.3 + 0.2 * ((k + j) % 7) as f64).collect();
        let z = point_with_spectrum(&mut rng, d, &lambdas);
        let ln_n = ln_generic_norm(d, &z, Sign::Minus)?;
        if ln_n < 1e-3 {
            continue;
        }
        let g = complex_hessian(
            |x| ln_generic_norm(d, &DomainPoint::from_interleaved(x), Sign::Minus).map(|v| mu * v),
            &z.to_interleaved(),
            &cfg,
        )?;
        let det = g.determinant();
        if !(det > 0.0) {
            return Err(Error::NonFinite(format!("Hessian determinant {det}")));
        }
        fits.push((n * mu.ln() - det.ln()) / ln_n);
    }
    if fits.is_empty() {
        return Err(Error::InvalidArgument("all genus samples degenerate".into()));
    }
    Ok(fits.iter().sum::<f64>() / fits.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn beta_oracle(p: f64, q: f64) -> f64 {
        (ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)).exp()
    }

    #[test]
    fn capital_f_examples() {
        let ch1 = DomainSpec::complex_hyperbolic(1).unwrap();
        assert_relative_eq!(capital_f(&ch1, 0.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(capital_f(&ch1, 1.0), 0.25, epsilon = 1e-15);
        for n in 1..5 {
            let d = DomainSpec::complex_hyperbolic(n).unwrap();
            for mu in [0.5, 1.0, 2.0, 3.7] {
                let expected = beta_oracle(n as f64, mu + 1.0) * n as f64;
                assert_relative_eq!(capital_f_ratio(&d, mu, 0.0), expected, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn capital_f_decreasing() {
        for d in [DomainSpec::polydisc(3).unwrap(), DomainSpec::type_one(2, 3).unwrap()] {
            let values: Vec<f64> = (0..40).map(|k| capital_f(&d, 0.25 * k as f64)).collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let rule = gauss_legendre(5);
        for deg in 0..10 {
            let q: f64 = rule.iter().map(|(x, w)| w * x.powi(deg)).sum();
            assert_relative_eq!(q, 1.0 / (deg as f64 + 1.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn selberg_examples() {
        for scheme in [SelbergScheme::OrderedSimplex, SelbergScheme::SymmetricCube] {
            let q = selberg_quadrature(1, 0.0, 0.0, 0.0, 4, 1e-12, scheme).unwrap();
            assert_relative_eq!(q.value, 0.5, max_relative = 1e-12);
            let q = selberg_quadrature(1, 0.0, 0.0, 1.0, 4, 1e-12, scheme).unwrap();
            assert_relative_eq!(q.value, 0.25, max_relative = 1e-12);
        }
        let d = DomainSpec::type_one(2, 2).unwrap();
        let (a, b) = selberg_for_domain(&d, 0.0, 1e-8).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-6);
        assert_relative_eq!(a.value, capital_f(&d, 0.0), max_relative = 1e-6);
    }

    #[test]
    fn selberg_reports_unreachable_tolerance() {
        let err = selberg_quadrature(3, 2.0, 0.0, 0.3, 4, 1e-15, SelbergScheme::SymmetricCube).unwrap_err();
        assert!(matches!(err, Error::QuadratureTolerance { .. }));
    }

    #[test]
    fn volume_constants_agree_with_polydisc_oracle() {
        for n in 1..4 {
            for mu in [0.5, 1.0, 2.0] {
                let h = HartogsSpec::new(DomainSpec::polydisc(n).unwrap(), mu).unwrap();
                let theta = polydisc_flat_volume(n, mu) / flat_volume_over_theta(&h);
                let h1 = HartogsSpec::new(DomainSpec::polydisc(n).unwrap(), 1.3).unwrap();
                let theta1 = polydisc_flat_volume(n, 1.3) / flat_volume_over_theta(&h1);
                assert_relative_eq!(theta, theta1, max_relative = 1e-12);
                assert_relative_eq!(
                    dual_volume_over_theta(&h) / flat_volume_over_theta(&h),
                    dual_flat_ratio(&h),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn duality_examples() {
        for n in 1..4 {
            let root = duality_root(&DomainSpec::complex_hyperbolic(n).unwrap()).unwrap();
            assert!((root - 1.0).abs() < 1e-9, "n={n} root={root}");
        }
        let root = duality_root(&DomainSpec::type_one(2, 2).unwrap()).unwrap();
        assert!(root > 0.0 && root < 1.0);
        let g = duality_gap(&DomainSpec::polydisc(2).unwrap(), 1e-9).unwrap();
        assert!((g - 1.0).abs() < 1e-6);
        assert!(matches!(
            duality_root_in(&DomainSpec::polydisc(2).unwrap(), 1.5, 2.0),
            Err(Error::NoRoot { .. })
        ));
    }

    #[test]
    fn gennaio_examples() {
        let r = gennaio_check(&DomainSpec::complex_hyperbolic(3).unwrap());
        assert!(r.pass && r.equality);
        assert_relative_eq!(r.value, 0.25, epsilon = 1e-15);
        let r = gennaio_check(&DomainSpec::type_one(2, 2).unwrap());
        assert!(r.pass && !r.equality);
        assert!(r.value < 0.2);
        let r = gennaio_check(&DomainSpec::polydisc(2).unwrap());
        assert_relative_eq!(r.value, 0.25, epsilon = 1e-15);
        assert!(r.pass && !r.equality);
    }

    #[test]
    fn genus_fits() {
        assert!((fit_genus(&DomainSpec::complex_hyperbolic(2).unwrap()).unwrap() - 3.0).abs() < 1e-3);
        assert!((fit_genus(&DomainSpec::polydisc(2).unwrap()).unwrap() - 2.0).abs() < 1e-3);
        assert!((fit_genus(&DomainSpec::type_one(2, 2).unwrap()).unwrap() - 4.0).abs() < 1e-3);
    }

    #[test]
    fn mc_is_deterministic_and_rejects_small_runs() {
        let h = HartogsSpec::new(DomainSpec::polydisc(1).unwrap(), 1.0).unwrap();
        let a = mc_volume_flat(&h, 20_000, 5).unwrap();
        let b = mc_volume_flat(&h, 20_000, 5).unwrap();
        assert_eq!(a, b);
        assert!(mc_volume_flat(&h, 100, 5).is_err());
        let a = mc_volume_dual(&h, 20_000, 5).unwrap();
        let b = mc_volume_dual(&h, 20_000, 5).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn mc_volumes_match_oracles() {
        let h = HartogsSpec::new(DomainSpec::polydisc(1).unwrap(), 1.0).unwrap();
        let flat = mc_volume_flat(&h, 200_000, 1).unwrap();
        assert!((flat.value - PI * PI / 2.0).abs() < 4.0 * flat.standard_error);
        let dual = mc_volume_dual(&h, 200_000, 2).unwrap();
        assert!((dual.value - PI * PI / 2.0).abs() < 4.0 * dual.standard_error, "{dual:?}");
    }
}
