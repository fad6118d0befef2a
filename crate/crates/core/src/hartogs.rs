//! Cartan–Hartogs domains `M_{Ω,μ} = {(z, w) ∈ Ω × ℂ : |w|² < N(z, z̄)^μ}`,
//! their duals `(ℂⁿ⁺¹, ω*_{Ω,μ})`, and the global Darboux maps `Ψ` and `Φ`.
//!
//! Both maps are available through two independent evaluation routes:
//! the operator form (generic norm as a determinant, `B^{-1/4}` as a
//! matrix power) and the spectral form (`Σ λ_j (1 ∓ λ_j²)^{-1/2} c_j`).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jtsys::{
    b_quarter_power_operator, generic_norm, isotropy_apply, ln_generic_norm,
    spectral_decompose, DomainKind, DomainPoint, DomainSpec, Isotropy, Sign, C64,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HartogsSpec {
    pub base: DomainSpec,
    pub mu: f64,
}

/// A point `(z, w) ∈ ℂⁿ × ℂ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HartogsPoint {
    pub z: DomainPoint,
    pub w: C64,
}

impl HartogsPoint {
    pub fn origin(n: usize) -> Self {
        Self {
            z: DomainPoint::zeros(n),
            w: C64::new(0.0, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.z.len() + 1
    }

    /// Real coordinates `(x₁, y₁, …, x_n, y_n, x_w, y_w)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.z
            .0
            .iter()
            .chain(std::iter::once(&self.w))
            .flat_map(|c| [c.re, c.im])
            .collect()
    }

    pub fn from_real(x: &[f64]) -> Self {
        assert!(x.len() >= 2 && x.len().is_multiple_of(2), "need an even number of real coordinates");
        let mut coords: Vec<C64> = x.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        let w = coords.pop().expect("at least one complex coordinate");
        Self {
            z: DomainPoint(coords),
            w,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.z.sub(&other.z).norm_sqr() + (self.w - other.w).norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite() && self.w.re.is_finite() && self.w.im.is_finite()
    }
}

/// `ln(e^a + e^b)` without overflow.
fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn ln_sqr(w: C64) -> f64 {
    let t = w.norm_sqr();
    if t == 0.0 {
        f64::NEG_INFINITY
    } else {
        t.ln()
    }
}

impl HartogsSpec {
    pub fn new(base: DomainSpec, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!("μ must be positive, got {mu}")));
        }
        Ok(Self { base, mu })
    }

    pub fn dim(&self) -> usize {
        self.base.dim + 1
    }

    pub fn label(&self) -> String {
        format!("M[{}, μ={}]", self.base.label(), self.mu)
    }

    fn check(&self, p: &HartogsPoint) -> Result<()> {
        self.base.check_point(&p.z)?;
        if !p.is_finite() {
            return Err(Error::NonFinite("w coordinate".into()));
        }
        Ok(())
    }

    /// `N(z, z̄)^μ − |w|²`; requires `z ∈ Ω`.
    pub fn gap(&self, p: &HartogsPoint) -> Result<f64> {
        self.check(p)?;
        let ln_n = ln_generic_norm(&self.base, &p.z, Sign::Plus)?;
        Ok((self.mu * ln_n).exp() - p.w.norm_sqr())
    }

    pub fn ch_member(&self, p: &HartogsPoint) -> Result<bool> {
        self.check(p)?;
        if !crate::jtsys::membership(&self.base, &p.z)? {
            return Ok(false);
        }
        Ok(self.gap(p)? > 0.0)
    }

    /// Alias of [`HartogsSpec::ch_member`].
    pub fn contains(&self, p: &HartogsPoint) -> Result<bool> {
        self.ch_member(p)
    }

    fn require_member(&self, p: &HartogsPoint) -> Result<f64> {
        let gap = if crate::jtsys::membership(&self.base, &p.z)? {
            self.gap(p)?
        } else {
            f64::NAN
        };
        if gap > 0.0 {
            Ok(gap)
        } else {
            Err(Error::DomainViolation(format!("point is not in {}", self.label())))
        }
    }

    /// Kähler potential `−ln(N(z, z̄)^μ − |w|²)` of `ω_{Ω,μ}`.
    pub fn potential(&self, p: &HartogsPoint) -> Result<f64> {
        Ok(-self.require_member(p)?.ln())
    }

    /// Dual potential `ln(N(z, −z̄)^μ + |w|²)`, defined on all of `ℂⁿ⁺¹`.
    pub fn dual_potential(&self, p: &HartogsPoint) -> Result<f64> {
        self.check(p)?;
        let ln_n = ln_generic_norm(&self.base, &p.z, Sign::Minus)?;
        Ok(log_add_exp(self.mu * ln_n, ln_sqr(p.w)))
    }

    /// Global Darboux map `Ψ_{Ω,μ}: M_{Ω,μ} → ℂⁿ⁺¹`, evaluated from the
    /// generic norm and the operator `B(z, z̄)^{-1/4}`.
    pub fn psi_map(&self, p: &HartogsPoint) -> Result<HartogsPoint> {
        let gap = self.require_member(p)?;
        let n_mu = generic_norm(&self.base, &p.z, &p.z, Sign::Plus)?.re.powf(self.mu);
        let bz = b_quarter_power_operator(&self.base, &p.z, Sign::Plus)?;
        let scale = (self.mu * n_mu / gap).sqrt();
        Ok(HartogsPoint {
            z: bz.scale(C64::new(scale, 0.0)),
            w: p.w / gap.sqrt(),
        })
    }

    /// `Ψ_{Ω,μ}` in spectral form.
    pub fn psi_map_spectral(&self, p: &HartogsPoint) -> Result<HartogsPoint> {
        self.check(p)?;
        let spec = spectral_decompose(&self.base, &p.z)?;
        if spec.max_eigenvalue() >= 1.0 {
            return Err(Error::DomainViolation(format!("point is not in {}", self.label())));
        }
        let ln_n: f64 = spec.eigenvalues.iter().map(|l| (-l * l).ln_1p()).sum();
        let n_mu = (self.mu * ln_n).exp();
        let gap = n_mu - p.w.norm_sqr();
        if gap <= 0.0 {
            return Err(Error::DomainViolation(format!("point is not in {}", self.label())));
        }
        let scale = (self.mu * n_mu / gap).sqrt();
        Ok(HartogsPoint {
            z: spec.apply(self.base.dim, |l| scale * l / (1.0 - l * l).sqrt()),
            w: p.w / gap.sqrt(),
        })
    }

    /// `(μ N*^μ / (N*^μ + |w|²))^{1/2}` and `(N*^μ + |w|²)^{-1/2}`, computed
    /// in the log domain.
    fn dual_scales(&self, ln_n_star: f64, w: C64) -> (f64, f64) {
        let ln_p = self.mu * ln_n_star;
        let ln_total = log_add_exp(ln_p, ln_sqr(w));
        ((self.mu * (ln_p - ln_total).exp()).sqrt(), (-0.5 * ln_total).exp())
    }

    /// Global Darboux map `Φ_{Ω,μ}: ℂⁿ⁺¹ → ℂⁿ⁺¹` of the dual, operator form.
    pub fn phi_map(&self, p: &HartogsPoint) -> Result<HartogsPoint> {
        self.check(p)?;
        let n_star = generic_norm(&self.base, &p.z, &p.z, Sign::Minus)?.re;
        let bz = b_quarter_power_operator(&self.base, &p.z, Sign::Minus)?;
        let (zs, ws) = self.dual_scales(n_star.ln(), p.w);
        Ok(HartogsPoint {
            z: bz.scale(C64::new(zs, 0.0)),
            w: p.w * ws,
        })
    }

    /// `Φ_{Ω,μ}` in spectral form.
    pub fn phi_map_spectral(&self, p: &HartogsPoint) -> Result<HartogsPoint> {
        self.check(p)?;
        let spec = spectral_decompose(&self.base, &p.z)?;
        let ln_n: f64 = spec.eigenvalues.iter().map(|l| (l * l).ln_1p()).sum();
        let (zs, ws) = self.dual_scales(ln_n, p.w);
        Ok(HartogsPoint {
            z: spec.apply(self.base.dim, |l| zs * l / (1.0 + l * l).sqrt()),
            w: p.w * ws,
        })
    }

    /// Spectral coordinates `(ξ₁ ≥ … ≥ ξ_k)` and `|ξ₀ w|` of `Φ(p)`, read off
    /// the image point.
    pub fn phi_spectral_coordinates(&self, p: &HartogsPoint) -> Result<(Vec<f64>, f64)> {
        let image = self.phi_map_spectral(p)?;
        let spec = spectral_decompose(&self.base, &image.z)?;
        Ok((spec.eigenvalues, image.w.norm()))
    }

    /// Inverse of `Ψ` by damped Newton iteration.
    pub fn psi_inverse(&self, target: &HartogsPoint) -> Result<HartogsPoint> {
        self.check(target)?;
        let map = |x: &[f64]| self.psi_map(&HartogsPoint::from_real(x)).map(|q| q.to_real());
        let admissible = |x: &[f64]| {
            let q = HartogsPoint::from_real(x);
            self.require_member(&q).is_ok()
        };
        // Ξ⁻¹ of the rescaled target, pulled toward the origin until it lies in M.
        let t = target.to_real();
        let mut guess = self.rescale_target(&t);
        let denom = (1.0 + guess.iter().map(|v| v * v).sum::<f64>()).sqrt();
        guess.iter_mut().for_each(|v| *v /= denom);
        while !admissible(&guess) {
            guess.iter_mut().for_each(|v| *v *= 0.5);
        }
        newton_with_continuation(&map, &admissible, &t, guess).map(|x| HartogsPoint::from_real(&x))
    }

    /// Inverse of `Φ` on its image. Targets violating the coordinate bounds
    /// `ξ_j² < μ`, `|ξ₀ w| < 1` are rejected before iterating.
    pub fn phi_inverse(&self, target: &HartogsPoint) -> Result<HartogsPoint> {
        self.check(target)?;
        let spec = spectral_decompose(&self.base, &target.z)?;
        let top = spec.max_eigenvalue();
        if top * top >= self.mu || target.w.norm() >= 1.0 {
            return Err(Error::DomainViolation(format!(
                "target outside the image bounds of Φ for {}",
                self.label()
            )));
        }
        let map = |x: &[f64]| self.phi_map(&HartogsPoint::from_real(x)).map(|q| q.to_real());
        let admissible = |x: &[f64]| x.iter().all(|v| v.is_finite());
        let t = target.to_real();
        let mut guess = self.rescale_target(&t);
        let r2: f64 = guess.iter().map(|v| v * v).sum();
        if r2 < 0.9 {
            let s = (1.0 - r2).sqrt();
            guess.iter_mut().for_each(|v| *v /= s);
        }
        newton_with_continuation(&map, &admissible, &t, guess).map(|x| HartogsPoint::from_real(&x))
    }

    /// Target with the base block divided by `√μ` (both maps are
    /// `(√μ z, w) + O(|p|³)` near the origin).
    fn rescale_target(&self, t: &[f64]) -> Vec<f64> {
        let k = 2 * self.base.dim;
        let s = self.mu.sqrt();
        t.iter()
            .enumerate()
            .map(|(i, v)| if i < k { v / s } else { *v })
            .collect()
    }
}

const NEWTON_MAX_ITER: usize = 100;

fn residual(map: &dyn Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], target: &[f64]) -> Option<(Vec<f64>, f64)> {
    let y = map(x).ok()?;
    let r: Vec<f64> = y.iter().zip(target).map(|(a, b)| a - b).collect();
    let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    norm.is_finite().then_some((r, norm))
}

fn newton(
    map: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    admissible: &dyn Fn(&[f64]) -> bool,
    target: &[f64],
    mut x: Vec<f64>,
) -> Result<Vec<f64>> {
    let m = x.len();
    let tol = 1e-13 * (1.0 + target.iter().map(|v| v * v).sum::<f64>().sqrt());
    let (mut r, mut norm) = residual(map, &x, target).ok_or(Error::NoConvergence {
        iterations: 0,
        residual: f64::INFINITY,
    })?;
    for iter in 0..NEWTON_MAX_ITER {
        if norm <= tol {
            return Ok(x);
        }
        let h = 1e-7 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt());
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let (yp, ym) = match (map(&xp), map(&xm)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => {
                    return Err(Error::NoConvergence {
                        iterations: iter,
                        residual: norm,
                    })
                }
            };
            for i in 0..m {
                jac[(i, j)] = (yp[i] - ym[i]) / (2.0 * h);
            }
        }
        let step = jac
            .lu()
            .solve(&DVector::from_vec(r.iter().map(|v| -v).collect()))
            .ok_or(Error::NoConvergence {
                iterations: iter,
                residual: norm,
            })?;
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-10 {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + alpha * s).collect();
            if admissible(&cand) {
                if let Some((rc, nc)) = residual(map, &cand, target) {
                    if nc < norm {
                        x = cand;
                        r = rc;
                        norm = nc;
                        accepted = true;
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm <= tol * 1e3 {
        // Stalled at the floating-point floor.
        return Ok(x);
    }
    Err(Error::NoConvergence {
        iterations: NEWTON_MAX_ITER,
        residual: norm,
    })
}

/// Newton from `guess`; on failure, continuation along `s · target` from
/// the origin (both maps fix the origin).
fn newton_with_continuation(
    map: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    admissible: &dyn Fn(&[f64]) -> bool,
    target: &[f64],
    guess: Vec<f64>,
) -> Result<Vec<f64>> {
    match newton(map, admissible, target, guess) {
        Ok(x) => Ok(x),
        Err(first) => {
            let steps = 32;
            let mut x = vec![0.0; target.len()];
            for k in 1..=steps {
                let s = k as f64 / steps as f64;
                let t: Vec<f64> = target.iter().map(|v| v * s).collect();
                x = newton(map, admissible, &t, x).map_err(|_| first.clone())?;
            }
            Ok(x)
        }
    }
}

/// Totally geodesic embeddings `f: Ω′ → Ω` with `f(0) = 0` that the crate
/// supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Embedding {
    /// `Δᵖ → I(p, q)`, `z ↦ diag(z)` padded to `p × q`.
    DiagonalIntoTypeI { p: usize, q: usize },
    /// `Δᵐ → Δⁿ`, inclusion of the first `m` coordinates.
    CoordinateInclusion { m: usize, n: usize },
}

impl Embedding {
    fn validate(&self) -> Result<()> {
        match *self {
            Embedding::DiagonalIntoTypeI { p, q } if p >= 1 && p <= q => Ok(()),
            Embedding::CoordinateInclusion { m, n } if m >= 1 && m <= n => Ok(()),
            other => Err(Error::UnsupportedEmbedding(format!("{other:?}"))),
        }
    }

    pub fn source(&self) -> Result<DomainSpec> {
        self.validate()?;
        match *self {
            Embedding::DiagonalIntoTypeI { p, .. } => DomainSpec::polydisc(p),
            Embedding::CoordinateInclusion { m, .. } => DomainSpec::polydisc(m),
        }
    }

    pub fn target(&self) -> Result<DomainSpec> {
        self.validate()?;
        match *self {
            Embedding::DiagonalIntoTypeI { p, q } => DomainSpec::type_one(p, q),
            Embedding::CoordinateInclusion { n, .. } => DomainSpec::polydisc(n),
        }
    }

    pub fn apply(&self, z: &DomainPoint) -> Result<DomainPoint> {
        let source = self.source()?;
        source.check_point(z)?;
        let target = self.target()?;
        let mut out = DomainPoint::zeros(target.dim);
        match (*self, target.kind) {
            (Embedding::DiagonalIntoTypeI { .. }, DomainKind::TypeI { q, .. }) => {
                for (j, c) in z.0.iter().enumerate() {
                    out.0[j * q + j] = *c;
                }
            }
            _ => out.0[..z.len()].copy_from_slice(&z.0),
        }
        Ok(out)
    }
}

/// Lift `f̃(z, w) = (f(z), w)` of a base embedding.
pub fn lift_embedding(f: &Embedding, p: &HartogsPoint) -> Result<HartogsPoint> {
    Ok(HartogsPoint {
        z: f.apply(&p.z)?,
        w: p.w,
    })
}

/// `τ · (z, w) = (τ(z), w)`.
pub fn hartogs_isotropy_apply(h: &HartogsSpec, tau: &Isotropy, p: &HartogsPoint) -> Result<HartogsPoint> {
    Ok(HartogsPoint {
        z: isotropy_apply(&h.base, tau, &p.z)?,
        w: p.w,
    })
}

/// `Ξ(ζ) = ζ / √(1 − |ζ|²)` on the unit ball of `ℂᵐ`.
pub fn xi_map(zeta: &[C64]) -> Result<Vec<C64>> {
    let t: f64 = zeta.iter().map(|c| c.norm_sqr()).sum();
    if t >= 1.0 {
        return Err(Error::DomainViolation("Ξ is defined on the open unit ball".into()));
    }
    let s = (1.0 - t).sqrt();
    Ok(zeta.iter().map(|c| c / s).collect())
}

/// `Ξ⁻¹(ζ) = ζ / √(1 + |ζ|²)`.
pub fn xi_inverse(zeta: &[C64]) -> Vec<C64> {
    let t: f64 = zeta.iter().map(|c| c.norm_sqr()).sum();
    let s = (1.0 + t).sqrt();
    zeta.iter().map(|c| c / s).collect()
}
