//! Numerical Kähler geometry: complex Hessians of potentials, real 2-forms,
//! Jacobians and pullbacks.
//!
//! Real coordinates on `ℂᵐ` are ordered `(x₁, y₁, …, x_m, y_m)`. A 2-form
//! `ω` is stored as the antisymmetric matrix `W` with `ω(u, v) = uᵀ W v`,
//! so the flat form `ω₀ = (i/2) Σ dz_j ∧ dz̄_j = Σ dx_j ∧ dy_j` is the
//! block-diagonal `J₀ = diag([[0, 1], [−1, 0]], …)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hartogs::{HartogsPoint, HartogsSpec};
use crate::jtsys::{ln_generic_norm, Sign, C64};

/// Finite-difference settings. The base step is scaled by `1 + ‖point‖`.
/// With `richardson` set, the step-`h` and step-`2h` stencils are combined
/// to cancel the `O(h²)` truncation term, and the step is reduced near
/// singularities until the two stencils agree.
///
/// With `anisotropic` set, Hessians use a separate step `step · ℓ_j` in each
/// complex coordinate, where `ℓ_j = G_jj^{-1/2}` comes from a coarse pilot
/// pass. This resolves potentials that are nearly flat in some directions,
/// such as `log(N*^μ + |w|²)` in `w` when `N*^μ` is large.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    pub step: f64,
    pub richardson: bool,
    #[serde(default)]
    pub anisotropic: bool,
}

/// Relative step for [`FdConfig::for_determinants`].
pub const HESSIAN_STEP: f64 = 3e-4;

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: 1e-5,
            richardson: true,
            anisotropic: false,
        }
    }
}

impl FdConfig {
    pub fn central(step: f64) -> Self {
        Self {
            step,
            richardson: false,
            anisotropic: false,
        }
    }

    /// Settings used for determinants and eigenvalues of dual Hessians.
    pub fn for_determinants() -> Self {
        Self::anisotropic(HESSIAN_STEP)
    }

    /// Richardson-extrapolated, per-coordinate scaled steps.
    pub fn anisotropic(step: f64) -> Self {
        Self {
            step,
            richardson: true,
            anisotropic: true,
        }
    }

    fn scaled_step(&self, point: &[f64]) -> Result<f64> {
        if !(self.step > 0.0) {
            return Err(Error::InvalidArgument(format!("fd step must be positive, got {}", self.step)));
        }
        let norm = point.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(self.step * (1.0 + norm))
    }
}

/// Hermitian matrix `G_jk = ∂²φ / ∂z_j ∂z̄_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    entries: DMatrix<C64>,
}

impl HermitianForm {
    /// Symmetrizes `(M + M*) / 2`.
    pub fn new(m: DMatrix<C64>) -> Self {
        let entries = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Self { entries }
    }

    pub fn identity(m: usize) -> Self {
        Self::new(DMatrix::identity(m, m))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let m = d.len();
        Self::new(DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                C64::new(d[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.entries.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant().re
    }

    /// Real antisymmetric matrix of `(i/2) Σ G_jk dz_j ∧ dz̄_k`.
    pub fn to_two_form(&self) -> TwoForm {
        let m = self.dim();
        let mut w = DMatrix::<f64>::zeros(2 * m, 2 * m);
        for j in 0..m {
            for k in 0..m {
                let g = self.entries[(j, k)];
                w[(2 * j, 2 * k)] = -g.im;
                w[(2 * j, 2 * k + 1)] = g.re;
                w[(2 * j + 1, 2 * k)] = -g.re;
                w[(2 * j + 1, 2 * k + 1)] = -g.im;
            }
        }
        TwoForm::new(w)
    }
}

/// A real 2-form at a point, as an antisymmetric `2m × 2m` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    entries: DMatrix<f64>,
}

/// Entrywise comparison of two forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormDiff {
    pub max_abs_diff: f64,
    pub max_entry: f64,
}

impl FormDiff {
    /// `max |A − B| / max(1, max |B|)`: absolute for forms of unit size,
    /// relative for the large forms met near the boundary.
    pub fn scaled(&self) -> f64 {
        self.max_abs_diff / self.max_entry.max(1.0)
    }
}

impl TwoForm {
    /// Antisymmetrizes `(M − Mᵀ) / 2`.
    pub fn new(m: DMatrix<f64>) -> Self {
        let entries = (&m - m.transpose()) * 0.5;
        Self { entries }
    }

    /// `ω₀` on `ℂᵐ`.
    pub fn standard(m: usize) -> Self {
        let mut w = DMatrix::<f64>::zeros(2 * m, 2 * m);
        for j in 0..m {
            w[(2 * j, 2 * j + 1)] = 1.0;
            w[(2 * j + 1, 2 * j)] = -1.0;
        }
        Self { entries: w }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn compare(&self, reference: &TwoForm) -> FormDiff {
        let max_abs_diff = (&self.entries - &reference.entries)
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        FormDiff {
            max_abs_diff,
            max_entry: reference.max_abs().max(self.max_abs()),
        }
    }

    /// Restriction to the leading `2k` real coordinates.
    pub fn restrict_leading(&self, k: usize) -> TwoForm {
        TwoForm {
            entries: self.entries.view((0, 0), (2 * k, 2 * k)).into_owned(),
        }
    }

    pub fn scale(&self, s: f64) -> TwoForm {
        TwoForm {
            entries: &self.entries * s,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }
}

fn eval(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64]) -> Result<f64> {
    match f(x) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(Error::NonFinite(format!("potential sample {v}"))),
        Err(e) => Err(Error::NonFinite(format!("potential sample failed: {e}"))),
    }
}

/// Real Hessian by second-order central differences, with step `t · steps[a]`
/// along coordinate `a`.
fn real_hessian(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], steps: &[f64], t: f64) -> Result<DMatrix<f64>> {
    let d = x.len();
    let f0 = eval(f, x)?;
    let mut hess = DMatrix::<f64>::zeros(d, d);
    let mut y = x.to_vec();
    for a in 0..d {
        let ha = t * steps[a];
        y[a] = x[a] + 2.0 * ha;
        let fp = eval(f, &y)?;
        y[a] = x[a] - 2.0 * ha;
        let fm = eval(f, &y)?;
        y[a] = x[a];
        hess[(a, a)] = (fp - 2.0 * f0 + fm) / (4.0 * ha * ha);
        for b in 0..a {
            let hb = t * steps[b];
            let mut corner = |sa: f64, sb: f64| {
                y[a] = x[a] + sa * ha;
                y[b] = x[b] + sb * hb;
                let v = eval(f, &y);
                y[a] = x[a];
                y[b] = x[b];
                v
            };
            let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)? + corner(-1.0, -1.0)?)
                / (4.0 * ha * hb);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    Ok(hess)
}

/// Length scale `G_jj^{-1/2}` of the potential along complex coordinate `j`,
/// from second differences whose step grows until the potential changes
/// measurably (or shrinks until the samples are finite).
fn length_scale(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], j: usize, base: f64) -> Result<f64> {
    let f0 = eval(f, x)?;
    let mut h = 1e-2 * base;
    let mut y = x.to_vec();
    let mut estimate = None;
    for _ in 0..24 {
        let mut second = |a: usize| -> Result<f64> {
            y[a] = x[a] + h;
            let fp = eval(f, &y);
            y[a] = x[a] - h;
            let fm = eval(f, &y);
            y[a] = x[a];
            Ok(fp? - 2.0 * f0 + fm?)
        };
        match (second(2 * j), second(2 * j + 1)) {
            (Ok(dx), Ok(dy)) => {
                let change = 0.25 * (dx + dy);
                if change > 0.0 {
                    estimate = Some(h / change.sqrt());
                }
                if change.abs() >= 1e-4 {
                    break;
                }
                if h > 1e8 * base {
                    break;
                }
                h *= 10.0;
            }
            (Err(Error::NonFinite(_)), _) | (_, Err(Error::NonFinite(_))) => {
                if estimate.is_some() {
                    break;
                }
                h *= 0.1;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(estimate.unwrap_or(base))
}

const MAX_SHRINK: usize = 10;
/// Largest accepted scaled gap between the step-`h` and step-`2h` stencils.
const TRUNCATION_LIMIT: f64 = 3e-4;

fn scaled_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    (a - b).iter().fold(0.0_f64, |m, v| m.max(v.abs())) / scale
}

/// Evaluates a stencil at step `h`, dividing the step by 4 while the stencil
/// samples outside the function's domain or, with Richardson extrapolation,
/// while the two step sizes disagree by more than `TRUNCATION_LIMIT`.
fn adaptive<F>(cfg: &FdConfig, h: f64, stencil: F) -> Result<DMatrix<f64>>
where
    F: Fn(f64) -> Result<DMatrix<f64>>,
{
    let mut h = h;
    let mut last_error = None;
    let mut fallback = None;
    for _ in 0..=MAX_SHRINK {
        let pair = stencil(h).and_then(|fine| {
            if cfg.richardson {
                stencil(2.0 * h).map(|coarse| (fine, Some(coarse)))
            } else {
                Ok((fine, None))
            }
        });
        match pair {
            Ok((fine, None)) => return Ok(fine),
            Ok((fine, Some(coarse))) => {
                let estimate = (&fine * 4.0 - &coarse) / 3.0;
                if scaled_gap(&fine, &coarse) <= TRUNCATION_LIMIT {
                    return Ok(estimate);
                }
                fallback = Some(estimate);
            }
            Err(Error::NonFinite(msg)) => last_error = Some(Error::NonFinite(msg)),
            Err(e) => return Err(e),
        }
        h *= 0.25;
    }
    match (fallback, last_error) {
        (Some(m), _) => Ok(m),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("loop runs at least once"),
    }
}

/// Complex Hessian `∂²φ/∂z_j∂z̄_k` of a potential given on real coordinates.
pub fn complex_hessian<F>(potential: F, point: &[f64], cfg: &FdConfig) -> Result<HermitianForm>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !point.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument("odd number of real coordinates".into()));
    }
    let h = cfg.scaled_step(point)?;
    let m = point.len() / 2;
    let (steps, t) = if cfg.anisotropic {
        let base = h / cfg.step;
        let mut steps = Vec::with_capacity(2 * m);
        for j in 0..m {
            let l = length_scale(&potential, point, j, base)?;
            steps.extend([l, l]);
        }
        (steps, cfg.step)
    } else {
        (vec![1.0; 2 * m], h)
    };
    let hess = adaptive(cfg, t, |t| real_hessian(&potential, point, &steps, t))?;
    // ∂_j ∂̄_k = ¼ (∂x_j − i∂y_j)(∂x_k + i∂y_k)
    let g = DMatrix::from_fn(m, m, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        C64::new(
            0.25 * (hess[(xj, xk)] + hess[(yj, yk)]),
            0.25 * (hess[(xj, yk)] - hess[(yj, xk)]),
        )
    });
    Ok(HermitianForm::new(g))
}

/// `ω = (i/2) ∂∂̄φ` at a point, as a real 2-form.
pub fn kahler_form_at<F>(potential: F, point: &[f64], cfg: &FdConfig) -> Result<TwoForm>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    Ok(complex_hessian(potential, point, cfg)?.to_two_form())
}

fn central_jacobian(map: &dyn Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
    let d = x.len();
    let mut jac: Option<DMatrix<f64>> = None;
    let mut y = x.to_vec();
    for j in 0..d {
        let sample = |y: &[f64]| map(y).map_err(|e| Error::NonFinite(format!("map sample failed: {e}")));
        y[j] = x[j] + h;
        let fp = sample(&y)?;
        y[j] = x[j] - h;
        let fm = sample(&y)?;
        y[j] = x[j];
        let jac = jac.get_or_insert_with(|| DMatrix::zeros(fp.len(), d));
        for i in 0..fp.len() {
            let v = (fp[i] - fm[i]) / (2.0 * h);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("Jacobian entry ({i}, {j})")));
            }
            jac[(i, j)] = v;
        }
    }
    jac.ok_or_else(|| Error::InvalidArgument("empty point".into()))
}

/// Real Jacobian of a smooth map `ℝᵈ → ℝᵉ` by central differences.
pub fn jacobian<F>(map: F, point: &[f64], cfg: &FdConfig) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let h = cfg.scaled_step(point)?;
    adaptive(cfg, h, |h| central_jacobian(&map, point, h))
}

/// Pullback `Jᵀ Ω J` of a constant 2-form.
pub fn pullback<F>(map: F, point: &[f64], target_form: &TwoForm, cfg: &FdConfig) -> Result<TwoForm>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let jac = jacobian(map, point, cfg)?;
    if jac.nrows() != target_form.dim() {
        return Err(Error::ShapeMismatch {
            expected: target_form.dim(),
            got: jac.nrows(),
        });
    }
    Ok(TwoForm::new(jac.transpose() * target_form.entries() * jac))
}

/// Pullback of a 2-form field, evaluated at the image of `point`.
pub fn pullback_field<F, W>(map: F, point: &[f64], form_at: W, cfg: &FdConfig) -> Result<TwoForm>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    W: Fn(&[f64]) -> Result<TwoForm>,
{
    let image = map(point)?;
    let form = form_at(&image)?;
    pullback(map, point, &form, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub positive: bool,
    pub min_eigenvalue: f64,
}

pub fn is_positive_definite(g: &HermitianForm) -> PositivityReport {
    let min_eigenvalue = g.eigenvalues().first().copied().unwrap_or(f64::NAN);
    PositivityReport {
        positive: min_eigenvalue > 0.0,
        min_eigenvalue,
    }
}

/// `ω_{Ω,μ}` at a member point.
pub fn hartogs_form(h: &HartogsSpec, p: &HartogsPoint, cfg: &FdConfig) -> Result<TwoForm> {
    kahler_form_at(|x| h.potential(&HartogsPoint::from_real(x)), &p.to_real(), cfg)
}

/// Complex Hessian of the dual potential `φ*_{Ω,μ}`.
pub fn dual_hessian(h: &HartogsSpec, p: &HartogsPoint, cfg: &FdConfig) -> Result<HermitianForm> {
    complex_hessian(|x| h.dual_potential(&HartogsPoint::from_real(x)), &p.to_real(), cfg)
}

/// `ω*_{Ω,μ}` at a point of `ℂⁿ⁺¹`.
pub fn dual_form(h: &HartogsSpec, p: &HartogsPoint, cfg: &FdConfig) -> Result<TwoForm> {
    Ok(dual_hessian(h, p, cfg)?.to_two_form())
}

/// `Ψ*ω₀` at a member point.
pub fn psi_pullback(h: &HartogsSpec, p: &HartogsPoint, cfg: &FdConfig) -> Result<TwoForm> {
    pullback(
        |x| h.psi_map(&HartogsPoint::from_real(x)).map(|q| q.to_real()),
        &p.to_real(),
        &TwoForm::standard(h.dim()),
        cfg,
    )
}

/// `Φ*ω₀` at a point of `ℂⁿ⁺¹`.
pub fn phi_pullback(h: &HartogsSpec, p: &HartogsPoint, cfg: &FdConfig) -> Result<TwoForm> {
    pullback(
        |x| h.phi_map(&HartogsPoint::from_real(x)).map(|q| q.to_real()),
        &p.to_real(),
        &TwoForm::standard(h.dim()),
        cfg,
    )
}

/// Residual of `Ψ*ω₀ = ω_{Ω,μ}` at `p`.
pub fn darboux_residual(h: &HartogsSpec, p: &HartogsPoint, cfg: &FdConfig) -> Result<FormDiff> {
    Ok(psi_pullback(h, p, cfg)?.compare(&hartogs_form(h, p, cfg)?))
}

/// Residual of `Φ*ω₀ = ω*_{Ω,μ}` at `p`.
pub fn dual_darboux_residual(h: &HartogsSpec, p: &HartogsPoint, cfg: &FdConfig) -> Result<FormDiff> {
    Ok(phi_pullback(h, p, cfg)?.compare(&dual_form(h, p, cfg)?))
}

/// Closed form `det(ω*_{Ω,μ}) = μⁿ N*^{μ(n+1)−γ} / (N*^μ + |w|²)^{n+2}` with
/// `N* = N(z, −z̄)`, evaluated in the log domain.
pub fn det_dual_hessian(h: &HartogsSpec, p: &HartogsPoint) -> Result<f64> {
    h.base.check_point(&p.z)?;
    let n = h.base.dim as f64;
    let ln_n = ln_generic_norm(&h.base, &p.z, Sign::Minus)?;
    let ln_w = if p.w.norm_sqr() > 0.0 {
        p.w.norm_sqr().ln()
    } else {
        f64::NEG_INFINITY
    };
    let a = h.mu * ln_n;
    let m = a.max(ln_w);
    let ln_total = m + ((a - m).exp() + (ln_w - m).exp()).ln();
    Ok((n * h.mu.ln() + (h.mu * (n + 1.0) - h.base.genus) * ln_n - (n + 2.0) * ln_total).exp())
}

/// Finite-difference determinant of the dual Hessian.
pub fn det_dual_hessian_numeric(h: &HartogsSpec, p: &HartogsPoint, cfg: &FdConfig) -> Result<f64> {
    Ok(dual_hessian(h, p, cfg)?.determinant())
}
