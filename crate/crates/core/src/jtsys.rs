//! Hermitian positive Jordan triple systems of the supported bounded
//! symmetric domains.
//!
//! Two families are implemented, both in their circled realization:
//!
//! * the polydisc `Δⁿ ⊂ ℂⁿ`, whose triple system is `ℂⁿ` with the
//!   componentwise product `{x, y, z}_j = 2 x_j ȳ_j z_j`;
//! * the classical domain of type I, `p × q` complex matrices with
//!   `{x, y, z} = x y* z + z y* x`.
//!
//! Points are stored as flat coordinate vectors of length `n`; type-I
//! points are the row-major entries of a `p × q` matrix. `ℂHⁿ` is type
//! I with `p = 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Which of the two conjugate evaluations `N(z, ȳ)` / `N(z, −ȳ)` is meant.
///
/// `Plus` is the bounded domain itself, `Minus` its compact dual seen in
/// the affine chart `ℂⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainKind {
    Polydisc { n: usize },
    #[serde(rename = "type-I")]
    TypeI { p: usize, q: usize },
}

/// A bounded symmetric domain together with its numerical invariants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub rank: usize,
    pub a: f64,
    pub b: usize,
    pub dim: usize,
    pub genus: f64,
    /// Volume of the Fürstenberg–Satake boundary, when known. Never
    /// computed here; every ratio used in the crate cancels it.
    pub boundary_volume: Option<f64>,
}

impl DomainSpec {
    pub fn new(kind: DomainKind) -> Result<Self> {
        match kind {
            DomainKind::Polydisc { n } => {
                if n == 0 {
                    return Err(Error::InvalidShape("polydisc needs n >= 1".into()));
                }
                Ok(Self {
                    kind,
                    rank: n,
                    a: 0.0,
                    b: 0,
                    dim: n,
                    genus: 2.0,
                    boundary_volume: None,
                })
            }
            DomainKind::TypeI { p, q } => {
                if p == 0 || p > q {
                    return Err(Error::InvalidShape(format!(
                        "type-I needs 1 <= p <= q, got p={p}, q={q}"
                    )));
                }
                let (r, a, b) = (p, 2.0, q - p);
                Ok(Self {
                    kind,
                    rank: r,
                    a,
                    b,
                    dim: p * q,
                    genus: 2.0 + a * (r as f64 - 1.0) + b as f64,
                    boundary_volume: None,
                })
            }
        }
    }

    pub fn polydisc(n: usize) -> Result<Self> {
        Self::new(DomainKind::Polydisc { n })
    }

    pub fn type_one(p: usize, q: usize) -> Result<Self> {
        Self::new(DomainKind::TypeI { p, q })
    }

    /// Complex hyperbolic space `ℂHⁿ`, realized as type I(1, n).
    pub fn complex_hyperbolic(n: usize) -> Result<Self> {
        Self::type_one(1, n)
    }

    pub fn with_boundary_volume(mut self, volume: f64) -> Self {
        self.boundary_volume = Some(volume);
        self
    }

    /// `n = r (b + 1 + (a/2)(r − 1))`.
    pub fn dimension_from_invariants(&self) -> f64 {
        let r = self.rank as f64;
        r * (self.b as f64 + 1.0 + 0.5 * self.a * (r - 1.0))
    }

    pub fn check_point(&self, z: &DomainPoint) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::ShapeMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        if !z.is_finite() {
            return Err(Error::NonFinite("domain point coordinates".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self.kind {
            DomainKind::Polydisc { n } => format!("polydisc(n={n})"),
            DomainKind::TypeI { p, q } => format!("type-I({p},{q})"),
        }
    }
}

pub fn make_domain(kind: DomainKind) -> Result<DomainSpec> {
    DomainSpec::new(kind)
}

/// A point of the ambient space `ℂⁿ` of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainPoint(pub Vec<C64>);

impl DomainPoint {
    pub fn zeros(n: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); n])
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Interleaved real coordinates `(x₁, y₁, x₂, y₂, …)`.
    pub fn to_interleaved(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_interleaved(x: &[f64]) -> Self {
        Self(x.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    /// Hermitian inner product `Σ x_j ȳ_j`, the generic trace form `m₁(x, ȳ)`.
    pub fn trace_inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(&other.0).map(|(x, y)| x * y.conj()).sum()
    }

    pub fn to_matrix(&self, rows: usize, cols: usize) -> DMatrix<C64> {
        DMatrix::from_row_slice(rows, cols, &self.0)
    }

    pub fn from_matrix(m: &DMatrix<C64>) -> Self {
        let mut out = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.push(m[(i, j)]);
            }
        }
        Self(out)
    }
}

/// Spectral decomposition `z = Σ λ_j c_j` over an orthogonal frame of
/// tripotents. Eigenvalues are sorted descending; zeros are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub tripotents: Vec<DomainPoint>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `Σ f(λ_j) c_j` in a space of dimension `dim`.
    pub fn apply<F: Fn(f64) -> f64>(&self, dim: usize, f: F) -> DomainPoint {
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (&lambda, c) in self.eigenvalues.iter().zip(&self.tripotents) {
            let s = f(lambda);
            for (o, cj) in out.iter_mut().zip(&c.0) {
                *o += cj * s;
            }
        }
        DomainPoint(out)
    }

    pub fn reconstruct(&self, dim: usize) -> DomainPoint {
        self.apply(dim, |l| l)
    }
}

fn check_shapes(d: &DomainSpec, points: &[&DomainPoint]) -> Result<()> {
    points.iter().try_for_each(|p| d.check_point(p))
}

/// Jordan triple product `{x, y, z}`.
pub fn triple_product(
    d: &DomainSpec,
    x: &DomainPoint,
    y: &DomainPoint,
    z: &DomainPoint,
) -> Result<DomainPoint> {
    check_shapes(d, &[x, y, z])?;
    Ok(match d.kind {
        DomainKind::Polydisc { .. } => DomainPoint(
            x.0.iter()
                .zip(&y.0)
                .zip(&z.0)
                .map(|((x, y), z)| 2.0 * x * y.conj() * z)
                .collect(),
        ),
        DomainKind::TypeI { p, q } => {
            let (xm, ym, zm) = (x.to_matrix(p, q), y.to_matrix(p, q), z.to_matrix(p, q));
            let ya = ym.adjoint();
            DomainPoint::from_matrix(&(&xm * &ya * &zm + &zm * &ya * &xm))
        }
    })
}

/// Bergman operator `B(x, y)` applied to `w`.
pub fn bergman_apply(
    d: &DomainSpec,
    x: &DomainPoint,
    y: &DomainPoint,
    w: &DomainPoint,
) -> Result<DomainPoint> {
    check_shapes(d, &[x, y, w])?;
    Ok(match d.kind {
        DomainKind::Polydisc { .. } => DomainPoint(
            x.0.iter()
                .zip(&y.0)
                .zip(&w.0)
                .map(|((x, y), w)| {
                    let f = C64::new(1.0, 0.0) - x * y.conj();
                    f * f * w
                })
                .collect(),
        ),
        DomainKind::TypeI { p, q } => {
            let (xm, ym, wm) = (x.to_matrix(p, q), y.to_matrix(p, q), w.to_matrix(p, q));
            let left = DMatrix::<C64>::identity(p, p) - &xm * ym.adjoint();
            let right = DMatrix::<C64>::identity(q, q) - ym.adjoint() * &xm;
            DomainPoint::from_matrix(&(left * wm * right))
        }
    })
}

/// Generic norm `N(z, ±ȳ)`; for type I this is `det(I − (±1) z y*)`.
pub fn generic_norm(d: &DomainSpec, z: &DomainPoint, y: &DomainPoint, sign: Sign) -> Result<C64> {
    check_shapes(d, &[z, y])?;
    let s = sign.factor();
    Ok(match d.kind {
        DomainKind::Polydisc { .. } => z
            .0
            .iter()
            .zip(&y.0)
            .map(|(z, y)| C64::new(1.0, 0.0) - s * z * y.conj())
            .product(),
        DomainKind::TypeI { p, q } => {
            let (zm, ym) = (z.to_matrix(p, q), y.to_matrix(p, q));
            (DMatrix::<C64>::identity(p, p) - (&zm * ym.adjoint()) * C64::new(s, 0.0)).determinant()
        }
    })
}

/// `ln N(z, ±z̄)`, which is real. For `Sign::Plus` the point must lie in the
/// domain.
pub fn ln_generic_norm(d: &DomainSpec, z: &DomainPoint, sign: Sign) -> Result<f64> {
    d.check_point(z)?;
    let value = match d.kind {
        DomainKind::Polydisc { .. } => z
            .0
            .iter()
            .map(|c| {
                let t = c.norm_sqr();
                match sign {
                    Sign::Plus if t >= 1.0 => f64::NAN,
                    Sign::Plus => (-t).ln_1p(),
                    Sign::Minus => t.ln_1p(),
                }
            })
            .sum(),
        DomainKind::TypeI { p, q } => {
            let zm = z.to_matrix(p, q);
            let g = &zm * zm.adjoint() * C64::new(sign.factor(), 0.0);
            let det = (DMatrix::<C64>::identity(p, p) - g).determinant().re;
            if det > 0.0 {
                det.ln()
            } else {
                f64::NAN
            }
        }
    };
    if value.is_nan() {
        return Err(Error::DomainViolation(format!(
            "N(z, z̄) <= 0 outside {}",
            d.label()
        )));
    }
    Ok(value)
}

pub fn spectral_decompose(d: &DomainSpec, z: &DomainPoint) -> Result<SpectralDecomposition> {
    d.check_point(z)?;
    let mut pairs: Vec<(f64, DomainPoint)> = match d.kind {
        DomainKind::Polydisc { n } => z
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(j, c)| {
                let lambda = c.norm();
                let mut frame = DomainPoint::zeros(n);
                frame.0[j] = c / lambda;
                (lambda, frame)
            })
            .collect(),
        DomainKind::TypeI { p, q } => {
            let svd = z.to_matrix(p, q).svd(true, true);
            let u = svd.u.expect("left singular vectors requested");
            let v_t = svd.v_t.expect("right singular vectors requested");
            (0..svd.singular_values.len())
                .map(|j| {
                    let c = u.column(j) * v_t.row(j);
                    (svd.singular_values[j], DomainPoint::from_matrix(&c))
                })
                .collect()
        }
    };
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let cutoff = pairs.first().map_or(0.0, |(l, _)| 64.0 * f64::EPSILON * l);
    pairs.retain(|(l, _)| *l > cutoff);
    let (eigenvalues, tripotents) = pairs.into_iter().unzip();
    Ok(SpectralDecomposition {
        eigenvalues,
        tripotents,
    })
}

fn require_inside(d: &DomainSpec, spec: &SpectralDecomposition) -> Result<()> {
    let top = spec.max_eigenvalue();
    if top >= 1.0 {
        return Err(Error::DomainViolation(format!(
            "largest spectral value {top} >= 1 in {}",
            d.label()
        )));
    }
    Ok(())
}

/// `B(z, ±z̄)^{-1/4} z` through the spectral decomposition,
/// `Σ λ_j (1 ∓ λ_j²)^{-1/2} c_j`.
pub fn b_quarter_power_on_z(d: &DomainSpec, z: &DomainPoint, sign: Sign) -> Result<DomainPoint> {
    let spec = spectral_decompose(d, z)?;
    if sign == Sign::Plus {
        require_inside(d, &spec)?;
    }
    let s = sign.factor();
    Ok(spec.apply(d.dim, |l| l / (1.0 - s * l * l).sqrt()))
}

/// Fractional power of a Hermitian positive definite matrix through its
/// eigendecomposition.
pub fn hermitian_power(m: &DMatrix<C64>, exponent: f64) -> Result<DMatrix<C64>> {
    let eig = m.clone().symmetric_eigen();
    if let Some(bad) = eig.eigenvalues.iter().find(|&&e| e <= 0.0) {
        return Err(Error::DomainViolation(format!(
            "matrix is not positive definite (eigenvalue {bad})"
        )));
    }
    let q = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(q.nrows(), q.ncols(), |i, j| {
        q[(i, j)] * eig.eigenvalues[j].powf(exponent)
    });
    Ok(scaled * q.adjoint())
}

/// `B(z, ±z̄)^{-1/4} z` computed from the operator itself: for type I,
/// `B(z, ±z̄) w = (I ∓ z z*) w (I ∓ z* z)`, so the quarter power splits into
/// left and right matrix powers. Independent of [`b_quarter_power_on_z`].
pub fn b_quarter_power_operator(d: &DomainSpec, z: &DomainPoint, sign: Sign) -> Result<DomainPoint> {
    d.check_point(z)?;
    let s = sign.factor();
    match d.kind {
        DomainKind::Polydisc { .. } => z
            .0
            .iter()
            .map(|c| {
                let f = 1.0 - s * c.norm_sqr();
                if f <= 0.0 {
                    Err(Error::DomainViolation(format!(
                        "|z_j| >= 1 outside {}",
                        d.label()
                    )))
                } else {
                    // B acts on the j-th slot by f², so B^{-1/4} is f^{-1/2}.
                    Ok(c * f.powf(-0.5))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(DomainPoint),
        DomainKind::TypeI { p, q } => {
            let zm = z.to_matrix(p, q);
            let sc = C64::new(s, 0.0);
            let left = DMatrix::<C64>::identity(p, p) - &zm * zm.adjoint() * sc;
            let right = DMatrix::<C64>::identity(q, q) - zm.adjoint() * &zm * sc;
            let out = hermitian_power(&left, -0.25)? * zm * hermitian_power(&right, -0.25)?;
            Ok(DomainPoint::from_matrix(&out))
        }
    }
}

/// Membership in the circled realization: the spectral norm is below one.
pub fn membership(d: &DomainSpec, z: &DomainPoint) -> Result<bool> {
    Ok(spectral_decompose(d, z)?.max_eigenvalue() < 1.0)
}

/// Flat distance from the origin, `√(Σ λ_j²)`.
pub fn flat_distance(d: &DomainSpec, z: &DomainPoint) -> Result<f64> {
    let spec = spectral_decompose(d, z)?;
    Ok(spec.eigenvalues.iter().map(|l| l * l).sum::<f64>().sqrt())
}

const UNITARY_TOL: f64 = 1e-10;

/// An element of the isotropy group `K` at the origin.
#[derive(Clone, Debug, PartialEq)]
pub enum Isotropy {
    /// `z ↦ w` with `w[perm[j]] = phases[j] · z[j]`.
    Polydisc { perm: Vec<usize>, phases: Vec<C64> },
    /// `z ↦ U z V*`.
    TypeI { u: DMatrix<C64>, v: DMatrix<C64> },
}

fn unitary_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    if m.ncols() != n {
        return f64::INFINITY;
    }
    (m.adjoint() * m - DMatrix::<C64>::identity(n, n))
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

impl Isotropy {
    pub fn identity(d: &DomainSpec) -> Self {
        match d.kind {
            DomainKind::Polydisc { n } => Isotropy::Polydisc {
                perm: (0..n).collect(),
                phases: vec![C64::new(1.0, 0.0); n],
            },
            DomainKind::TypeI { p, q } => Isotropy::TypeI {
                u: DMatrix::identity(p, p),
                v: DMatrix::identity(q, q),
            },
        }
    }

    pub fn polydisc(perm: Vec<usize>, phases: Vec<C64>) -> Result<Self> {
        let n = perm.len();
        if phases.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                got: phases.len(),
            });
        }
        let mut seen = vec![false; n];
        for &j in &perm {
            if j >= n || seen[j] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[j] = true;
        }
        let defect = phases
            .iter()
            .map(|c| (c.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Isotropy::Polydisc { perm, phases })
    }

    pub fn type_one(u: DMatrix<C64>, v: DMatrix<C64>) -> Result<Self> {
        let defect = unitary_defect(&u).max(unitary_defect(&v));
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Isotropy::TypeI { u, v })
    }

    fn check(&self, d: &DomainSpec) -> Result<()> {
        let ok = match (self, d.kind) {
            (Isotropy::Polydisc { perm, .. }, DomainKind::Polydisc { n }) => perm.len() == n,
            (Isotropy::TypeI { u, v }, DomainKind::TypeI { p, q }) => {
                u.nrows() == p && v.nrows() == q
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "isotropy element does not act on {}",
                d.label()
            )))
        }
    }
}

pub fn isotropy_apply(d: &DomainSpec, tau: &Isotropy, z: &DomainPoint) -> Result<DomainPoint> {
    d.check_point(z)?;
    tau.check(d)?;
    Ok(match (tau, d.kind) {
        (Isotropy::Polydisc { perm, phases }, _) => {
            let mut out = DomainPoint::zeros(z.len());
            for (j, (&target, phase)) in perm.iter().zip(phases).enumerate() {
                out.0[target] = phase * z.0[j];
            }
            out
        }
        (Isotropy::TypeI { u, v }, DomainKind::TypeI { p, q }) => {
            DomainPoint::from_matrix(&(u * z.to_matrix(p, q) * v.adjoint()))
        }
        _ => unreachable!("checked above"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn invariants_of_supported_domains() {
        let d = make_domain(DomainKind::Polydisc { n: 2 }).unwrap();
        assert_eq!((d.rank, d.a, d.b, d.dim, d.genus), (2, 0.0, 0, 2, 2.0));

        let d = make_domain(DomainKind::TypeI { p: 1, q: 3 }).unwrap();
        assert_eq!((d.rank, d.a, d.b, d.dim, d.genus), (1, 2.0, 2, 3, 4.0));
        assert_eq!(d.dimension_from_invariants(), 3.0);

        let d = make_domain(DomainKind::TypeI { p: 2, q: 2 }).unwrap();
        assert_eq!((d.rank, d.a, d.b, d.dim, d.genus), (2, 2.0, 0, 4, 4.0));
        assert_eq!(d.dimension_from_invariants(), 4.0);
    }

    #[test]
    fn invalid_shapes_are_rejected() {
        assert!(matches!(DomainSpec::polydisc(0), Err(Error::InvalidShape(_))));
        assert!(matches!(DomainSpec::type_one(3, 2), Err(Error::InvalidShape(_))));
        assert!(matches!(DomainSpec::type_one(0, 2), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn chn_has_genus_n_plus_one() {
        for n in 1..5 {
            let d = DomainSpec::complex_hyperbolic(n).unwrap();
            assert_eq!(d.genus, n as f64 + 1.0);
            assert_eq!(d.b, n - 1);
        }
    }

    #[test]
    fn triple_product_examples() {
        let d = DomainSpec::polydisc(2).unwrap();
        let e1 = DomainPoint(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let out = triple_product(&d, &e1, &e1, &e1).unwrap();
        assert_eq!(out, DomainPoint(vec![c(2.0, 0.0), c(0.0, 0.0)]));

        let y = DomainPoint(vec![c(0.3, 0.1), c(-1.0, 2.0)]);
        let zero = DomainPoint::zeros(2);
        assert_eq!(triple_product(&d, &zero, &y, &e1).unwrap(), zero);

        let d = DomainSpec::type_one(1, 1).unwrap();
        let one = DomainPoint(vec![c(1.0, 0.0)]);
        assert_eq!(triple_product(&d, &one, &one, &one).unwrap(), DomainPoint(vec![c(2.0, 0.0)]));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let d = DomainSpec::polydisc(2).unwrap();
        let bad = DomainPoint::zeros(3);
        let ok = DomainPoint::zeros(2);
        assert_eq!(
            triple_product(&d, &bad, &ok, &ok),
            Err(Error::ShapeMismatch { expected: 2, got: 3 })
        );
        assert!(bergman_apply(&d, &ok, &bad, &ok).is_err());
        assert!(generic_norm(&d, &ok, &bad, Sign::Plus).is_err());
    }

    #[test]
    fn bergman_examples() {
        let d = DomainSpec::type_one(2, 2).unwrap();
        let zero = DomainPoint::zeros(4);
        let w = DomainPoint(vec![c(0.1, 0.2), c(0.3, -0.4), c(0.5, 0.0), c(0.0, 0.7)]);
        assert_eq!(bergman_apply(&d, &zero, &zero, &w).unwrap(), w);

        let x = DomainPoint::from_real(&[0.5, 0.0, 0.0, 0.0]);
        let e11 = DomainPoint::from_real(&[1.0, 0.0, 0.0, 0.0]);
        let out = bergman_apply(&d, &x, &x, &e11).unwrap();
        assert_relative_eq!(out.0[0].re, 9.0 / 16.0, epsilon = 1e-15);
        assert!(out.0[1..].iter().all(|v| v.norm() == 0.0));

        let d = DomainSpec::polydisc(2).unwrap();
        let t = 0.7;
        let x = DomainPoint::from_real(&[t, 0.0]);
        let e1 = DomainPoint::from_real(&[1.0, 0.0]);
        let out = bergman_apply(&d, &x, &x, &e1).unwrap();
        assert_relative_eq!(out.0[0].re, (1.0 - t * t).powi(2), epsilon = 1e-15);
    }

    #[test]
    fn generic_norm_examples() {
        let d = DomainSpec::polydisc(2).unwrap();
        let zero = DomainPoint::zeros(2);
        assert_eq!(generic_norm(&d, &zero, &zero, Sign::Plus).unwrap(), c(1.0, 0.0));
        let z = DomainPoint::from_real(&[0.5, 0.5]);
        let n = generic_norm(&d, &z, &z, Sign::Plus).unwrap();
        assert_relative_eq!(n.re, 9.0 / 16.0, epsilon = 1e-15);
        assert_eq!(n.im, 0.0);
        let n = generic_norm(&d, &z, &z, Sign::Minus).unwrap();
        assert_relative_eq!(n.re, 25.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn spectral_examples() {
        let d = DomainSpec::polydisc(2).unwrap();
        let spec = spectral_decompose(&d, &DomainPoint::zeros(2)).unwrap();
        assert!(spec.is_empty());

        let z = DomainPoint(vec![c(0.0, 0.8), c(0.3, 0.0)]);
        let spec = spectral_decompose(&d, &z).unwrap();
        assert_eq!(spec.eigenvalues, vec![0.8, 0.3]);
        assert_eq!(spec.tripotents[0], DomainPoint(vec![c(0.0, 1.0), c(0.0, 0.0)]));
        assert_eq!(spec.tripotents[1], DomainPoint(vec![c(0.0, 0.0), c(1.0, 0.0)]));
    }

    #[test]
    fn quarter_power_examples() {
        let d = DomainSpec::type_one(1, 1).unwrap();
        let z = DomainPoint::from_real(&[0.6]);
        let out = b_quarter_power_on_z(&d, &z, Sign::Plus).unwrap();
        assert_relative_eq!(out.0[0].re, 0.75, epsilon = 1e-15);

        let d = DomainSpec::polydisc(1).unwrap();
        let z = DomainPoint::from_real(&[1.0]);
        let out = b_quarter_power_on_z(&d, &z, Sign::Minus).unwrap();
        assert_relative_eq!(out.0[0].re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(
            b_quarter_power_on_z(&d, &z, Sign::Plus),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            b_quarter_power_operator(&d, &z, Sign::Plus),
            Err(Error::DomainViolation(_))
        ));

        let zero = DomainPoint::zeros(1);
        assert_eq!(b_quarter_power_on_z(&d, &zero, Sign::Plus).unwrap(), zero);
    }

    #[test]
    fn membership_examples() {
        let d = DomainSpec::polydisc(2).unwrap();
        let zero = DomainPoint::zeros(2);
        assert!(membership(&d, &zero).unwrap());
        assert_eq!(flat_distance(&d, &zero).unwrap(), 0.0);

        let z = DomainPoint::from_real(&[0.9, 0.99]);
        assert!(membership(&d, &z).unwrap());
        assert_relative_eq!(
            flat_distance(&d, &z).unwrap(),
            (0.81f64 + 0.9801).sqrt(),
            epsilon = 1e-15
        );

        let d = DomainSpec::type_one(2, 2).unwrap();
        let z = DomainPoint::from_real(&[1.0, 0.0, 0.0, 0.2]);
        assert!(!membership(&d, &z).unwrap());
    }

    #[test]
    fn isotropy_examples() {
        let d = DomainSpec::polydisc(2).unwrap();
        let z = DomainPoint(vec![c(0.5, 0.0), c(0.0, 0.2)]);
        assert_eq!(isotropy_apply(&d, &Isotropy::identity(&d), &z).unwrap(), z);

        let tau = Isotropy::polydisc(vec![1, 0], vec![c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        let out = isotropy_apply(&d, &tau, &z).unwrap();
        assert_eq!(out, DomainPoint(vec![c(0.0, 0.2), c(0.0, 0.5)]));
    }

    #[test]
    fn non_unitary_isotropy_is_rejected() {
        let u = DMatrix::from_element(2, 2, c(1.0, 0.0));
        let v = DMatrix::identity(2, 2);
        assert!(matches!(Isotropy::type_one(u, v), Err(Error::NotUnitary(_))));
        assert!(matches!(
            Isotropy::polydisc(vec![0], vec![c(2.0, 0.0)]),
            Err(Error::NotUnitary(_))
        ));
        assert!(Isotropy::polydisc(vec![0, 0], vec![c(1.0, 0.0); 2]).is_err());
    }
}
