//! Deterministic random sampling shared by the verification sweeps.
//!
//! Every sweep is split into fixed-size chunks; chunk `k` of a run with
//! seed `s` draws from ChaCha stream `k` keyed by `s`, so results do not
//! depend on how many worker threads process the chunks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hartogs::{HartogsPoint, HartogsSpec};
use crate::jtsys::{DomainKind, DomainPoint, DomainSpec, Isotropy, C64};

pub const CHUNK_SIZE: usize = 4096;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Chunk lengths covering `total` samples.
pub fn chunks(total: usize) -> impl Iterator<Item = (u64, usize)> {
    let full = total / CHUNK_SIZE;
    let rest = total % CHUNK_SIZE;
    (0..full)
        .map(|k| (k as u64, CHUNK_SIZE))
        .chain((rest > 0).then_some((full as u64, rest)))
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * rng.random::<f64>())
}

/// Haar-distributed unitary matrix (QR of a complex Ginibre matrix with
/// the phases of `R` divided out).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    DMatrix::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

pub fn random_isotropy<R: Rng + ?Sized>(rng: &mut R, d: &DomainSpec) -> Isotropy {
    match d.kind {
        DomainKind::Polydisc { n } => {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            let phases = (0..n).map(|_| unit_phase(rng)).collect();
            Isotropy::Polydisc { perm, phases }
        }
        DomainKind::TypeI { p, q } => Isotropy::TypeI {
            u: random_unitary(rng, p),
            v: random_unitary(rng, q),
        },
    }
}

/// Point of `ℂⁿ` with prescribed spectral values and a random frame.
pub fn point_with_spectrum<R: Rng + ?Sized>(rng: &mut R, d: &DomainSpec, lambdas: &[f64]) -> DomainPoint {
    match d.kind {
        DomainKind::Polydisc { n } => {
            let mut z = DomainPoint::zeros(n);
            for (j, &l) in lambdas.iter().enumerate().take(n) {
                z.0[j] = unit_phase(rng) * l;
            }
            let tau = random_isotropy(rng, d);
            crate::jtsys::isotropy_apply(d, &tau, &z).expect("shapes agree")
        }
        DomainKind::TypeI { p, q } => {
            let u = random_unitary(rng, p);
            let v = random_unitary(rng, q);
            let mut diag = DMatrix::<C64>::zeros(p, q);
            for (j, &l) in lambdas.iter().enumerate().take(p) {
                diag[(j, j)] = C64::new(l, 0.0);
            }
            DomainPoint::from_matrix(&(u * diag * v.adjoint()))
        }
    }
}

/// Point with the given spectral values in diagonal position.
pub fn point_with_spectrum_fixed(d: &DomainSpec, lambdas: &[f64]) -> DomainPoint {
    match d.kind {
        DomainKind::Polydisc { n } => {
            let mut z = DomainPoint::zeros(n);
            for (j, &l) in lambdas.iter().enumerate().take(n) {
                z.0[j] = C64::new(l, 0.0);
            }
            z
        }
        DomainKind::TypeI { p, q } => {
            let mut diag = DMatrix::<C64>::zeros(p, q);
            for (j, &l) in lambdas.iter().enumerate().take(p) {
                diag[(j, j)] = C64::new(l, 0.0);
            }
            DomainPoint::from_matrix(&diag)
        }
    }
}

/// Uniform point in the ball of radius `radius` of `ℂᵐ`.
pub fn uniform_ball<R: Rng + ?Sized>(rng: &mut R, m: usize, radius: f64) -> Vec<C64> {
    let v: Vec<C64> = (0..m).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let rho = radius * rng.random::<f64>().powf(1.0 / (2 * m) as f64);
    v.into_iter().map(|c| c * (rho / norm)).collect()
}

/// Random member of `M_{Ω,μ}` with `N^μ − |w|² ≥ margin`: spectral values
/// uniform in `[0, 1)` over a Haar frame, `w` uniform in the admissible disc.
pub fn member_point<R: Rng + ?Sized>(rng: &mut R, h: &HartogsSpec, margin: f64) -> HartogsPoint {
    let d = &h.base;
    loop {
        let lambdas: Vec<f64> = (0..d.rank).map(|_| rng.random::<f64>()).collect();
        let z = point_with_spectrum(rng, d, &lambdas);
        let ln_n: f64 = lambdas.iter().map(|l| (-l * l).ln_1p()).sum();
        let cap = (h.mu * ln_n).exp();
        let w = unit_phase(rng) * (cap * rng.random::<f64>()).sqrt();
        if cap - w.norm_sqr() >= margin {
            return HartogsPoint { z, w };
        }
    }
}

/// Heavy-tailed radial sample: `ρ = t / (1 − t)` with `t` uniform on
/// `[0, t_max)`, uniform phase.
pub fn heavy_tailed_coordinate<R: Rng + ?Sized>(rng: &mut R, t_max: f64) -> C64 {
    let t = t_max * rng.random::<f64>();
    unit_phase(rng) * (t / (1.0 - t))
}

/// Point of `ℂⁿ⁺¹` with heavy-tailed coordinates, rejected until its norm
/// is at most `max_norm`.
pub fn heavy_tailed_point<R: Rng + ?Sized>(rng: &mut R, d: &DomainSpec, max_norm: f64) -> HartogsPoint {
    loop {
        let z = DomainPoint((0..d.dim).map(|_| heavy_tailed_coordinate(rng, 1.0)).collect());
        let w = heavy_tailed_coordinate(rng, 1.0);
        let p = HartogsPoint { z, w };
        if p.norm() <= max_norm {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunking_covers_total() {
        let sizes: Vec<_> = chunks(2 * CHUNK_SIZE + 5).collect();
        assert_eq!(sizes, vec![(0, CHUNK_SIZE), (1, CHUNK_SIZE), (2, 5)]);
        assert_eq!(chunks(0).count(), 0);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = chunk_rng(7, 3).random();
        let b: f64 = chunk_rng(7, 3).random();
        let c: f64 = chunk_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = chunk_rng(1, 0);
        for n in 1..5 {
            let u = random_unitary(&mut rng, n);
            let defect = (u.adjoint() * &u - DMatrix::<C64>::identity(n, n))
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            assert!(defect < 1e-13, "n={n} defect={defect}");
        }
    }

    #[test]
    fn member_points_respect_margin() {
        let h = HartogsSpec::new(DomainSpec::type_one(2, 3).unwrap(), 2.0).unwrap();
        let mut rng = chunk_rng(11, 0);
        for _ in 0..200 {
            let p = member_point(&mut rng, &h, 1e-3);
            assert!(h.contains(&p).unwrap());
            assert!(h.gap(&p).unwrap() >= 1e-3 * (1.0 - 1e-9));
        }
    }
}
