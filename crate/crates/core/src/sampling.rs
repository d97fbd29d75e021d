//! Deterministic sample points in the unit ball.
//!
//! Sphere points come from a Halton sequence pushed through Box–Muller, so a
//! given seed always produces the same points; random interior points come
//! from a seeded ChaCha stream.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{CPoint, NormKind};

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniform draws from `[0, 1)`.
pub fn unit_draws(seed: u64, n: usize) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.random::<f64>()).collect()
}

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// `count` points on the sphere `{ |z| = rho }` of the given norm in `C^dim`.
pub fn sphere_points(dim: usize, norm: NormKind, rho: f64, count: usize, seed: u64) -> Vec<CPoint> {
    if dim == 1 {
        let phase = radical_inverse(seed + 1, 2) * TAU;
        return (0..count)
            .map(|j| CPoint::scalar(Complex64::from_polar(rho, phase + TAU * j as f64 / count as f64)))
            .collect();
    }
    assert!(2 * dim <= PRIMES.len(), "sphere_points supports dim <= {}", PRIMES.len() / 2);
    let offset = 1 + seed.wrapping_mul(7919) % 100_003;
    (0..count as u64)
        .map(|j| {
            let coords: Vec<Complex64> = (0..dim)
                .map(|k| {
                    // Box-Muller on a pair of Halton coordinates.
                    let u1 = radical_inverse(offset + j, PRIMES[2 * k]).max(1e-300);
                    let u2 = radical_inverse(offset + j, PRIMES[2 * k + 1]);
                    let r = (-2.0 * u1.ln()).sqrt();
                    Complex64::from_polar(r, TAU * u2)
                })
                .collect();
            let p = CPoint::new(coords).expect("finite");
            let n = p.norm(norm);
            p.scale_re(rho / n)
        })
        .collect()
}

/// Uniform random points in the ball of radius `radius` (Euclidean), or in
/// the polydisk of that radius (sup norm).
pub fn ball_points<R: Rng>(dim: usize, norm: NormKind, radius: f64, count: usize, rng: &mut R) -> Vec<CPoint> {
    (0..count)
        .map(|_| match norm {
            NormKind::Sup => CPoint::new(
                (0..dim)
                    .map(|_| {
                        let r = radius * rng.random::<f64>().sqrt();
                        Complex64::from_polar(r, TAU * rng.random::<f64>())
                    })
                    .collect(),
            )
            .expect("finite"),
            NormKind::Euclidean => {
                let dir = loop {
                    let v: Vec<Complex64> = (0..dim)
                        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                        .collect();
                    let p = CPoint::new(v).expect("finite");
                    let n = p.norm(NormKind::Euclidean);
                    if n > 1e-3 && n <= 0.5 {
                        break p.scale_re(1.0 / n);
                    }
                };
                let r = radius * rng.random::<f64>().powf(1.0 / (2 * dim) as f64);
                dir.scale_re(r)
            }
        })
        .collect()
}

/// Times and sample spheres shared by the residual checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingGrid {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    pub per_sphere: usize,
    pub seed: u64,
}

impl Default for SamplingGrid {
    fn default() -> Self {
        SamplingGrid {
            times: (0..=12).map(|k| 0.25 * k as f64).collect(),
            radii: vec![0.3, 0.6, 0.9],
            per_sphere: 8,
            seed: 7,
        }
    }
}

impl SamplingGrid {
    /// Times `0, tmax/n, ..., tmax`.
    pub fn up_to(tmax: f64, n: usize) -> Self {
        let n = n.max(1);
        SamplingGrid {
            times: (0..=n).map(|k| tmax * k as f64 / n as f64).collect(),
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The origin followed by every sphere's points.
    pub fn points(&self, dim: usize, norm: NormKind) -> Vec<CPoint> {
        let mut out = vec![CPoint::zeros(dim)];
        for (i, &rho) in self.radii.iter().enumerate() {
            out.extend(sphere_points(dim, norm, rho, self.per_sphere, self.seed.wrapping_add(i as u64)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_have_the_right_norm() {
        for (dim, norm) in [(1, NormKind::Euclidean), (3, NormKind::Euclidean), (2, NormKind::Sup)] {
            for p in sphere_points(dim, norm, 0.7, 20, 3) {
                assert!((p.norm(norm) - 0.7).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sphere_points(2, NormKind::Euclidean, 0.5, 10, 9), sphere_points(2, NormKind::Euclidean, 0.5, 10, 9));
        let a = ball_points(2, NormKind::Sup, 0.9, 10, &mut rng(1));
        let b = ball_points(2, NormKind::Sup, 0.9, 10, &mut rng(1));
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.norm(NormKind::Sup) < 0.9));
    }
}
