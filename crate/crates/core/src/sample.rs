//! Deterministic sample-point generation on simplices.
//!
//! Sampling is seeded per simplex through a stable hash, so parallel and
//! sequential runs (and repeated runs with the same base seed) generate
//! byte-identical sample sets.

use crate::complex::Simplex;
use crate::metric::BaryPoint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// How many points to draw per simplex.
#[derive(Clone, Copy, Debug)]
pub struct SampleSpec {
    /// Barycentric grid resolution (0 disables the grid part).
    pub grid_resolution: usize,
    /// Number of random interior points per simplex.
    pub random_per_simplex: usize,
    /// Base seed mixed with per-simplex data.
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(grid_resolution: usize, random_per_simplex: usize, seed: u64) -> Self {
        SampleSpec {
            grid_resolution,
            random_per_simplex,
            seed,
        }
    }
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            grid_resolution: 4,
            random_per_simplex: 8,
            seed: 0,
        }
    }
}

/// Stable FNV-style mixing of a base seed, a purpose tag, a simplex, and an
/// extra discriminant into an RNG seed.
pub fn seed_for(base_seed: u64, tag: &str, simplex: &Simplex, extra: u64) -> u64 {
    const PRIME: u64 = 0x100000001b3;
    let mut h = 0xcbf29ce484222325u64 ^ base_seed.wrapping_mul(PRIME);
    for b in tag.bytes() {
        h = (h ^ b as u64).wrapping_mul(PRIME);
    }
    for &v in simplex.vertices() {
        h = (h ^ v as u64).wrapping_mul(PRIME);
    }
    (h ^ extra).wrapping_mul(PRIME)
}

/// Seeded RNG for a (seed, tag, simplex, extra) tuple.
pub fn rng_for(base_seed: u64, tag: &str, simplex: &Simplex, extra: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed_for(base_seed, tag, simplex, extra))
}

/// All barycentric grid points of the given resolution on a d-simplex:
/// weights (k_0/r, …, k_d/r) over nonnegative integer compositions of r.
pub fn grid_coords(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    if resolution == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; dim + 1];
    fn rec(out: &mut Vec<Vec<f64>>, current: &mut Vec<usize>, pos: usize, left: usize, r: usize) {
        if pos == current.len() - 1 {
            current[pos] = left;
            out.push(current.iter().map(|&k| k as f64 / r as f64).collect());
            return;
        }
        for k in 0..=left {
            current[pos] = k;
            rec(out, current, pos + 1, left - k, r);
        }
    }
    rec(&mut out, &mut current, 0, resolution, resolution);
    out
}

/// A random point of the open simplex (all coordinates strictly positive),
/// drawn from the flat Dirichlet distribution.
pub fn random_interior_coords<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    let mut coords: Vec<f64> = (0..=dim)
        .map(|_| {
            let u: f64 = rng.gen::<f64>();
            // Exponential(1) via inverse CDF; clamp away from 0 so the point
            // stays strictly interior.
            -(1.0 - u).ln().max(1e-12)
        })
        .collect();
    let sum: f64 = coords.iter().sum();
    for c in &mut coords {
        *c /= sum;
    }
    coords
}

/// Deterministic sample set on one simplex: grid points plus seeded random
/// interior points. The barycentre is always included.
pub fn sample_points(simplex: &Simplex, spec: &SampleSpec, tag: &str) -> Vec<BaryPoint> {
    let dim = simplex.dim();
    let verts = simplex.vertices().to_vec();
    let mut out = Vec::new();
    let bary = vec![1.0 / (dim as f64 + 1.0); dim + 1];
    out.push(BaryPoint::new(verts.clone(), bary).unwrap());
    for coords in grid_coords(dim, spec.grid_resolution) {
        out.push(BaryPoint::new(verts.clone(), coords).unwrap());
    }
    let mut rng = rng_for(spec.seed, tag, simplex, 0);
    for _ in 0..spec.random_per_simplex {
        let coords = random_interior_coords(&mut rng, dim);
        out.push(BaryPoint::new(verts.clone(), coords).unwrap());
    }
    out
}

/// Evenly spaced values in [0, 1] including both endpoints.
pub fn time_grid(steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![0.0, 1.0];
    }
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_point_count_is_binomial() {
        // Points on a 2-simplex at resolution r: C(r+2, 2).
        assert_eq!(grid_coords(2, 4).len(), 15);
        assert_eq!(grid_coords(1, 10).len(), 11);
        assert_eq!(grid_coords(0, 3).len(), 1);
    }

    #[test]
    fn grid_points_sum_to_one() {
        for p in grid_coords(3, 5) {
            let s: f64 = p.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&c| c >= 0.0));
        }
    }

    #[test]
    fn random_interior_points_are_interior() {
        let s = Simplex::new(vec![0, 1, 2]).unwrap();
        let mut rng = rng_for(7, "test", &s, 0);
        for _ in 0..100 {
            let c = random_interior_coords(&mut rng, 2);
            assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(c.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn seeding_is_stable_and_sensitive() {
        let a = Simplex::new(vec![0, 1]).unwrap();
        let b = Simplex::new(vec![0, 2]).unwrap();
        assert_eq!(seed_for(1, "t", &a, 0), seed_for(1, "t", &a, 0));
        assert_ne!(seed_for(1, "t", &a, 0), seed_for(1, "t", &b, 0));
        assert_ne!(seed_for(1, "t", &a, 0), seed_for(2, "t", &a, 0));
        assert_ne!(seed_for(1, "t", &a, 0), seed_for(1, "u", &a, 0));
        assert_ne!(seed_for(1, "t", &a, 0), seed_for(1, "t", &a, 1));
    }

    #[test]
    fn samples_are_reproducible() {
        let s = Simplex::new(vec![3, 5, 8]).unwrap();
        let spec = SampleSpec::new(3, 5, 42);
        let p1 = sample_points(&s, &spec, "check");
        let p2 = sample_points(&s, &spec, "check");
        assert_eq!(p1.len(), p2.len());
        for (a, b) in p1.iter().zip(&p2) {
            assert_eq!(a.support(), b.support());
            assert_eq!(a.coords(), b.coords());
        }
    }

    #[test]
    fn time_grid_covers_unit_interval() {
        let g = time_grid(8);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[8], 1.0);
    }
}
