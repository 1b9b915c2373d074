//! Seeded random generators for test corpora and multi-start heuristics.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{ComplexMatrix, ComplexVector, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the closed unit disk, by rejection from the square.
pub fn unit_disk(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let re = rng.gen_range(-1.0..=1.0);
        let im = rng.gen_range(-1.0..=1.0);
        if re * re + im * im <= 1.0 {
            return C64::new(re, im);
        }
    }
}

pub fn angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-PI..PI)
}

pub fn unimodular(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, angle(rng))
}

/// Vector with independent entries uniform in the closed unit disk.
pub fn disk_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_| unit_disk(rng))
}

/// Matrix with independent entries uniform in the closed unit disk.
pub fn disk_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| unit_disk(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_samples_stay_in_the_disk_and_reproduce() {
        let mut r1 = rng(7);
        let mut r2 = rng(7);
        for _ in 0..1000 {
            let a = unit_disk(&mut r1);
            let b = unit_disk(&mut r2);
            assert_eq!(a, b);
            assert!(a.norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn unimodular_has_unit_modulus() {
        let mut r = rng(3);
        for _ in 0..100 {
            assert!((unimodular(&mut r).norm() - 1.0).abs() < 1e-14);
        }
    }
}
