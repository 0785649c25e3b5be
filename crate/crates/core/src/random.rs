//! Seeded samplers: Ginibre matrices, Haar unitaries, random states.
//!
//! Every sampler takes an explicit generator so callers control the
//! stream; [`rng`] is the one place seeds turn into generators.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{hermitian_part, trace, CMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for the `index`-th independent sub-stream of `seed`.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: QR of a Ginibre sample with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `G G* / Tr(G G*)` for a `d×d` Ginibre `G`.
pub fn ginibre_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    let w = hermitian_part(&(&g * g.adjoint()));
    let t = trace(&w).re;
    w / Complex64::new(t, 0.0)
}

/// Rank-one projector onto a uniformly random unit vector.
pub fn pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let v = ginibre(d, 1, rng);
    let v = &v / Complex64::new(v.norm(), 0.0);
    hermitian_part(&(&v * v.adjoint()))
}

/// Random probability vector (normalized exponential draws).
pub fn probability_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..len)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::identity;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut r = rng(3);
        for d in 1..6 {
            let u = haar_unitary(d, &mut r);
            assert!((u.adjoint() * &u - identity(d)).norm() < 1e-13);
        }
    }

    #[test]
    fn substreams_differ_and_repeat() {
        let a = ginibre(2, 2, &mut substream(5, 0));
        let b = ginibre(2, 2, &mut substream(5, 1));
        let c = ginibre(2, 2, &mut substream(5, 0));
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn probability_vector_sums_to_one() {
        let p = probability_vector(7, &mut rng(1));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(p.iter().all(|&x| x > 0.0));
    }
}
