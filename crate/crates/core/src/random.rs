//! Seeded random states and unitaries.
//!
//! Every generator takes the RNG explicitly; [`rng_for`] derives an
//! independent ChaCha stream per (seed, stream) pair so parallel trials stay
//! reproducible regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::linalg::{CMatrix, DensityOperator, HermitianOperator, C64};

pub type TrialRng = ChaCha20Rng;

/// Counter-based generator: same `(seed, stream)` gives the same sequence.
pub fn rng_for(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// GUE-like random Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = ginibre(dim, dim, rng);
    HermitianOperator::new((&g + g.adjoint()).scale(0.5)).expect("symmetrized matrix is Hermitian")
}

/// Uniform point on the probability simplex.
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Induced-measure random state of the given rank.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityOperator {
    let g = ginibre(dim, rank.clamp(1, dim), rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityOperator::new(m.unscale(t)).expect("Wishart matrix is a state")
}

/// `exp(i theta G)` for a random Hermitian generator, a unitary close to the
/// identity when `theta` is small.
pub fn near_identity_unitary<R: Rng + ?Sized>(dim: usize, theta: f64, rng: &mut R) -> CMatrix {
    let g = random_hermitian(dim, rng).eigen();
    let n = dim;
    let mut scaled = g.vectors.clone();
    for (j, &v) in g.values.iter().enumerate() {
        let phase = C64::new(0.0, theta * v).exp();
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    &scaled * g.vectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_unitary;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| rng_for(42, 3).random()).collect();
        let mut r1 = rng_for(42, 3);
        let mut r2 = rng_for(42, 4);
        let x: u64 = r1.random();
        let y: u64 = r2.random();
        assert_eq!(a[0], x);
        assert_ne!(x, y);
    }

    #[test]
    fn haar_and_near_identity_are_unitary() {
        let mut rng = rng_for(1, 0);
        for dim in [1, 2, 9, 20] {
            assert!(is_unitary(&haar_unitary(dim, &mut rng), 1e-10));
            assert!(is_unitary(&near_identity_unitary(dim, 0.3, &mut rng), 1e-10));
        }
    }

    #[test]
    fn random_density_has_requested_rank() {
        let mut rng = rng_for(2, 0);
        let rho = random_density(8, 3, &mut rng);
        assert_eq!(rho.rank(), 3);
        let p = random_simplex(5, &mut rng);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
