//! Seeded random objects.
//!
//! Every Monte-Carlo sample draws from its own ChaCha stream whose key is a
//! hash of `(master seed, sample index)`, so results never depend on the
//! order in which samples are evaluated or on the number of worker threads.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::tensor::{MultipartiteOperator, PureState, SystemLabel, C64};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for sample `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let base = splitmix(seed) ^ splitmix(index.wrapping_mul(GOLDEN) ^ 0xD1B5_4A32_D192_ED03);
    for (j, chunk) in key.chunks_mut(8).enumerate() {
        let word = splitmix(base.wrapping_add((j as u64).wrapping_mul(GOLDEN)));
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, u64::MAX)
}

/// Entries `(x + iy)/sqrt 2` with `x, y` standard normal.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// First `cols` columns of a Haar unitary of side `rows`.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    haar_unitary(rows, rng).columns(0, cols).into_owned()
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = ginibre(dim, dim, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// `G G^dag / Tr` with `G` a `dim x rank` Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DMatrix<C64> {
    let g = ginibre(dim, rank.max(1), rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    m.unscale(t)
}

pub fn random_density<R: Rng + ?Sized>(
    systems: Vec<SystemLabel>,
    rank: usize,
    rng: &mut R,
) -> Result<MultipartiteOperator> {
    let d = systems.iter().map(SystemLabel::dim).product();
    MultipartiteOperator::new(systems, random_density_matrix(d, rank, rng))
}

pub fn random_pure<R: Rng + ?Sized>(systems: Vec<SystemLabel>, rng: &mut R) -> Result<PureState> {
    let d: usize = systems.iter().map(SystemLabel::dim).product();
    let g = ginibre(d, 1, rng);
    PureState::normalized(systems, DVector::from_column_slice(g.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream_rng(7, 3).random();
        let b: u64 = stream_rng(7, 3).random();
        let c: u64 = stream_rng(7, 4).random();
        let d: u64 = stream_rng(8, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = seeded_rng(1);
        for d in 1..6 {
            let u = haar_unitary(d, &mut rng);
            let e = (u.adjoint() * &u - DMatrix::<C64>::identity(d, d)).norm();
            assert!(e < 1e-12, "dim {d}: {e}");
        }
    }
}
