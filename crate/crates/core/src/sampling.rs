//! Seeded sampling on a symmetric rational grid.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matcore::RationalMatrix;

pub const DEFAULT_GRID_DENOM: u64 = 10_000;

/// Uniform distribution on `{ j/D : j in [-D, D], j != 0 }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalGrid {
    denom: u64,
}

impl Default for RationalGrid {
    fn default() -> Self {
        Self {
            denom: DEFAULT_GRID_DENOM,
        }
    }
}

impl RationalGrid {
    /// Panics if `denom` is zero.
    pub fn new(denom: u64) -> Self {
        assert!(denom > 0, "grid denominator must be positive");
        Self { denom }
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let d = self.denom as i64;
        let k = rng.random_range(0..2 * d);
        let j = if k < d { k - d } else { k - d + 1 };
        BigRational::new(BigInt::from(j), BigInt::from(d))
    }

    pub fn sample_matrix<R: Rng + ?Sized>(&self, rows: usize, cols: usize, rng: &mut R) -> RationalMatrix {
        RationalMatrix::from_fn(rows, cols, |_, _| self.sample(rng))
    }
}

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-trial seed stream: a SplitMix64 hash of `(master, index)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
