use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;

/// A master seed paired with a stream label.
///
/// Every random draw in the crate goes through a `SeedState`, so a sample
/// sequence is a pure function of `(seed, label)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedState {
    pub seed: u64,
    pub label: String,
}

impl SeedState {
    pub fn new(seed: u64, label: impl Into<String>) -> Self {
        Self {
            seed,
            label: label.into(),
        }
    }

    /// Child stream: same master seed, label extended with `/part`.
    pub fn derive(&self, part: impl AsRef<str>) -> SeedState {
        SeedState {
            seed: self.seed,
            label: format!("{}/{}", self.label, part.as_ref()),
        }
    }

    /// Stream for trial `index` of this cell. Independent of execution order.
    pub fn trial(&self, index: usize) -> SeedState {
        self.derive(format!("trial{index}"))
    }

    /// 64-bit key mixing the master seed with the label.
    pub fn mixed(&self) -> u64 {
        splitmix64(self.seed ^ splitmix64(fnv1a(self.label.as_bytes())))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.mixed())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Matrix of i.i.d. standard normal entries, deterministic in `seed`.
pub fn sample_gaussian(rows: usize, cols: usize, seed: &SeedState) -> Matrix {
    let mut rng = seed.rng();
    gaussian_from(rows, cols, &mut rng)
}

pub(crate) fn gaussian_from(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}
