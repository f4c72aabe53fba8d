//! Keyed random streams.
//!
//! Every random draw comes from a ChaCha8 stream seeded by the full
//! [`RngStreamKey`], so the draws of one debtor on one path do not depend on
//! which thread simulates the path or in which order paths are visited.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    /// The exponential threshold `e(k)`.
    Threshold,
    /// The environment clock driving `T(k)`, including thinning proposals.
    Environment,
}

impl Purpose {
    fn tag(self) -> u32 {
        match self {
            Purpose::Threshold => 1,
            Purpose::Environment => 2,
        }
    }
}

/// Identifies one independent stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStreamKey {
    pub master: u64,
    pub path: u64,
    pub debtor: u32,
    pub purpose: Purpose,
}

const DOMAIN: &[u8; 8] = b"ovrspill";

impl RngStreamKey {
    pub fn new(master: u64, path: u64, debtor: usize, purpose: Purpose) -> Self {
        RngStreamKey {
            master,
            path,
            debtor: debtor as u32,
            purpose,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[0..8].copy_from_slice(&self.master.to_le_bytes());
        seed[8..16].copy_from_slice(&self.path.to_le_bytes());
        seed[16..20].copy_from_slice(&self.debtor.to_le_bytes());
        seed[20..24].copy_from_slice(&self.purpose.tag().to_le_bytes());
        seed[24..32].copy_from_slice(DOMAIN);
        ChaCha8Rng::from_seed(seed)
    }
}

/// Seed of path `path` under master seed `master`; a thin convenience for
/// samplers that need several debtors' streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathSeed {
    pub master: u64,
    pub path: u64,
}

impl PathSeed {
    pub fn new(master: u64, path: u64) -> Self {
        PathSeed { master, path }
    }

    pub fn stream(&self, debtor: usize, purpose: Purpose) -> ChaCha8Rng {
        RngStreamKey::new(self.master, self.path, debtor, purpose).rng()
    }
}

/// A unit exponential draw by inversion.
#[inline]
pub fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p()
}

/// Derives an independent master seed for a named sub-experiment, so that
/// estimators compared against each other never share draws.
pub fn derive_seed(master: u64, salt: u64) -> u64 {
    let mut z = master ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
