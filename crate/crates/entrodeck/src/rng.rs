//! Deterministic randomness.
//!
//! Every random computation in this crate is driven by an [`RngSpec`]: a
//! `(master_seed, stream_index)` pair. The pair is reduced to a single 64-bit
//! seed through the splitmix64 finalizer and fed to a ChaCha8 generator, so
//! two runs with the same spec produce identical streams regardless of how
//! trials are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer (Steele, Lea, Flood 2014). Bijective on u64.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngSpec {
            master_seed,
            stream_index,
        }
    }

    /// Same master seed, different stream. Used to hand each Monte Carlo
    /// trial its own independent stream (stream_index = trial index).
    pub fn stream(self, stream_index: u64) -> Self {
        RngSpec {
            master_seed: self.master_seed,
            stream_index,
        }
    }

    /// The seed actually fed to ChaCha8: master and stream index mixed
    /// through splitmix64 twice so that neighbouring indices land far apart.
    pub fn derived_seed(&self) -> u64 {
        splitmix64(splitmix64(self.master_seed) ^ splitmix64(self.stream_index ^ 0x5851_F42D_4C95_7F2D))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derived_seed())
    }
}

impl Default for RngSpec {
    fn default() -> Self {
        RngSpec::new(0, 0)
    }
}
