//! Seeded random streams.
//!
//! Sequential draws use ChaCha8 with a stream id derived from labels, so each
//! (purpose, trial, block) triple gets an independent generator. Codebook
//! symbols and bin indices instead come from a keyed counter hash so they can
//! be evaluated lazily in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose labels for substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    States = 1,
    Messages = 2,
    Channel = 3,
    Codebook = 4,
    Solver = 5,
    Sampling = 6,
    Corruption = 7,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a label list into one 64-bit key.
pub fn hash_labels(labels: &[u64]) -> u64 {
    labels.iter().fold(0x2545_f491_4f6c_dd1d, |h, &l| mix64(h ^ mix64(l)))
}

/// Independent generator for `master` and a label path.
pub fn substream(master: u64, purpose: Purpose, labels: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    let mut path = vec![purpose as u64];
    path.extend_from_slice(labels);
    rng.set_stream(hash_labels(&path));
    rng
}

/// Keyed counter-based hash: a pure function from indices to 64 random bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Key(pub u64);

impl Key {
    pub fn derive(self, label: u64) -> Key {
        Key(mix64(self.0 ^ mix64(label.wrapping_add(0x632b_e59b_d9b4_e019))))
    }

    pub fn bits(self) -> u64 {
        mix64(self.0)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn uniform(self) -> f64 {
        (self.bits() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Inverse-CDF draw from a probability row.
pub fn sample_row(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &w) in row.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    // Rounding left u above the accumulated mass: take the last positive cell.
    row.iter().rposition(|&w| w > 0.0).unwrap_or(row.len() - 1)
}
