//! Lazily evaluated codebooks and the keyed binning function.
//!
//! A codebook holds `2^{nR}` words per index tuple; materializing all of them
//! is wasteful when the decoder only touches a few. Each symbol is instead a
//! pure function of a per-block key and its indices, so the encoder and
//! decoder see the same table without storing it.

use serde::{Deserialize, Serialize};

use super::laws::SchemeLaws;
use crate::rng::{sample_row, Key};

const TAG_COOP: u64 = 1;
const TAG_CRIB: u64 = 2;
const TAG_TRANS: u64 = 3;
const TAG_BIN: u64 = 4;

/// Codeword counts for one encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserCounts {
    /// Cribbed messages, 2^{nR'}.
    pub crib: usize,
    /// Direct messages, 2^{nR''}.
    pub direct: usize,
    /// Bins, 2^{nR~}.
    pub bins: usize,
}

/// Keyed pseudorandom map from sequences to `bins` labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binner {
    pub bins: usize,
    pub key: Key,
}

impl Binner {
    pub fn bin(&self, seq: &[usize]) -> usize {
        let mut k = self.key;
        for &v in seq {
            k = k.derive(v as u64);
        }
        // Length is folded in so prefixes of a word hash differently.
        let h = k.derive(seq.len() as u64).bits();
        ((h as u128 * self.bins as u128) >> 64) as usize
    }
}

/// All codebooks of one block of one trial.
#[derive(Debug, Clone, Copy)]
pub struct CodebookSet<'a> {
    pub laws: &'a SchemeLaws,
    pub counts: &'a [UserCounts],
    pub key: Key,
    pub block: usize,
    pub n: usize,
}

impl<'a> CodebookSet<'a> {
    /// Number of cooperation codewords: L for relays, L1*L2 for MACs.
    pub fn coop_count(&self) -> usize {
        self.counts.iter().map(|c| c.bins).product()
    }

    /// Joint cooperation index of per-encoder bin labels.
    pub fn coop_index(&self, labels: &[usize]) -> usize {
        labels.iter().zip(self.counts).fold(0, |acc, (&l, c)| acc * c.bins + l)
    }

    pub fn split_coop_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.counts.len()];
        for (j, c) in self.counts.iter().enumerate().rev() {
            out[j] = idx % c.bins;
            idx /= c.bins;
        }
        out
    }

    pub fn coop_word(&self, l: usize) -> Vec<usize> {
        let k = self.key.derive(TAG_COOP).derive(l as u64);
        (0..self.n).map(|i| sample_row(&self.laws.coop, k.derive(i as u64).uniform())).collect()
    }

    /// Symbol `i` of the cribbed codebook of encoder `j` for state symbol `s`.
    pub fn crib_symbol(&self, j: usize, l: usize, c: usize, s: usize, ctx: usize, m: usize, i: usize) -> usize {
        let k = self.key.derive(TAG_CRIB + 16 * j as u64).derive(l as u64).derive(s as u64).derive(ctx as u64);
        let u = k.derive(m as u64).derive(i as u64).uniform();
        sample_row(self.laws.encoders[j].crib_row(c, s, ctx), u)
    }

    /// Symbol `i` of the transmission codebook of encoder `j`. `z` is the
    /// cribbed symbol the same indices produce.
    #[allow(clippy::too_many_arguments)]
    pub fn trans_symbol(
        &self,
        j: usize,
        l: usize,
        c: usize,
        crib_m: usize,
        s: usize,
        ctx: usize,
        z: usize,
        direct_m: usize,
        i: usize,
    ) -> usize {
        let k = self.key.derive(TAG_TRANS + 16 * j as u64).derive(l as u64).derive(crib_m as u64);
        let u = k.derive(s as u64).derive(ctx as u64).derive(direct_m as u64).derive(i as u64).uniform();
        sample_row(self.laws.encoders[j].trans_row(c, s, ctx, z), u)
    }

    /// Cribbed codeword assembled along a state sequence; `ctx` is the
    /// causal context sequence or `None`.
    pub fn crib_word(
        &self,
        j: usize,
        l: usize,
        coop: &[usize],
        states: &[usize],
        ctx: Option<&[usize]>,
        m: usize,
    ) -> Vec<usize> {
        (0..self.n).map(|i| self.crib_symbol(j, l, coop[i], states[i], ctx.map_or(0, |c| c[i]), m, i)).collect()
    }

    #[allow(clippy::too_many_arguments)]
    pub fn trans_word(
        &self,
        j: usize,
        l: usize,
        coop: &[usize],
        crib_m: usize,
        states: &[usize],
        ctx: Option<&[usize]>,
        z: &[usize],
        direct_m: usize,
    ) -> Vec<usize> {
        (0..self.n)
            .map(|i| self.trans_symbol(j, l, coop[i], crib_m, states[i], ctx.map_or(0, |c| c[i]), z[i], direct_m, i))
            .collect()
    }

    pub fn binner(&self, j: usize) -> Binner {
        Binner { bins: self.counts[j].bins, key: self.key.derive(TAG_BIN + 16 * j as u64) }
    }
}
