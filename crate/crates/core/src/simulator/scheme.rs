//! Encoding and backward decoding of one transmission frame.

use serde::{Deserialize, Serialize};

use super::codebook::{CodebookSet, UserCounts};
use super::laws::SchemeLaws;
use super::SchemeConfig;
use crate::capacity::PmfParameterization;
use crate::channels::{ChannelKind, ChannelModel, ChannelSpec};
use crate::rng::{hash_labels, Key, Purpose};
use crate::typicality::TypicalityChecker;
use crate::{Error, Result};

/// Everything fixed across trials: the channel, the drawing laws, the
/// codeword counts and the decoder's reference pmf.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub spec: ChannelSpec,
    pub laws: SchemeLaws,
    pub config: SchemeConfig,
    pub counts: Vec<UserCounts>,
    checker: TypicalityChecker,
}

/// Codeword count for a rate: ceil(2^{nR}), at least one.
pub fn codeword_count(n: usize, rate: f64) -> Result<usize> {
    let v = (n as f64 * rate).exp2();
    if !v.is_finite() || v > 1e15 {
        return Err(Error::Budget(format!("2^(n*R) = {v:e} codewords for R = {rate}")));
    }
    Ok(((v - 1e-9).ceil() as usize).max(1))
}

/// Per-block inputs known to the encoders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderInput {
    /// Bin labels of the previous block, one per encoder.
    pub l_prev: Vec<usize>,
    /// (m', m'') per encoder.
    pub messages: Vec<(usize, usize)>,
    /// State sequence per encoder.
    pub states: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedBlock {
    pub coop: Vec<usize>,
    /// Cribbed codewords as assembled by their own encoder.
    pub crib_words: Vec<Vec<usize>>,
    /// Channel inputs per encoder.
    pub x: Vec<Vec<usize>>,
    /// Relay input for relay kinds.
    pub xr: Option<Vec<usize>>,
    /// Cribbed sequences produced by the deterministic links.
    pub z: Vec<Vec<usize>>,
    pub l_next: Vec<usize>,
    /// The labels as computed by each party; all rows agree.
    pub l_next_by_party: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step2Outcome {
    Unique,
    None,
    Multiple,
}

/// A step-2 hypothesis: previous labels and direct messages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub l_prev: Vec<usize>,
    pub direct: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedBlock {
    pub outcome: Step2Outcome,
    /// The chosen hypothesis; on failure the lowest-scoring one, which the
    /// decoder keeps using for earlier blocks.
    pub choice: Candidate,
    pub crib: Vec<usize>,
    pub typical: Vec<Candidate>,
}

/// Channel output and decoder side information for one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockObservation {
    pub y: Vec<usize>,
    pub states: Vec<Vec<usize>>,
}

impl Scheme {
    pub fn new(spec: &ChannelSpec, param: &PmfParameterization, config: &SchemeConfig) -> Result<Self> {
        config.validate()?;
        let laws = SchemeLaws::new(spec, param)?;
        if config.rates.len() != laws.users() {
            return Err(Error::LengthMismatch(format!(
                "{} rate splits for {} encoders",
                config.rates.len(),
                laws.users()
            )));
        }
        let mut counts = Vec::new();
        for r in &config.rates {
            counts.push(UserCounts {
                crib: codeword_count(config.n, r.crib)?,
                direct: codeword_count(config.n, r.direct)?,
                bins: codeword_count(config.n, r.bin)?,
            });
        }
        let scheme_work = work(config.n, &counts);
        if scheme_work > config.budget as f64 {
            return Err(Error::Budget(format!(
                "scheme needs {scheme_work:e} codeword symbols per block, cap is {}",
                config.budget
            )));
        }
        let checker = TypicalityChecker::new(&laws.reference, config.epsilon, config.slack);
        Ok(Scheme { spec: spec.clone(), laws, config: config.clone(), counts, checker })
    }

    pub fn users(&self) -> usize {
        self.counts.len()
    }

    /// Codebooks of `block` in `trial`; a pure function of the master seed.
    pub fn codebooks(&self, trial: u64, block: usize) -> CodebookSet<'_> {
        let key = Key(hash_labels(&[self.config.master_seed, Purpose::Codebook as u64, trial, block as u64]));
        CodebookSet { laws: &self.laws, counts: &self.counts, key, block, n: self.config.n }
    }

    fn check_input(&self, input: &EncoderInput) -> Result<()> {
        let u = self.users();
        if input.l_prev.len() != u || input.messages.len() != u || input.states.len() != u {
            return Err(Error::LengthMismatch("encoder input needs one entry per encoder".into()));
        }
        for j in 0..u {
            let c = self.counts[j];
            let (m1, m2) = input.messages[j];
            if input.l_prev[j] >= c.bins || m1 >= c.crib || m2 >= c.direct {
                return Err(Error::OutOfRange(format!("encoder {j} index out of range")));
            }
            let st = &input.states[j];
            if st.len() != self.config.n {
                return Err(Error::LengthMismatch(format!("state sequence of length {}", st.len())));
            }
            if st.iter().any(|&s| s >= self.laws.encoders[j].state_size) {
                return Err(Error::SymbolOutOfRange(format!("state symbol for encoder {j}")));
            }
        }
        Ok(())
    }

    /// Transmits one block. Symbol `i` uses only state (and, for causal
    /// cribbing, cribbed) symbols up to `i`.
    pub fn encode_block(&self, cb: &CodebookSet<'_>, input: &EncoderInput) -> Result<EncodedBlock> {
        self.check_input(input)?;
        let n = self.config.n;
        let l = cb.coop_index(&input.l_prev);
        let coop = cb.coop_word(l);
        let users = self.users();
        let mut crib_words = vec![vec![0; n]; users];
        let mut x = vec![vec![0; n]; users];
        let mut z = vec![vec![0; n]; users];
        let mut xr = Vec::new();
        for i in 0..n {
            for j in 0..users {
                let ctx = if j == 1 && self.laws.causal() { z[0][i] } else { 0 };
                let s = input.states[j][i];
                let (m1, m2) = input.messages[j];
                let zc = cb.crib_symbol(j, l, coop[i], s, ctx, m1, i);
                crib_words[j][i] = zc;
                let xs = cb.trans_symbol(j, l, coop[i], m1, s, ctx, zc, m2, i);
                x[j][i] = xs;
                z[j][i] = match &self.spec.model {
                    ChannelModel::Relay(r) => {
                        let (zr, xri) = if self.spec.kind == ChannelKind::StateRelayNoDelay {
                            let zr = r.z_of(s, xs, 0);
                            (zr, self.laws.relay_input(coop[i], zr, r.z.size))
                        } else {
                            (r.z_of(s, xs, coop[i]), coop[i])
                        };
                        xr.push(xri);
                        zr
                    }
                    ChannelModel::Mac(m) if j == 0 => m.link1.eval(&[s, xs]),
                    ChannelModel::Mac(m) => m.link2.eval(&[s, xs]),
                };
            }
        }
        // Each party bins its own codeword and the sequences it observes.
        let bin = |j: usize, seq: &[usize]| cb.binner(j).bin(seq);
        let by_party: Vec<Vec<usize>> = if users == 1 {
            vec![vec![bin(0, &crib_words[0])], vec![bin(0, &z[0])]]
        } else {
            vec![vec![bin(0, &crib_words[0]), bin(1, &z[1])], vec![bin(0, &z[0]), bin(1, &crib_words[1])]]
        };
        assert!(by_party.iter().all(|v| *v == by_party[0]), "parties disagree on bin labels");
        Ok(EncodedBlock {
            coop,
            crib_words,
            x,
            xr: (users == 1).then_some(xr),
            z,
            l_next: by_party[0].clone(),
            l_next_by_party: by_party,
        })
    }

    /// Step 1: for a hypothesized cooperation index, the smallest cribbed
    /// message per encoder whose codeword falls in the known bin (0 when none
    /// does), with the resulting codewords.
    pub fn step_one(
        &self,
        cb: &CodebookSet<'_>,
        l: usize,
        coop: &[usize],
        target: &[usize],
        states: &[Vec<usize>],
    ) -> (Vec<usize>, Vec<Vec<usize>>) {
        let mut chosen = Vec::new();
        let mut words: Vec<Vec<usize>> = Vec::new();
        for j in 0..self.users() {
            let ctx = (j == 1 && self.laws.causal()).then(|| words[0].clone());
            let binner = cb.binner(j);
            let mut pick = None;
            for m in 0..self.counts[j].crib {
                let w = cb.crib_word(j, l, coop, &states[j], ctx.as_deref(), m);
                if binner.bin(&w) == target[j] {
                    pick = Some((m, w));
                    break;
                }
            }
            let (m, w) = pick.unwrap_or_else(|| (0, cb.crib_word(j, l, coop, &states[j], ctx.as_deref(), 0)));
            chosen.push(m);
            words.push(w);
        }
        (chosen, words)
    }

    /// Typicality score of `(c, s.., z.., x.., y)` against the reference.
    pub fn score(&self, coop: &[usize], states: &[Vec<usize>], z: &[Vec<usize>], x: &[Vec<usize>], y: &[usize]) -> f64 {
        let mut seqs: Vec<&[usize]> = vec![coop];
        seqs.extend(states.iter().map(Vec::as_slice));
        seqs.extend(z.iter().map(Vec::as_slice));
        seqs.extend(x.iter().map(Vec::as_slice));
        seqs.push(y);
        self.checker.score(&seqs)
    }

    /// Decodes one block given the bin labels recovered from the next block
    /// (`None` for the last block, whose messages are pinned).
    pub fn decode_block(
        &self,
        cb: &CodebookSet<'_>,
        obs: &BlockObservation,
        target: Option<&[usize]>,
        first: bool,
    ) -> DecodedBlock {
        let users = self.users();
        let l_range = if first { 1 } else { cb.coop_count() };
        let direct_counts: Vec<usize> =
            if target.is_some() { self.counts.iter().map(|c| c.direct).collect() } else { vec![1; users] };
        let mut typical = Vec::new();
        let mut best: Option<(f64, Candidate, Vec<usize>)> = None;
        for l in 0..l_range {
            let coop = cb.coop_word(l);
            let (crib, words) = match target {
                Some(t) => self.step_one(cb, l, &coop, t, &obs.states),
                None => {
                    let mut words: Vec<Vec<usize>> = Vec::new();
                    for j in 0..users {
                        let ctx = (j == 1 && self.laws.causal()).then(|| words[0].clone());
                        words.push(cb.crib_word(j, l, &coop, &obs.states[j], ctx.as_deref(), 0));
                    }
                    (vec![0; users], words)
                }
            };
            let mut direct = vec![0; users];
            loop {
                let x: Vec<Vec<usize>> = (0..users)
                    .map(|j| {
                        let ctx = (j == 1 && self.laws.causal()).then_some(words[0].as_slice());
                        cb.trans_word(j, l, &coop, crib[j], &obs.states[j], ctx, &words[j], direct[j])
                    })
                    .collect();
                let score = self.score(&coop, &obs.states, &words, &x, &obs.y);
                let cand = Candidate { l_prev: cb.split_coop_index(l), direct: direct.clone() };
                if score <= 0.0 {
                    typical.push(cand.clone());
                }
                if best.as_ref().is_none_or(|(b, _, _)| score < *b) {
                    best = Some((score, cand, crib.clone()));
                }
                if !advance(&mut direct, &direct_counts) {
                    break;
                }
            }
        }
        let (_, choice, crib) = best.expect("at least one candidate");
        let outcome = match typical.len() {
            0 => Step2Outcome::None,
            1 => Step2Outcome::Unique,
            _ => Step2Outcome::Multiple,
        };
        // Among several typical hypotheses keep the best-scoring one.
        DecodedBlock { outcome, choice, crib, typical }
    }

    /// Backward decoding from the last block to the first.
    pub fn backward_decode(&self, codebooks: &[CodebookSet<'_>], obs: &[BlockObservation]) -> Vec<DecodedBlock> {
        let blocks = obs.len();
        let mut out = vec![None; blocks];
        let mut target: Option<Vec<usize>> = None;
        for b in (0..blocks).rev() {
            let d = self.decode_block(&codebooks[b], &obs[b], target.as_deref(), b == 0);
            target = Some(d.choice.l_prev.clone());
            out[b] = Some(d);
        }
        out.into_iter().map(|d| d.expect("every block decoded")).collect()
    }
}

/// Odometer over per-encoder message counts.
fn advance(idx: &mut [usize], counts: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < counts[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Codeword symbols the decoder may draw per block:
/// n * L * (sum K' + prod K'').
pub fn work(n: usize, counts: &[UserCounts]) -> f64 {
    let l: f64 = counts.iter().map(|c| c.bins as f64).product();
    let crib: f64 = counts.iter().map(|c| c.crib as f64).sum();
    let direct: f64 = counts.iter().map(|c| c.direct as f64).product();
    n as f64 * l * (crib + direct)
}
