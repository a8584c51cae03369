//! Monte Carlo runs of the cooperative-bin-forward scheme.
//!
//! A frame has `blocks` blocks of `n` channel uses. In each block the
//! encoders send a cribbed part (recovered by the decoder from its bin) and a
//! direct part, superposed on a cooperation codeword that carries the bin
//! labels of the previous block. The decoder works backward from the last
//! block.

mod codebook;
mod laws;
mod scheme;

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use codebook::{Binner, CodebookSet, UserCounts};
pub use laws::{EncoderLaw, SchemeLaws};
pub use scheme::{
    codeword_count, work, BlockObservation, Candidate, DecodedBlock, EncodedBlock, EncoderInput, Scheme, Step2Outcome,
};

use crate::capacity::{eval_objective, eval_terms, Objective, PmfParameterization, Terms};
use crate::channels::{sample_step, ChannelModel, ChannelSpec};
use crate::rng::{sample_row, substream, Purpose};
use crate::typicality::{Slack, DEFAULT_EPSILON};
use crate::{Error, Result};

/// Default cap on codeword symbols drawn per block.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// Rates of one encoder, bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSplit {
    /// R', carried by the cribbed codeword and recovered through its bin.
    pub crib: f64,
    /// R'', decoded directly.
    pub direct: f64,
    /// R~, the binning rate.
    pub bin: f64,
}

impl RateSplit {
    pub fn total(&self) -> f64 {
        self.crib + self.direct
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub n: usize,
    pub blocks: usize,
    /// One split per encoder.
    pub rates: Vec<RateSplit>,
    pub epsilon: f64,
    pub slack: Slack,
    pub trials: usize,
    pub master_seed: u64,
    pub budget: u64,
    /// Replace the output of this block (1-based) by uniform noise.
    #[serde(default)]
    pub corrupt_block: Option<usize>,
    #[serde(default)]
    pub keep_transcripts: bool,
}

impl SchemeConfig {
    pub fn new(n: usize, blocks: usize, rates: Vec<RateSplit>) -> Self {
        SchemeConfig {
            n,
            blocks,
            rates,
            epsilon: DEFAULT_EPSILON,
            slack: Slack::Absolute,
            trials: 200,
            master_seed: 0,
            budget: DEFAULT_BUDGET,
            corrupt_block: None,
            keep_transcripts: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.blocks == 0 || self.trials == 0 {
            return Err(Error::OutOfRange("n, blocks and trials must be positive".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::OutOfRange(format!("epsilon {} must be positive", self.epsilon)));
        }
        for r in &self.rates {
            if [r.crib, r.direct, r.bin].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::OutOfRange(format!("invalid rate split {r:?}")));
            }
        }
        if let Some(b) = self.corrupt_block {
            if b == 0 || b > self.blocks {
                return Err(Error::OutOfRange(format!("corrupt block {b} outside 1..={}", self.blocks)));
            }
        }
        Ok(())
    }
}

/// Default split for per-encoder target rates under `param`: the cribbed part
/// takes up to 90% of the crib entropy, the rest goes direct, and the bin rate
/// sits halfway between the cribbed rate and what the cooperation constraint
/// leaves over.
pub fn default_split(spec: &ChannelSpec, param: &PmfParameterization, targets: &[f64]) -> Result<Vec<RateSplit>> {
    let (entropies, total) = match eval_terms(spec, param)? {
        Terms::Relay(t) => (vec![t.crib_entropy], t.total),
        Terms::Mac(t) => (vec![t.h1, t.h2], t.total),
    };
    if targets.len() != entropies.len() {
        return Err(Error::LengthMismatch(format!("{} targets for {} encoders", targets.len(), entropies.len())));
    }
    let mut splits: Vec<RateSplit> = targets
        .iter()
        .zip(&entropies)
        .map(|(&r, &h)| {
            let crib = r.min(0.9 * h).max(0.0);
            RateSplit { crib, direct: (r - crib).max(0.0), bin: crib }
        })
        .collect();
    let used: f64 = splits.iter().map(RateSplit::total).sum();
    let spare = (total - used).max(0.0) / (2.0 * splits.len() as f64);
    for s in &mut splits {
        s.bin += spare;
    }
    Ok(splits)
}

/// Moves `param` toward the uniform distribution as far as the capacity
/// expression allows (within `tol`), by halving the step from a full move.
/// Optimal distributions are rarely unique, and spread-out ones make the
/// cooperation codewords easier to tell apart.
pub fn spread_parameterization(
    spec: &ChannelSpec,
    param: &PmfParameterization,
    tol: f64,
) -> Result<PmfParameterization> {
    let base = eval_objective(spec, param)?;
    let uniform = PmfParameterization::uniform(spec, param.u_size)?;
    let keeps = |o: &Objective| match (o, &base) {
        (Objective::Rate(v), Objective::Rate(b)) => *v >= b - tol,
        (Objective::Region(p), Objective::Region(b)) => {
            p.r1_max >= b.r1_max - tol && p.r2_max >= b.r2_max - tol && p.sum_max() >= b.sum_max() - tol
        }
        _ => false,
    };
    let mut t = 1.0;
    for _ in 0..12 {
        let mut mixed = param.clone();
        for (f, u) in mixed.factors.iter_mut().zip(&uniform.factors) {
            for (v, w) in f.values.iter_mut().zip(&u.values) {
                *v = (1.0 - t) * *v + t * w;
            }
        }
        if keeps(&eval_objective(spec, &mixed)?) {
            return Ok(mixed);
        }
        t /= 2.0;
    }
    Ok(param.clone())
}

/// Step-1 bin collisions at the true cooperation index, against the union
/// bound `K / L` with K the distinct competing codewords.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CollisionStats {
    /// Step-1 searches examined.
    pub instances: usize,
    /// Searches where some competitor shared the true bin.
    pub collided_instances: usize,
    /// Distinct competing codewords, summed over searches.
    pub competitor_pairs: u64,
    pub colliding_pairs: u64,
    /// Competing messages whose codeword equals the true one; no binning
    /// separates these.
    pub duplicate_words: u64,
    /// Sum over searches of K/L.
    pub predicted_sum: f64,
    /// Sum over searches of p(1-p) with p = min(K/L, 1).
    pub predicted_var_sum: f64,
}

impl CollisionStats {
    pub fn frequency(&self) -> f64 {
        if self.instances == 0 {
            0.0
        } else {
            self.collided_instances as f64 / self.instances as f64
        }
    }

    pub fn predicted(&self) -> f64 {
        if self.instances == 0 {
            0.0
        } else {
            self.predicted_sum / self.instances as f64
        }
    }

    pub fn sigma(&self) -> f64 {
        if self.instances == 0 {
            0.0
        } else {
            self.predicted_var_sum.sqrt() / self.instances as f64
        }
    }

    pub fn within_sigmas(&self, k: f64) -> bool {
        (self.frequency() - self.predicted()).abs() <= k * self.sigma() + 1e-12
    }

    fn merge(&mut self, o: &CollisionStats) {
        self.instances += o.instances;
        self.collided_instances += o.collided_instances;
        self.competitor_pairs += o.competitor_pairs;
        self.colliding_pairs += o.colliding_pairs;
        self.duplicate_words += o.duplicate_words;
        self.predicted_sum += o.predicted_sum;
        self.predicted_var_sum += o.predicted_var_sum;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRow {
    pub trial: usize,
    /// 1-based.
    pub block: usize,
    /// Step 1 at the true labels picked a wrong cribbed message.
    pub event_a: bool,
    /// The transmitted tuple is not typical.
    pub event_b: bool,
    /// A wrong hypothesis is typical.
    pub event_c: bool,
    pub decoded_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockTranscript {
    pub input: EncoderInput,
    pub encoded: EncodedBlock,
    pub y: Vec<usize>,
    pub decoded: DecodedBlock,
    pub row: BlockRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub trial: usize,
    pub blocks: Vec<BlockTranscript>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizedRates {
    pub crib: f64,
    pub direct: f64,
    pub bin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: usize,
    pub blocks: usize,
    /// Blocks per frame whose errors are counted: all but the last, or the
    /// single block of a one-block frame.
    pub message_blocks: usize,
    pub block_error_rate: f64,
    /// Rates of events (a), (b), (c) over counted blocks.
    pub event_rates: [f64; 3],
    /// Fraction of counted blocks decoded with a wrong label from the block
    /// after; their failures are charged to that block.
    pub propagated_rate: f64,
    pub counts: Vec<UserCounts>,
    pub realized: Vec<RealizedRates>,
    pub collisions: CollisionStats,
    pub rows: Vec<BlockRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transcripts: Vec<Transcript>,
    #[serde(skip)]
    pub wall_seconds: f64,
}

/// Codebooks of one block; see [`Scheme::codebooks`].
pub fn generate_codebooks<'a>(scheme: &'a Scheme, trial: u64, block: usize) -> CodebookSet<'a> {
    scheme.codebooks(trial, block)
}

fn draw_states(spec: &ChannelSpec, n: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    match &spec.model {
        ChannelModel::Relay(r) => vec![(0..n).map(|_| sample_row(r.state.weights(), rng.gen())).collect()],
        ChannelModel::Mac(m) => {
            let mut s1 = Vec::with_capacity(n);
            let mut s2 = Vec::with_capacity(n);
            for _ in 0..n {
                let k = sample_row(m.state.weights(), rng.gen());
                s1.push(k / m.s2.size);
                s2.push(k % m.s2.size);
            }
            vec![s1, s2]
        }
    }
}

fn channel_outputs(
    scheme: &Scheme,
    enc: &EncodedBlock,
    states: &[Vec<usize>],
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    (0..scheme.config.n)
        .map(|i| {
            let (inputs, st) = match &enc.xr {
                Some(xr) => (vec![enc.x[0][i], xr[i]], vec![states[0][i]]),
                None => (vec![enc.x[0][i], enc.x[1][i]], vec![states[0][i], states[1][i]]),
            };
            Ok(sample_step(&scheme.spec, &inputs, &st, rng)?.y)
        })
        .collect()
}

struct TrialOutcome {
    rows: Vec<BlockRow>,
    propagated: Vec<bool>,
    collisions: CollisionStats,
    transcript: Option<Transcript>,
}

fn collision_audit(
    scheme: &Scheme,
    cb: &CodebookSet<'_>,
    input: &EncoderInput,
    enc: &EncodedBlock,
    stats: &mut CollisionStats,
) {
    let l = cb.coop_index(&input.l_prev);
    for j in 0..scheme.users() {
        let ctx = (j == 1 && scheme.laws.causal()).then_some(enc.crib_words[0].as_slice());
        let binner = cb.binner(j);
        let true_m = input.messages[j].0;
        let true_word = &enc.crib_words[j];
        let true_bin = binner.bin(true_word);
        let mut others = std::collections::BTreeSet::new();
        for m in (0..scheme.counts[j].crib).filter(|&m| m != true_m) {
            let w = cb.crib_word(j, l, &enc.coop, &input.states[j], ctx, m);
            if w == *true_word {
                stats.duplicate_words += 1;
            } else {
                others.insert(w);
            }
        }
        let distinct = others.len() as u64;
        let hit = others.iter().filter(|w| binner.bin(w) == true_bin).count() as u64;
        let p = (distinct as f64 / binner.bins as f64).min(1.0);
        stats.instances += 1;
        stats.collided_instances += usize::from(hit > 0);
        stats.competitor_pairs += distinct;
        stats.colliding_pairs += hit;
        stats.predicted_sum += p;
        stats.predicted_var_sum += p * (1.0 - p);
    }
}

fn run_trial(scheme: &Scheme, trial: usize) -> Result<TrialOutcome> {
    let cfg = &scheme.config;
    let (n, blocks, users) = (cfg.n, cfg.blocks, scheme.users());
    let t = trial as u64;
    let mut msg_rng = substream(cfg.master_seed, Purpose::Messages, &[t]);
    let codebooks: Vec<CodebookSet<'_>> = (0..blocks).map(|b| scheme.codebooks(t, b)).collect();
    let mut l_prev = vec![0; users];
    let mut inputs = Vec::with_capacity(blocks);
    let mut encoded = Vec::with_capacity(blocks);
    let mut obs = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let states = draw_states(&scheme.spec, n, &mut substream(cfg.master_seed, Purpose::States, &[t, b as u64]));
        let messages: Vec<(usize, usize)> =
            scheme
                .counts
                .iter()
                .map(|c| {
                    if b + 1 == blocks {
                        (0, 0)
                    } else {
                        (msg_rng.gen_range(0..c.crib), msg_rng.gen_range(0..c.direct))
                    }
                })
                .collect();
        let input = EncoderInput { l_prev: l_prev.clone(), messages, states };
        let enc = scheme.encode_block(&codebooks[b], &input)?;
        let mut y = channel_outputs(
            scheme,
            &enc,
            &input.states,
            &mut substream(cfg.master_seed, Purpose::Channel, &[t, b as u64]),
        )?;
        if cfg.corrupt_block == Some(b + 1) {
            let size = match &scheme.spec.model {
                ChannelModel::Relay(r) => r.y.size,
                ChannelModel::Mac(m) => m.y.size,
            };
            let mut rng = substream(cfg.master_seed, Purpose::Corruption, &[t, b as u64]);
            y = (0..n).map(|_| rng.gen_range(0..size)).collect();
        }
        l_prev = enc.l_next.clone();
        obs.push(BlockObservation { y, states: input.states.clone() });
        inputs.push(input);
        encoded.push(enc);
    }
    let decoded = scheme.backward_decode(&codebooks, &obs);

    let mut rows = Vec::with_capacity(blocks);
    let mut collisions = CollisionStats::default();
    let mut propagated = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let (input, enc, d) = (&inputs[b], &encoded[b], &decoded[b]);
        let cb = &codebooks[b];
        let last = b + 1 == blocks;
        let true_crib: Vec<usize> = input.messages.iter().map(|m| m.0).collect();
        let true_direct: Vec<usize> = input.messages.iter().map(|m| m.1).collect();
        let truth = Candidate { l_prev: input.l_prev.clone(), direct: true_direct.clone() };
        // Events follow the error analysis: each assumes the later blocks
        // were decoded correctly.
        let event_a = !last && {
            let l = cb.coop_index(&input.l_prev);
            scheme.step_one(cb, l, &enc.coop, &enc.l_next, &input.states).0 != true_crib
        };
        let event_b = scheme.score(&enc.coop, &input.states, &enc.crib_words, &enc.x, &obs[b].y) > 0.0;
        let event_c = d.typical.iter().any(|c| *c != truth);
        let decoded_ok = d.outcome == Step2Outcome::Unique && d.choice == truth && d.crib == true_crib;
        if !last {
            collision_audit(scheme, cb, input, enc, &mut collisions);
            propagated.push(decoded[b + 1].choice.l_prev != enc.l_next);
        } else {
            propagated.push(false);
        }
        rows.push(BlockRow { trial, block: b + 1, event_a, event_b, event_c, decoded_ok });
    }
    let transcript = cfg.keep_transcripts.then(|| Transcript {
        trial,
        blocks: (0..blocks)
            .map(|b| BlockTranscript {
                input: inputs[b].clone(),
                encoded: encoded[b].clone(),
                y: obs[b].y.clone(),
                decoded: decoded[b].clone(),
                row: rows[b],
            })
            .collect(),
    });
    Ok(TrialOutcome { rows, propagated, collisions, transcript })
}

/// Runs `config.trials` independent frames in parallel. Results depend only
/// on the inputs, not on scheduling.
pub fn run_trials(spec: &ChannelSpec, param: &PmfParameterization, config: &SchemeConfig) -> Result<SimResult> {
    let start = Instant::now();
    let scheme = Scheme::new(spec, param, config)?;
    let outcomes: Vec<TrialOutcome> =
        (0..config.trials).into_par_iter().map(|t| run_trial(&scheme, t)).collect::<Result<_>>()?;
    let message_blocks = config.blocks.saturating_sub(1).max(1);
    let mut rows = Vec::new();
    let mut collisions = CollisionStats::default();
    let mut transcripts = Vec::new();
    let (mut errors, mut events, mut inherited) = (0usize, [0usize; 3], 0usize);
    for o in outcomes {
        for (r, &p) in o.rows.iter().zip(&o.propagated).filter(|(r, _)| r.block <= message_blocks) {
            inherited += usize::from(p);
            errors += usize::from(!r.decoded_ok);
            events[0] += usize::from(r.event_a);
            events[1] += usize::from(r.event_b);
            events[2] += usize::from(r.event_c);
        }
        rows.extend(o.rows);
        collisions.merge(&o.collisions);
        transcripts.extend(o.transcript);
    }
    let total = (config.trials * message_blocks) as f64;
    let n = config.n as f64;
    Ok(SimResult {
        trials: config.trials,
        blocks: config.blocks,
        message_blocks,
        block_error_rate: errors as f64 / total,
        event_rates: events.map(|e| e as f64 / total),
        propagated_rate: inherited as f64 / total,
        realized: scheme
            .counts
            .iter()
            .map(|c| RealizedRates {
                crib: (c.crib as f64).log2() / n,
                direct: (c.direct as f64).log2() / n,
                bin: (c.bins as f64).log2() / n,
            })
            .collect(),
        counts: scheme.counts.clone(),
        collisions,
        rows,
        transcripts,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests;
