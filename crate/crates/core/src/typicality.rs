//! Strong typicality.
//!
//! A tuple of sequences is typical for a reference joint pmf when every cell
//! of its joint type is within the slack of the reference weight and no
//! occurrence falls outside the reference support. Two slack rules exist:
//! [`Slack::Relative`] allows `eps * p(a)` and [`Slack::Absolute`] allows `eps`.

use serde::{Deserialize, Serialize};

use crate::probability::{Alphabet, JointPmf};
use crate::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slack {
    #[default]
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    pub epsilon: f64,
    pub n: usize,
    pub slack: Slack,
}

impl TypicalityParams {
    pub fn new(epsilon: f64, n: usize) -> Result<Self> {
        if !(epsilon > 0.0) || n == 0 {
            return Err(Error::OutOfRange(format!("typicality needs epsilon > 0 and n >= 1, got {epsilon}, {n}")));
        }
        Ok(TypicalityParams { epsilon, n, slack: Slack::Relative })
    }

    pub fn with_slack(mut self, slack: Slack) -> Self {
        self.slack = slack;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTuple {
    axes: Vec<Alphabet>,
    sequences: Vec<Vec<usize>>,
}

impl SequenceTuple {
    pub fn new(axes: Vec<Alphabet>, sequences: Vec<Vec<usize>>) -> Result<Self> {
        if axes.is_empty() || axes.len() != sequences.len() {
            return Err(Error::LengthMismatch("one sequence per axis required".into()));
        }
        let n = sequences[0].len();
        if n == 0 || sequences.iter().any(|s| s.len() != n) {
            return Err(Error::LengthMismatch("sequences must share a nonzero length".into()));
        }
        for (a, s) in axes.iter().zip(&sequences) {
            if let Some(v) = s.iter().find(|&&v| v >= a.size) {
                return Err(Error::SymbolOutOfRange(format!("{v} in {}", a.name)));
            }
        }
        Ok(SequenceTuple { axes, sequences })
    }

    pub fn len(&self) -> usize {
        self.sequences[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }
}

/// Joint type of the tuple.
pub fn empirical_distribution(tuple: &SequenceTuple) -> JointPmf {
    let sizes: Vec<usize> = tuple.axes.iter().map(|a| a.size).collect();
    let cells: usize = sizes.iter().product();
    let n = tuple.len();
    let mut w = vec![0.0; cells];
    for i in 0..n {
        let mut c = 0;
        for (k, s) in tuple.sequences.iter().enumerate() {
            c = c * sizes[k] + s[i];
        }
        w[c] += 1.0;
    }
    for v in &mut w {
        *v /= n as f64;
    }
    JointPmf::from_parts(tuple.axes.clone(), w)
}

pub fn is_strongly_typical(tuple: &SequenceTuple, reference: &JointPmf, params: &TypicalityParams) -> Result<bool> {
    if tuple.axes != reference.axes() {
        return Err(Error::AlphabetMismatch("tuple axes differ from reference axes".into()));
    }
    if tuple.len() != params.n {
        return Err(Error::LengthMismatch(format!("tuple length {} but n = {}", tuple.len(), params.n)));
    }
    let checker = TypicalityChecker::new(reference, params.epsilon, params.slack);
    let seqs: Vec<&[usize]> = tuple.sequences.iter().map(Vec::as_slice).collect();
    Ok(checker.score(&seqs) <= 0.0)
}

/// Reusable typicality scorer over a fixed reference, for decoder loops.
#[derive(Debug, Clone)]
pub struct TypicalityChecker {
    sizes: Vec<usize>,
    reference: Vec<f64>,
    allowance: Vec<f64>,
}

impl TypicalityChecker {
    pub fn new(reference: &JointPmf, epsilon: f64, slack: Slack) -> Self {
        TypicalityChecker::from_weights(reference.sizes(), reference.weights().to_vec(), epsilon, slack)
    }

    /// Builds a checker from explicit axis sizes and row-major weights.
    pub fn from_weights(sizes: Vec<usize>, reference: Vec<f64>, epsilon: f64, slack: Slack) -> Self {
        let allowance = reference
            .iter()
            .map(|&p| match slack {
                Slack::Relative => epsilon * p,
                Slack::Absolute => epsilon,
            })
            .collect();
        TypicalityChecker { sizes, reference, allowance }
    }

    /// Largest excess of |type - p| over the allowance; `f64::INFINITY` when
    /// the tuple leaves the support. Nonpositive means typical.
    pub fn score(&self, seqs: &[&[usize]]) -> f64 {
        let n = seqs[0].len();
        let mut counts = vec![0u32; self.reference.len()];
        for i in 0..n {
            let mut c = 0;
            for (k, s) in seqs.iter().enumerate() {
                c = c * self.sizes[k] + s[i];
            }
            counts[c] += 1;
        }
        self.score_counts(&counts, n)
    }

    /// Score from precomputed cell counts.
    pub fn score_counts(&self, counts: &[u32], n: usize) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for ((&c, &p), &a) in counts.iter().zip(&self.reference).zip(&self.allowance) {
            if c > 0 && p == 0.0 {
                return f64::INFINITY;
            }
            let d = (c as f64 / n as f64 - p).abs() - a;
            if d > worst {
                worst = d;
            }
        }
        // Guard against rounding at exact boundary hits.
        if worst <= 1e-12 {
            worst.min(0.0)
        } else {
            worst
        }
    }

    pub fn cells(&self) -> usize {
        self.reference.len()
    }
}
