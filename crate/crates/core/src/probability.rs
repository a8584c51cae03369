//! Finite-alphabet probability tables and information measures.
//!
//! All logarithms are base 2. Tables are dense and row-major (last axis
//! fastest). Constructors validate normalization to [`NORMALIZATION_TOLERANCE`]
//! and never renormalize.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Largest dense table the crate will allocate.
pub const MAX_CELLS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub name: String,
    pub size: usize,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, size: usize) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::InvalidTable(format!("alphabet {name} has size 0")));
        }
        Ok(Alphabet { name, size })
    }
}

fn check_row(weights: &[f64], what: &dyn Fn() -> String) -> Result<()> {
    let mut total = 0.0;
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidTable(format!("{} has invalid weight {w}", what())));
        }
        total += w;
    }
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized(format!("{} sums to {total}", what())));
    }
    Ok(())
}

fn cell_count(sizes: impl IntoIterator<Item = usize>) -> Result<usize> {
    let mut cells: usize = 1;
    for s in sizes {
        cells = cells
            .checked_mul(s)
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| Error::Budget(format!("table exceeds {MAX_CELLS} cells")))?;
    }
    Ok(cells)
}

/// Row-major flat index of `idx` within `sizes`.
pub fn flat_index(sizes: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(sizes).fold(0, |acc, (&i, &s)| acc * s + i)
}

/// Advances a row-major odometer; returns false after the last tuple.
pub fn next_index(sizes: &[usize], idx: &mut [usize]) -> bool {
    for k in (0..sizes.len()).rev() {
        idx[k] += 1;
        if idx[k] < sizes[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    alphabet: Alphabet,
    weights: Vec<f64>,
}

impl Pmf {
    pub fn new(alphabet: Alphabet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != alphabet.size {
            return Err(Error::LengthMismatch(format!(
                "pmf over {} needs {} weights, got {}",
                alphabet.name,
                alphabet.size,
                weights.len()
            )));
        }
        check_row(&weights, &|| format!("pmf over {}", alphabet.name))?;
        Ok(Pmf { alphabet, weights })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let w = 1.0 / alphabet.size as f64;
        let weights = vec![w; alphabet.size];
        Pmf { alphabet, weights }
    }

    pub fn point(alphabet: Alphabet, symbol: usize) -> Result<Self> {
        if symbol >= alphabet.size {
            return Err(Error::SymbolOutOfRange(format!("{symbol} in {}", alphabet.name)));
        }
        let mut weights = vec![0.0; alphabet.size];
        weights[symbol] = 1.0;
        Ok(Pmf { alphabet, weights })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.weights)
    }
}

/// A table of rows `p(target | given)`, rows ordered row-major over `given`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPmf {
    given: Vec<Alphabet>,
    target: Alphabet,
    table: Vec<f64>,
}

impl ConditionalPmf {
    pub fn new(given: Vec<Alphabet>, target: Alphabet, table: Vec<f64>) -> Result<Self> {
        let rows = cell_count(given.iter().map(|a| a.size))?;
        if table.len() != rows * target.size {
            return Err(Error::LengthMismatch(format!(
                "conditional pmf of {} needs {} entries, got {}",
                target.name,
                rows * target.size,
                table.len()
            )));
        }
        let sizes: Vec<usize> = given.iter().map(|a| a.size).collect();
        for (r, row) in table.chunks(target.size).enumerate() {
            check_row(row, &|| format!("row {} of p({}|...)", describe_row(&given, &sizes, r), target.name))?;
        }
        Ok(ConditionalPmf { given, target, table })
    }

    /// Row selected by a deterministic map of the conditioning tuple.
    pub fn deterministic(given: Vec<Alphabet>, target: Alphabet, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let sizes: Vec<usize> = given.iter().map(|a| a.size).collect();
        let rows = cell_count(sizes.iter().copied())?;
        let mut table = vec![0.0; rows * target.size];
        let mut idx = vec![0; sizes.len()];
        for r in 0..rows {
            let t = f(&idx);
            if t >= target.size {
                return Err(Error::SymbolOutOfRange(format!("deterministic map yields {t} outside {}", target.name)));
            }
            table[r * target.size + t] = 1.0;
            next_index(&sizes, &mut idx);
        }
        Ok(ConditionalPmf { given, target, table })
    }

    pub fn given(&self) -> &[Alphabet] {
        &self.given
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn row(&self, given: &[usize]) -> &[f64] {
        let sizes: Vec<usize> = self.given.iter().map(|a| a.size).collect();
        let r = flat_index(&sizes, given);
        &self.table[r * self.target.size..(r + 1) * self.target.size]
    }
}

fn describe_row(given: &[Alphabet], sizes: &[usize], mut r: usize) -> String {
    let mut parts = vec![String::new(); sizes.len()];
    for k in (0..sizes.len()).rev() {
        parts[k] = format!("[{}={}]", given[k].name.to_lowercase(), r % sizes[k]);
        r /= sizes[k];
    }
    parts.concat()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    weights: Vec<f64>,
}

impl JointPmf {
    pub fn new(axes: Vec<Alphabet>, weights: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::EmptyAxes);
        }
        let cells = cell_count(axes.iter().map(|a| a.size))?;
        if weights.len() != cells {
            return Err(Error::LengthMismatch(format!("joint pmf needs {cells} weights, got {}", weights.len())));
        }
        check_row(&weights, &|| "joint pmf".to_string())?;
        Ok(JointPmf { axes, weights })
    }

    /// Builds a joint without the normalization check. Callers guarantee
    /// the weights came from normalized factors.
    pub(crate) fn from_parts(axes: Vec<Alphabet>, weights: Vec<f64>) -> Self {
        JointPmf { axes, weights }
    }

    pub fn from_pmf(p: &Pmf) -> Self {
        JointPmf { axes: vec![p.alphabet.clone()], weights: p.weights.clone() }
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.size).collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, idx: &[usize]) -> f64 {
        self.weights[flat_index(&self.sizes(), idx)]
    }

    pub fn axis_index(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.name == name)
    }

    pub fn marginalize(&self, keep: &[usize]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(Error::EmptyAxes);
        }
        self.check_axes(keep)?;
        if has_duplicates(keep) {
            return Err(Error::OverlappingAxes);
        }
        let axes = keep.iter().map(|&k| self.axes[k].clone()).collect();
        Ok(JointPmf { axes, weights: self.marginal_weights(keep) })
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        match axes.iter().find(|&&a| a >= self.axes.len()) {
            Some(&a) => Err(Error::AxisOutOfRange(a)),
            None => Ok(()),
        }
    }

    /// Marginal weights over `keep` in the listed order.
    pub(crate) fn marginal_weights(&self, keep: &[usize]) -> Vec<f64> {
        let sizes = self.sizes();
        let mut out_strides = vec![0usize; sizes.len()];
        let mut stride = 1;
        for &k in keep.iter().rev() {
            out_strides[k] = stride;
            stride *= sizes[k];
        }
        let mut out = vec![0.0; stride];
        // Walk the table with an odometer tracking the output offset.
        let mut idx = vec![0usize; sizes.len()];
        let mut offset = 0usize;
        for &w in &self.weights {
            out[offset] += w;
            for k in (0..sizes.len()).rev() {
                idx[k] += 1;
                offset += out_strides[k];
                if idx[k] < sizes[k] {
                    break;
                }
                offset -= out_strides[k] * sizes[k];
                idx[k] = 0;
            }
        }
        out
    }

    fn subset_entropy(&self, axes: &[usize]) -> f64 {
        if axes.is_empty() {
            return 0.0;
        }
        entropy_of(&self.marginal_weights(axes))
    }
}

fn has_duplicates(a: &[usize]) -> bool {
    a.iter().enumerate().any(|(i, x)| a[..i].contains(x))
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    !a.iter().any(|x| b.contains(x))
}

pub(crate) fn entropy_of(weights: &[f64]) -> f64 {
    weights.iter().filter(|&&w| w > 0.0).map(|&w| -w * w.log2()).sum()
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

/// H(axes | given) in bits.
pub fn entropy(joint: &JointPmf, axes: &[usize], given: &[usize]) -> Result<f64> {
    joint.check_axes(axes)?;
    joint.check_axes(given)?;
    if has_duplicates(axes) || has_duplicates(given) || !disjoint(axes, given) {
        return Err(Error::OverlappingAxes);
    }
    let all: Vec<usize> = axes.iter().chain(given).copied().collect();
    let h = joint.subset_entropy(&all) - joint.subset_entropy(given);
    Ok(h.max(0.0))
}

/// I(left; right | given) in bits, clamped at 0.
pub fn mutual_information(joint: &JointPmf, left: &[usize], right: &[usize], given: &[usize]) -> Result<f64> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::EmptyAxes);
    }
    for s in [left, right, given] {
        joint.check_axes(s)?;
        if has_duplicates(s) {
            return Err(Error::OverlappingAxes);
        }
    }
    if !disjoint(left, right) || !disjoint(left, given) || !disjoint(right, given) {
        return Err(Error::OverlappingAxes);
    }
    let lg: Vec<usize> = left.iter().chain(given).copied().collect();
    let rg: Vec<usize> = right.iter().chain(given).copied().collect();
    let lrg: Vec<usize> = left.iter().chain(right).chain(given).copied().collect();
    let i = joint.subset_entropy(&lg) + joint.subset_entropy(&rg)
        - joint.subset_entropy(&lrg)
        - joint.subset_entropy(given);
    Ok(i.max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Marginal(Pmf),
    Conditional(ConditionalPmf),
    Joint(JointPmf),
}

/// Which joint axes feed a factor and which axes it produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wiring {
    pub given: Vec<usize>,
    pub targets: Vec<usize>,
}

impl Wiring {
    pub fn new(given: Vec<usize>, targets: Vec<usize>) -> Self {
        Wiring { given, targets }
    }
}

impl Factor {
    fn given_alphabets(&self) -> &[Alphabet] {
        match self {
            Factor::Conditional(c) => &c.given,
            _ => &[],
        }
    }

    fn target_alphabets(&self) -> Vec<&Alphabet> {
        match self {
            Factor::Marginal(p) => vec![&p.alphabet],
            Factor::Conditional(c) => vec![&c.target],
            Factor::Joint(j) => j.axes.iter().collect(),
        }
    }
}

/// Multiplies factors into a joint pmf. Every joint axis must be produced by
/// exactly one factor and the dependency graph must be acyclic.
pub fn compose_joint(factors: &[Factor], wiring: &[Wiring]) -> Result<JointPmf> {
    if factors.len() != wiring.len() || factors.is_empty() {
        return Err(Error::InvalidWiring("one wiring entry per factor required".into()));
    }
    let n_axes = wiring.iter().flat_map(|w| w.targets.iter()).map(|&t| t + 1).max().unwrap_or(0);
    let mut axes: Vec<Option<Alphabet>> = vec![None; n_axes];
    let mut owner = vec![usize::MAX; n_axes];
    for (f, (factor, w)) in factors.iter().zip(wiring).enumerate() {
        let targets = factor.target_alphabets();
        if targets.len() != w.targets.len() {
            return Err(Error::InvalidWiring(format!("factor {f} target count")));
        }
        if w.given.len() != factor.given_alphabets().len() {
            return Err(Error::InvalidWiring(format!("factor {f} input count")));
        }
        for (&t, a) in w.targets.iter().zip(targets) {
            if owner[t] != usize::MAX {
                return Err(Error::InvalidWiring(format!("axis {t} produced twice")));
            }
            owner[t] = f;
            axes[t] = Some(a.clone());
        }
    }
    let axes: Vec<Alphabet> = axes
        .into_iter()
        .enumerate()
        .map(|(k, a)| a.ok_or_else(|| Error::InvalidWiring(format!("axis {k} never produced"))))
        .collect::<Result<_>>()?;
    for (f, (factor, w)) in factors.iter().zip(wiring).enumerate() {
        for (&g, a) in w.given.iter().zip(factor.given_alphabets()) {
            if g >= n_axes {
                return Err(Error::InvalidWiring(format!("factor {f} reads missing axis {g}")));
            }
            if &axes[g] != a {
                return Err(Error::AlphabetMismatch(format!(
                    "factor {f} expects {} but axis {g} is {}",
                    a.name, axes[g].name
                )));
            }
        }
    }
    // Kahn's algorithm over factors.
    let mut indegree: Vec<usize> = wiring.iter().map(|w| w.given.len()).collect();
    let mut ready: Vec<usize> = (0..factors.len()).filter(|&f| indegree[f] == 0).collect();
    let mut done = 0;
    while let Some(f) = ready.pop() {
        done += 1;
        for (g, w) in wiring.iter().enumerate() {
            for &axis in &w.given {
                if owner[axis] == f {
                    indegree[g] -= 1;
                    if indegree[g] == 0 {
                        ready.push(g);
                    }
                }
            }
        }
    }
    if done != factors.len() {
        return Err(Error::CyclicWiring);
    }

    let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
    let cells = cell_count(sizes.iter().copied())?;
    let mut weights = vec![0.0; cells];
    let mut idx = vec![0usize; sizes.len()];
    let mut buf = Vec::new();
    for w in weights.iter_mut() {
        let mut p = 1.0;
        for (factor, wire) in factors.iter().zip(wiring) {
            p *= factor_value(factor, wire, &idx, &mut buf);
            if p == 0.0 {
                break;
            }
        }
        *w = p;
        next_index(&sizes, &mut idx);
    }
    Ok(JointPmf { axes, weights })
}

fn factor_value(factor: &Factor, wire: &Wiring, idx: &[usize], buf: &mut Vec<usize>) -> f64 {
    match factor {
        Factor::Marginal(p) => p.weights[idx[wire.targets[0]]],
        Factor::Conditional(c) => {
            let mut r = 0;
            for (&g, a) in wire.given.iter().zip(&c.given) {
                r = r * a.size + idx[g];
            }
            c.table[r * c.target.size + idx[wire.targets[0]]]
        }
        Factor::Joint(j) => {
            buf.clear();
            buf.extend(wire.targets.iter().map(|&t| idx[t]));
            j.weights[flat_index(&j.sizes(), buf)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn bin(name: &str) -> Alphabet {
        Alphabet::new(name, 2).unwrap()
    }

    #[test]
    fn product_of_uniforms() {
        let j = compose_joint(
            &[Factor::Marginal(Pmf::uniform(bin("A"))), Factor::Marginal(Pmf::uniform(bin("B")))],
            &[Wiring::new(vec![], vec![0]), Wiring::new(vec![], vec![1])],
        )
        .unwrap();
        assert_eq!(j.weights(), &[0.25; 4]);
    }

    #[test]
    fn deterministic_row_support() {
        let s = Alphabet::new("S", 3).unwrap();
        let x = bin("X");
        let j = compose_joint(
            &[
                Factor::Marginal(Pmf::uniform(s.clone())),
                Factor::Conditional(ConditionalPmf::deterministic(vec![s], x, |g| g[0] % 2).unwrap()),
            ],
            &[Wiring::new(vec![], vec![0]), Wiring::new(vec![0], vec![1])],
        )
        .unwrap();
        let support: Vec<usize> = (0..6).filter(|&c| j.weights()[c] > 0.0).collect();
        assert_eq!(support, vec![0, 3, 4]);
        for c in support {
            assert_abs_diff_eq!(j.weights()[c], 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_cycles_and_double_targets() {
        let a = bin("A");
        let b = bin("B");
        let ab = ConditionalPmf::deterministic(vec![a.clone()], b.clone(), |g| g[0]).unwrap();
        let ba = ConditionalPmf::deterministic(vec![b], a.clone(), |g| g[0]).unwrap();
        let err = compose_joint(
            &[Factor::Conditional(ab.clone()), Factor::Conditional(ba)],
            &[Wiring::new(vec![0], vec![1]), Wiring::new(vec![1], vec![0])],
        );
        assert!(matches!(err, Err(Error::CyclicWiring)));
        let err = compose_joint(
            &[Factor::Marginal(Pmf::uniform(a.clone())), Factor::Marginal(Pmf::uniform(a))],
            &[Wiring::new(vec![], vec![0]), Wiring::new(vec![], vec![0])],
        );
        assert!(matches!(err, Err(Error::InvalidWiring(_))));
    }

    #[test]
    fn alphabet_mismatch_detected() {
        let a = Alphabet::new("A", 3).unwrap();
        let cond = ConditionalPmf::deterministic(vec![bin("A")], bin("B"), |g| g[0]).unwrap();
        let err = compose_joint(
            &[Factor::Marginal(Pmf::uniform(a)), Factor::Conditional(cond)],
            &[Wiring::new(vec![], vec![0]), Wiring::new(vec![0], vec![1])],
        );
        assert!(matches!(err, Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn unnormalized_row_named() {
        let err = ConditionalPmf::new(vec![bin("X")], bin("Y"), vec![0.5, 0.5, 0.3, 0.68]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[x=1]"), "{msg}");
        assert!(Pmf::new(bin("A"), vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn marginals_of_small_tables() {
        let j = JointPmf::new(vec![bin("A"), bin("B")], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(j.marginalize(&[0]).unwrap().weights(), &[0.5, 0.5]);
        assert_eq!(j.marginalize(&[1]).unwrap().weights(), &[0.5, 0.5]);
        assert!(matches!(j.marginalize(&[]), Err(Error::EmptyAxes)));
    }

    #[test]
    fn entropy_examples() {
        let u = JointPmf::from_pmf(&Pmf::uniform(bin("A")));
        assert_abs_diff_eq!(entropy(&u, &[0], &[]).unwrap(), 1.0);
        let d = JointPmf::from_pmf(&Pmf::point(bin("A"), 1).unwrap());
        assert_eq!(entropy(&d, &[0], &[]).unwrap(), 0.0);
        let p = JointPmf::from_pmf(&Pmf::new(bin("A"), vec![0.2, 0.8]).unwrap());
        let oracle = -(0.2f64 * 0.2f64.log2()) - 0.8 * 0.8f64.log2();
        assert_abs_diff_eq!(entropy(&p, &[0], &[]).unwrap(), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle, 0.721928, epsilon = 1e-6);
        assert!(matches!(entropy(&u, &[0], &[0]), Err(Error::OverlappingAxes)));
    }

    #[test]
    fn mutual_information_examples() {
        let ind = JointPmf::new(vec![bin("A"), bin("B")], vec![0.25; 4]).unwrap();
        assert_abs_diff_eq!(mutual_information(&ind, &[0], &[1], &[]).unwrap(), 0.0);
        let id = JointPmf::new(vec![bin("A"), bin("B")], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(mutual_information(&id, &[0], &[1], &[]).unwrap(), 1.0);
        let bsc = JointPmf::new(vec![bin("A"), bin("B")], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        let oracle = 1.0 + 0.1 * 0.1f64.log2() + 0.9 * 0.9f64.log2();
        let mi = mutual_information(&bsc, &[0], &[1], &[]).unwrap();
        assert_abs_diff_eq!(mi, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(mi, 0.531005, epsilon = 1e-6);
        assert!(matches!(mutual_information(&bsc, &[], &[1], &[]), Err(Error::EmptyAxes)));
        assert!(matches!(mutual_information(&bsc, &[0], &[0], &[]), Err(Error::OverlappingAxes)));
    }

    fn random_joint(sizes: Vec<usize>, seed: Vec<f64>) -> JointPmf {
        let cells: usize = sizes.iter().product();
        let raw: Vec<f64> = (0..cells).map(|c| seed[c % seed.len()] * ((c * 7 + 3) % 11) as f64).collect();
        let total: f64 = raw.iter().sum();
        let axes = sizes.iter().enumerate().map(|(k, &s)| Alphabet::new(format!("A{k}"), s).unwrap()).collect();
        JointPmf::new(axes, raw.iter().map(|w| w / total).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn chain_rule_and_conditioning(
            sizes in proptest::collection::vec(1usize..=4, 3),
            seed in proptest::collection::vec(0.01f64..1.0, 8),
        ) {
            let j = random_joint(sizes, seed);
            let h_ab = entropy(&j, &[0, 1], &[]).unwrap();
            let h_a = entropy(&j, &[0], &[]).unwrap();
            let h_b_a = entropy(&j, &[1], &[0]).unwrap();
            prop_assert!((h_ab - h_a - h_b_a).abs() < 1e-9);
            let h_a_b = entropy(&j, &[0], &[1]).unwrap();
            prop_assert!(h_a_b <= h_a + 1e-9);
            prop_assert!(mutual_information(&j, &[0], &[1], &[2]).unwrap() >= 0.0);
        }

        #[test]
        fn compose_then_marginalize_recovers_factors(
            ps in proptest::collection::vec(0.01f64..1.0, 2),
            rows in proptest::collection::vec(0.01f64..1.0, 4),
        ) {
            let a = bin("A");
            let b = bin("B");
            let pa = Pmf::new(a.clone(), vec![ps[0] / (ps[0] + ps[1]), ps[1] / (ps[0] + ps[1])]).unwrap();
            let table = vec![
                rows[0] / (rows[0] + rows[1]), rows[1] / (rows[0] + rows[1]),
                rows[2] / (rows[2] + rows[3]), rows[3] / (rows[2] + rows[3]),
            ];
            let cond = ConditionalPmf::new(vec![a], b, table.clone()).unwrap();
            let j = compose_joint(
                &[Factor::Marginal(pa.clone()), Factor::Conditional(cond)],
                &[Wiring::new(vec![], vec![0]), Wiring::new(vec![0], vec![1])],
            ).unwrap();
            let m = j.marginalize(&[0]).unwrap();
            for k in 0..2 {
                prop_assert!((m.weights()[k] - pa.weights()[k]).abs() < 1e-9);
            }
            let mb = j.marginalize(&[1]).unwrap();
            let oracle = pa.weights()[0] * table[0] + pa.weights()[1] * table[2];
            prop_assert!((mb.weights()[0] - oracle).abs() < 1e-9);
        }
    }
}
