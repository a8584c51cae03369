//! Channel specifications for the five supported setups, their JSON schema,
//! and single-use sampling.
//!
//! Schema (`schema: 1`), all arrays row-major:
//!
//! | kind | alphabets | `state_pmf` | `channel` | `det_links` |
//! |---|---|---|---|---|
//! | `relay` | X, XR, Y, Z | absent | `[x][xr][y]` | `z: [x][xr]` |
//! | `state_relay` | S, X, XR, Y, Z | `[s]` | `[s][x][xr][y]` | `z: [s][x][xr]` |
//! | `state_relay_no_delay` | S, X, XR, Y, Z | `[s]` | `[s][x][xr][y]` | `z: [s][x]` (or `[s][x][xr]` constant in xr) |
//! | `state_mac`, `state_mac_causal` | S1, S2, X1, X2, Y, Z1, Z2 | `[s1][s2]` | `[s1][s2][x1][x2][y]` | `z1: [s1][x1]`, `z2: [s2][x2]` |
//!
//! The stateless relay is stored internally with a one-symbol state alphabet.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::probability::{flat_index, Alphabet, ConditionalPmf, JointPmf, Pmf};
use crate::rng::sample_row;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Relay,
    StateRelay,
    StateRelayNoDelay,
    StateMac,
    StateMacCausal,
}

impl ChannelKind {
    pub fn is_relay(self) -> bool {
        matches!(self, ChannelKind::Relay | ChannelKind::StateRelay | ChannelKind::StateRelayNoDelay)
    }

    pub fn is_mac(self) -> bool {
        !self.is_relay()
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Relay => "relay",
            ChannelKind::StateRelay => "state_relay",
            ChannelKind::StateRelayNoDelay => "state_relay_no_delay",
            ChannelKind::StateMac => "state_mac",
            ChannelKind::StateMacCausal => "state_mac_causal",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A total function on a finite product domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetTable {
    domain: Vec<usize>,
    codomain: usize,
    values: Vec<usize>,
}

impl DetTable {
    pub fn new(domain: Vec<usize>, codomain: usize, values: Vec<usize>) -> Result<Self> {
        let cells: usize = domain.iter().product();
        if values.len() != cells {
            return Err(Error::PartialTable(format!("expected {cells} entries, got {}", values.len())));
        }
        if let Some(v) = values.iter().find(|&&v| v >= codomain) {
            return Err(Error::PartialTable(format!("value {v} outside codomain of size {codomain}")));
        }
        Ok(DetTable { domain, codomain, values })
    }

    pub fn from_fn(domain: Vec<usize>, codomain: usize, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let mut values = Vec::with_capacity(domain.iter().product());
        let mut idx = vec![0; domain.len()];
        loop {
            values.push(f(&idx));
            if !crate::probability::next_index(&domain, &mut idx) {
                break;
            }
        }
        DetTable::new(domain, codomain, values)
    }

    pub fn eval(&self, args: &[usize]) -> usize {
        self.values[flat_index(&self.domain, args)]
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

/// Relay channel with state: p(s) p(y|x,xr,s), z = z(s,x,xr).
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChannel {
    pub s: Alphabet,
    pub x: Alphabet,
    pub xr: Alphabet,
    pub y: Alphabet,
    pub z: Alphabet,
    pub state: Pmf,
    /// Rows indexed by (s, x, xr).
    pub channel: ConditionalPmf,
    /// Domain (s, x, xr).
    pub link: DetTable,
}

impl RelayChannel {
    pub fn z_of(&self, s: usize, x: usize, xr: usize) -> usize {
        self.link.eval(&[s, x, xr])
    }
}

/// Two-user MAC with correlated states and cribbing links z1(x1,s1), z2(x2,s2).
#[derive(Debug, Clone, PartialEq)]
pub struct MacChannel {
    pub s1: Alphabet,
    pub s2: Alphabet,
    pub x1: Alphabet,
    pub x2: Alphabet,
    pub y: Alphabet,
    pub z1: Alphabet,
    pub z2: Alphabet,
    /// Joint over (S1, S2).
    pub state: JointPmf,
    /// Rows indexed by (s1, s2, x1, x2).
    pub channel: ConditionalPmf,
    /// Domain (s1, x1).
    pub link1: DetTable,
    /// Domain (s2, x2).
    pub link2: DetTable,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    Relay(RelayChannel),
    Mac(MacChannel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub model: ChannelModel,
}

impl ChannelSpec {
    pub fn relay(&self) -> Option<&RelayChannel> {
        match &self.model {
            ChannelModel::Relay(r) => Some(r),
            ChannelModel::Mac(_) => None,
        }
    }

    pub fn mac(&self) -> Option<&MacChannel> {
        match &self.model {
            ChannelModel::Mac(m) => Some(m),
            ChannelModel::Relay(_) => None,
        }
    }

    /// Same channel under another kind tag. Fails when the target kind's
    /// structural requirements do not hold.
    pub fn with_kind(&self, kind: ChannelKind) -> Result<ChannelSpec> {
        let spec = ChannelSpec { kind, model: self.model.clone() };
        let same_family = kind.is_relay() == self.kind.is_relay();
        if !same_family {
            return Err(Error::KindMismatch { expected: self.kind.to_string(), found: kind.to_string() });
        }
        load_spec(&serialize_spec(&spec)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyChannelParams {
    p: f64,
}

impl ToyChannelParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::OutOfRange(format!("stuck-at probability {p} must lie in (0, 0.5)")));
        }
        Ok(ToyChannelParams { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Memory cell with stuck-at faults: the state says whether the cell is
/// stuck at 0, stuck at 1, or writable; the relay reads the cell and the
/// destination sees the relay input noiselessly.
pub fn make_toy_spec(params: ToyChannelParams) -> ChannelSpec {
    let p = params.p;
    let a = |n: &str, k| Alphabet::new(n, k).expect("nonzero size");
    let (s, x, xr, y, z) = (a("S", 3), a("X", 2), a("XR", 2), a("Y", 2), a("Z", 2));
    let state = Pmf::new(s.clone(), vec![p / 2.0, p / 2.0, 1.0 - p]).expect("valid state pmf");
    let channel = ConditionalPmf::deterministic(vec![s.clone(), x.clone(), xr.clone()], y.clone(), |g| g[2])
        .expect("valid channel");
    let link = DetTable::from_fn(vec![3, 2, 2], 2, |g| match g[0] {
        0 => 0,
        1 => 1,
        _ => g[1],
    })
    .expect("valid link");
    ChannelSpec {
        kind: ChannelKind::StateRelay,
        model: ChannelModel::Relay(RelayChannel { s, x, xr, y, z, state, channel, link }),
    }
}

/// Alphabet sizes for [`random_spec`]. MAC specs use the same sizes for both users.
#[derive(Debug, Clone, Copy)]
pub struct SpecSizes {
    pub state: usize,
    pub input: usize,
    pub relay_input: usize,
    pub output: usize,
    pub link: usize,
}

/// Random valid spec of the given kind, for tests and consistency sweeps.
pub fn random_spec(kind: ChannelKind, sizes: SpecSizes, rng: &mut impl Rng) -> ChannelSpec {
    let a = |n: &str, k| Alphabet::new(n, k).expect("nonzero size");
    let mut row = |len: usize| -> Vec<f64> {
        let raw: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let t: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / t).collect()
    };
    let mut rows = |count: usize, len: usize| -> Vec<f64> { (0..count).flat_map(|_| row(len)).collect() };
    if kind.is_relay() {
        let ns = if kind == ChannelKind::Relay { 1 } else { sizes.state };
        let (s, x, xr, y, z) =
            (a("S", ns), a("X", sizes.input), a("XR", sizes.relay_input), a("Y", sizes.output), a("Z", sizes.link));
        let state = Pmf::new(s.clone(), rows(1, ns)).expect("normalized");
        let channel =
            ConditionalPmf::new(vec![s.clone(), x.clone(), xr.clone()], y.clone(), rows(ns * x.size * xr.size, y.size))
                .expect("normalized");
        let zs: Vec<usize> = (0..ns * x.size).map(|_| rng.gen_range(0..z.size)).collect();
        let zr: Vec<usize> = (0..ns * x.size * xr.size).map(|_| rng.gen_range(0..z.size)).collect();
        let no_delay = kind == ChannelKind::StateRelayNoDelay;
        let link = DetTable::from_fn(vec![ns, x.size, xr.size], z.size, |g| {
            if no_delay {
                zs[g[0] * x.size + g[1]]
            } else {
                zr[(g[0] * x.size + g[1]) * xr.size + g[2]]
            }
        })
        .expect("total");
        ChannelSpec { kind, model: ChannelModel::Relay(RelayChannel { s, x, xr, y, z, state, channel, link }) }
    } else {
        let (s1, s2, x1, x2, y, z1, z2) = (
            a("S1", sizes.state),
            a("S2", sizes.state),
            a("X1", sizes.input),
            a("X2", sizes.input),
            a("Y", sizes.output),
            a("Z1", sizes.link),
            a("Z2", sizes.link),
        );
        let state = JointPmf::new(vec![s1.clone(), s2.clone()], rows(1, s1.size * s2.size)).expect("normalized");
        let channel = ConditionalPmf::new(
            vec![s1.clone(), s2.clone(), x1.clone(), x2.clone()],
            y.clone(),
            rows(s1.size * s2.size * x1.size * x2.size, y.size),
        )
        .expect("normalized");
        let t1: Vec<usize> = (0..s1.size * x1.size).map(|_| rng.gen_range(0..z1.size)).collect();
        let t2: Vec<usize> = (0..s2.size * x2.size).map(|_| rng.gen_range(0..z2.size)).collect();
        let link1 = DetTable::new(vec![s1.size, x1.size], z1.size, t1).expect("total");
        let link2 = DetTable::new(vec![s2.size, x2.size], z2.size, t2).expect("total");
        ChannelSpec {
            kind,
            model: ChannelModel::Mac(MacChannel { s1, s2, x1, x2, y, z1, z2, state, channel, link1, link2 }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutput {
    pub y: usize,
    /// `[z]` for relay kinds, `[z1, z2]` for MAC kinds.
    pub z: Vec<usize>,
}

/// One channel use. Relay kinds take inputs `[x, xr]` and state `[s]`
/// (`[0]` for the stateless relay); MAC kinds take `[x1, x2]` and `[s1, s2]`.
pub fn sample_step(spec: &ChannelSpec, inputs: &[usize], state: &[usize], rng: &mut impl Rng) -> Result<StepOutput> {
    let check = |v: &[usize], sizes: &[usize], what: &str| -> Result<()> {
        if v.len() != sizes.len() || v.iter().zip(sizes).any(|(a, b)| a >= b) {
            return Err(Error::SymbolOutOfRange(format!("{what} {v:?}")));
        }
        Ok(())
    };
    match &spec.model {
        ChannelModel::Relay(r) => {
            check(inputs, &[r.x.size, r.xr.size], "inputs")?;
            check(state, &[r.s.size], "state")?;
            let (s, x, xr) = (state[0], inputs[0], inputs[1]);
            let y = sample_row(r.channel.row(&[s, x, xr]), rng.gen());
            Ok(StepOutput { y, z: vec![r.z_of(s, x, xr)] })
        }
        ChannelModel::Mac(m) => {
            check(inputs, &[m.x1.size, m.x2.size], "inputs")?;
            check(state, &[m.s1.size, m.s2.size], "state")?;
            let y = sample_row(m.channel.row(&[state[0], state[1], inputs[0], inputs[1]]), rng.gen());
            Ok(StepOutput { y, z: vec![m.link1.eval(&[state[0], inputs[0]]), m.link2.eval(&[state[1], inputs[1]])] })
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDocument {
    schema: u64,
    kind: ChannelKind,
    alphabets: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    state_pmf: Option<Value>,
    channel: Value,
    det_links: BTreeMap<String, Value>,
}

fn flatten_reals(v: &Value, shape: &[usize], path: &str, out: &mut Vec<f64>) -> Result<()> {
    match shape.split_first() {
        None => {
            let x = v.as_f64().ok_or_else(|| Error::Schema(format!("{path}: expected a number")))?;
            out.push(x);
            Ok(())
        }
        Some((&len, rest)) => {
            let arr = v.as_array().ok_or_else(|| Error::Schema(format!("{path}: expected an array")))?;
            if arr.len() != len {
                return Err(Error::Schema(format!("{path}: expected {len} entries, got {}", arr.len())));
            }
            for (k, item) in arr.iter().enumerate() {
                flatten_reals(item, rest, &format!("{path}[{k}]"), out)?;
            }
            Ok(())
        }
    }
}

fn flatten_links(v: &Value, shape: &[usize], path: &str, out: &mut Vec<usize>) -> Result<()> {
    match shape.split_first() {
        None => {
            let x = v.as_u64().ok_or_else(|| Error::PartialTable(format!("{path}: expected a symbol index")))?;
            out.push(x as usize);
            Ok(())
        }
        Some((&len, rest)) => {
            let arr = v.as_array().ok_or_else(|| Error::PartialTable(format!("{path}: expected an array")))?;
            if arr.len() != len {
                return Err(Error::PartialTable(format!("{path}: expected {len} entries, got {}", arr.len())));
            }
            for (k, item) in arr.iter().enumerate() {
                flatten_links(item, rest, &format!("{path}[{k}]"), out)?;
            }
            Ok(())
        }
    }
}

fn array_depth(v: &Value) -> usize {
    match v {
        Value::Array(a) => 1 + a.first().map_or(0, array_depth),
        _ => 0,
    }
}

fn nest<T: Clone + Into<Value>>(flat: &[T], shape: &[usize]) -> Value {
    match shape.split_first() {
        None => flat[0].clone().into(),
        Some((_, rest)) => {
            let chunk: usize = rest.iter().product();
            Value::Array(flat.chunks(chunk).map(|c| nest(c, rest)).collect())
        }
    }
}

fn alphabets_for(kind: ChannelKind) -> &'static [&'static str] {
    match kind {
        ChannelKind::Relay => &["X", "XR", "Y", "Z"],
        ChannelKind::StateRelay | ChannelKind::StateRelayNoDelay => &["S", "X", "XR", "Y", "Z"],
        _ => &["S1", "S2", "X1", "X2", "Y", "Z1", "Z2"],
    }
}

/// Parses and validates a JSON channel-spec document.
pub fn load_spec(document: &str) -> Result<ChannelSpec> {
    let doc: SpecDocument = serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    if doc.schema != SCHEMA_VERSION {
        return Err(Error::Schema(format!("unsupported schema version {}", doc.schema)));
    }
    let kind = doc.kind;
    let names = alphabets_for(kind);
    let mut found: Vec<&str> = doc.alphabets.keys().map(String::as_str).collect();
    let mut wanted = names.to_vec();
    found.sort_unstable();
    wanted.sort_unstable();
    if found != wanted {
        return Err(Error::Schema(format!("kind {kind} needs alphabets {names:?}, got {found:?}")));
    }
    let al = |n: &str| Alphabet::new(n, doc.alphabets[n]).map_err(|e| Error::Schema(e.to_string()));
    let links = |wanted: &[&str]| -> Result<()> {
        let mut keys: Vec<&str> = doc.det_links.keys().map(String::as_str).collect();
        keys.sort_unstable();
        if keys != wanted {
            return Err(Error::Schema(format!("det_links must be exactly {wanted:?}, got {keys:?}")));
        }
        Ok(())
    };
    let model = if kind.is_relay() {
        links(&["z"])?;
        let s = if kind == ChannelKind::Relay { Alphabet::new("S", 1)? } else { al("S")? };
        let (x, xr, y, z) = (al("X")?, al("XR")?, al("Y")?, al("Z")?);
        let state = match (kind, &doc.state_pmf) {
            (ChannelKind::Relay, None) => Pmf::point(s.clone(), 0)?,
            (ChannelKind::Relay, Some(_)) => return Err(Error::Schema("relay kind takes no state_pmf".into())),
            (_, None) => return Err(Error::Schema("state_pmf missing".into())),
            (_, Some(v)) => {
                let mut w = Vec::new();
                flatten_reals(v, &[s.size], "state_pmf", &mut w)?;
                Pmf::new(s.clone(), w)?
            }
        };
        let mut w = Vec::new();
        if kind == ChannelKind::Relay {
            flatten_reals(&doc.channel, &[x.size, xr.size, y.size], "channel", &mut w)?;
        } else {
            flatten_reals(&doc.channel, &[s.size, x.size, xr.size, y.size], "channel", &mut w)?;
        }
        let channel = ConditionalPmf::new(vec![s.clone(), x.clone(), xr.clone()], y.clone(), w)?;
        let zv = &doc.det_links["z"];
        let mut t = Vec::new();
        let link = match kind {
            ChannelKind::Relay => {
                flatten_links(zv, &[x.size, xr.size], "det_links.z", &mut t)?;
                DetTable::new(vec![1, x.size, xr.size], z.size, t)?
            }
            ChannelKind::StateRelay => {
                flatten_links(zv, &[s.size, x.size, xr.size], "det_links.z", &mut t)?;
                DetTable::new(vec![s.size, x.size, xr.size], z.size, t)?
            }
            _ => {
                if array_depth(zv) == 3 {
                    flatten_links(zv, &[s.size, x.size, xr.size], "det_links.z", &mut t)?;
                    let full = DetTable::new(vec![s.size, x.size, xr.size], z.size, t)?;
                    for row in full.values.chunks(xr.size) {
                        if row.iter().any(|&v| v != row[0]) {
                            return Err(Error::Schema("no-delay link z must not depend on xr".into()));
                        }
                    }
                    full
                } else {
                    flatten_links(zv, &[s.size, x.size], "det_links.z", &mut t)?;
                    let short = DetTable::new(vec![s.size, x.size], z.size, t)?;
                    DetTable::from_fn(vec![s.size, x.size, xr.size], z.size, |g| short.eval(&g[..2]))?
                }
            }
        };
        ChannelModel::Relay(RelayChannel { s, x, xr, y, z, state, channel, link })
    } else {
        links(&["z1", "z2"])?;
        let (s1, s2, x1, x2, y, z1, z2) = (al("S1")?, al("S2")?, al("X1")?, al("X2")?, al("Y")?, al("Z1")?, al("Z2")?);
        let sv = doc.state_pmf.as_ref().ok_or_else(|| Error::Schema("state_pmf missing".into()))?;
        let mut w = Vec::new();
        flatten_reals(sv, &[s1.size, s2.size], "state_pmf", &mut w)?;
        let state = JointPmf::new(vec![s1.clone(), s2.clone()], w)?;
        let mut w = Vec::new();
        flatten_reals(&doc.channel, &[s1.size, s2.size, x1.size, x2.size, y.size], "channel", &mut w)?;
        let channel = ConditionalPmf::new(vec![s1.clone(), s2.clone(), x1.clone(), x2.clone()], y.clone(), w)?;
        let mut t1 = Vec::new();
        flatten_links(&doc.det_links["z1"], &[s1.size, x1.size], "det_links.z1", &mut t1)?;
        let mut t2 = Vec::new();
        flatten_links(&doc.det_links["z2"], &[s2.size, x2.size], "det_links.z2", &mut t2)?;
        let link1 = DetTable::new(vec![s1.size, x1.size], z1.size, t1)?;
        let link2 = DetTable::new(vec![s2.size, x2.size], z2.size, t2)?;
        ChannelModel::Mac(MacChannel { s1, s2, x1, x2, y, z1, z2, state, channel, link1, link2 })
    };
    Ok(ChannelSpec { kind, model })
}

/// Serializes a spec to its JSON document.
pub fn serialize_spec(spec: &ChannelSpec) -> Result<String> {
    let kind = spec.kind;
    let mut alphabets = BTreeMap::new();
    let mut det_links = BTreeMap::new();
    let (state_pmf, channel) = match &spec.model {
        ChannelModel::Relay(r) => {
            for a in [&r.s, &r.x, &r.xr, &r.y, &r.z] {
                alphabets.insert(a.name.clone(), a.size);
            }
            let (x, xr) = (r.x.size, r.xr.size);
            if kind == ChannelKind::Relay {
                alphabets.remove("S");
                det_links.insert("z".to_string(), nest(&r.link.values, &[x, xr]));
                (None, nest(r.channel.table(), &[x, xr, r.y.size]))
            } else {
                let s = r.s.size;
                let z = if kind == ChannelKind::StateRelayNoDelay {
                    let short: Vec<usize> = r.link.values.iter().step_by(xr).copied().collect();
                    nest(&short, &[s, x])
                } else {
                    nest(&r.link.values, &[s, x, xr])
                };
                det_links.insert("z".to_string(), z);
                (Some(nest(r.state.weights(), &[s])), nest(r.channel.table(), &[s, x, xr, r.y.size]))
            }
        }
        ChannelModel::Mac(m) => {
            for a in [&m.s1, &m.s2, &m.x1, &m.x2, &m.y, &m.z1, &m.z2] {
                alphabets.insert(a.name.clone(), a.size);
            }
            det_links.insert("z1".to_string(), nest(&m.link1.values, &[m.s1.size, m.x1.size]));
            det_links.insert("z2".to_string(), nest(&m.link2.values, &[m.s2.size, m.x2.size]));
            (
                Some(nest(m.state.weights(), &[m.s1.size, m.s2.size])),
                nest(m.channel.table(), &[m.s1.size, m.s2.size, m.x1.size, m.x2.size, m.y.size]),
            )
        }
    };
    let doc = SpecDocument { schema: SCHEMA_VERSION, kind, alphabets, state_pmf, channel, det_links };
    Ok(serde_json::to_string_pretty(&doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Purpose};

    const STATE_RELAY_DOC: &str = r#"{
        "schema": 1,
        "kind": "state_relay",
        "alphabets": {"S": 2, "X": 2, "XR": 2, "Y": 2, "Z": 2},
        "state_pmf": [0.3, 0.7],
        "channel": [[[[0.9, 0.1], [0.2, 0.8]], [[0.5, 0.5], [0.0, 1.0]]],
                    [[[1.0, 0.0], [0.4, 0.6]], [[0.3, 0.7], [0.6, 0.4]]]],
        "det_links": {"z": [[[0, 0], [1, 1]], [[0, 1], [1, 0]]]}
    }"#;

    #[test]
    fn loads_hand_written_document() {
        let spec = load_spec(STATE_RELAY_DOC).unwrap();
        assert_eq!(spec.kind, ChannelKind::StateRelay);
        let r = spec.relay().unwrap();
        assert_eq!(r.z_of(1, 1, 0), 1);
        assert_eq!(r.z_of(1, 1, 1), 0);
        assert_eq!(r.channel.row(&[0, 0, 1]), &[0.2, 0.8]);
    }

    #[test]
    fn unnormalized_row_is_named() {
        let bad = STATE_RELAY_DOC.replace("[0.5, 0.5], [0.0, 1.0]", "[0.5, 0.48], [0.0, 1.0]");
        let err = load_spec(&bad).unwrap_err().to_string();
        assert!(err.contains("[s=0][x=1][xr=0]"), "{err}");
    }

    #[test]
    fn partial_and_out_of_range_links_rejected() {
        let bad = STATE_RELAY_DOC.replace("[[0, 1], [1, 0]]]", "[[0, 1], [1]]]");
        assert!(matches!(load_spec(&bad), Err(Error::PartialTable(_))));
        let bad = STATE_RELAY_DOC.replace("[[0, 1], [1, 0]]]", "[[0, 1], [1, 2]]]");
        assert!(matches!(load_spec(&bad), Err(Error::PartialTable(_))));
    }

    #[test]
    fn schema_version_required() {
        let bad = STATE_RELAY_DOC.replace("\"schema\": 1,", "");
        assert!(matches!(load_spec(&bad), Err(Error::Schema(_))));
    }

    #[test]
    fn no_delay_link_must_ignore_relay_input() {
        let doc = STATE_RELAY_DOC.replace("state_relay", "state_relay_no_delay");
        assert!(load_spec(&doc).is_err());
        let ok = doc.replace("[[[0, 0], [1, 1]], [[0, 1], [1, 0]]]", "[[0, 1], [1, 1]]");
        let spec = load_spec(&ok).unwrap();
        assert_eq!(spec.relay().unwrap().z_of(0, 1, 0), 1);
        assert_eq!(spec.relay().unwrap().z_of(0, 1, 1), 1);
    }

    #[test]
    fn toy_spec_tables() {
        let spec = make_toy_spec(ToyChannelParams::new(0.4).unwrap());
        let r = spec.relay().unwrap();
        let w = r.state.weights();
        assert!((w[0] - 0.2).abs() < 1e-15 && (w[1] - 0.2).abs() < 1e-15 && (w[2] - 0.6).abs() < 1e-15);
        let spec = make_toy_spec(ToyChannelParams::new(0.2).unwrap());
        let r = spec.relay().unwrap();
        for x in 0..2 {
            for xr in 0..2 {
                assert_eq!(r.z_of(0, x, xr), 0);
                assert_eq!(r.z_of(1, x, xr), 1);
                assert_eq!(r.z_of(2, x, xr), x);
            }
        }
        assert!(ToyChannelParams::new(0.5).is_err());
        assert!(ToyChannelParams::new(0.0).is_err());
    }

    #[test]
    fn toy_roundtrip() {
        let spec = make_toy_spec(ToyChannelParams::new(0.4).unwrap());
        let text = serialize_spec(&spec).unwrap();
        assert_eq!(load_spec(&text).unwrap(), spec);
    }

    #[test]
    fn roundtrip_every_kind() {
        let sizes = SpecSizes { state: 2, input: 2, relay_input: 3, output: 3, link: 2 };
        let mut rng = substream(3, Purpose::Sampling, &[]);
        for kind in [
            ChannelKind::Relay,
            ChannelKind::StateRelay,
            ChannelKind::StateRelayNoDelay,
            ChannelKind::StateMac,
            ChannelKind::StateMacCausal,
        ] {
            let spec = random_spec(kind, sizes, &mut rng);
            let text = serialize_spec(&spec).unwrap();
            assert_eq!(load_spec(&text).unwrap(), spec, "{kind}");
        }
    }

    #[test]
    fn toy_sampling_follows_links() {
        let spec = make_toy_spec(ToyChannelParams::new(0.4).unwrap());
        let mut rng = substream(1, Purpose::Channel, &[]);
        for x in 0..2 {
            let out = sample_step(&spec, &[x, 0], &[0], &mut rng).unwrap();
            assert_eq!(out.z, vec![0]);
            let out = sample_step(&spec, &[x, 1], &[2], &mut rng).unwrap();
            assert_eq!(out.y, 1);
            assert_eq!(out.z, vec![x]);
        }
        assert!(sample_step(&spec, &[2, 0], &[0], &mut rng).is_err());
    }

    #[test]
    fn mac_identity_link() {
        let sizes = SpecSizes { state: 2, input: 2, relay_input: 1, output: 2, link: 2 };
        let mut rng = substream(5, Purpose::Sampling, &[]);
        let mut spec = random_spec(ChannelKind::StateMac, sizes, &mut rng);
        if let ChannelModel::Mac(m) = &mut spec.model {
            m.link1 = DetTable::from_fn(vec![2, 2], 2, |g| g[1]).unwrap();
        }
        for i in 0..1000u64 {
            let (x1, x2, s1, s2) = ((i % 2) as usize, (i / 2 % 2) as usize, (i / 4 % 2) as usize, (i / 8 % 2) as usize);
            let out = sample_step(&spec, &[x1, x2], &[s1, s2], &mut rng).unwrap();
            assert_eq!(out.z[0], x1);
        }
    }
}
