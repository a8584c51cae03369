//! Input distributions in the factorized form each setup allows.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, ChannelModel, ChannelSpec};
use crate::probability::{
    compose_joint, Alphabet, ConditionalPmf, Factor, JointPmf, Pmf, Wiring, NORMALIZATION_TOLERANCE,
};
use crate::{Error, Result};

/// A conditional table stored as rows of equal length, rows row-major over
/// the conditioning tuple named in `name`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorTable {
    pub name: String,
    pub row_len: usize,
    pub values: Vec<f64>,
}

impl FactorTable {
    fn uniform(name: &str, rows: usize, row_len: usize) -> Self {
        FactorTable { name: name.to_string(), row_len, values: vec![1.0 / row_len as f64; rows * row_len] }
    }

    pub fn rows(&self) -> usize {
        self.values.len() / self.row_len
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.row_len..(r + 1) * self.row_len]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.values[r * self.row_len..(r + 1) * self.row_len]
    }
}

/// Candidate input distribution.
///
/// Factor order per kind:
/// * `relay`: `p(x,xr)` as one row over `[x][xr]`.
/// * `state_relay`: `p(xr)`, `p(x|xr,s)` with rows over `[xr][s]`.
/// * `state_relay_no_delay`: `p(u)`, `p(x|u,s)` with rows over `[u][s]`, plus `relay_map[u][z]`.
/// * `state_mac`: `p(u)`, `p(x1|u,s1)` rows `[u][s1]`, `p(x2|u,s2)` rows `[u][s2]`.
/// * `state_mac_causal`: as `state_mac` but `p(x2|u,s2,z1)` rows `[u][s2][z1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfParameterization {
    pub kind: ChannelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_size: Option<usize>,
    pub factors: Vec<FactorTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relay_map: Option<Vec<usize>>,
}

/// Cardinality cap on the auxiliary alphabet, when the kind has one.
pub fn cardinality_cap(spec: &ChannelSpec) -> Option<usize> {
    match &spec.model {
        ChannelModel::Relay(r) if spec.kind == ChannelKind::StateRelayNoDelay => {
            Some(r.s.size * (r.x.size * r.xr.size - 1) + 2)
        }
        ChannelModel::Relay(_) => None,
        ChannelModel::Mac(m) => {
            let ss = m.s1.size * m.s2.size;
            Some((ss * (m.y.size - 1) + 4).min(ss * (m.x1.size * m.x2.size - 1) + 3))
        }
    }
}

/// Auxiliary size used when none is requested: the cap, but at most 3.
pub fn default_u_size(spec: &ChannelSpec) -> Option<usize> {
    cardinality_cap(spec).map(|c| c.min(3))
}

/// (name, rows, row length) for each factor.
fn layout(spec: &ChannelSpec, u: usize) -> Vec<(&'static str, usize, usize)> {
    match (&spec.model, spec.kind) {
        (ChannelModel::Relay(r), ChannelKind::Relay) => vec![("p(x,xr)", 1, r.x.size * r.xr.size)],
        (ChannelModel::Relay(r), ChannelKind::StateRelay) => {
            vec![("p(xr)", 1, r.xr.size), ("p(x|xr,s)", r.xr.size * r.s.size, r.x.size)]
        }
        (ChannelModel::Relay(r), _) => vec![("p(u)", 1, u), ("p(x|u,s)", u * r.s.size, r.x.size)],
        (ChannelModel::Mac(m), ChannelKind::StateMacCausal) => vec![
            ("p(u)", 1, u),
            ("p(x1|u,s1)", u * m.s1.size, m.x1.size),
            ("p(x2|u,s2,z1)", u * m.s2.size * m.z1.size, m.x2.size),
        ],
        (ChannelModel::Mac(m), _) => {
            vec![("p(u)", 1, u), ("p(x1|u,s1)", u * m.s1.size, m.x1.size), ("p(x2|u,s2)", u * m.s2.size, m.x2.size)]
        }
    }
}

fn resolve_u(spec: &ChannelSpec, u_size: Option<usize>) -> Result<Option<usize>> {
    match cardinality_cap(spec) {
        None => Ok(None),
        Some(cap) => {
            let u = u_size.unwrap_or(cap.min(3));
            if u == 0 || u > cap {
                return Err(Error::CardinalityCap { size: u, cap });
            }
            Ok(Some(u))
        }
    }
}

/// Number of entries in the instantaneous relay map, and its codomain size.
pub(crate) fn map_shape(spec: &ChannelSpec, u: usize) -> Option<(usize, usize)> {
    match (&spec.model, spec.kind) {
        (ChannelModel::Relay(r), ChannelKind::StateRelayNoDelay) => Some((u * r.z.size, r.xr.size)),
        _ => None,
    }
}

impl PmfParameterization {
    /// Uniform rows; for the instantaneous relay the map is `xr = u mod |XR|`.
    pub fn uniform(spec: &ChannelSpec, u_size: Option<usize>) -> Result<Self> {
        let u = resolve_u(spec, u_size)?;
        let factors = layout(spec, u.unwrap_or(1))
            .into_iter()
            .map(|(name, rows, len)| FactorTable::uniform(name, rows, len))
            .collect();
        let relay_map = map_shape(spec, u.unwrap_or(1)).map(|(len, xr)| {
            let z = len / u.unwrap_or(1);
            (0..len).map(|k| (k / z) % xr).collect()
        });
        Ok(PmfParameterization { kind: spec.kind, u_size: u, factors, relay_map })
    }

    /// Rows drawn uniformly from the simplex; random relay map.
    pub fn random(spec: &ChannelSpec, u_size: Option<usize>, rng: &mut impl Rng) -> Result<Self> {
        let mut p = PmfParameterization::uniform(spec, u_size)?;
        for f in &mut p.factors {
            for r in 0..f.rows() {
                let row = f.row_mut(r);
                let mut total = 0.0;
                for v in row.iter_mut() {
                    *v = -(1.0 - rng.gen::<f64>()).ln();
                    total += *v;
                }
                for v in row.iter_mut() {
                    *v /= total;
                }
            }
        }
        if let (Some(map), Some((_, xr))) = (p.relay_map.as_mut(), map_shape(spec, p.u_size.unwrap_or(1))) {
            for v in map.iter_mut() {
                *v = rng.gen_range(0..xr);
            }
        }
        Ok(p)
    }

    pub fn validate(&self, spec: &ChannelSpec) -> Result<()> {
        if self.kind != spec.kind {
            return Err(Error::KindMismatch { expected: spec.kind.to_string(), found: self.kind.to_string() });
        }
        let u = resolve_u(spec, self.u_size)?;
        if u != self.u_size {
            return Err(Error::InvalidTable("auxiliary size missing or unexpected".into()));
        }
        let shape = layout(spec, u.unwrap_or(1));
        if shape.len() != self.factors.len() {
            return Err(Error::InvalidTable(format!("expected {} factors", shape.len())));
        }
        for ((name, rows, len), f) in shape.iter().zip(&self.factors) {
            if f.row_len != *len || f.values.len() != rows * len {
                return Err(Error::InvalidTable(format!("factor {name} has the wrong shape")));
            }
            for r in 0..*rows {
                let row = f.row(r);
                let total: f64 = row.iter().sum();
                if row.iter().any(|&v| !(v >= 0.0)) || (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                    return Err(Error::NotNormalized(format!("row {r} of {name}")));
                }
            }
        }
        match (map_shape(spec, u.unwrap_or(1)), &self.relay_map) {
            (None, None) => Ok(()),
            (Some((len, xr)), Some(map)) if map.len() == len && map.iter().all(|&v| v < xr) => Ok(()),
            _ => Err(Error::InvalidTable("relay map missing or malformed".into())),
        }
    }
}

/// Axis positions inside the joint built for a relay kind. `c` is the
/// cooperation variable: XR for the delayed kinds, U for the no-delay kind.
#[derive(Debug, Clone, Copy)]
pub struct RelayAxes {
    pub s: usize,
    pub c: usize,
    pub x: usize,
    pub z: usize,
    pub xr: usize,
    pub y: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct MacAxes {
    pub s1: usize,
    pub s2: usize,
    pub u: usize,
    pub x1: usize,
    pub x2: usize,
    pub z1: usize,
    pub z2: usize,
    pub y: usize,
}

#[derive(Debug, Clone, Copy)]
pub enum Axes {
    Relay(RelayAxes),
    Mac(MacAxes),
}

fn cond(given: Vec<Alphabet>, target: &Alphabet, f: &FactorTable) -> Result<Factor> {
    Ok(Factor::Conditional(ConditionalPmf::new(given, target.clone(), f.values.clone())?))
}

/// Joint pmf of all variables induced by `param` on `spec`.
pub fn build_joint(spec: &ChannelSpec, param: &PmfParameterization) -> Result<(JointPmf, Axes)> {
    param.validate(spec)?;
    let f = &param.factors;
    match &spec.model {
        ChannelModel::Relay(r) => {
            let state = Factor::Marginal(r.state.clone());
            let link_sx = |g: &[usize]| r.z_of(g[0], g[1], 0);
            match spec.kind {
                ChannelKind::StateRelayNoDelay => {
                    // Axes: S U X Z XR Y
                    let ua = Alphabet::new("U", param.u_size.unwrap_or(1))?;
                    let map = param.relay_map.as_ref().expect("validated");
                    let zs = r.z.size;
                    let factors = vec![
                        state,
                        Factor::Marginal(Pmf::new(ua.clone(), f[0].values.clone())?),
                        cond(vec![ua.clone(), r.s.clone()], &r.x, &f[1])?,
                        Factor::Conditional(ConditionalPmf::deterministic(
                            vec![r.s.clone(), r.x.clone()],
                            r.z.clone(),
                            link_sx,
                        )?),
                        Factor::Conditional(ConditionalPmf::deterministic(vec![ua, r.z.clone()], r.xr.clone(), |g| {
                            map[g[0] * zs + g[1]]
                        })?),
                        Factor::Conditional(r.channel.clone()),
                    ];
                    let wiring = vec![
                        Wiring::new(vec![], vec![0]),
                        Wiring::new(vec![], vec![1]),
                        Wiring::new(vec![1, 0], vec![2]),
                        Wiring::new(vec![0, 2], vec![3]),
                        Wiring::new(vec![1, 3], vec![4]),
                        Wiring::new(vec![0, 2, 4], vec![5]),
                    ];
                    let j = compose_joint(&factors, &wiring)?;
                    Ok((j, Axes::Relay(RelayAxes { s: 0, c: 1, x: 2, z: 3, xr: 4, y: 5 })))
                }
                _ => {
                    // Axes: S XR X Z Y
                    let inputs = if spec.kind == ChannelKind::Relay {
                        let j = JointPmf::new(vec![r.x.clone(), r.xr.clone()], f[0].values.clone())?;
                        vec![Factor::Joint(j)]
                    } else {
                        vec![
                            Factor::Marginal(Pmf::new(r.xr.clone(), f[0].values.clone())?),
                            cond(vec![r.xr.clone(), r.s.clone()], &r.x, &f[1])?,
                        ]
                    };
                    let input_wiring = if spec.kind == ChannelKind::Relay {
                        vec![Wiring::new(vec![], vec![2, 1])]
                    } else {
                        vec![Wiring::new(vec![], vec![1]), Wiring::new(vec![1, 0], vec![2])]
                    };
                    let mut factors = vec![state];
                    factors.extend(inputs);
                    factors.push(Factor::Conditional(ConditionalPmf::deterministic(
                        vec![r.s.clone(), r.x.clone(), r.xr.clone()],
                        r.z.clone(),
                        |g| r.z_of(g[0], g[1], g[2]),
                    )?));
                    factors.push(Factor::Conditional(r.channel.clone()));
                    let mut wiring = vec![Wiring::new(vec![], vec![0])];
                    wiring.extend(input_wiring);
                    wiring.push(Wiring::new(vec![0, 2, 1], vec![3]));
                    wiring.push(Wiring::new(vec![0, 2, 1], vec![4]));
                    let j = compose_joint(&factors, &wiring)?;
                    Ok((j, Axes::Relay(RelayAxes { s: 0, c: 1, x: 2, z: 3, xr: 1, y: 4 })))
                }
            }
        }
        ChannelModel::Mac(m) => {
            // Axes: S1 S2 U X1 Z1 X2 Z2 Y
            let ua = Alphabet::new("U", param.u_size.unwrap_or(1))?;
            let causal = spec.kind == ChannelKind::StateMacCausal;
            let x2_given =
                if causal { vec![ua.clone(), m.s2.clone(), m.z1.clone()] } else { vec![ua.clone(), m.s2.clone()] };
            let factors = vec![
                Factor::Joint(m.state.clone()),
                Factor::Marginal(Pmf::new(ua.clone(), f[0].values.clone())?),
                cond(vec![ua.clone(), m.s1.clone()], &m.x1, &f[1])?,
                Factor::Conditional(ConditionalPmf::deterministic(
                    vec![m.s1.clone(), m.x1.clone()],
                    m.z1.clone(),
                    |g| m.link1.eval(g),
                )?),
                cond(x2_given, &m.x2, &f[2])?,
                Factor::Conditional(ConditionalPmf::deterministic(
                    vec![m.s2.clone(), m.x2.clone()],
                    m.z2.clone(),
                    |g| m.link2.eval(g),
                )?),
                Factor::Conditional(m.channel.clone()),
            ];
            let wiring = vec![
                Wiring::new(vec![], vec![0, 1]),
                Wiring::new(vec![], vec![2]),
                Wiring::new(vec![2, 0], vec![3]),
                Wiring::new(vec![0, 3], vec![4]),
                Wiring::new(if causal { vec![2, 1, 4] } else { vec![2, 1] }, vec![5]),
                Wiring::new(vec![1, 5], vec![6]),
                Wiring::new(vec![0, 1, 3, 5], vec![7]),
            ];
            let j = compose_joint(&factors, &wiring)?;
            Ok((j, Axes::Mac(MacAxes { s1: 0, s2: 1, u: 2, x1: 3, z1: 4, x2: 5, z2: 6, y: 7 })))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make_toy_spec, random_spec, SpecSizes, ToyChannelParams};
    use crate::rng::{substream, Purpose};

    #[test]
    fn caps_follow_the_bounds() {
        let sizes = SpecSizes { state: 2, input: 2, relay_input: 2, output: 2, link: 2 };
        let mut rng = substream(1, Purpose::Sampling, &[]);
        let nd = random_spec(ChannelKind::StateRelayNoDelay, sizes, &mut rng);
        assert_eq!(cardinality_cap(&nd), Some(2 * 3 + 2));
        let mac = random_spec(ChannelKind::StateMac, sizes, &mut rng);
        // min(4·(2−1) + 4, 4·(4−1) + 3)
        assert_eq!(cardinality_cap(&mac), Some(8));
        assert_eq!(default_u_size(&mac), Some(3));
        assert!(matches!(PmfParameterization::uniform(&mac, Some(9)), Err(Error::CardinalityCap { size: 9, cap: 8 })));
    }

    #[test]
    fn toy_joint_marginals() {
        let spec = make_toy_spec(ToyChannelParams::new(0.4).unwrap());
        let p = PmfParameterization::uniform(&spec, None).unwrap();
        let (j, axes) = build_joint(&spec, &p).unwrap();
        let Axes::Relay(a) = axes else { panic!() };
        let ms = j.marginalize(&[a.s]).unwrap();
        assert!((ms.weights()[2] - 0.6).abs() < 1e-12);
        let sxr = j.marginalize(&[a.s, a.xr]).unwrap();
        for s in 0..3 {
            for xr in 0..2 {
                let w = sxr.weights()[s * 2 + xr];
                assert!((w - ms.weights()[s] * 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kind_mismatch_rejected() {
        let spec = make_toy_spec(ToyChannelParams::new(0.4).unwrap());
        let mut p = PmfParameterization::uniform(&spec, None).unwrap();
        p.kind = ChannelKind::Relay;
        assert!(matches!(build_joint(&spec, &p), Err(Error::KindMismatch { .. })));
    }
}
