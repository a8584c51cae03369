//! Conditional laws used to draw codewords, derived from the joint pmf an
//! input distribution induces on a channel.
//!
//! Relay kinds have one encoder, MAC kinds two. Each encoder `j` has a
//! cribbed law `p(z_j | c, s_j, ctx)` and a transmission law
//! `p(x_j | c, s_j, ctx, z_j)`, where `c` is the cooperation symbol (XR or U)
//! and `ctx` is the other encoder's cribbed symbol for the second encoder of
//! the causal-cribbing MAC (size one otherwise).

use crate::capacity::{build_joint, Axes, PmfParameterization};
use crate::channels::{ChannelKind, ChannelModel, ChannelSpec};
use crate::probability::JointPmf;
use crate::Result;

#[derive(Debug, Clone)]
pub struct EncoderLaw {
    pub state_size: usize,
    pub z_size: usize,
    pub x_size: usize,
    /// Size of the causal context; 1 when absent.
    pub ctx_size: usize,
    /// Rows over z, indexed [c][s][ctx].
    pub crib: Vec<f64>,
    /// Rows over x, indexed [c][s][ctx][z].
    pub trans: Vec<f64>,
}

impl EncoderLaw {
    pub fn crib_row(&self, c: usize, s: usize, ctx: usize) -> &[f64] {
        let r = (c * self.state_size + s) * self.ctx_size + ctx;
        &self.crib[r * self.z_size..(r + 1) * self.z_size]
    }

    pub fn trans_row(&self, c: usize, s: usize, ctx: usize, z: usize) -> &[f64] {
        let r = ((c * self.state_size + s) * self.ctx_size + ctx) * self.z_size + z;
        &self.trans[r * self.x_size..(r + 1) * self.x_size]
    }
}

#[derive(Debug, Clone)]
pub struct SchemeLaws {
    pub kind: ChannelKind,
    pub coop_size: usize,
    pub coop: Vec<f64>,
    pub encoders: Vec<EncoderLaw>,
    /// Relay map xr(c, z), row-major; identity in c for the delayed kinds.
    pub relay_map: Vec<usize>,
    /// Reference pmf for decoding, axes ordered
    /// `[C, S_1.., Z_1.., X_1.., Y]` (one S, Z, X per encoder).
    pub reference: JointPmf,
}

/// `p(target | given)` rows from a joint, axes given by index. Rows with zero
/// mass are set uniform; they are never sampled.
fn conditional(j: &JointPmf, given: &[usize], target: usize) -> Vec<f64> {
    let mut axes = given.to_vec();
    axes.push(target);
    let w = j.marginal_weights(&axes);
    let t = j.axes()[target].size;
    let mut out = Vec::with_capacity(w.len());
    for row in w.chunks(t) {
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            out.extend(row.iter().map(|v| v / total));
        } else {
            out.extend(std::iter::repeat_n(1.0 / t as f64, t));
        }
    }
    out
}

impl SchemeLaws {
    pub fn new(spec: &ChannelSpec, param: &PmfParameterization) -> Result<Self> {
        let (j, axes) = build_joint(spec, param)?;
        match (axes, &spec.model) {
            (Axes::Relay(a), ChannelModel::Relay(r)) => {
                let coop = j.marginal_weights(&[a.c]);
                let enc = EncoderLaw {
                    state_size: r.s.size,
                    z_size: r.z.size,
                    x_size: r.x.size,
                    ctx_size: 1,
                    crib: conditional(&j, &[a.c, a.s], a.z),
                    trans: conditional(&j, &[a.c, a.s, a.z], a.x),
                };
                let relay_map = match &param.relay_map {
                    Some(m) => m.clone(),
                    None => (0..r.xr.size).flat_map(|c| std::iter::repeat_n(c, r.z.size)).collect(),
                };
                let order = [a.c, a.s, a.z, a.x, a.y];
                let reference = j.marginalize(&order)?;
                Ok(SchemeLaws {
                    kind: spec.kind,
                    coop_size: coop.len(),
                    coop,
                    encoders: vec![enc],
                    relay_map,
                    reference,
                })
            }
            (Axes::Mac(a), ChannelModel::Mac(m)) => {
                let coop = j.marginal_weights(&[a.u]);
                let causal = spec.kind == ChannelKind::StateMacCausal;
                let enc1 = EncoderLaw {
                    state_size: m.s1.size,
                    z_size: m.z1.size,
                    x_size: m.x1.size,
                    ctx_size: 1,
                    crib: conditional(&j, &[a.u, a.s1], a.z1),
                    trans: conditional(&j, &[a.u, a.s1, a.z1], a.x1),
                };
                let enc2 = if causal {
                    EncoderLaw {
                        state_size: m.s2.size,
                        z_size: m.z2.size,
                        x_size: m.x2.size,
                        ctx_size: m.z1.size,
                        crib: conditional(&j, &[a.u, a.s2, a.z1], a.z2),
                        trans: conditional(&j, &[a.u, a.s2, a.z1, a.z2], a.x2),
                    }
                } else {
                    EncoderLaw {
                        state_size: m.s2.size,
                        z_size: m.z2.size,
                        x_size: m.x2.size,
                        ctx_size: 1,
                        crib: conditional(&j, &[a.u, a.s2], a.z2),
                        trans: conditional(&j, &[a.u, a.s2, a.z2], a.x2),
                    }
                };
                let order = [a.u, a.s1, a.s2, a.z1, a.z2, a.x1, a.x2, a.y];
                let reference = j.marginalize(&order)?;
                Ok(SchemeLaws {
                    kind: spec.kind,
                    coop_size: coop.len(),
                    coop,
                    encoders: vec![enc1, enc2],
                    relay_map: Vec::new(),
                    reference,
                })
            }
            _ => unreachable!("joint axes follow the channel model"),
        }
    }

    pub fn users(&self) -> usize {
        self.encoders.len()
    }

    pub fn causal(&self) -> bool {
        self.kind == ChannelKind::StateMacCausal
    }

    pub fn relay_input(&self, c: usize, z: usize, z_size: usize) -> usize {
        self.relay_map[c * z_size + z]
    }
}
