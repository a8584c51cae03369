//! Evaluation of the capacity expressions for one input distribution.

use serde::{Deserialize, Serialize};

use super::param::{build_joint, Axes, PmfParameterization};
use crate::channels::{ChannelKind, ChannelSpec};
use crate::probability::{entropy, mutual_information};
use crate::Result;

/// Numerical slack for membership tests.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
}

/// Information terms of a relay expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayTerms {
    /// I(X,XR;Y|S), or I(U,X;Y|S) for the no-delay kind.
    pub total: f64,
    /// H(Z|S,XR), or H(Z|U,S).
    pub crib_entropy: f64,
    /// I(X;Y|S,XR,Z), or I(X;Y|U,Z,S).
    pub direct_info: f64,
}

impl RelayTerms {
    pub fn value(&self) -> f64 {
        self.total.min(self.crib_entropy + self.direct_info)
    }
}

/// Information terms of a MAC region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacTerms {
    /// H(Z1|U,S1).
    pub h1: f64,
    /// H(Z2|U,S2), or H(Z2|U,S2,Z1) for causal cribbing.
    pub h2: f64,
    /// H(Z1,Z2|U,S1,S2).
    pub h12: f64,
    /// I(X1;Y|U,X2,Z1,S1,S2).
    pub i1: f64,
    /// I(X2;Y|U,X1,Z2,S1,S2).
    pub i2: f64,
    /// I(X1,X2;Y|U,Z1,Z2,S1,S2).
    pub i12: f64,
    /// I(X1,X2;Y|S1,S2).
    pub total: f64,
}

impl MacTerms {
    pub fn polytope(&self) -> MacPolytope {
        MacPolytope {
            r1_max: self.i1 + self.h1,
            r2_max: self.i2 + self.h2,
            sum_cribbing: self.i12 + self.h12,
            sum_total: self.total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveConstraint {
    R1,
    R2,
    SumCribbing,
    SumTotal,
}

impl ActiveConstraint {
    pub fn name(self) -> &'static str {
        match self {
            ActiveConstraint::R1 => "r1",
            ActiveConstraint::R2 => "r2",
            ActiveConstraint::SumCribbing => "sum_cribbing",
            ActiveConstraint::SumTotal => "sum_total",
        }
    }
}

/// { R1 <= r1_max, R2 <= r2_max, R1+R2 <= sum_cribbing, R1+R2 <= sum_total, R >= 0 }.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacPolytope {
    pub r1_max: f64,
    pub r2_max: f64,
    pub sum_cribbing: f64,
    pub sum_total: f64,
}

impl MacPolytope {
    pub fn sum_max(&self) -> f64 {
        self.sum_cribbing.min(self.sum_total)
    }

    fn sum_label(&self) -> ActiveConstraint {
        if self.sum_cribbing < self.sum_total {
            ActiveConstraint::SumCribbing
        } else {
            ActiveConstraint::SumTotal
        }
    }

    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        let t = MEMBERSHIP_TOLERANCE;
        r1 >= -t && r2 >= -t && r1 <= self.r1_max + t && r2 <= self.r2_max + t && r1 + r2 <= self.sum_max() + t
    }

    /// Largest R1 in the polytope.
    pub fn r1_extent(&self) -> f64 {
        self.r1_max.min(self.sum_max()).max(0.0)
    }

    /// Largest R2 compatible with `r1`, and the constraint that binds.
    pub fn r2_at(&self, r1: f64) -> Option<(f64, ActiveConstraint)> {
        if r1 < -MEMBERSHIP_TOLERANCE || r1 > self.r1_extent() + MEMBERSHIP_TOLERANCE {
            return None;
        }
        let by_sum = self.sum_max() - r1;
        if self.r2_max <= by_sum {
            Some((self.r2_max.max(0.0), ActiveConstraint::R2))
        } else {
            Some((by_sum.max(0.0), self.sum_label()))
        }
    }

    /// max of w*R1 + (1-w)*R2 over the polytope.
    pub fn support(&self, w: f64) -> f64 {
        let a = self.r1_extent();
        let b = self.r2_max.min(self.sum_max()).max(0.0);
        let s = self.sum_max().max(0.0);
        let corners = [(0.0, 0.0), (a, 0.0), (0.0, b), (a, b.min(s - a).max(0.0)), (a.min(s - b).max(0.0), b)];
        corners.iter().map(|&(x, y)| w * x + (1.0 - w) * y).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Terms {
    Relay(RelayTerms),
    Mac(MacTerms),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    Rate(f64),
    Region(MacPolytope),
}

pub fn eval_terms(spec: &ChannelSpec, param: &PmfParameterization) -> Result<Terms> {
    let (j, axes) = build_joint(spec, param)?;
    match axes {
        Axes::Relay(a) => {
            let inputs = [a.c, a.x];
            let total = mutual_information(&j, &inputs, &[a.y], &[a.s])?;
            let crib_entropy = entropy(&j, &[a.z], &[a.s, a.c])?;
            let direct_info = mutual_information(&j, &[a.x], &[a.y], &[a.s, a.c, a.z])?;
            Ok(Terms::Relay(RelayTerms { total, crib_entropy, direct_info }))
        }
        Axes::Mac(a) => {
            let h2_given: Vec<usize> =
                if spec.kind == ChannelKind::StateMacCausal { vec![a.u, a.s2, a.z1] } else { vec![a.u, a.s2] };
            Ok(Terms::Mac(MacTerms {
                h1: entropy(&j, &[a.z1], &[a.u, a.s1])?,
                h2: entropy(&j, &[a.z2], &h2_given)?,
                h12: entropy(&j, &[a.z1, a.z2], &[a.u, a.s1, a.s2])?,
                i1: mutual_information(&j, &[a.x1], &[a.y], &[a.u, a.x2, a.z1, a.s1, a.s2])?,
                i2: mutual_information(&j, &[a.x2], &[a.y], &[a.u, a.x1, a.z2, a.s1, a.s2])?,
                i12: mutual_information(&j, &[a.x1, a.x2], &[a.y], &[a.u, a.z1, a.z2, a.s1, a.s2])?,
                total: mutual_information(&j, &[a.x1, a.x2], &[a.y], &[a.s1, a.s2])?,
            }))
        }
    }
}

/// Relay kinds: the min of the two terms. MAC kinds: the rate polytope.
pub fn eval_objective(spec: &ChannelSpec, param: &PmfParameterization) -> Result<Objective> {
    Ok(match eval_terms(spec, param)? {
        Terms::Relay(t) => Objective::Rate(t.value()),
        Terms::Mac(t) => Objective::Region(t.polytope()),
    })
}
