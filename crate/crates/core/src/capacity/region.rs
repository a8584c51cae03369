//! Rate regions as unions of per-distribution polytopes.

use serde::{Deserialize, Serialize};

use super::objective::{ActiveConstraint, MacPolytope, MEMBERSHIP_TOLERANCE};
use super::param::PmfParameterization;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub r1: f64,
    pub r2: f64,
    pub active: ActiveConstraint,
}

/// A distribution that contributed a polytope, with the sweep weight that found it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    pub polytope: MacPolytope,
    pub param: PmfParameterization,
}

/// Downward closure of a union of polytopes, with its upper boundary sampled
/// on an r1 grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub generators: Vec<Generator>,
    pub boundary: Vec<BoundaryPoint>,
}

impl RateRegion {
    pub fn new(generators: Vec<Generator>, r1_step: f64) -> Self {
        let mut region = RateRegion { generators, boundary: Vec::new() };
        let extent = region.r1_extent();
        let steps = (extent / r1_step + MEMBERSHIP_TOLERANCE).floor() as usize;
        for k in 0..=steps {
            let r1 = k as f64 * r1_step;
            if let Some((r2, active)) = region.r2_at(r1) {
                region.boundary.push(BoundaryPoint { r1, r2, active });
            }
        }
        let last = steps as f64 * r1_step;
        if extent - last > MEMBERSHIP_TOLERANCE {
            if let Some((r2, active)) = region.r2_at(extent) {
                region.boundary.push(BoundaryPoint { r1: extent, r2, active });
            }
        }
        region
    }

    pub fn polytopes(&self) -> impl Iterator<Item = &MacPolytope> {
        self.generators.iter().map(|g| &g.polytope)
    }

    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        self.polytopes().any(|p| p.contains(r1, r2))
    }

    pub fn r1_extent(&self) -> f64 {
        self.polytopes().map(MacPolytope::r1_extent).fold(0.0, f64::max)
    }

    /// Largest R2 at `r1` over all polytopes. Ties keep the first polytope.
    pub fn r2_at(&self, r1: f64) -> Option<(f64, ActiveConstraint)> {
        let mut best: Option<(f64, ActiveConstraint)> = None;
        for p in self.polytopes() {
            if let Some((r2, a)) = p.r2_at(r1) {
                if best.is_none_or(|(b, _)| r2 > b + MEMBERSHIP_TOLERANCE) {
                    best = Some((r2, a));
                }
            }
        }
        best
    }

    pub fn max_sum_rate(&self) -> f64 {
        self.polytopes().map(|p| p.support(0.5) * 2.0).fold(0.0, f64::max)
    }

    /// Largest |r2 difference| between two regions on a common r1 grid.
    pub fn boundary_distance(&self, other: &RateRegion, r1_step: f64) -> f64 {
        let extent = self.r1_extent().max(other.r1_extent());
        let steps = (extent / r1_step).ceil() as usize;
        let r2 = |r: &RateRegion, r1: f64| r.r2_at(r1).map_or(0.0, |(v, _)| v);
        let mut worst = (self.r1_extent() - other.r1_extent()).abs();
        for k in 0..=steps {
            let r1 = (k as f64 * r1_step).min(extent);
            worst = worst.max((r2(self, r1) - r2(other, r1)).abs());
        }
        worst
    }
}
