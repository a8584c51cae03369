//! Rate-split constraint systems before elimination, and an enumeration
//! check that eliminating the auxiliary rates yields the closed-form regions.

use serde::{Deserialize, Serialize};

use super::objective::{eval_terms, RatePoint, Terms, MEMBERSHIP_TOLERANCE};
use super::param::PmfParameterization;
use crate::channels::ChannelSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub label: String,
    /// One coefficient per system variable.
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// `coeffs . v <= rhs` for every constraint, with all variables nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    pub variables: Vec<String>,
    pub constraints: Vec<LinearConstraint>,
}

impl ConstraintSystem {
    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        values.iter().all(|&v| v >= -tol)
            && self.constraints.iter().all(|c| {
                let lhs: f64 = c.coeffs.iter().zip(values).map(|(a, v)| a * v).sum();
                lhs <= c.rhs + tol
            })
    }

    pub fn rhs(&self, label: &str) -> Option<f64> {
        self.constraints.iter().find(|c| c.label == label).map(|c| c.rhs)
    }
}

fn row(label: &str, coeffs: &[f64], rhs: f64) -> LinearConstraint {
    LinearConstraint { label: label.to_string(), coeffs: coeffs.to_vec(), rhs }
}

/// Relay variables: R', R'', R~. MAC variables: R1', R1'', R1~, R2', R2'', R2~.
pub fn build_constraints(spec: &ChannelSpec, param: &PmfParameterization) -> Result<ConstraintSystem> {
    Ok(match eval_terms(spec, param)? {
        Terms::Relay(t) => ConstraintSystem {
            variables: ["R'", "R''", "R~"].map(String::from).to_vec(),
            constraints: vec![
                row("crib_below_bin", &[1.0, 0.0, -1.0], 0.0),
                row("crib_entropy", &[1.0, 0.0, 0.0], t.crib_entropy),
                row("direct_info", &[0.0, 1.0, 0.0], t.direct_info),
                row("cooperation", &[0.0, 1.0, 1.0], t.total),
            ],
        },
        Terms::Mac(t) => ConstraintSystem {
            variables: ["R1'", "R1''", "R1~", "R2'", "R2''", "R2~"].map(String::from).to_vec(),
            constraints: vec![
                row("crib1_below_bin", &[1.0, 0.0, -1.0, 0.0, 0.0, 0.0], 0.0),
                row("crib1_entropy", &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], t.h1),
                row("crib2_below_bin", &[0.0, 0.0, 0.0, 1.0, 0.0, -1.0], 0.0),
                row("crib2_entropy", &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0], t.h2),
                row("direct2_info", &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0], t.i2),
                row("direct1_info", &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0], t.i1),
                row("direct_sum_info", &[0.0, 1.0, 0.0, 0.0, 1.0, 0.0], t.i12),
                row("cooperation", &[0.0, 1.0, 1.0, 0.0, 1.0, 1.0], t.total),
            ],
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmReport {
    pub consistent: bool,
    pub counterexample: Option<RatePoint>,
    pub points_checked: usize,
    /// Disagreements within one grid step of the boundary, tolerated.
    pub boundary_disagreements: usize,
}

/// Compares the closed-form region with the projection of the split system,
/// both evaluated on a rate grid of spacing `step`. A disagreement counts
/// only when the closed-form verdict is constant on the point's one-step
/// neighborhood.
pub fn fm_consistency_check(spec: &ChannelSpec, param: &PmfParameterization, step: f64) -> Result<FmReport> {
    if !(step > 0.0) {
        return Err(Error::OutOfRange(format!("rate grid step {step} must be positive")));
    }
    let system = build_constraints(spec, param)?;
    let tol = MEMBERSHIP_TOLERANCE;
    let g = |k: i64| k as f64 * step;
    let mut report = FmReport { consistent: true, counterexample: None, points_checked: 0, boundary_disagreements: 0 };
    match eval_terms(spec, param)? {
        Terms::Relay(t) => {
            let cap = t.value();
            let elim = |k: i64| k >= 0 && g(k) <= cap + tol;
            let top = ((t.total.max(t.crib_entropy + t.direct_info)) / step).ceil() as i64 + 2;
            for k in 0..=top {
                let r = g(k);
                let mut aux = false;
                'outer: for a in 0..=k {
                    let (rc, rd) = (g(a), r - g(a));
                    for b in a..=top {
                        if system.is_satisfied(&[rc, rd, g(b)], tol) {
                            aux = true;
                            break 'outer;
                        }
                    }
                }
                report.points_checked += 1;
                if aux != elim(k) {
                    let lo = if k == 0 { elim(0) } else { elim(k - 1) };
                    if lo == elim(k) && elim(k + 1) == elim(k) {
                        report.consistent = false;
                        report.counterexample = Some(RatePoint { r1: r, r2: None });
                        return Ok(report);
                    }
                    report.boundary_disagreements += 1;
                }
            }
        }
        Terms::Mac(t) => {
            let poly = t.polytope();
            let elim = |a: i64, b: i64| a >= 0 && b >= 0 && poly.contains(g(a), g(b));
            let top1 = (poly.r1_max.max(poly.sum_cribbing) / step).ceil() as i64 + 2;
            let top2 = (poly.r2_max.max(poly.sum_cribbing) / step).ceil() as i64 + 2;
            let top_bin = (t.total / step).floor() as i64 + 1;
            for k1 in 0..=top1 {
                for k2 in 0..=top2 {
                    let aux = mac_aux_feasible(&system, k1, k2, top_bin, step);
                    report.points_checked += 1;
                    let here = elim(k1, k2);
                    if aux != here {
                        let mut interior = true;
                        for d1 in -1..=1 {
                            for d2 in -1..=1 {
                                let (a, b) = ((k1 + d1).max(0), (k2 + d2).max(0));
                                interior &= elim(a, b) == here;
                            }
                        }
                        if interior {
                            report.consistent = false;
                            report.counterexample = Some(RatePoint { r1: g(k1), r2: Some(g(k2)) });
                            return Ok(report);
                        }
                        report.boundary_disagreements += 1;
                    }
                }
            }
        }
    }
    Ok(report)
}

fn mac_aux_feasible(system: &ConstraintSystem, k1: i64, k2: i64, top_bin: i64, step: f64) -> bool {
    let g = |k: i64| k as f64 * step;
    let tol = MEMBERSHIP_TOLERANCE;
    let cooperation = system.rhs("cooperation").unwrap_or(f64::INFINITY);
    for a1 in 0..=k1 {
        for a2 in 0..=k2 {
            // Bin rates below the cribbed rates violate the first constraint
            // of each pair; the last constraint only tightens as they grow.
            let fresh = g(k1) - g(a1) + g(k2) - g(a2);
            for b1 in a1..=top_bin {
                for b2 in a2..=top_bin {
                    let v = [g(a1), g(k1) - g(a1), g(b1), g(a2), g(k2) - g(a2), g(b2)];
                    if system.is_satisfied(&v, tol) {
                        return true;
                    }
                    if g(b1) + g(b2) + fresh > cooperation + tol {
                        break;
                    }
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{load_spec, random_spec, ChannelKind, SpecSizes};
    use crate::rng::{substream, Purpose};
    use approx::assert_abs_diff_eq;

    const CRIB_DOC: &str = r#"{
        "schema": 1, "kind": "relay",
        "alphabets": {"X": 2, "XR": 2, "Y": 2, "Z": 2},
        "channel": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]],
        "det_links": {"z": [[0, 0], [1, 1]]}
    }"#;

    #[test]
    fn relay_rhs_values() {
        let spec = load_spec(CRIB_DOC).unwrap();
        let p = PmfParameterization::uniform(&spec, None).unwrap();
        let sys = build_constraints(&spec, &p).unwrap();
        assert_abs_diff_eq!(sys.rhs("crib_entropy").unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sys.rhs("direct_info").unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sys.rhs("cooperation").unwrap(), 1.0, epsilon = 1e-12);
        let report = fm_consistency_check(&spec, &p, 0.05).unwrap();
        assert!(report.consistent);
        assert!(report.points_checked >= 21);
    }

    #[test]
    fn constant_link_forces_zero_crib_rate() {
        let doc = CRIB_DOC.replace("[[0, 0], [1, 1]]", "[[0, 0], [0, 0]]");
        let spec = load_spec(&doc).unwrap();
        let p = PmfParameterization::uniform(&spec, None).unwrap();
        let sys = build_constraints(&spec, &p).unwrap();
        assert_eq!(sys.rhs("crib_entropy").unwrap(), 0.0);
        assert!(!sys.is_satisfied(&[0.1, 0.0, 0.1], 1e-12));
        assert!(sys.is_satisfied(&[0.0, 0.0, 0.0], 1e-12));
    }

    #[test]
    fn mac_has_eight_constraints() {
        let sizes = SpecSizes { state: 2, input: 2, relay_input: 1, output: 2, link: 2 };
        let mut rng = substream(2, Purpose::Sampling, &[]);
        let spec = random_spec(ChannelKind::StateMac, sizes, &mut rng);
        let p = PmfParameterization::random(&spec, None, &mut rng).unwrap();
        let sys = build_constraints(&spec, &p).unwrap();
        assert_eq!(sys.constraints.len(), 8);
        assert_eq!(sys.variables.len(), 6);
        assert!(fm_consistency_check(&spec, &p, 0.1).unwrap().consistent);
    }

    #[test]
    fn origin_is_member_on_both_sides() {
        let sizes = SpecSizes { state: 1, input: 2, relay_input: 2, output: 2, link: 2 };
        let mut rng = substream(4, Purpose::Sampling, &[]);
        let spec = random_spec(ChannelKind::Relay, sizes, &mut rng);
        let p = PmfParameterization::random(&spec, None, &mut rng).unwrap();
        let sys = build_constraints(&spec, &p).unwrap();
        assert!(sys.is_satisfied(&[0.0; 3], 0.0));
    }
}
