//! Reductions between setups that must produce matching answers.

use serde::{Deserialize, Serialize};

use super::objective::{eval_terms, Terms};
use super::param::PmfParameterization;
use super::solver::{solve, SolverSettings};
use crate::channels::{ChannelKind, ChannelSpec};
use crate::rng::{substream, Purpose};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialCaseOutcome {
    pub name: String,
    pub left: f64,
    pub right: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn outcome(name: &str, left: f64, right: f64, difference: f64, tolerance: f64) -> SpecialCaseOutcome {
    SpecialCaseOutcome { name: name.to_string(), left, right, difference, tolerance, passed: difference <= tolerance }
}

fn expect_kind(spec: &ChannelSpec, kind: ChannelKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::PairingMismatch(format!("expected a {kind} spec, got {}", spec.kind)));
    }
    Ok(())
}

/// A single-state state-dependent relay against the stateless relay with the same channel.
pub fn compare_single_state_relay(
    state_relay: &ChannelSpec,
    relay: &ChannelSpec,
    settings: &SolverSettings,
    tolerance: f64,
) -> Result<SpecialCaseOutcome> {
    expect_kind(state_relay, ChannelKind::StateRelay)?;
    expect_kind(relay, ChannelKind::Relay)?;
    let (a, b) = (state_relay.relay().expect("relay"), relay.relay().expect("relay"));
    if a.s.size != 1 || a.channel.table() != b.channel.table() || a.link.values() != b.link.values() {
        return Err(Error::PairingMismatch("specs must share the channel and have one state".into()));
    }
    let left = solve(state_relay, settings)?.capacity().expect("relay kind");
    let right = solve(relay, settings)?.capacity().expect("relay kind");
    Ok(outcome("single_state_relay", left, right, (left - right).abs(), tolerance))
}

/// Causal cribbing with p(x2|u,s2,z1) forced to ignore z1, against strictly
/// causal cribbing on the same channel. Compares boundaries.
pub fn compare_restricted_causal_mac(
    causal: &ChannelSpec,
    strict: &ChannelSpec,
    settings: &SolverSettings,
    tolerance: f64,
) -> Result<SpecialCaseOutcome> {
    expect_kind(causal, ChannelKind::StateMacCausal)?;
    expect_kind(strict, ChannelKind::StateMac)?;
    if causal.model != strict.model {
        return Err(Error::PairingMismatch("specs must share the channel".into()));
    }
    let restricted = SolverSettings { tie_x2_across_z1: true, ..settings.clone() };
    let a = solve(causal, &restricted)?;
    let b = solve(strict, &SolverSettings { tie_x2_across_z1: false, ..settings.clone() })?;
    let (ra, rb) = (a.region().expect("mac kind"), b.region().expect("mac kind"));
    let d = ra.boundary_distance(rb, settings.boundary_step);
    Ok(outcome("restricted_causal_mac", ra.max_sum_rate(), rb.max_sum_rate(), d, tolerance))
}

/// Without cribbing links the cribbing sum-rate bound never undercuts the
/// total one by more than `tolerance`. Checked on random distributions.
pub fn check_no_cribbing(mac: &ChannelSpec, samples: usize, seed: u64, tolerance: f64) -> Result<SpecialCaseOutcome> {
    expect_kind(mac, ChannelKind::StateMac)?;
    let m = mac.mac().expect("mac");
    if m.z1.size != 1 || m.z2.size != 1 {
        return Err(Error::PairingMismatch("cribbing links must be constant".into()));
    }
    let mut rng = substream(seed, Purpose::Sampling, &[]);
    let mut worst: f64 = 0.0;
    let (mut left, mut right) = (0.0, 0.0);
    for _ in 0..samples {
        let p = PmfParameterization::random(mac, None, &mut rng)?;
        if let Terms::Mac(t) = eval_terms(mac, &p)? {
            let gap = t.i12 + t.h12 - t.total;
            if gap >= worst {
                worst = gap;
                left = t.i12 + t.h12;
                right = t.total;
            }
        }
    }
    Ok(outcome("no_cribbing_sum_bound", left, right, worst, tolerance))
}

/// Specs for the documented reductions. Absent entries are skipped.
#[derive(Debug, Clone, Default)]
pub struct SpecialCasePairings {
    pub single_state_relay: Option<(ChannelSpec, ChannelSpec)>,
    pub restricted_causal_mac: Option<(ChannelSpec, ChannelSpec)>,
    pub no_cribbing_mac: Option<ChannelSpec>,
}

pub fn special_case_checks(
    pairings: &SpecialCasePairings,
    settings: &SolverSettings,
) -> Result<Vec<SpecialCaseOutcome>> {
    let mut out = Vec::new();
    if let Some((a, b)) = &pairings.single_state_relay {
        out.push(compare_single_state_relay(a, b, settings, 0.02)?);
    }
    if let Some((a, b)) = &pairings.restricted_causal_mac {
        out.push(compare_restricted_causal_mac(a, b, settings, 0.02)?);
    }
    if let Some(m) = &pairings.no_cribbing_mac {
        out.push(check_no_cribbing(m, 50, settings.seed, 1e-9)?);
    }
    Ok(out)
}
