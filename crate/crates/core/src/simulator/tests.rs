use super::*;
use crate::capacity::PmfParameterization;
use crate::channels::{load_spec, make_toy_spec, random_spec, ChannelKind, SpecSizes, ToyChannelParams};
use crate::rng::Key;
use proptest::prelude::*;
use rand::Rng;

fn toy() -> (ChannelSpec, PmfParameterization) {
    let spec = make_toy_spec(ToyChannelParams::new(0.4).unwrap());
    let param = PmfParameterization::uniform(&spec, None).unwrap();
    (spec, param)
}

fn split(crib: f64, direct: f64, bin: f64) -> RateSplit {
    RateSplit { crib, direct, bin }
}

fn mac(kind: ChannelKind, seed: u64) -> (ChannelSpec, PmfParameterization) {
    let sizes = SpecSizes { state: 2, input: 2, relay_input: 1, output: 3, link: 2 };
    let mut rng = substream(seed, Purpose::Sampling, &[]);
    let spec = random_spec(kind, sizes, &mut rng);
    let param = PmfParameterization::random(&spec, Some(2), &mut rng).unwrap();
    (spec, param)
}

#[test]
fn toy_cooperation_codebook_size() {
    let (spec, param) = toy();
    let cfg = SchemeConfig::new(8, 3, vec![split(0.25, 0.0, 0.25)]);
    let scheme = Scheme::new(&spec, &param, &cfg).unwrap();
    assert_eq!(generate_codebooks(&scheme, 0, 0).coop_count(), 4);
}

#[test]
fn zero_crib_rate_gives_one_word() {
    let (spec, param) = toy();
    let cfg = SchemeConfig::new(8, 3, vec![split(0.0, 0.0, 0.5)]);
    let scheme = Scheme::new(&spec, &param, &cfg).unwrap();
    assert_eq!(scheme.counts[0].crib, 1);
}

#[test]
fn budget_is_enforced() {
    let (spec, param) = toy();
    let mut cfg = SchemeConfig::new(16, 3, vec![split(0.9, 0.0, 0.9)]);
    cfg.budget = 1 << 16;
    assert!(Scheme::new(&spec, &param, &cfg).unwrap_err().is_budget());
}

#[test]
fn transmission_symbols_follow_their_row() {
    let doc = r#"{"schema": 1, "kind": "relay",
        "alphabets": {"X": 3, "XR": 2, "Y": 2, "Z": 1},
        "channel": [[[1, 0], [0, 1]], [[1, 0], [0, 1]], [[0.5, 0.5], [0.5, 0.5]]],
        "det_links": {"z": [[0, 0], [0, 0], [0, 0]]}}"#;
    let spec = load_spec(doc).unwrap();
    let mut param = PmfParameterization::uniform(&spec, None).unwrap();
    // p(x, xr) with xr uniform and x | xr = (0.2, 0.5, 0.3).
    param.factors[0].values = vec![0.1, 0.1, 0.25, 0.25, 0.15, 0.15];
    let cfg = SchemeConfig::new(1, 1, vec![split(0.0, 0.0, 0.0)]);
    let scheme = Scheme::new(&spec, &param, &cfg).unwrap();
    let expected = [0.2, 0.5, 0.3];
    let draws = 10_000;
    let mut hist = [0usize; 3];
    for d in 0..draws {
        let cb = CodebookSet { key: Key(d as u64), ..scheme.codebooks(0, 0) };
        hist[cb.trans_symbol(0, 0, 1, 0, 0, 0, 0, 0, 0)] += 1;
    }
    // Oracle: binomial counts per symbol.
    for (h, p) in hist.iter().zip(expected) {
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        assert!((*h as f64 - draws as f64 * p).abs() <= 3.0 * sigma, "{hist:?}");
    }
}

#[test]
fn last_block_sends_pinned_codeword() {
    let (spec, param) = toy();
    let cfg = SchemeConfig::new(10, 3, vec![split(0.3, 0.0, 0.5)]);
    let scheme = Scheme::new(&spec, &param, &cfg).unwrap();
    let cb = scheme.codebooks(5, 2);
    let states = vec![vec![2, 0, 1, 2, 2, 2, 0, 2, 1, 2]];
    let input = EncoderInput { l_prev: vec![3], messages: vec![(0, 0)], states: states.clone() };
    let enc = scheme.encode_block(&cb, &input).unwrap();
    let coop = cb.coop_word(3);
    let z = cb.crib_word(0, 3, &coop, &states[0], None, 0);
    assert_eq!(enc.x[0], cb.trans_word(0, 3, &coop, 0, &states[0], None, &z, 0));
    assert_eq!(enc.xr.as_ref().unwrap(), &coop);
}

#[test]
fn toy_link_reproduces_cribbed_codeword() {
    let (spec, param) = toy();
    let cfg = SchemeConfig::new(12, 3, vec![split(0.4, 0.0, 0.6)]);
    let scheme = Scheme::new(&spec, &param, &cfg).unwrap();
    let cb = scheme.codebooks(1, 0);
    let input = EncoderInput { l_prev: vec![0], messages: vec![(7, 0)], states: vec![vec![2; 12]] };
    let enc = scheme.encode_block(&cb, &input).unwrap();
    assert_eq!(enc.z[0], enc.crib_words[0]);
    assert_eq!(enc.x[0], enc.z[0]);
}

#[test]
fn encoder_rejects_bad_indices() {
    let (spec, param) = toy();
    let cfg = SchemeConfig::new(6, 2, vec![split(0.0, 0.0, 0.5)]);
    let scheme = Scheme::new(&spec, &param, &cfg).unwrap();
    let cb = scheme.codebooks(0, 0);
    let bad = EncoderInput { l_prev: vec![99], messages: vec![(0, 0)], states: vec![vec![0; 6]] };
    assert!(matches!(scheme.encode_block(&cb, &bad), Err(Error::OutOfRange(_))));
    let short = EncoderInput { l_prev: vec![0], messages: vec![(0, 0)], states: vec![vec![0; 5]] };
    assert!(matches!(scheme.encode_block(&cb, &short), Err(Error::LengthMismatch(_))));
}

#[test]
fn mac_parties_agree_on_labels() {
    for kind in [ChannelKind::StateMac, ChannelKind::StateMacCausal] {
        let (spec, param) = mac(kind, 11);
        let cfg = SchemeConfig::new(8, 2, vec![split(0.25, 0.125, 0.5), split(0.25, 0.0, 0.5)]);
        let scheme = Scheme::new(&spec, &param, &cfg).unwrap();
        for trial in 0..100u64 {
            let mut rng = substream(trial, Purpose::Sampling, &[]);
            let cb = scheme.codebooks(trial, 0);
            let input = EncoderInput {
                l_prev: vec![rng.gen_range(0..16), rng.gen_range(0..16)],
                messages: vec![(rng.gen_range(0..4), rng.gen_range(0..2)), (rng.gen_range(0..4), 0)],
                states: draw_states(&spec, 8, &mut rng),
            };
            let enc = scheme.encode_block(&cb, &input).unwrap();
            assert_eq!(enc.l_next_by_party[0], enc.l_next_by_party[1]);
            assert_eq!(enc.z, enc.crib_words);
        }
    }
}

#[test]
fn encoding_is_causal_in_states() {
    for (spec, param) in [toy(), mac(ChannelKind::StateMacCausal, 3), mac(ChannelKind::StateMac, 4)] {
        let users = if spec.kind.is_relay() { 1 } else { 2 };
        let rates = vec![split(0.3, 0.2, 0.5); users];
        let cfg = SchemeConfig::new(10, 2, rates);
        let scheme = Scheme::new(&spec, &param, &cfg).unwrap();
        let cb = scheme.codebooks(2, 1);
        let mut rng = substream(8, Purpose::Sampling, &[]);
        for _ in 0..20 {
            let states = draw_states(&spec, 10, &mut rng);
            let input = EncoderInput { l_prev: vec![1; users], messages: vec![(2, 1); users], states };
            let base = scheme.encode_block(&cb, &input).unwrap();
            let cut = rng.gen_range(0..10);
            let mut altered = input.clone();
            let fresh = draw_states(&spec, 10, &mut rng);
            for (seq, f) in altered.states.iter_mut().zip(&fresh) {
                seq[cut..].copy_from_slice(&f[cut..]);
            }
            let other = scheme.encode_block(&cb, &altered).unwrap();
            for j in 0..users {
                assert_eq!(base.x[j][..cut], other.x[j][..cut]);
                assert_eq!(base.z[j][..cut], other.z[j][..cut]);
            }
        }
    }
}

#[test]
fn single_block_frame_decodes() {
    let (spec, param) = toy();
    let mut cfg = SchemeConfig::new(8, 1, vec![split(0.0, 0.0, 0.0)]);
    cfg.epsilon = 1.0;
    cfg.trials = 20;
    let r = run_trials(&spec, &param, &cfg).unwrap();
    assert_eq!(r.block_error_rate, 0.0);
    assert_eq!(r.rows.len(), 20);
}

#[test]
fn runs_are_reproducible() {
    let (spec, param) = mac(ChannelKind::StateMacCausal, 5);
    let mut cfg = SchemeConfig::new(6, 3, vec![split(0.3, 0.2, 0.5), split(0.2, 0.2, 0.5)]);
    cfg.trials = 12;
    cfg.master_seed = 77;
    cfg.keep_transcripts = true;
    let a = run_trials(&spec, &param, &cfg).unwrap();
    let b = run_trials(&spec, &param, &cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.transcripts.len(), 12);
    cfg.master_seed = 78;
    let c = run_trials(&spec, &param, &cfg).unwrap();
    assert_ne!(a.rows, c.rows);
}

#[test]
fn forwarding_step_one_recovers_crib_message() {
    // Bins outnumber messages, so step 1 at the true label rarely errs.
    let (spec, param) = toy();
    let mut cfg = SchemeConfig::new(12, 3, vec![split(0.25, 0.0, 0.75)]);
    cfg.trials = 200;
    let r = run_trials(&spec, &param, &cfg).unwrap();
    assert!(1.0 - r.event_rates[0] >= 0.9, "{:?}", r.event_rates);
}

#[test]
fn corrupted_output_is_rejected() {
    let (spec, param) = toy();
    let mut cfg = SchemeConfig::new(12, 3, vec![split(0.25, 0.0, 0.25)]);
    cfg.trials = 200;
    cfg.corrupt_block = Some(2);
    cfg.keep_transcripts = true;
    let r = run_trials(&spec, &param, &cfg).unwrap();
    let failures = r.transcripts.iter().filter(|t| t.blocks[1].decoded.outcome != Step2Outcome::Unique).count();
    assert!(failures as f64 >= 0.95 * 200.0, "{failures}");
}

#[test]
fn zero_rates_fail_only_through_atypicality() {
    let (spec, param) = toy();
    let mut cfg = SchemeConfig::new(12, 3, vec![split(0.0, 0.0, 0.0)]);
    cfg.epsilon = 0.25;
    cfg.trials = 200;
    let r = run_trials(&spec, &param, &cfg).unwrap();
    assert!(r.block_error_rate <= 0.2, "{}", r.block_error_rate);
    assert_eq!(r.event_rates[0], 0.0);
    assert_eq!(r.event_rates[2], 0.0);
    assert!((r.block_error_rate - r.event_rates[1]).abs() < 1e-12);
}

#[test]
fn collision_frequency_matches_union_bound() {
    let (spec, param) = toy();
    let mut cfg = SchemeConfig::new(12, 4, vec![split(0.3, 0.0, 0.6)]);
    cfg.trials = 300;
    let r = run_trials(&spec, &param, &cfg).unwrap();
    let c = &r.collisions;
    assert!(c.instances > 300);
    assert!(c.within_sigmas(3.0), "{} vs {} (sigma {})", c.frequency(), c.predicted(), c.sigma());
}

#[test]
fn longer_blocks_do_not_hurt() {
    let (spec, param) = toy();
    let rates = vec![split(0.3, 0.0, 0.6)];
    let mut short = SchemeConfig::new(8, 3, rates.clone());
    short.trials = 200;
    short.master_seed = 4;
    let mut long = SchemeConfig { n: 14, ..short.clone() };
    long.trials = 200;
    let a = run_trials(&spec, &param, &short).unwrap();
    let b = run_trials(&spec, &param, &long).unwrap();
    assert!(b.block_error_rate <= a.block_error_rate + 0.05, "{} vs {}", b.block_error_rate, a.block_error_rate);
}

#[test]
fn default_split_respects_terms() {
    let (spec, param) = toy();
    let s = default_split(&spec, &param, &[0.42]).unwrap();
    assert!((s[0].crib - 0.42).abs() < 1e-12);
    assert_eq!(s[0].direct, 0.0);
    // Cooperation: I(X,XR;Y|S) = 1 here.
    assert!((s[0].bin - (0.42 + 0.58 / 2.0)).abs() < 1e-12);
    let over = default_split(&spec, &param, &[0.72]).unwrap();
    assert!((over[0].crib - 0.54).abs() < 1e-12);
    assert!((over[0].direct - 0.18).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn event_rates_bound_errors(seed in 0u64..1000, crib in 0.0f64..0.5, bin_extra in 0.0f64..0.4) {
        let (spec, param) = toy();
        let mut cfg = SchemeConfig::new(8, 3, vec![split(crib, 0.0, crib + bin_extra)]);
        cfg.trials = 10;
        cfg.master_seed = seed;
        let r = run_trials(&spec, &param, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.block_error_rate));
        let sum: f64 = r.event_rates.iter().sum::<f64>() + r.propagated_rate;
        for e in r.event_rates {
            prop_assert!((0.0..=1.0).contains(&e));
        }
        // (b) and (c) force a failure; (a) does unless the block also
        // inherited a wrong label.
        prop_assert!(r.event_rates[1] <= r.block_error_rate + 1e-12);
        prop_assert!(r.event_rates[2] <= r.block_error_rate + 1e-12);
        prop_assert!(r.event_rates[0] <= r.block_error_rate + r.propagated_rate + 1e-12);
        prop_assert!(r.block_error_rate <= sum + 1e-12);
    }
}
