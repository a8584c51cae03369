use binforward::capacity::{
    compare_restricted_causal_mac, compare_single_state_relay, solve, toy_rates, SolverSettings,
};
use binforward::channels::{
    load_spec, make_toy_spec, random_spec, ChannelKind, ChannelModel, ChannelSpec, SpecSizes, ToyChannelParams,
};
use binforward::probability::ConditionalPmf;
use binforward::rng::{substream, Purpose};

fn spec_file(name: &str) -> ChannelSpec {
    let path = format!("{}/../../specs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    load_spec(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn step(s: f64) -> SolverSettings {
    SolverSettings { grid_step: Some(s), ..Default::default() }
}

#[test]
fn toy_capacity_reaches_one_minus_p() {
    for (p, floor) in [(0.4, 0.59), (0.2, 0.79)] {
        let spec = make_toy_spec(ToyChannelParams::new(p).unwrap());
        let c = solve(&spec, &step(0.05)).unwrap().capacity().unwrap();
        assert!(c >= floor && c <= 1.0 - p + 1e-9, "p={p}: {c}");
        // Binning beats decoding the message at the relay.
        assert!(c > toy_rates(ToyChannelParams::new(p).unwrap()).1);
    }
}

#[test]
fn halving_the_step_never_hurts() {
    let spec = make_toy_spec(ToyChannelParams::new(0.4).unwrap());
    let mut last = f64::NEG_INFINITY;
    for s in [0.2, 0.1, 0.05, 0.025] {
        let c = solve(&spec, &step(s)).unwrap().capacity().unwrap();
        assert!(c >= last, "step {s}: {c} < {last}");
        last = c;
    }
    let relay = spec_file("state_relay_binary");
    let a = solve(&relay, &step(0.1)).unwrap().capacity().unwrap();
    let b = solve(&relay, &step(0.05)).unwrap().capacity().unwrap();
    assert!(b >= a);
}

#[test]
fn capacity_respects_output_entropy() {
    let mut rng = substream(31, Purpose::Sampling, &[]);
    let sizes = SpecSizes { state: 2, input: 2, relay_input: 2, output: 2, link: 2 };
    for kind in [ChannelKind::Relay, ChannelKind::StateRelay, ChannelKind::StateRelayNoDelay] {
        let spec = random_spec(kind, sizes, &mut rng);
        let c = solve(&spec, &step(0.1)).unwrap().capacity().unwrap();
        assert!((0.0..=1.0 + 1e-9).contains(&c), "{kind}: {c}");
    }
}

#[test]
fn relabeling_outputs_keeps_capacity() {
    let spec = spec_file("state_relay_binary");
    let mut swapped = spec.clone();
    if let ChannelModel::Relay(r) = &mut swapped.model {
        let table: Vec<f64> = r.channel.table().chunks(2).flat_map(|row| [row[1], row[0]]).collect();
        r.channel = ConditionalPmf::new(r.channel.given().to_vec(), r.channel.target().clone(), table).unwrap();
    }
    let a = solve(&spec, &step(0.05)).unwrap().capacity().unwrap();
    let b = solve(&swapped, &step(0.05)).unwrap().capacity().unwrap();
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}

#[test]
fn trivial_inputs_give_zero() {
    let doc = r#"{"schema": 1, "kind": "relay",
        "alphabets": {"X": 1, "XR": 1, "Y": 3, "Z": 2},
        "channel": [[[0.2, 0.3, 0.5]]], "det_links": {"z": [[1]]}}"#;
    let spec = load_spec(doc).unwrap();
    assert_eq!(solve(&spec, &SolverSettings::default()).unwrap().capacity().unwrap(), 0.0);
}

#[test]
fn noiseless_mac_reaches_unit_corner() {
    let spec = spec_file("noiseless_mac");
    let sol = solve(&spec, &SolverSettings::default()).unwrap();
    let region = sol.region().unwrap();
    assert!(region.contains(0.98, 0.98));
    assert!((region.max_sum_rate() - 2.0).abs() < 1e-9);
    let corner = region.boundary.iter().find(|p| (p.r1 - 1.0).abs() < 1e-9).unwrap();
    assert!((corner.r2 - 1.0).abs() < 0.02);
}

#[test]
fn independent_output_gives_origin() {
    let mut spec = spec_file("noiseless_mac");
    if let ChannelModel::Mac(m) = &mut spec.model {
        let rows = m.channel.table().len() / 4;
        m.channel =
            ConditionalPmf::new(m.channel.given().to_vec(), m.channel.target().clone(), vec![0.25; rows * 4]).unwrap();
    }
    let sol = solve(&spec, &SolverSettings::default()).unwrap();
    let region = sol.region().unwrap();
    assert!(region.boundary.iter().all(|p| p.r1.abs() < 1e-9 && p.r2.abs() < 1e-9));
    assert!(!region.contains(0.01, 0.0));
}

#[test]
fn cribbing_enlarges_adder_region() {
    // With one encoder seeing the other's input, the sum rate reaches log2(3).
    let spec = spec_file("adder_mac");
    let sol = solve(&spec, &SolverSettings::default()).unwrap();
    let sum = sol.region().unwrap().max_sum_rate();
    assert!(sum > 1.5 && sum <= 3f64.log2() + 1e-9, "{sum}");
}

#[test]
fn single_state_relay_matches_stateless() {
    let out =
        compare_single_state_relay(&spec_file("state_relay_single"), &spec_file("relay_binary"), &step(0.05), 0.02)
            .unwrap();
    assert!(out.passed, "{out:?}");
}

#[test]
fn restricted_causal_mac_matches_strict() {
    let out = compare_restricted_causal_mac(
        &spec_file("adder_mac_causal"),
        &spec_file("adder_mac"),
        &SolverSettings::default(),
        0.02,
    )
    .unwrap();
    assert!(out.passed, "{out:?}");
}

#[test]
fn causal_cribbing_is_no_worse() {
    let a = solve(&spec_file("adder_mac_causal"), &SolverSettings::default()).unwrap();
    let b = solve(&spec_file("adder_mac"), &SolverSettings::default()).unwrap();
    assert!(a.region().unwrap().max_sum_rate() >= b.region().unwrap().max_sum_rate() - 1e-9);
}

#[test]
fn mac_kind_is_rejected_by_tie_flag_on_strict() {
    let settings = SolverSettings { tie_x2_across_z1: true, ..Default::default() };
    assert!(solve(&spec_file("adder_mac"), &settings).is_err());
}
