use binforward::capacity::{solve, PmfParameterization, SolverSettings};
use binforward::channels::{load_spec, make_toy_spec, ChannelSpec, ToyChannelParams};
use binforward::simulator::{default_split, run_trials, spread_parameterization, RateSplit, SchemeConfig};

fn spec_file(name: &str) -> ChannelSpec {
    let path = format!("{}/../../specs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    load_spec(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn higher_rate_hurts_on_paired_seeds() {
    let spec = make_toy_spec(ToyChannelParams::new(0.4).unwrap());
    let sol = solve(&spec, &SolverSettings::default()).unwrap();
    let param = spread_parameterization(&spec, &sol.argmax, 1e-9).unwrap();
    let c = sol.capacity().unwrap();
    let run = |f: f64| {
        let mut cfg = SchemeConfig::new(10, 3, default_split(&spec, &param, &[f * c]).unwrap());
        cfg.trials = 100;
        cfg.master_seed = 21;
        run_trials(&spec, &param, &cfg).unwrap().block_error_rate
    };
    assert!(run(1.2) > run(0.5));
}

#[test]
fn spreading_keeps_the_optimum() {
    let spec = make_toy_spec(ToyChannelParams::new(0.3).unwrap());
    let sol = solve(&spec, &SolverSettings::default()).unwrap();
    let spread = spread_parameterization(&spec, &sol.argmax, 1e-9).unwrap();
    let uniform = PmfParameterization::uniform(&spec, None).unwrap();
    // The uniform input is optimal for the toy channel.
    assert_eq!(spread, uniform);
}

#[test]
fn no_delay_relay_runs() {
    let spec = spec_file("no_delay_binary");
    let param = PmfParameterization::uniform(&spec, Some(2)).unwrap();
    let mut cfg = SchemeConfig::new(8, 3, vec![RateSplit { crib: 0.125, direct: 0.125, bin: 0.25 }]);
    cfg.trials = 30;
    let r = run_trials(&spec, &param, &cfg).unwrap();
    assert_eq!(r.rows.len(), 90);
    assert!((0.0..=1.0).contains(&r.block_error_rate));
}

#[test]
fn mac_kinds_improve_with_block_length() {
    for name in ["adder_mac", "adder_mac_causal"] {
        let spec = spec_file(name);
        let sol = solve(&spec, &SolverSettings::default()).unwrap();
        let param = spread_parameterization(&spec, &sol.argmax, 1e-9).unwrap();
        let rates = default_split(&spec, &param, &[0.2, 0.2]).unwrap();
        let run = |n: usize| {
            let mut cfg = SchemeConfig::new(n, 3, rates.clone());
            cfg.trials = 60;
            run_trials(&spec, &param, &cfg).unwrap()
        };
        let (short, long) = (run(8), run(12));
        assert_eq!(long.realized.len(), 2);
        assert!(long.block_error_rate <= short.block_error_rate + 0.05, "{name}");
    }
}

#[test]
fn rate_zero_block_error_tracks_atypicality() {
    let spec = spec_file("toy_p04");
    let param = PmfParameterization::uniform(&spec, None).unwrap();
    let zero = RateSplit { crib: 0.0, direct: 0.0, bin: 0.0 };
    let mut cfg = SchemeConfig::new(12, 3, vec![zero]);
    cfg.trials = 200;
    cfg.epsilon = 0.25;
    let r = run_trials(&spec, &param, &cfg).unwrap();
    assert!(r.block_error_rate <= 0.2);
}
