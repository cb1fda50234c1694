#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use zeno::scenarios::*;
use zeno::schedule::zeno_survival_ideal;

fn p2(r: &ExperimentResult) -> f64 {
    r.summary_value("p2_final").unwrap()
}

#[test]
fn ideal_examples() {
    assert!((p2(&run_ihbw_ideal(&IhbwConfig::ideal(0)).unwrap()) - 1.0).abs() < 1e-12);
    assert!((p2(&run_ihbw_ideal(&IhbwConfig::ideal(4)).unwrap()) - 0.375).abs() < 1e-10);
    assert!((p2(&run_ihbw_ideal(&IhbwConfig::ideal(64)).unwrap()) - 0.03713).abs() < 1e-4);
    let half_pulse = IhbwConfig {
        total_time: Some(PI / 2.0),
        ..IhbwConfig::ideal(0)
    };
    assert!((p2(&run_ihbw_ideal(&half_pulse).unwrap()) - 0.5).abs() < 1e-12);
}

#[test]
fn ideal_rejects_bad_configs() {
    let bad = [
        IhbwConfig {
            omega_rf: -1.0,
            ..IhbwConfig::ideal(2)
        },
        IhbwConfig {
            total_time: Some(0.0),
            ..IhbwConfig::ideal(2)
        },
        IhbwConfig {
            init_level: 2,
            ..IhbwConfig::ideal(2)
        },
        IhbwConfig {
            init_level: 3,
            ..IhbwConfig::ideal(2)
        },
        IhbwConfig::full(2),
    ];
    for cfg in bad {
        let err = run_ihbw_ideal(&cfg).unwrap_err();
        assert!(err.is_config_error(), "{err}");
    }
}

#[test]
fn explicit_event_times() {
    let cfg = IhbwConfig {
        event_times: Some(vec![PI / 3.0, 2.0 * PI / 3.0]),
        ..IhbwConfig::ideal(0)
    };
    let r = run_ihbw_ideal(&cfg).unwrap();
    let expected = 0.5 * (1.0 - (PI / 3.0).cos().powi(3));
    assert!((p2(&r) - expected).abs() < 1e-12);
    assert!(r.summary_value("equal_spacing_prediction").is_none());

    let unsorted = IhbwConfig {
        event_times: Some(vec![2.0, 1.0]),
        ..IhbwConfig::ideal(0)
    };
    assert!(run_ihbw_ideal(&unsorted).unwrap_err().is_config_error());
}

#[test]
fn samples_land_on_the_grid() {
    let cfg = IhbwConfig {
        samples_per_segment: 5,
        ..IhbwConfig::ideal(4)
    };
    let r = run_ihbw_ideal(&cfg).unwrap();
    assert_eq!(r.time_grid.len(), 1 + 4 * 5);
    assert_eq!(r.time_grid[0], 0.0);
    assert_eq!(*r.time_grid.last().unwrap(), PI);
    assert!(r.time_grid.windows(2).all(|w| w[0] < w[1]));
    // Right after each measurement the state is diagonal, so purity equals
    // the sum of squared populations.
    for k in 1..=4 {
        let i = 5 * k;
        let (a, b) = (r.populations[0].values[i], r.populations[1].values[i]);
        assert!((r.purity[i] - (a * a + b * b)).abs() < 1e-12);
    }
}

#[test]
fn full_model_without_laser_is_a_rabi_flop() {
    let cfg = IhbwConfig {
        omega_laser: 0.0,
        ..IhbwConfig::full(8)
    };
    let r = run_ihbw_full(&cfg).unwrap();
    assert!((p2(&r) - 1.0).abs() < 1e-6);
    assert_eq!(r.populations.len(), 3);
}

#[test]
fn full_model_moderate_pulses_are_bracketed() {
    let cfg = IhbwConfig {
        omega_laser: 200.0,
        laser_pulse_duration: 5e-3,
        gamma3: 1.0e4,
        ..IhbwConfig::full(8)
    };
    let r = run_ihbw_full(&cfg).unwrap();
    let ideal = zeno_survival_ideal(8).unwrap();
    assert!(p2(&r) > ideal && p2(&r) < 1.0, "{}", p2(&r));
    assert!(r.diagnostics.max_trace_drift < 1e-7);
}

#[test]
fn full_model_rejects_overlong_pulses() {
    let cfg = IhbwConfig {
        laser_pulse_duration: 0.5,
        ..IhbwConfig::full(8)
    };
    let err = run_ihbw_full(&cfg).unwrap_err();
    assert!(err.to_string().contains("laser_pulse_duration"));
}

#[test]
fn full_model_level_three_relaxes_between_pulses() {
    let r = run_ihbw_full(&IhbwConfig::full(2)).unwrap();
    let p3 = &r.populations[2].values;
    // Sample just before the final pulse starts.
    let before_last = p3[p3.len() - 2];
    assert!(before_last < 1e-9, "{before_last}");
    let relaxed = r.summary_value("p1_relaxed").unwrap();
    assert!((relaxed + p2(&r) - 1.0).abs() < 1e-7);
}

#[test]
fn reversed_examples() {
    let p1 = |n| {
        run_reversed(&IhbwConfig::ideal(n))
            .unwrap()
            .summary_value("p1_final")
            .unwrap()
    };
    assert!((p1(2) - 0.5).abs() < 1e-12);
    assert!((p1(0) - 1.0).abs() < 1e-12);
    assert!((p1(16) - 0.13345).abs() < 1e-4);
}

#[test]
fn reversed_full_model_runs_from_level_two() {
    let r = run_reversed(&IhbwConfig::full(4)).unwrap();
    assert_eq!(r.scenario, "reversed");
    assert_eq!(r.populations[1].values[0], 1.0);
    let p1 = r.summary_value("p1_relaxed").unwrap();
    assert!((p1 - zeno_survival_ideal(4).unwrap()).abs() < 5e-3);
}

#[test]
fn partial_examples() {
    let run = |eta: f64| {
        p2(&run_partial(&PartialConfig {
            eta,
            ihbw: IhbwConfig::ideal(8),
        })
        .unwrap())
    };
    assert!((run(0.0) - 1.0).abs() < 1e-10);
    assert!((run(1.0) - 0.2346).abs() < 1e-4);
    let mid = run(0.5);
    assert!(mid > run(1.0) && mid < run(0.0));
    let err = run_partial(&PartialConfig {
        eta: 1.5,
        ihbw: IhbwConfig::ideal(8),
    })
    .unwrap_err();
    assert!(err.to_string().contains("eta"));
}

fn bangbang(kick: NamedKick, ihbw: IhbwConfig) -> ExperimentResult {
    run_bangbang(&BangBangConfig {
        kick: KickSpec::Named(kick),
        ihbw,
    })
    .unwrap()
}

#[test]
fn bangbang_examples() {
    let id = bangbang(NamedKick::Identity, IhbwConfig::ideal(8));
    assert!((p2(&id) - 1.0).abs() < 1e-10);
    for n in [8, 16, 32] {
        let r = bangbang(NamedKick::SigmaZ, IhbwConfig::ideal(n));
        assert!(p2(&r) < 0.05, "n = {n}");
        let projected = r.summary_value("p2_projection").unwrap();
        assert!((projected - zeno_survival_ideal(n).unwrap()).abs() < 1e-10);
    }
    let midpoint = IhbwConfig {
        event_times: Some(vec![PI / 2.0]),
        ..IhbwConfig::ideal(1)
    };
    assert!(p2(&bangbang(NamedKick::SigmaZ, midpoint)).abs() < 1e-12);
    // Odd counts from a per-segment Bloch-rotation composition.
    assert!((p2(&bangbang(NamedKick::SigmaZ, IhbwConfig::ideal(3))) - 0.25).abs() < 1e-12);
    assert!(
        (p2(&bangbang(NamedKick::SigmaZ, IhbwConfig::ideal(5))) - 0.095491502812526288).abs()
            < 1e-12
    );
}

#[test]
fn bangbang_rejects_non_unitary_kick() {
    let cfg = BangBangConfig {
        kick: KickSpec::Matrix(MatrixSpec {
            re: vec![vec![1.0, 0.0], vec![0.0, 2.0]],
            im: None,
        }),
        ihbw: IhbwConfig::ideal(4),
    };
    let err = run_bangbang(&cfg).unwrap_err();
    assert!(matches!(err, zeno::ZenoError::NonUnitaryKick { .. }));
}

#[test]
fn selective_distinctness_at_four_pulses() {
    let r = run_selective(&SelectiveConfig {
        trajectories: 10_000,
        seed: 11,
        ihbw: IhbwConfig::ideal(4),
    })
    .unwrap();
    let closed = r.summary_value("all_survive_closed_form").unwrap();
    assert!((closed - 0.53079004294495532).abs() < 1e-12);
    assert!((1.0 - p2(&r) - 0.625).abs() < 1e-10);
    assert!((closed - (1.0 - p2(&r))).abs() > 0.09);
    assert_eq!(r.rng_seed, Some(11));
}

#[test]
fn selective_is_reproducible() {
    let cfg = SelectiveConfig {
        trajectories: 500,
        seed: 5,
        ihbw: IhbwConfig::ideal(3),
    };
    assert_eq!(run_selective(&cfg).unwrap(), run_selective(&cfg).unwrap());
}

#[test]
fn super_zeno_beats_equal_spacing() {
    let r = run_super_zeno(&SuperZenoConfig {
        ihbw: IhbwConfig::ideal(2),
    })
    .unwrap();
    let opt = r.summary_value("objective_optimized").unwrap();
    assert!(opt < r.summary_value("objective_equal_spacing").unwrap() - 0.05);
    assert!((p2(&r) - opt).abs() < 1e-10);
}

fn reservoir(center: f64, coupling: f64, tau: f64, m: usize) -> ReservoirConfig {
    ReservoirConfig {
        mode_count: 32,
        band_center: center,
        band_width: 1.0,
        coupling,
        measurement_interval: tau,
        measurement_count: m,
        samples_per_interval: 2,
    }
}

#[test]
fn unstable_examples() {
    let decoupled = run_unstable(&reservoir(0.0, 0.0, 0.2, 10)).unwrap();
    assert!((decoupled.summary_value("survival").unwrap() - 1.0).abs() < 1e-12);

    // Early decay is quadratic: halving t quarters the loss.
    let loss = |t: f64| 1.0 - run_unstable(&reservoir(0.0, 0.05, t, 1)).unwrap().summary_value("survival").unwrap();
    let ratio = loss(0.02) / loss(0.01);
    assert!((ratio - 4.0).abs() < 1e-2, "{ratio}");
}

#[test]
fn unstable_populations_are_grouped() {
    let r = run_unstable(&reservoir(0.0, 0.05, 0.2, 5)).unwrap();
    let labels: Vec<&str> = r.populations.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(labels, ["excited", "reservoir"]);
    assert!(r.diagnostics.max_population_sum_error < 1e-12);
}

#[test]
fn subspace_unmeasured_chain_matches_closed_form() {
    for (a, b, t) in [(1.0, 1.0, PI), (1.0, 2.0, 1.3), (0.4, 1.5, 2.0)] {
        let r = run_zeno_subspace(&SubspaceConfig::chain(a, b, 0, t)).unwrap();
        let lambda = (a * a + b * b).sqrt() / 2.0;
        let amp = (lambda * t).cos() - 1.0;
        let expected = (a * b / 4.0 / (lambda * lambda) * amp).powi(2);
        let leak = r.summary_value("leakage").unwrap();
        assert!((leak - expected).abs() < 1e-12, "a={a} b={b}: {leak} vs {expected}");
    }
}

#[test]
fn subspace_leakage_bound() {
    // Documented constant: leakage < C·b²T²/n with C = 1/4.
    const C: f64 = 0.25;
    for (a, b) in [(1.0, 1.0), (1.0, 3.0), (2.0, 0.5)] {
        let t = PI / a;
        let r = run_zeno_subspace(&SubspaceConfig::chain(a, b, 256, t)).unwrap();
        let leak = r.summary_value("leakage").unwrap();
        assert!(leak < C * b * b * t * t / 256.0, "a={a} b={b}: {leak}");
    }
}
