use rescycle_core::analysis::{self, detect_limit_cycle, standard_initial_states};
use rescycle_core::integrator::{self, IntegratorSettings};
use rescycle_core::model::{self, ModelParams, SolowParams};
use rescycle_core::{Attractor, Field, FieldKind, VdpParams};

fn converged(a: &Attractor) -> &[f64] {
    match a {
        Attractor::ConvergedPoint(p) => p,
        other => panic!("expected a fixed point, got {}", other.label()),
    }
}

fn long_2d() -> IntegratorSettings {
    IntegratorSettings::with_horizon(6000.0)
}

fn fig2_with(eps_k: f64) -> ModelParams {
    let mut p = ModelParams::fig2();
    p.scales.eps_k = eps_k;
    p
}

#[test]
fn fig1a_returns_to_baseline_after_perturbation() {
    let p = ModelParams::fig1(0.04);
    let f = Field::model(FieldKind::Full3, p).unwrap();
    let base = f.baseline_state().unwrap();
    let start: Vec<f64> = base.iter().map(|v| 1.1 * v).collect();
    let a = integrator::integrate_to_attractor(&f, &start, &IntegratorSettings::default(), "").unwrap();
    let end = converged(&a);
    for (x, b) in end.iter().zip(&base) {
        assert!((x - b).abs() < 1e-6);
    }
    assert!((end[2] - 1.7544).abs() < 1e-3);
}

#[test]
fn fig1b_cycle_averages_above_baseline() {
    let f = Field::model(FieldKind::Full3, ModelParams::fig1(0.02)).unwrap();
    for init in standard_initial_states(&f).unwrap() {
        let c = detect_limit_cycle(&f, &init, &IntegratorSettings::default(), "")
            .unwrap()
            .expect("cycle");
        assert!(c.y_mean > 3.0);
        assert!(c.amplitude_drift < 0.01);
        assert!((c.period - 48.38).abs() < 0.05, "{c:?}");
        assert!(c.y_min < 0.0, "production dips below zero");
        assert!((c.phase_durations.total() - c.period).abs() < 0.01 * c.period);
    }
}

#[test]
fn fig1a_has_no_cycle() {
    let f = Field::model(FieldKind::Full3, ModelParams::fig1(0.04)).unwrap();
    let init = &standard_initial_states(&f).unwrap()[0];
    assert!(detect_limit_cycle(&f, init, &IntegratorSettings::default(), "")
        .unwrap()
        .is_none());
}

#[test]
fn quasi_stationary_reduction_settles() {
    let p = ModelParams::fig1(0.04);
    let f = Field::model(FieldKind::ReducedYKQs, p).unwrap();
    let a = integrator::integrate_to_attractor(&f, &[3.5, 3.0], &IntegratorSettings::default(), "")
        .unwrap();
    let end = converged(&a);
    assert!((end[0] - 3.0).abs() < 1e-6 && (end[1] - 4.0).abs() < 1e-6);
}

#[test]
fn reduced_energy_field_depends_on_energy_speed() {
    let settings = IntegratorSettings::default();
    let run = |eps_e: f64| {
        let mut p = ModelParams::fig1(0.02);
        p.scales.eps_e = eps_e;
        let f = Field::model(FieldKind::ReducedYE, p).unwrap();
        let mut init = f.baseline_state().unwrap();
        init[0] *= 1.1;
        detect_limit_cycle(&f, &init, &settings, "").unwrap()
    };
    assert!(run(1.0).is_none());
    assert!(run(0.5).is_some());
}

#[test]
fn fig2_limit_cycle_attracts_every_standard_state() {
    let f = Field::model(FieldKind::ReducedYKCoupled, fig2_with(0.03)).unwrap();
    for init in standard_initial_states(&f).unwrap() {
        let a = integrator::integrate_to_attractor(&f, &init, &IntegratorSettings::default(), "")
            .unwrap();
        assert_eq!(a.label(), "cycle_handoff");
        let c = detect_limit_cycle(&f, &init, &long_2d(), "").unwrap().expect("cycle");
        assert!((c.y_min + 1.9).abs() < 0.01 && (c.y_max - 9.1).abs() < 0.01, "{c:?}");
    }
}

#[test]
fn fig2_cycle_coexists_with_stable_upper_point() {
    for eps in [0.06, 0.07] {
        let p = fig2_with(eps);
        let fps = analysis::fixed_points_2d(&p).unwrap();
        let upper = fps.last().unwrap();
        assert!(upper.classification.is_stable(), "eps_K {eps}");

        let f = Field::model(FieldKind::ReducedYKCoupled, p).unwrap();
        let init = &standard_initial_states(&f).unwrap()[0];
        assert!(detect_limit_cycle(&f, init, &long_2d(), "").unwrap().is_some());

        let near: Vec<f64> = upper.state.iter().map(|v| v + 1e-3).collect();
        // Weak focus: the decay rate is about 1e-3.
        let slow = IntegratorSettings::with_horizon(20000.0);
        let a = integrator::integrate_to_attractor(&f, &near, &slow, "").unwrap();
        let end = converged(&a);
        assert!((end[0] - upper.y()).abs() < 1e-6);
    }
}

#[test]
fn stable_points_recover_from_small_kicks() {
    let mut high_d1 = ModelParams::fig2();
    high_d1.energy.d1 = 0.45;
    for p in [high_d1, fig2_with(0.3), ModelParams::fig1(0.04)] {
        let f = Field::model(FieldKind::ReducedYKCoupled, p).unwrap();
        for fp in analysis::fixed_points_2d(&p).unwrap() {
            if !fp.classification.is_stable() {
                continue;
            }
            let kicked: Vec<f64> = fp.state.iter().map(|v| v + 1e-3).collect();
            let a = integrator::integrate_to_attractor(&f, &kicked, &IntegratorSettings::default(), "")
                .unwrap();
            let end = converged(&a);
            assert!((end[0] - fp.y()).abs() < 1e-6, "{:?} from {:?}", end, fp.state);
        }
    }
}

#[test]
fn bistable_basins() {
    let mut p = ModelParams::fig2();
    p.energy.d1 = 0.45;
    let f = Field::model(FieldKind::ReducedYKCoupled, p).unwrap();
    let fps = analysis::fixed_points_2d(&p).unwrap();
    let ratio = p.capital.s / p.capital.kappa;
    let mut ends = Vec::new();
    for y in [0.5, 10.0] {
        let a = integrator::integrate_to_attractor(&f, &[y, ratio * y], &IntegratorSettings::default(), "")
            .unwrap();
        ends.push(converged(&a)[0]);
    }
    assert!((ends[0] - fps[0].y()).abs() < 1e-6);
    assert!((ends[1] - fps[2].y()).abs() < 1e-6);
}

#[test]
fn solow_follows_closed_form() {
    let p = SolowParams {
        tfp: 1.0,
        alpha: 0.5,
        s: 0.2,
        r: 0.01,
        kappa: 0.04,
    };
    // u = k^alpha obeys a linear equation: u' = alpha·(sA − (r+kappa)·u).
    let drain = p.r + p.kappa;
    let exact = |t: f64| {
        let u_star = p.s * p.tfp / drain;
        (u_star + (1.0 - u_star) * (-p.alpha * drain * t).exp()).powf(1.0 / p.alpha)
    };
    let f = Field::solow(p).unwrap();
    let tr = integrator::integrate(&f, &[1.0], &IntegratorSettings::with_horizon(500.0), "").unwrap();
    for (t, x) in tr.times.iter().zip(&tr.states) {
        assert!((x[0] - exact(*t)).abs() < 1e-6 * (1.0 + exact(*t)));
    }
    for w in tr.states.windows(2) {
        assert!(w[1][0] >= w[0][0]);
    }
    let k_star = analysis::solow_statics(&p).unwrap().k_star;
    assert!((tr.last_state()[0] - k_star).abs() < 1e-4);
}

#[test]
fn vdp_origin_is_unstable_and_cycle_is_relaxational() {
    for omega in [0.5, 1.0, 5.0] {
        let f = Field::vdp(VdpParams { omega }).unwrap();
        let c = detect_limit_cycle(&f, &[0.1, 0.0], &IntegratorSettings::default(), "")
            .unwrap()
            .expect("cycle");
        assert!(c.y_max > 1.9 && c.y_max < 2.1, "omega {omega}: {c:?}");
        if omega == 5.0 {
            assert!(c.phase_durations.asymmetry() > 2.0);
        }
    }
}

#[test]
fn baseline_capital_is_always_defined() {
    let p = ModelParams::fig2();
    assert!(model::derived_constants(&p).is_err());
    assert!((model::baseline_capital(&p) - 1.25 * 0.8 / 0.36).abs() < 1e-12);
}
