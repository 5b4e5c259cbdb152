//! Acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the report reads top to bottom; the
//! process exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rescycle_core::analysis::{
    self, bisect_threshold, detect_limit_cycle, eigen, standard_initial_states, BranchSelector,
    Classification, Control, Criterion,
};
use rescycle_core::dynamics;
use rescycle_core::integrator::{self, FnField, IntegratorSettings};
use rescycle_core::kaldor::{self, SplitKind};
use rescycle_core::model::{
    self, CapitalParams, EigenParams, EnergyParams, ModelParams, ProductionParams, SolowParams,
    State3, TimeScales,
};
use rescycle_core::{Attractor, Error, Field, FieldKind, VdpParams};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const SAMPLES: usize = 1000;

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    ModelParams {
        production: ProductionParams {
            tfp: 1.0,
            a_k: 0.5,
            a_e: 0.5,
            y0: rng.gen_range(0.5..5.0),
            k_floor: rng.gen_range(0.0..2.0),
            e_floor: rng.gen_range(0.0..2.0),
        },
        capital: CapitalParams {
            s: rng.gen_range(0.1..0.9),
            kappa: rng.gen_range(0.05..1.0),
        },
        energy: EnergyParams {
            q: rng.gen_range(0.1..2.0),
            c: rng.gen_range(0.05..1.0),
            d1: rng.gen_range(0.0..0.5),
            zeta: rng.gen_range(0.005..0.1),
        },
        eigen: EigenParams {
            g1: rng.gen_range(0.0..0.3),
            g2: rng.gen_range(0.001..0.1),
        },
        scales: TimeScales {
            eps_k: rng.gen_range(0.01..1.0),
            eps_e: rng.gen_range(0.1..2.0),
        },
    }
}

fn random_params_with_baseline(rng: &mut ChaCha8Rng) -> ModelParams {
    loop {
        let p = random_params(rng);
        if p.energy_denominator() > 1e-3 {
            return p;
        }
    }
}

fn ys(points: &[analysis::FixedPoint]) -> Vec<f64> {
    points.iter().map(|f| f.y()).collect()
}

fn bisect_fig2(control: Control, bracket: (f64, f64), criterion: Criterion) -> Result<f64, Error> {
    bisect_threshold(
        &ModelParams::fig2(),
        control,
        bracket,
        criterion,
        &IntegratorSettings::default(),
    )
    .map(|r| r.value)
}

fn equilibrium_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let p = random_params_with_baseline(&mut rng);
        let d = model::derived_constants(&p).map_err(|e| e.to_string())?;
        let y0 = p.production.y0;
        let full = dynamics::rhs_full3(&State3::new(y0, d.k0, d.e0), &p).map_err(|e| e.to_string())?;
        let reduced = dynamics::rhs_reduced_yk_coupled([y0, d.k0], &p).map_err(|e| e.to_string())?;
        for v in full.to_array().into_iter().chain(reduced) {
            worst = worst.max(v.abs());
        }
    }
    ensure!(worst < 1e-10, "largest residual {worst:e}");
    Ok(format!("{SAMPLES} parameter sets, largest residual {worst:.1e}"))
}

fn fig1_reproduction() -> Check {
    let settings = IntegratorSettings::default();
    let f = Field::model(FieldKind::Full3, ModelParams::fig1(0.04)).map_err(|e| e.to_string())?;
    let base = f.baseline_state().map_err(|e| e.to_string())?;
    let start = vec![1.1 * base[0], base[1], base[2]];
    let end = match integrator::integrate_to_attractor(&f, &start, &settings, "") {
        Ok(Attractor::ConvergedPoint(p)) => p,
        Ok(other) => return Err(format!("zeta=0.04 ended as {}", other.label())),
        Err(e) => return Err(e.to_string()),
    };
    ensure!(
        (end[0] - 3.0).abs() < 1e-3 && (end[1] - 4.0).abs() < 1e-3 && (end[2] - 1.7544).abs() < 1e-3,
        "zeta=0.04 converged to {end:?}"
    );

    let f = Field::model(FieldKind::Full3, ModelParams::fig1(0.02)).map_err(|e| e.to_string())?;
    let init = &standard_initial_states(&f).map_err(|e| e.to_string())?[0];
    let c = detect_limit_cycle(&f, init, &settings, "")
        .map_err(|e| e.to_string())?
        .ok_or("zeta=0.02 shows no cycle")?;
    ensure!(c.amplitude_drift < 0.01, "amplitude drift {}", c.amplitude_drift);
    ensure!(c.y_mean > 3.0, "y_mean {}", c.y_mean);
    Ok(format!(
        "zeta=0.04 -> ({:.4}, {:.4}, {:.4}); zeta=0.02 -> period {:.2}, y_mean {:.3}",
        end[0], end[1], end[2], c.period, c.y_mean
    ))
}

fn fig2_fixed_points() -> Check {
    let got = ys(&analysis::fixed_points_2d(&ModelParams::fig2()).map_err(|e| e.to_string())?);
    let want = [1.25, 3.1397, 6.3103];
    ensure!(got.len() == 3, "found {got:?}");
    for (g, w) in got.iter().zip(want) {
        ensure!((g - w).abs() < 1e-4, "found {got:?}");
    }
    Ok(format!("Y* = {got:.5?}"))
}

fn zeta_hopf() -> Check {
    let v = bisect_fig2(
        Control::Zeta,
        (0.03, 0.06),
        Criterion::TraceZeroAtBranch {
            branch: BranchSelector::Baseline,
        },
    )
    .map_err(|e| e.to_string())?;
    ensure!((v - 0.04678).abs() < 1e-4, "zeta = {v}");
    ensure!(v < 0.047, "zeta = {v} is not below 0.047");
    Ok(format!("zeta = {v:.6}"))
}

fn eps_k_lower_hopf() -> Check {
    let v = bisect_fig2(
        Control::EpsK,
        (0.1, 0.3),
        Criterion::TraceZeroAtBranch {
            branch: BranchSelector::Lower,
        },
    )
    .map_err(|e| e.to_string())?;
    ensure!((v - 0.234375).abs() < 1e-4, "eps_K = {v}");
    Ok(format!("eps_K = {v:.6}"))
}

fn zeta_saddle_node() -> Check {
    let v = bisect_fig2(Control::Zeta, (0.01, 0.03), Criterion::DiscriminantZero)
        .map_err(|e| e.to_string())?;
    ensure!((v - 0.021835).abs() < 1e-4, "zeta = {v}");
    let at_paper = ModelParams::fig2();
    let at_paper = Control::Zeta.apply(&at_paper, 0.218).map_err(|e| e.to_string())?;
    ensure!(
        analysis::deflate_by_baseline(&at_paper).discriminant() < 0.0,
        "zeta = 0.218 still has three fixed points"
    );
    match bisect_fig2(Control::Zeta, (0.2, 0.24), Criterion::DiscriminantZero) {
        Err(Error::NoSignChange { .. }) => {}
        other => return Err(format!("bracket around 0.218 gave {other:?}")),
    }
    Ok(format!("zeta = {v:.6}; no saddle-node near 0.218"))
}

fn eps_k_upper_hopf() -> Check {
    let v = bisect_fig2(
        Control::EpsK,
        (0.03, 0.1),
        Criterion::TraceZeroAtBranch {
            branch: BranchSelector::Upper,
        },
    )
    .map_err(|e| e.to_string())?;
    ensure!((v - 0.0543).abs() < 1e-3, "eps_K = {v}");
    Ok(format!("eps_K = {v:.5}"))
}

fn bistability() -> Check {
    let mut p = ModelParams::fig2();
    p.energy.d1 = 0.45;
    let fps = analysis::fixed_points_2d(&p).map_err(|e| e.to_string())?;
    let got = ys(&fps);
    ensure!(fps.len() == 3, "found {got:?}");
    for (g, w) in got.iter().zip([0.2629, 1.25, 20.687]) {
        ensure!((g - w).abs() < 1e-3, "found {got:?}");
    }
    let classes: Vec<Classification> = fps.iter().map(|f| f.classification).collect();
    ensure!(
        classes[0].is_stable() && classes[1] == Classification::Saddle && classes[2].is_stable(),
        "classes {classes:?}"
    );

    let f = Field::model(FieldKind::ReducedYKCoupled, p).map_err(|e| e.to_string())?;
    let ratio = p.capital.s / p.capital.kappa;
    let mut ends = Vec::new();
    for y in [0.5, 10.0] {
        match integrator::integrate_to_attractor(&f, &[y, ratio * y], &IntegratorSettings::default(), "") {
            Ok(Attractor::ConvergedPoint(x)) => ends.push(x[0]),
            Ok(other) => return Err(format!("Y(0)={y} ended as {}", other.label())),
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure!(
        (ends[0] - got[0]).abs() < 1e-3 && (ends[1] - got[2]).abs() < 1e-3,
        "trajectories ended at {ends:?}"
    );
    Ok(format!("Y* = {got:.4?}; Y(0)=0.5 -> {:.4}, Y(0)=10 -> {:.3}", ends[0], ends[1]))
}

fn kaldor_identity_and_verdicts() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let p = random_params(&mut rng);
        let y = rng.gen_range(-5.0..15.0);
        let k = rng.gen_range(0.0..30.0);
        let rhs = dynamics::rhs_reduced_yk_coupled([y, k], &p).map_err(|e| e.to_string())?[0];
        for kind in SplitKind::ALL {
            let err = (kaldor::split(kind, &p, y, k).net() - rhs).abs() / (1.0 + rhs.abs());
            worst = worst.max(err);
        }
    }
    ensure!(worst < 1e-12, "largest relative error {worst:e}");

    let p = ModelParams::fig3();
    let range = kaldor::default_y_range(&p);
    let report = |kind| {
        kaldor::check_kaldor_requirements(kind, &p, range, kaldor::DEFAULT_SAMPLES, 3.0, 9.0)
            .map_err(|e| e.to_string())
    };
    let sym = report(SplitKind::Symmetric)?;
    let lin = report(SplitKind::LinearSaving)?;
    let unev = report(SplitKind::Uneven)?;
    ensure!(!sym.monotone, "symmetric split passed monotonicity");
    ensure!(!lin.saving.depends_on_k, "linear-saving S depends on K");
    ensure!(unev.passes(), "uneven split failed: {unev:?}");
    Ok(format!(
        "relative error {worst:.1e}; symmetric non-monotone, linear-saving S fixed in K, uneven passes"
    ))
}

fn production_laws() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..SAMPLES {
        let a_k = rng.gen_range(0.05..0.95);
        let p = ProductionParams {
            tfp: rng.gen_range(0.1..3.0),
            a_k,
            a_e: 1.0 - a_k,
            y0: rng.gen_range(0.0..5.0),
            k_floor: rng.gen_range(0.0..2.0),
            e_floor: rng.gen_range(0.0..2.0),
        };
        let kt = rng.gen_range(0.1..50.0);
        let et = rng.gen_range(0.1..50.0);
        let scale = rng.gen_range(0.1..10.0);
        let (k, e) = (p.k_floor + kt, p.e_floor + et);
        let ytilde = |k: f64, e: f64| model::production(&p, k, e).map(|y| y - p.y0);
        let base = ytilde(k, e).map_err(|e| e.to_string())?;
        let scaled = ytilde(p.k_floor + scale * kt, p.e_floor + scale * et).map_err(|e| e.to_string())?;
        ensure!(
            (scaled - scale * base).abs() <= 1e-12 * scale * base.abs().max(1.0) * 10.0,
            "homogeneity fails at {p:?}"
        );
        let (dk, de) = model::production_partials(&p, k, e).map_err(|e| e.to_string())?;
        ensure!(
            (kt * dk + et * de - base).abs() <= 1e-10 * base.abs().max(1.0),
            "Euler identity fails at {p:?}"
        );
        let f = |k: f64, e: f64| model::production(&p, k, e).unwrap();
        let h = 1e-6 * (1.0 + kt.min(et));
        let fd_k = (f(k + h, e) - f(k - h, e)) / (2.0 * h);
        let fd_e = (f(k, e + h) - f(k, e - h)) / (2.0 * h);
        ensure!(
            (fd_k - dk).abs() <= 1e-6 * dk.abs().max(1.0) && (fd_e - de).abs() <= 1e-6 * de.abs().max(1.0),
            "partials disagree with finite differences at {p:?}"
        );
        let h2 = 1e-3 * kt.min(et);
        let d2k = (f(k + h2, e) - 2.0 * f(k, e) + f(k - h2, e)) / (h2 * h2);
        let d2e = (f(k, e + h2) - 2.0 * f(k, e) + f(k, e - h2)) / (h2 * h2);
        ensure!(d2k < 0.0 && d2e < 0.0, "returns not diminishing at {p:?}");
    }
    Ok(format!("{SAMPLES} random inputs"))
}

fn van_der_pol() -> Check {
    let f = Field::vdp(VdpParams { omega: 5.0 }).map_err(|e| e.to_string())?;
    let c = detect_limit_cycle(&f, &[0.1, 0.0], &IntegratorSettings::default(), "")
        .map_err(|e| e.to_string())?
        .ok_or("no cycle at omega = 5")?;
    let peak = c.y_max.max(-c.y_min);
    ensure!((1.9..=2.1).contains(&peak), "max|y| = {peak}");
    let ratio = c.phase_durations.asymmetry();
    ensure!(ratio > 2.0, "slow/fast ratio {ratio}");
    for omega in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let params = VdpParams { omega };
        let h = 1e-6;
        let col = |i: usize| -> Result<[f64; 2], Error> {
            let mut a = [0.0; 2];
            let mut b = [0.0; 2];
            a[i] = h;
            b[i] = -h;
            let fa = dynamics::rhs_vdp(a, &params)?;
            let fb = dynamics::rhs_vdp(b, &params)?;
            Ok([(fa[0] - fb[0]) / (2.0 * h), (fa[1] - fb[1]) / (2.0 * h)])
        };
        let (c0, c1) = (col(0).map_err(|e| e.to_string())?, col(1).map_err(|e| e.to_string())?);
        let ev = eigen::eigenvalues_2x2(&[[c0[0], c1[0]], [c0[1], c1[1]]]);
        ensure!(ev.iter().any(|e| e.re > 0.0), "origin stable at omega = {omega}");
    }
    Ok(format!("max|y| = {peak:.4}, period {:.3}, phase ratio {ratio:.1}", c.period))
}

fn solow() -> Check {
    let p = SolowParams {
        tfp: 1.0,
        alpha: 0.5,
        s: 0.2,
        r: 0.01,
        kappa: 0.04,
    };
    let st = analysis::solow_statics(&p).map_err(|e| e.to_string())?;
    ensure!((st.k_star - 16.0).abs() < 1e-12, "k* = {}", st.k_star);
    for alpha in [0.1, 0.3, 0.5, 0.77] {
        let st = analysis::solow_statics(&SolowParams { alpha, ..p }).map_err(|e| e.to_string())?;
        ensure!(st.s_gold == 1.0 - alpha, "s_gold = {} for alpha = {alpha}", st.s_gold);
    }
    let f = Field::solow(p).map_err(|e| e.to_string())?;
    let tr = integrator::integrate(&f, &[1.0], &IntegratorSettings::with_horizon(500.0), "")
        .map_err(|e| e.to_string())?;
    let k = tr.last_state()[0];
    ensure!((k - 16.0).abs() < 1e-4, "k(500) = {k}");
    Ok(format!("k* = {}, k(500) = {k:.7}", st.k_star))
}

fn phase_asymmetry() -> Check {
    let f = Field::model(FieldKind::Full3, ModelParams::fig1(0.02)).map_err(|e| e.to_string())?;
    let init = &standard_initial_states(&f).map_err(|e| e.to_string())?[0];
    let c = detect_limit_cycle(&f, init, &IntegratorSettings::default(), "")
        .map_err(|e| e.to_string())?
        .ok_or("no cycle")?;
    let ph = c.phase_durations;
    let ratio = ph.asymmetry();
    ensure!(ratio > 1.2, "max/min = {ratio}");
    Ok(format!(
        "boom {:.2}, recession {:.2}, depression {:.2}, recovery {:.2} (max/min {ratio:.2})",
        ph.boom, ph.recession, ph.depression, ph.recovery
    ))
}

fn rk4_order() -> Check {
    let decay = FnField::new("decay", 1, |_, x: &[f64], dx: &mut [f64]| dx[0] = -x[0]);
    let err = |dt: f64| -> Result<f64, Error> {
        let tr = integrator::integrate(&decay, &[1.0], &IntegratorSettings::rk4(dt, 5.0), "")?;
        Ok((tr.last_state()[0] - (-5.0f64).exp()).abs())
    };
    let coarse = err(0.1).map_err(|e| e.to_string())?;
    let fine = err(0.05).map_err(|e| e.to_string())?;
    let ratio = coarse / fine;
    ensure!(ratio >= 14.0, "error ratio {ratio}");
    Ok(format!("error ratio {ratio:.2}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 14] = [
        ("equilibrium invariance", equilibrium_invariance),
        ("converging and oscillating production", fig1_reproduction),
        ("three fixed points", fig2_fixed_points),
        ("zeta Hopf threshold at the baseline", zeta_hopf),
        ("eps_K Hopf threshold on the lower branch", eps_k_lower_hopf),
        ("zeta saddle-node", zeta_saddle_node),
        ("eps_K Hopf threshold on the upper branch", eps_k_upper_hopf),
        ("bistability at d1 = 0.45", bistability),
        ("investment/saving identity and requirements", kaldor_identity_and_verdicts),
        ("production function laws", production_laws),
        ("Van der Pol relaxation cycle", van_der_pol),
        ("Solow statics and convergence", solow),
        ("business-cycle phase asymmetry", phase_asymmetry),
        ("RK4 convergence order", rk4_order),
    ];

    panic::set_hook(Box::new(|_| {}));
    let start = Instant::now();
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", n + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
