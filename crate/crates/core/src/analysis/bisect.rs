use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cycle::{detect_limit_cycle, standard_initial_states};
use super::eigen;
use super::fixed_points::{deflate_by_baseline, fixed_points_2d, jacobian_2d};
use super::BranchTag;
use crate::dynamics::{Field, FieldKind};
use crate::error::{Error, Result};
use crate::integrator::IntegratorSettings;
use crate::model::ModelParams;

/// Bracket width at which analytic criteria stop.
const ANALYTIC_WIDTH: f64 = 1e-10;
/// Bracket width for the simulation criterion.
const SIMULATION_WIDTH: f64 = 1e-3;

/// Parameters a bifurcation scan may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Control {
    #[serde(rename = "eps_K")]
    EpsK,
    #[serde(rename = "zeta")]
    Zeta,
    #[serde(rename = "d1")]
    D1,
}

impl Control {
    pub fn as_str(self) -> &'static str {
        match self {
            Control::EpsK => "eps_K",
            Control::Zeta => "zeta",
            Control::D1 => "d1",
        }
    }

    pub fn get(self, params: &ModelParams) -> f64 {
        match self {
            Control::EpsK => params.scales.eps_k,
            Control::Zeta => params.energy.zeta,
            Control::D1 => params.energy.d1,
        }
    }

    /// Copy of `params` with this control set to `value`, validated.
    pub fn apply(self, params: &ModelParams, value: f64) -> Result<ModelParams> {
        let mut p = *params;
        match self {
            Control::EpsK => p.scales.eps_k = value,
            Control::Zeta => p.energy.zeta = value,
            Control::D1 => p.energy.d1 = value,
        }
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Control {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps_K" => Ok(Control::EpsK),
            "zeta" => Ok(Control::Zeta),
            "d1" => Ok(Control::D1),
            _ => Err(Error::Config(format!(
                "unknown control `{s}` (expected eps_K, zeta or d1)"
            ))),
        }
    }
}

/// Which equilibrium a trace criterion follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchSelector {
    /// The analytic root Y0, wherever it sits in the ordering.
    Baseline,
    Lower,
    Middle,
    Upper,
}

impl FromStr for BranchSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(BranchSelector::Baseline),
            "lower" => Ok(BranchSelector::Lower),
            "middle" => Ok(BranchSelector::Middle),
            "upper" => Ok(BranchSelector::Upper),
            _ => Err(Error::Config(format!("unknown branch `{s}`"))),
        }
    }
}

/// What changes at the threshold being located.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Criterion {
    /// Jacobian trace of the reduced production/capital system vanishes at
    /// the selected equilibrium (Hopf candidate).
    TraceZeroAtBranch { branch: BranchSelector },
    /// Discriminant of the deflated fixed-point quadratic vanishes.
    DiscriminantZero,
    /// A limit cycle is found from at least one standard initial state.
    CycleExists,
}

impl Criterion {
    pub fn name(&self) -> &'static str {
        match self {
            Criterion::TraceZeroAtBranch { .. } => "trace-zero-at-branch",
            Criterion::DiscriminantZero => "discriminant-zero",
            Criterion::CycleExists => "cycle-exists",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionResult {
    pub control: Control,
    pub criterion: Criterion,
    pub bracket: (f64, f64),
    pub value: f64,
    pub iterations: u32,
    /// Final bracket width.
    pub width: f64,
}

fn trace_at(params: &ModelParams, branch: BranchSelector) -> Result<f64> {
    let y = match branch {
        BranchSelector::Baseline => params.production.y0,
        other => {
            let want = match other {
                BranchSelector::Lower => BranchTag::Lower,
                BranchSelector::Middle => BranchTag::Middle,
                _ => BranchTag::Upper,
            };
            fixed_points_2d(params)?
                .into_iter()
                .find(|f| f.branch == want)
                .map(|f| f.y())
                .ok_or_else(|| {
                    Error::Degenerate(format!("no {} branch at these parameters", want.as_str()))
                })?
        }
    };
    Ok(eigen::trace_2x2(&jacobian_2d(params, y)))
}

fn cycle_exists(params: &ModelParams, settings: &IntegratorSettings) -> Result<bool> {
    let field = Field::model(FieldKind::ReducedYKCoupled, *params)?;
    let fingerprint = serde_json::to_string(params).unwrap_or_default();
    for init in standard_initial_states(&field)? {
        if detect_limit_cycle(&field, &init, settings, &fingerprint)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Locates the control value where `criterion` changes inside `interval`.
///
/// Analytic criteria bisect on the sign of the trace or discriminant down to
/// a 1e-10 bracket; `cycle-exists` bisects on the truth value down to 1e-3
/// and uses `settings` for each simulation.
pub fn bisect_threshold(
    params: &ModelParams,
    control: Control,
    interval: (f64, f64),
    criterion: Criterion,
    settings: &IntegratorSettings,
) -> Result<BisectionResult> {
    let (lo, hi) = interval;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Config(format!("invalid bracket [{lo}, {hi}]")));
    }
    let eval = |v: f64| -> Result<f64> {
        let p = control.apply(params, v)?;
        match criterion {
            Criterion::TraceZeroAtBranch { branch } => trace_at(&p, branch),
            Criterion::DiscriminantZero => Ok(deflate_by_baseline(&p).discriminant()),
            Criterion::CycleExists => Ok(if cycle_exists(&p, settings)? { 1.0 } else { -1.0 }),
        }
    };
    let width = match criterion {
        Criterion::CycleExists => SIMULATION_WIDTH,
        _ => ANALYTIC_WIDTH,
    };

    let (mut a, mut b) = (lo, hi);
    let fa = eval(a)?;
    let fb = eval(b)?;
    if fa == 0.0 {
        return Ok(done(control, criterion, interval, a, 0, 0.0));
    }
    if fb == 0.0 {
        return Ok(done(control, criterion, interval, b, 0, 0.0));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let sign_a = fa.signum();
    let mut iterations = 0;
    while b - a > width {
        let mid = 0.5 * (a + b);
        let fm = eval(mid)?;
        iterations += 1;
        if fm == 0.0 {
            return Ok(done(control, criterion, interval, mid, iterations, 0.0));
        }
        if fm.signum() == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(done(control, criterion, interval, 0.5 * (a + b), iterations, b - a))
}

fn done(
    control: Control,
    criterion: Criterion,
    bracket: (f64, f64),
    value: f64,
    iterations: u32,
    width: f64,
) -> BisectionResult {
    BisectionResult {
        control,
        criterion,
        bracket,
        value,
        iterations,
        width,
    }
}
