//! Explicit Runge-Kutta integration of catalog fields.
//!
//! Two methods: classic fixed-step RK4 and the Dormand-Prince 5(4) pair with
//! step-size control. Both reject any step whose stages or result land on or
//! below a declared floor and retry it with half the step, up to
//! [`MAX_HALVINGS`] times.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::VectorField;
use crate::error::{Error, Result};

/// States with any component above this magnitude count as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Multiple of the step tolerance within which a settled tail counts as a
/// fixed point.
pub const CONVERGENCE_FACTOR: f64 = 100.0;

pub const MAX_HALVINGS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "rk4-fixed")]
    Rk4Fixed,
    #[serde(rename = "rk45-adaptive")]
    Rk45Adaptive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rk4Fixed => "rk4-fixed",
            Method::Rk45Adaptive => "rk45-adaptive",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4-fixed" => Ok(Method::Rk4Fixed),
            "rk45-adaptive" => Ok(Method::Rk45Adaptive),
            _ => Err(Error::Config(format!("unknown integration method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    pub method: Method,
    /// Fixed step for RK4; initial step for the adaptive method, whose step
    /// is capped at `100 * dt`.
    pub dt: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub t_end: f64,
    /// Record every n-th accepted step (the final state is always recorded).
    pub record_every: usize,
    /// Samples before this time are considered transient by the analysis.
    pub transient_cutoff: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            method: Method::Rk45Adaptive,
            dt: 0.01,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            t_end: 2000.0,
            record_every: 1,
            transient_cutoff: 1000.0,
        }
    }
}

impl IntegratorSettings {
    pub fn with_horizon(t_end: f64) -> Self {
        IntegratorSettings {
            t_end,
            transient_cutoff: 0.5 * t_end,
            ..Default::default()
        }
    }

    pub fn rk4(dt: f64, t_end: f64) -> Self {
        IntegratorSettings {
            method: Method::Rk4Fixed,
            dt,
            t_end,
            transient_cutoff: 0.5 * t_end,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, v, "must be finite and > 0"));
            }
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every", 0.0, "must be >= 1"));
        }
        if !(self.transient_cutoff >= 0.0 && self.transient_cutoff < self.t_end) {
            return Err(Error::param(
                "transient_cutoff",
                self.transient_cutoff,
                "must lie in [0, t_end)",
            ));
        }
        Ok(())
    }
}

/// Sampled solution of an initial value problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub field_name: String,
    pub state_names: Vec<String>,
    pub params_digest: String,
    pub transient_cutoff: f64,
    /// Time of the first non-finite or out-of-range state, if any.
    pub diverged_at: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.state_names.len()
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|x| x[i]).collect()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Index of the first sample at or after `t`.
    pub fn index_at(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s < t)
    }

    /// Copy of the samples with time ≥ `t`.
    pub fn tail(&self, t: f64) -> Trajectory {
        let i = self.index_at(t);
        Trajectory {
            times: self.times[i..].to_vec(),
            states: self.states[i..].to_vec(),
            ..self.clone()
        }
    }

    /// Writes `t,<state names>` followed by one row per sample, each value
    /// with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "t")?;
        for n in &self.state_names {
            write!(w, ",{n}")?;
        }
        writeln!(w)?;
        for (t, x) in self.times.iter().zip(&self.states) {
            write!(w, "{}", fmt_f64(*t))?;
            for v in x {
                write!(w, ",{}", fmt_f64(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Full-precision number formatting shared by every CSV writer.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Outcome of running a field to its long-time behaviour.
#[derive(Debug, Clone, PartialEq)]
pub enum Attractor {
    ConvergedPoint(Vec<f64>),
    /// Bounded but not settled; carries the post-transient trajectory.
    CycleHandoff(Trajectory),
    Divergent { time: f64 },
}

impl Attractor {
    pub fn label(&self) -> &'static str {
        match self {
            Attractor::ConvergedPoint(_) => "converged_point",
            Attractor::CycleHandoff(_) => "cycle_handoff",
            Attractor::Divergent { .. } => "divergent",
        }
    }
}

/// Integrates `field` from `initial` over `[0, settings.t_end]`.
///
/// Returns [`Error::Diverged`] if any state component leaves
/// `[-DIVERGENCE_LIMIT, DIVERGENCE_LIMIT]` or becomes non-finite.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    initial: &[f64],
    settings: &IntegratorSettings,
    fingerprint: &str,
) -> Result<Trajectory> {
    let traj = integrate_marked(field, initial, settings, fingerprint)?;
    match traj.diverged_at {
        Some(time) => Err(Error::Diverged { time }),
        None => Ok(traj),
    }
}

/// Like [`integrate`] but reports divergence through
/// [`Trajectory::diverged_at`] instead of an error.
pub fn integrate_marked<F: VectorField + ?Sized>(
    field: &F,
    initial: &[f64],
    settings: &IntegratorSettings,
    fingerprint: &str,
) -> Result<Trajectory> {
    settings.validate()?;
    if initial.len() != field.dim() {
        return Err(Error::Config(format!(
            "initial state has {} components, field `{}` needs {}",
            initial.len(),
            field.name(),
            field.dim()
        )));
    }
    for (i, floor) in field.floors() {
        if !(initial[i] > floor) {
            return Err(Error::Domain(format!(
                "initial component {i} = {} must exceed floor {floor}",
                initial[i]
            )));
        }
    }
    let mut dx = vec![0.0; field.dim()];
    field.eval(0.0, initial, &mut dx)?;

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![initial.to_vec()],
        field_name: field.name().to_string(),
        state_names: field.state_names(),
        params_digest: digest(field.name(), fingerprint, settings, initial),
        transient_cutoff: settings.transient_cutoff,
        diverged_at: None,
    };
    let mut stepper = Stepper::new(field, settings);
    match settings.method {
        Method::Rk4Fixed => stepper.run_fixed(initial, &mut traj)?,
        Method::Rk45Adaptive => stepper.run_adaptive(initial, &mut traj)?,
    }
    Ok(traj)
}

/// Integrates and classifies the tail of the trajectory.
///
/// Converged when every sample in the last 10% of the horizon is within
/// `CONVERGENCE_FACTOR · (abs_tol + rel_tol·|x|)` of the final state, per
/// component.
pub fn integrate_to_attractor<F: VectorField + ?Sized>(
    field: &F,
    initial: &[f64],
    settings: &IntegratorSettings,
    fingerprint: &str,
) -> Result<Attractor> {
    let traj = integrate_marked(field, initial, settings, fingerprint)?;
    Ok(classify_trajectory(&traj, settings))
}

/// The classification of [`integrate_to_attractor`] applied to a trajectory
/// already integrated with `settings`.
pub fn classify_trajectory(traj: &Trajectory, settings: &IntegratorSettings) -> Attractor {
    if let Some(time) = traj.diverged_at {
        return Attractor::Divergent { time };
    }
    let (abs_tol, rel_tol) = (settings.abs_tol, settings.rel_tol);
    let last = traj.last_state().to_vec();
    let start = traj.index_at(0.9 * settings.t_end);
    let settled = traj.states[start..].iter().all(|x| {
        x.iter()
            .zip(&last)
            .all(|(a, b)| (a - b).abs() <= CONVERGENCE_FACTOR * (abs_tol + rel_tol * b.abs()))
    });
    if settled {
        Attractor::ConvergedPoint(last)
    } else {
        Attractor::CycleHandoff(traj.tail(settings.transient_cutoff))
    }
}

fn digest(name: &str, fingerprint: &str, settings: &IntegratorSettings, initial: &[f64]) -> String {
    let mut h = Sha256::new();
    h.update(name.as_bytes());
    h.update(b"\0");
    h.update(fingerprint.as_bytes());
    h.update(b"\0");
    h.update(serde_json::to_string(settings).unwrap_or_default().as_bytes());
    for v in initial {
        h.update(v.to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights equal the last row of A; these are fifth minus fourth.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<'a, F: ?Sized> {
    field: &'a F,
    settings: &'a IntegratorSettings,
    floors: Vec<(usize, f64)>,
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl<'a, F: VectorField + ?Sized> Stepper<'a, F> {
    fn new(field: &'a F, settings: &'a IntegratorSettings) -> Self {
        let n = field.dim();
        Stepper {
            field,
            settings,
            floors: field.floors(),
            k: vec![vec![0.0; n]; 7],
            tmp: vec![0.0; n],
        }
    }

    fn above_floors(&self, x: &[f64]) -> bool {
        self.floors.iter().all(|&(i, f)| x[i] > f)
    }

    fn eval_guarded(&mut self, t: f64, stage: usize) -> bool {
        if !self.above_floors(&self.tmp) {
            return false;
        }
        let (field, tmp) = (self.field, &self.tmp);
        field.eval(t, tmp, &mut self.k[stage]).is_ok()
    }

    /// One classic RK4 step; `None` when a stage or the result violates a
    /// floor or the field refuses to evaluate.
    fn rk4_step(&mut self, t: f64, x: &[f64], h: f64) -> Option<Vec<f64>> {
        let n = x.len();
        self.tmp.copy_from_slice(x);
        if !self.eval_guarded(t, 0) {
            return None;
        }
        for (stage, frac) in [(1, 0.5), (2, 0.5), (3, 1.0)] {
            for i in 0..n {
                self.tmp[i] = x[i] + frac * h * self.k[stage - 1][i];
            }
            if !self.eval_guarded(t + frac * h, stage) {
                return None;
            }
        }
        let out: Vec<f64> = (0..n)
            .map(|i| {
                x[i] + h / 6.0
                    * (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i])
            })
            .collect();
        self.above_floors(&out).then_some(out)
    }

    fn run_fixed(&mut self, initial: &[f64], traj: &mut Trajectory) -> Result<()> {
        let s = self.settings;
        let n_steps = (s.t_end / s.dt).round().max(1.0) as usize;
        let mut x = initial.to_vec();
        let mut t = 0.0;
        for step in 1..=n_steps {
            let t_target = if step == n_steps {
                s.t_end
            } else {
                step as f64 * s.dt
            };
            let mut halvings = 0;
            let mut h = t_target - t;
            while t < t_target {
                h = h.min(t_target - t);
                match self.rk4_step(t, &x, h) {
                    Some(next) => {
                        x = next;
                        t = if h >= t_target - t { t_target } else { t + h };
                    }
                    None => {
                        halvings += 1;
                        if halvings > MAX_HALVINGS {
                            return Err(self.floor_error(t, &x, halvings));
                        }
                        h *= 0.5;
                    }
                }
            }
            if diverged(&x) {
                push(traj, t, &x);
                traj.diverged_at = Some(t);
                return Ok(());
            }
            if step % s.record_every == 0 || step == n_steps {
                push(traj, t, &x);
            }
        }
        Ok(())
    }

    fn run_adaptive(&mut self, initial: &[f64], traj: &mut Trajectory) -> Result<()> {
        let s = self.settings;
        let n = initial.len();
        let h_max = 100.0 * s.dt;
        let h_min = s.dt * 1e-12;
        let mut x = initial.to_vec();
        let mut t = 0.0;
        let mut h = s.dt;
        let mut accepted = 0usize;
        let mut halvings = 0u32;
        let mut x_new = vec![0.0; n];

        while t < s.t_end {
            let last = t + h >= s.t_end;
            if last {
                h = s.t_end - t;
            }
            let Some(err) = self.dopri_step(t, &x, h, &mut x_new) else {
                halvings += 1;
                if halvings > MAX_HALVINGS || h < h_min {
                    return Err(self.floor_error(t, &x, halvings));
                }
                h *= 0.5;
                continue;
            };
            if err <= 1.0 {
                t = if last { s.t_end } else { t + h };
                x.copy_from_slice(&x_new);
                accepted += 1;
                halvings = 0;
                if diverged(&x) {
                    push(traj, t, &x);
                    traj.diverged_at = Some(t);
                    return Ok(());
                }
                if accepted.is_multiple_of(s.record_every) || t >= s.t_end {
                    push(traj, t, &x);
                }
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).min(h_max);
            if h < h_min {
                return Err(Error::Diverged { time: t });
            }
        }
        Ok(())
    }

    /// Fills `out` with the fifth-order solution and returns the scaled
    /// error norm, or `None` on a floor or evaluation failure.
    fn dopri_step(&mut self, t: f64, x: &[f64], h: f64, out: &mut [f64]) -> Option<f64> {
        let n = x.len();
        let s = self.settings;
        self.tmp.copy_from_slice(x);
        if !self.eval_guarded(t, 0) {
            return None;
        }
        for stage in 1..7 {
            for i in 0..n {
                let mut acc = x[i];
                for (j, a) in A[stage].iter().enumerate().take(stage) {
                    acc += h * a * self.k[j][i];
                }
                self.tmp[i] = acc;
            }
            if !self.eval_guarded(t + C[stage] * h, stage) {
                return None;
            }
        }
        // Stage 6 was evaluated at the fifth-order solution itself.
        out.copy_from_slice(&self.tmp);
        let mut err: f64 = 0.0;
        for i in 0..n {
            let e: f64 = (0..7).map(|j| E[j] * self.k[j][i]).sum::<f64>() * h;
            let scale = s.abs_tol + s.rel_tol * x[i].abs().max(out[i].abs());
            err = err.max((e / scale).abs());
        }
        if err.is_nan() {
            return None;
        }
        Some(err)
    }

    fn floor_error(&self, t: f64, x: &[f64], halvings: u32) -> Error {
        let floor = self
            .floors
            .iter()
            .map(|&(i, f)| (x[i] - f, f))
            .fold((f64::INFINITY, f64::NAN), |a, b| if b.0 < a.0 { b } else { a })
            .1;
        Error::FloorViolation {
            time: t,
            floor,
            halvings,
        }
    }
}

fn diverged(x: &[f64]) -> bool {
    x.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT)
}

fn push(traj: &mut Trajectory, t: f64, x: &[f64]) {
    traj.times.push(t);
    traj.states.push(x.to_vec());
}

/// Field defined by a closure; used for ad-hoc systems and tests.
pub struct FnField<G> {
    name: String,
    dim: usize,
    floors: Vec<(usize, f64)>,
    f: G,
}

impl<G> FnField<G>
where
    G: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    pub fn new(name: impl Into<String>, dim: usize, f: G) -> Self {
        FnField {
            name: name.into(),
            dim,
            floors: Vec::new(),
            f,
        }
    }

    pub fn with_floor(mut self, index: usize, floor: f64) -> Self {
        self.floors.push((index, floor));
        self
    }
}

impl<G> VectorField for FnField<G>
where
    G: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        (self.f)(t, x, dx);
        Ok(())
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn floors(&self) -> Vec<(usize, f64)> {
        self.floors.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> FnField<impl Fn(f64, &[f64], &mut [f64]) + Sync> {
        FnField::new("decay", 1, |_, x, dx| dx[0] = -x[0])
    }

    fn max_error(settings: &IntegratorSettings) -> f64 {
        let traj = integrate(&decay(), &[1.0], settings, "").unwrap();
        traj.times
            .iter()
            .zip(&traj.states)
            .map(|(t, x)| (x[0] - (-t).exp()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_field_gives_constant_trajectory() {
        let zero = FnField::new("zero", 2, |_, _, dx| dx.fill(0.0));
        for settings in [IntegratorSettings::rk4(0.1, 10.0), IntegratorSettings::with_horizon(10.0)] {
            let traj = integrate(&zero, &[1.5, -2.0], &settings, "").unwrap();
            assert!(traj.states.iter().all(|x| x == &[1.5, -2.0]));
            assert_eq!(*traj.times.last().unwrap(), 10.0);
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let coarse = max_error(&IntegratorSettings::rk4(0.2, 5.0));
        let fine = max_error(&IntegratorSettings::rk4(0.1, 5.0));
        assert!(coarse / fine >= 14.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn adaptive_meets_tolerance() {
        let err = max_error(&IntegratorSettings::with_horizon(10.0));
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn times_strictly_increase() {
        let traj = integrate(&decay(), &[1.0], &IntegratorSettings::with_horizon(50.0), "").unwrap();
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*traj.times.last().unwrap(), 50.0);
    }

    #[test]
    fn record_every_thins_samples() {
        let mut s = IntegratorSettings::rk4(0.1, 10.0);
        s.record_every = 10;
        let traj = integrate(&decay(), &[1.0], &s, "").unwrap();
        assert_eq!(traj.len(), 11);
    }

    #[test]
    fn divergence_is_reported() {
        let blowup = FnField::new("blowup", 1, |_, x, dx| dx[0] = x[0] * x[0]);
        let s = IntegratorSettings::with_horizon(10.0);
        assert!(matches!(
            integrate(&blowup, &[1.0], &s, ""),
            Err(Error::Diverged { .. })
        ));
        let a = integrate_to_attractor(&blowup, &[1.0], &s, "").unwrap();
        assert!(matches!(a, Attractor::Divergent { time } if time < 1.01));
    }

    #[test]
    fn floor_guard_halves_instead_of_crossing() {
        // Fast decay toward the floor at zero: a coarse RK4 step would
        // overshoot below it.
        let fast = FnField::new("fast", 1, |_, x, dx| dx[0] = -50.0 * x[0]).with_floor(0, 0.0);
        let traj = integrate(&fast, &[1.0], &IntegratorSettings::rk4(0.1, 2.0), "").unwrap();
        assert!(traj.states.iter().all(|x| x[0] > 0.0));
    }

    #[test]
    fn unreachable_floor_is_an_error() {
        let sink = FnField::new("sink", 1, |_, _, dx| dx[0] = -1.0).with_floor(0, 0.0);
        let r = integrate(&sink, &[0.5], &IntegratorSettings::rk4(0.1, 2.0), "");
        assert!(matches!(r, Err(Error::FloorViolation { halvings, .. }) if halvings > MAX_HALVINGS));
        let r = integrate(&sink, &[0.5], &IntegratorSettings::with_horizon(2.0), "");
        assert!(matches!(r, Err(Error::FloorViolation { .. })));
    }

    #[test]
    fn linear_decay_converges_to_zero() {
        let a = integrate_to_attractor(&decay(), &[1.0], &IntegratorSettings::with_horizon(100.0), "")
            .unwrap();
        match a {
            Attractor::ConvergedPoint(p) => assert!(p[0].abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn digest_is_deterministic_and_input_sensitive() {
        let s = IntegratorSettings::rk4(0.1, 1.0);
        let a = integrate(&decay(), &[1.0], &s, "p").unwrap();
        let b = integrate(&decay(), &[1.0], &s, "p").unwrap();
        let c = integrate(&decay(), &[1.0], &s, "q").unwrap();
        assert_eq!(a, b);
        assert_ne!(a.params_digest, c.params_digest);
    }

    #[test]
    fn csv_header_and_precision() {
        let traj = integrate(&decay(), &[1.0], &IntegratorSettings::rk4(0.5, 1.0), "").unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x0"));
        let row: Vec<f64> = lines
            .nth(1)
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row, traj.states[1].iter().copied().fold(vec![0.5], |mut v, x| {
            v.push(x);
            v
        }));
    }

    #[test]
    fn invalid_settings_rejected() {
        let mut s = IntegratorSettings::default();
        s.dt = 0.0;
        assert!(s.validate().is_err());
        let mut s = IntegratorSettings::default();
        s.record_every = 0;
        assert!(s.validate().is_err());
    }
}
