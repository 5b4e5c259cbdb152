//! Limit-cycle measurement on the first state component.
//!
//! The section is the level of the post-transient time average. A cycle runs
//! from one upward crossing to the next and is split into four phases:
//! boom (crossing up to the maximum), recession (maximum to the downward
//! crossing), depression (downward crossing to the minimum) and recovery
//! (minimum to the next upward crossing).

use serde::{Deserialize, Serialize};

use crate::dynamics::{Field, VectorField};
use crate::error::{Error, Result};
use crate::integrator::{self, IntegratorSettings, Trajectory};

/// Number of consecutive periods that must agree.
const CYCLES_REQUIRED: usize = 5;
const AGREEMENT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDurations {
    pub boom: f64,
    pub recession: f64,
    pub depression: f64,
    pub recovery: f64,
}

impl PhaseDurations {
    pub fn as_array(&self) -> [f64; 4] {
        [self.boom, self.recession, self.depression, self.recovery]
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }

    /// Longest over shortest phase.
    pub fn asymmetry(&self) -> f64 {
        let a = self.as_array();
        let max = a.iter().copied().fold(f64::MIN, f64::max);
        let min = a.iter().copied().fold(f64::MAX, f64::min);
        max / min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleInfo {
    pub period: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub y_mean: f64,
    pub phase_durations: PhaseDurations,
    /// Relative amplitude change between the last two measured periods.
    pub amplitude_drift: f64,
}

impl CycleInfo {
    pub fn amplitude(&self) -> f64 {
        self.y_max - self.y_min
    }
}

/// Integrates from `initial` and looks for a stable periodic orbit after
/// `settings.transient_cutoff`. Integration failures (divergence, floor
/// violations) mean no cycle.
pub fn detect_limit_cycle<F: VectorField + ?Sized>(
    field: &F,
    initial: &[f64],
    settings: &IntegratorSettings,
    fingerprint: &str,
) -> Result<Option<CycleInfo>> {
    if field.dim() < 2 {
        return Err(Error::Config(format!(
            "cycle detection needs at least two dimensions, `{}` has {}",
            field.name(),
            field.dim()
        )));
    }
    settings.validate()?;
    match integrator::integrate(field, initial, settings, fingerprint) {
        Ok(traj) => Ok(analyze_cycle(&traj)),
        Err(Error::Diverged { .. } | Error::FloorViolation { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Cycle measurement on an existing trajectory; see the module docs.
pub fn analyze_cycle(traj: &Trajectory) -> Option<CycleInfo> {
    let tail = traj.tail(traj.transient_cutoff);
    let t = &tail.times;
    let y = tail.component(0);
    if t.len() < 8 {
        return None;
    }
    // The tail rarely spans whole periods, so the mean is re-taken between
    // the first and last upward crossings of the first estimate.
    let mut level = time_average(t, &y, 0, t.len() - 1);
    for _ in 0..2 {
        let ups = crossings(t, &y, level, true);
        if ups.len() < 2 {
            return None;
        }
        level = time_average(t, &y, ups[0].0 + 1, ups[ups.len() - 1].0);
    }

    let ups = crossings(t, &y, level, true);
    if ups.len() < CYCLES_REQUIRED + 1 {
        return None;
    }
    let ups = &ups[ups.len() - CYCLES_REQUIRED - 1..];
    let downs = crossings(t, &y, level, false);

    let intervals: Vec<f64> = ups.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let period = intervals.iter().sum::<f64>() / intervals.len() as f64;
    if intervals
        .iter()
        .any(|d| (d - period).abs() > AGREEMENT * period)
    {
        return None;
    }

    let mut phases = [0.0; 4];
    let mut maxima = Vec::with_capacity(CYCLES_REQUIRED);
    let mut minima = Vec::with_capacity(CYCLES_REQUIRED);
    for w in ups.windows(2) {
        let ((i_up, t_up), (i_next, t_next)) = (w[0], w[1]);
        let &(i_down, t_down) = downs.iter().find(|(_, td)| *td > t_up && *td < t_next)?;
        let (t_max, y_max) = extremum(t, &y, i_up + 1, i_down, true)?;
        let (t_min, y_min) = extremum(t, &y, i_down + 1, i_next, false)?;
        phases[0] += t_max - t_up;
        phases[1] += t_down - t_max;
        phases[2] += t_min - t_down;
        phases[3] += t_next - t_min;
        maxima.push(y_max);
        minima.push(y_min);
    }

    let amps: Vec<f64> = maxima.iter().zip(&minima).map(|(a, b)| a - b).collect();
    let amp_floor = 1e-6 * level.abs().max(1.0);
    if amps.iter().any(|&a| a <= amp_floor) {
        return None;
    }
    let rel_change = |a: f64, b: f64| (b - a).abs() / a;
    if amps.windows(2).any(|w| rel_change(w[0], w[1]) > AGREEMENT) {
        return None;
    }
    let amplitude_drift = rel_change(amps[amps.len() - 2], amps[amps.len() - 1]);

    let n = CYCLES_REQUIRED as f64;
    let first = ups[0].0;
    let last = ups[CYCLES_REQUIRED].0;
    let info = CycleInfo {
        period,
        y_min: minima.iter().sum::<f64>() / n,
        y_max: maxima.iter().sum::<f64>() / n,
        y_mean: time_average(t, &y, first + 1, last),
        phase_durations: PhaseDurations {
            boom: phases[0] / n,
            recession: phases[1] / n,
            depression: phases[2] / n,
            recovery: phases[3] / n,
        },
        amplitude_drift,
    };
    (info.y_min < info.y_mean && info.y_mean < info.y_max).then_some(info)
}

/// Initial states used whenever no explicit one is given: production at
/// 1.1·Y0, 0.5·Y0 and Y0 + 2 with the other variables at their baselines.
/// Van der Pol uses y ∈ {0.1, 1, −2} with x = 0.
/// Solow uses the same rule on k*.
pub fn standard_initial_states(field: &Field) -> Result<Vec<Vec<f64>>> {
    if let Field::Vdp(_) = field {
        return Ok(vec![vec![0.1, 0.0], vec![1.0, 0.0], vec![-2.0, 0.0]]);
    }
    let base = field.baseline_state()?;
    let y0 = base[0];
    Ok([1.1 * y0, 0.5 * y0, y0 + 2.0]
        .into_iter()
        .map(|y| {
            let mut s = base.clone();
            s[0] = y;
            s
        })
        .collect())
}

// Trapezoidal time average of y over samples [a, b].
fn time_average(t: &[f64], y: &[f64], a: usize, b: usize) -> f64 {
    if b <= a {
        return y[a];
    }
    let area: f64 = (a..b)
        .map(|i| 0.5 * (y[i] + y[i + 1]) * (t[i + 1] - t[i]))
        .sum();
    area / (t[b] - t[a])
}

// Level crossings as (index of the sample before, interpolated time).
fn crossings(t: &[f64], y: &[f64], level: f64, upward: bool) -> Vec<(usize, f64)> {
    (0..y.len() - 1)
        .filter(|&i| {
            if upward {
                y[i] < level && y[i + 1] >= level
            } else {
                y[i] >= level && y[i + 1] < level
            }
        })
        .map(|i| (i, crossing_time(t, y, level, i)))
        .collect()
}

// Root of the cubic through samples i-1..=i+2 inside [t[i], t[i+1]],
// starting from linear interpolation. Falls back to the linear estimate near
// the ends of the record or if Newton leaves the bracket.
fn crossing_time(t: &[f64], y: &[f64], level: f64, i: usize) -> f64 {
    let frac = (level - y[i]) / (y[i + 1] - y[i]);
    let linear = t[i] + frac * (t[i + 1] - t[i]);
    if i == 0 || i + 2 >= y.len() {
        return linear;
    }
    let c = Cubic::through(t, y, i - 1);
    let f = |x: f64| {
        let (v, dv, _) = c.eval(x);
        (v - level, dv)
    };
    newton(f, linear, t[i], t[i + 1]).unwrap_or(linear)
}

// Extremum over samples [a, b]. The best sample is refined with the parabola
// through its neighbours, then with a stationary point of the local cubic.
fn extremum(t: &[f64], y: &[f64], a: usize, b: usize, max: bool) -> Option<(f64, f64)> {
    if b < a || b >= y.len() {
        return None;
    }
    let better = |u: f64, v: f64| if max { u > v } else { u < v };
    let mut j = a;
    for i in a..=b {
        if better(y[i], y[j]) {
            j = i;
        }
    }
    if j == 0 || j + 1 >= y.len() {
        return Some((t[j], y[j]));
    }
    let guess = parabola_vertex((t[j - 1], y[j - 1]), (t[j], y[j]), (t[j + 1], y[j + 1]));
    // Four samples, with the extra one on the side of the vertex.
    let start = if guess.0 >= t[j] || j < 2 { j - 1 } else { j - 2 };
    if start + 3 >= y.len() {
        return Some(guess);
    }
    let c = Cubic::through(t, y, start);
    let f = |x: f64| {
        let (_, dv, d2v) = c.eval(x);
        (dv, d2v)
    };
    Some(match newton(f, guess.0, t[j - 1], t[j + 1]) {
        Some(x) => (x, c.eval(x).0),
        None => guess,
    })
}

// Lagrange cubic through four consecutive samples.
struct Cubic {
    ts: [f64; 4],
    ys: [f64; 4],
}

impl Cubic {
    fn through(t: &[f64], y: &[f64], first: usize) -> Self {
        Cubic {
            ts: [t[first], t[first + 1], t[first + 2], t[first + 3]],
            ys: [y[first], y[first + 1], y[first + 2], y[first + 3]],
        }
    }

    // Value with first and second derivative.
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let (mut v, mut dv, mut d2v) = (0.0, 0.0, 0.0);
        for j in 0..4 {
            let (mut l, mut dl, mut d2l) = (1.0, 0.0, 0.0);
            for m in (0..4).filter(|&m| m != j) {
                let w = 1.0 / (self.ts[j] - self.ts[m]);
                let f = (x - self.ts[m]) * w;
                d2l = d2l * f + 2.0 * dl * w;
                dl = dl * f + l * w;
                l *= f;
            }
            v += self.ys[j] * l;
            dv += self.ys[j] * dl;
            d2v += self.ys[j] * d2l;
        }
        (v, dv, d2v)
    }
}

// Newton iteration for a root inside [lo, hi]; `f` returns the value and its
// derivative.
fn newton(f: impl Fn(f64) -> (f64, f64), start: f64, lo: f64, hi: f64) -> Option<f64> {
    let mut x = start;
    for _ in 0..12 {
        let (v, dv) = f(x);
        if dv == 0.0 || !dv.is_finite() {
            return None;
        }
        let step = v / dv;
        x -= step;
        if !(x >= lo && x <= hi) {
            return None;
        }
        if step.abs() <= 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    Some(x)
}

fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a == 0.0 || !a.is_finite() {
        return p1;
    }
    let b = d01 - a * (x0 + x1);
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    let yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    (xv, yv)
}
