use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bisect::Control;
use super::cycle::{detect_limit_cycle, standard_initial_states, CycleInfo};
use super::fixed_points::fixed_points_2d;
use super::FixedPoint;
use crate::dynamics::{Field, FieldKind};
use crate::error::{Error, Result};
use crate::integrator::{fmt_f64, IntegratorSettings};
use crate::model::ModelParams;

pub const BIFURCATION_HEADER: &str = "control,value,branch,Y_star,K_star,re_lambda1,im_lambda1,\
re_lambda2,im_lambda2,class,cycle_period,cycle_ymin,cycle_ymax,cycle_ymean";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub control: Control,
    pub min: f64,
    pub max: f64,
    pub n: usize,
    #[serde(default)]
    pub with_cycles: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("sweep needs n >= 2, got {}", self.n)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Config(format!(
                "sweep range [{}, {}] is not increasing",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// Evenly spaced control values including both ends.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

/// Equilibria (and optionally a limit cycle) at one control value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationRow {
    pub control: Control,
    pub value: f64,
    pub fixed_points: Vec<FixedPoint>,
    pub cycle: Option<CycleInfo>,
    /// Set when the parameters at this value could not be evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One-parameter scan of the reduced production/capital system.
///
/// Rows are evaluated in parallel and returned in control order. A row whose
/// parameters are invalid carries the error message instead of aborting the
/// scan. With `with_cycles`, the first cycle found from the standard initial
/// states is recorded.
pub fn sweep(
    params: &ModelParams,
    spec: &SweepSpec,
    settings: &IntegratorSettings,
) -> Result<Vec<BifurcationRow>> {
    spec.validate()?;
    if spec.with_cycles {
        settings.validate()?;
    }
    Ok(spec
        .values()
        .into_par_iter()
        .map(|value| row(params, spec, settings, value))
        .collect())
}

fn row(
    params: &ModelParams,
    spec: &SweepSpec,
    settings: &IntegratorSettings,
    value: f64,
) -> BifurcationRow {
    let mut out = BifurcationRow {
        control: spec.control,
        value,
        fixed_points: Vec::new(),
        cycle: None,
        error: None,
    };
    let result = spec.control.apply(params, value).and_then(|p| {
        out.fixed_points = fixed_points_2d(&p)?;
        if spec.with_cycles {
            out.cycle = find_cycle(&p, settings)?;
        }
        Ok(())
    });
    if let Err(e) = result {
        out.error = Some(e.to_string());
    }
    out
}

fn find_cycle(params: &ModelParams, settings: &IntegratorSettings) -> Result<Option<CycleInfo>> {
    let field = Field::model(FieldKind::ReducedYKCoupled, *params)?;
    let fingerprint = serde_json::to_string(params).unwrap_or_default();
    for init in standard_initial_states(&field)? {
        if let Some(c) = detect_limit_cycle(&field, &init, settings, &fingerprint)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// One line per fixed point; cycle columns repeat on every line of a row
/// and are empty when there is no cycle. Rows that failed get a single line
/// with class `error`.
pub fn write_bifurcation_csv<W: Write>(rows: &[BifurcationRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{BIFURCATION_HEADER}")?;
    for row in rows {
        let cycle = match &row.cycle {
            Some(c) => format!(
                "{},{},{},{}",
                fmt_f64(c.period),
                fmt_f64(c.y_min),
                fmt_f64(c.y_max),
                fmt_f64(c.y_mean)
            ),
            None => ",,,".to_string(),
        };
        let head = format!("{},{}", row.control, fmt_f64(row.value));
        if row.error.is_some() {
            writeln!(w, "{head},,,,,,,,error,{cycle}")?;
            continue;
        }
        for fp in &row.fixed_points {
            let ev = |i: usize| {
                fp.eigenvalues
                    .get(i)
                    .map(|e| format!("{},{}", fmt_f64(e.re), fmt_f64(e.im)))
                    .unwrap_or_else(|| ",".to_string())
            };
            writeln!(
                w,
                "{head},{},{},{},{},{},{},{cycle}",
                fp.branch,
                fmt_f64(fp.state[0]),
                fmt_f64(fp.state[1]),
                ev(0),
                ev(1),
                fp.classification
            )?;
        }
    }
    Ok(())
}

/// A fixed point followed across adjacent sweep rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchLine {
    pub values: Vec<f64>,
    pub points: Vec<FixedPoint>,
}

impl BranchLine {
    fn last_y(&self) -> f64 {
        self.points.last().map(FixedPoint::y).unwrap_or(f64::NAN)
    }
}

/// Chains fixed points of successive rows into branches by nearest-Y
/// matching. Lines end when a row has fewer points than lines; extra points
/// start new lines.
pub fn link_branches(rows: &[BifurcationRow]) -> Vec<BranchLine> {
    let mut done: Vec<BranchLine> = Vec::new();
    let mut open: Vec<BranchLine> = Vec::new();
    for row in rows {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (li, line) in open.iter().enumerate() {
            for (pi, fp) in row.fixed_points.iter().enumerate() {
                pairs.push(((line.last_y() - fp.y()).abs(), li, pi));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut line_used = vec![false; open.len()];
        let mut point_used = vec![false; row.fixed_points.len()];
        let mut assignment = vec![None; open.len()];
        for (_, li, pi) in pairs {
            if !line_used[li] && !point_used[pi] {
                line_used[li] = true;
                point_used[pi] = true;
                assignment[li] = Some(pi);
            }
        }
        let mut next = Vec::new();
        for (line, a) in open.drain(..).zip(assignment) {
            match a {
                Some(pi) => {
                    let mut line = line;
                    line.values.push(row.value);
                    line.points.push(row.fixed_points[pi].clone());
                    next.push(line);
                }
                None => done.push(line),
            }
        }
        for (pi, fp) in row.fixed_points.iter().enumerate() {
            if !point_used[pi] {
                next.push(BranchLine {
                    values: vec![row.value],
                    points: vec![fp.clone()],
                });
            }
        }
        open = next;
    }
    done.extend(open);
    done
}
