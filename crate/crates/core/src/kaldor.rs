//! Investment/saving decompositions of the compact production dynamics.
//!
//! Every split satisfies `I − S = CL·Y + CS·Y² − CQ·Y³ + CC − (κ²/2s)·K̃`
//! with `K̃ = K − K_f`; they differ only in how the terms are shared.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::fmt_f64;
use crate::model::{self, ModelParams};

pub const IS_HEADER: &str = "Y,I,S,variant,K";

/// Number of grid points in the default requirement check.
pub const DEFAULT_SAMPLES: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitKind {
    Symmetric,
    LinearSaving,
    Uneven,
}

impl SplitKind {
    pub const ALL: [SplitKind; 3] = [
        SplitKind::Symmetric,
        SplitKind::LinearSaving,
        SplitKind::Uneven,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitKind::Symmetric => "symmetric",
            SplitKind::LinearSaving => "linear-saving",
            SplitKind::Uneven => "uneven",
        }
    }
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SplitKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown split `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ISPoint {
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

impl ISPoint {
    /// Net investment I − S, the production growth rate.
    pub fn net(&self) -> f64 {
        self.i - self.s
    }
}

pub fn split(kind: SplitKind, params: &ModelParams, y: f64, k: f64) -> ISPoint {
    let co = model::coefficients(params);
    let cap = params.capital.feedback() * (k - params.production.k_floor);
    let (y2, y3) = (y * y, y * y * y);
    let (i, s) = match kind {
        SplitKind::Symmetric => {
            let i = 0.5 * (co.cl * y + co.cs * y2 - co.cq * y3 + co.cc - cap);
            (i, -i)
        }
        SplitKind::LinearSaving => (
            co.cs * y2 - co.cq * y3 - cap,
            -co.cl * y - co.cc,
        ),
        SplitKind::Uneven => (
            co.cl * y + 0.2 * co.cs * y2 - 0.25 * co.cq * y3 + 0.5 * co.cc - 0.5 * cap,
            -0.8 * co.cs * y2 + 0.75 * co.cq * y3 - 0.5 * co.cc + 0.5 * cap,
        ),
    };
    ISPoint { y, k, i, s }
}

/// I and S along `ys` at fixed capital.
pub fn curve(kind: SplitKind, params: &ModelParams, ys: &[f64], k: f64) -> Vec<ISPoint> {
    ys.iter().map(|&y| split(kind, params, y, k)).collect()
}

/// Evenly spaced grid over `[lo, hi]` with `n` points.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Production range of the requirement check: `[Y0/2, 2·Y0]`.
pub fn default_y_range(params: &ModelParams) -> (f64, f64) {
    let y0 = params.production.y0;
    (0.5 * y0, 2.0 * y0)
}

/// Verdicts for one of the two functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionCheck {
    /// ∂/∂Y > 0 at every sample.
    pub increasing_in_y: bool,
    /// Moves in the required direction when K goes from low to high
    /// (I down, S up) at every sample.
    pub k_direction_ok: bool,
    /// Changes with K at some sample.
    pub depends_on_k: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KaldorReport {
    pub kind: SplitKind,
    pub y_range: (f64, f64),
    pub samples: usize,
    pub k_low: f64,
    pub k_high: f64,
    pub investment: FunctionCheck,
    pub saving: FunctionCheck,
    /// Both functions increase with production.
    pub monotone: bool,
    /// Both depend on K and move against each other.
    pub moves_against: bool,
}

impl KaldorReport {
    pub fn passes(&self) -> bool {
        self.monotone && self.moves_against
    }
}

pub fn check_kaldor_requirements(
    kind: SplitKind,
    params: &ModelParams,
    y_range: (f64, f64),
    samples: usize,
    k_low: f64,
    k_high: f64,
) -> Result<KaldorReport> {
    let (lo, hi) = y_range;
    if !(lo < hi) || samples < 2 {
        return Err(Error::Config(format!(
            "requirement check needs lo < hi and at least 2 samples, got [{lo}, {hi}] with {samples}"
        )));
    }
    if !(k_low < k_high) {
        return Err(Error::Config(format!(
            "K_low = {k_low} must be below K_high = {k_high}"
        )));
    }
    params.validate()?;

    let mid_k = 0.5 * (k_low + k_high);
    let mut di_pos = true;
    let mut ds_pos = true;
    let mut i_down = true;
    let mut s_up = true;
    let mut i_moves = false;
    let mut s_moves = false;
    for y in grid(lo, hi, samples) {
        let h = 1e-5 * (1.0 + y.abs());
        let up = split(kind, params, y + h, mid_k);
        let down = split(kind, params, y - h, mid_k);
        di_pos &= up.i - down.i > 0.0;
        ds_pos &= up.s - down.s > 0.0;

        let a = split(kind, params, y, k_low);
        let b = split(kind, params, y, k_high);
        let (di, ds) = (b.i - a.i, b.s - a.s);
        let tol = 1e-12 * (1.0 + a.i.abs().max(a.s.abs()));
        i_down &= di < -tol;
        s_up &= ds > tol;
        i_moves |= di.abs() > tol;
        s_moves |= ds.abs() > tol;
    }
    let investment = FunctionCheck {
        increasing_in_y: di_pos,
        k_direction_ok: i_down,
        depends_on_k: i_moves,
    };
    let saving = FunctionCheck {
        increasing_in_y: ds_pos,
        k_direction_ok: s_up,
        depends_on_k: s_moves,
    };
    Ok(KaldorReport {
        kind,
        y_range,
        samples,
        k_low,
        k_high,
        investment,
        saving,
        monotone: di_pos && ds_pos,
        moves_against: investment.depends_on_k
            && saving.depends_on_k
            && investment.k_direction_ok
            && saving.k_direction_ok,
    })
}

/// Van der Pol oscillator read as a Kaldor model, with capital in the role of
/// the slow variable: `I = Y/ω`, `S = ((1 − ω)/ω)·Y + Y³/3 + K`.
pub fn vdp_kaldor_map(omega: f64, y: f64, k: f64) -> Result<ISPoint> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::Domain(format!("omega = {omega} must be finite and nonzero")));
    }
    Ok(ISPoint {
        y,
        k,
        i: y / omega,
        s: (1.0 - omega) / omega * y + y * y * y / 3.0 + k,
    })
}

/// I/S curves, one block per (variant, K) in the order given.
pub fn write_is_csv<W: Write>(blocks: &[(SplitKind, Vec<ISPoint>)], mut w: W) -> io::Result<()> {
    writeln!(w, "{IS_HEADER}")?;
    for (kind, points) in blocks {
        for p in points {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_f64(p.y),
                fmt_f64(p.i),
                fmt_f64(p.s),
                kind,
                fmt_f64(p.k)
            )?;
        }
    }
    Ok(())
}
