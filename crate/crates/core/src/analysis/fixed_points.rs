use serde::{Deserialize, Serialize};

use super::eigen::{self, Matrix2, Matrix3};
use super::{classify, BranchTag, FixedPoint};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::model::{self, ModelParams, State3};

/// Residual above which the baseline deflation is distrusted.
const DEFLATION_TOL: f64 = 1e-8;

/// The fixed-point cubic −CQ·Y³ + CS·Y² + (CL − kappa/2)·Y + CC divided by
/// (Y − Y0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deflation {
    /// Cubic coefficients, highest degree first.
    pub cubic: [f64; 4],
    /// Quotient coefficients, highest degree first.
    pub quadratic: [f64; 3],
    /// Division remainder relative to the largest cubic coefficient.
    pub relative_remainder: f64,
}

impl Deflation {
    /// Discriminant of the monic quotient; negative means Y0 is the only
    /// real fixed point.
    pub fn discriminant(&self) -> f64 {
        let [a, b, c] = self.quadratic;
        let (b, c) = (b / a, c / a);
        b * b - 4.0 * c
    }

    /// Real roots of the quotient, ascending.
    pub fn quadratic_roots(&self) -> Vec<f64> {
        let [a, b, c] = self.quadratic;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let sq = disc.sqrt();
        let q = -0.5 * (b + sq.copysign(b));
        let mut r = if q == 0.0 {
            vec![0.0, 0.0]
        } else {
            vec![q / a, c / q]
        };
        r.sort_by(f64::total_cmp);
        r
    }
}

pub fn deflate_by_baseline(params: &ModelParams) -> Deflation {
    let co = model::coefficients(params);
    let y0 = params.production.y0;
    let cubic = [-co.cq, co.cs, co.cl - params.capital.kappa / 2.0, co.cc];
    let b2 = cubic[0];
    let b1 = cubic[1] + y0 * b2;
    let b0 = cubic[2] + y0 * b1;
    let rem = cubic[3] + y0 * b0;
    let scale = cubic.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    Deflation {
        cubic,
        quadratic: [b2, b1, b0],
        relative_remainder: rem.abs() / scale,
    }
}

/// Jacobian of the reduced production/capital system at production `y`.
pub fn jacobian_2d(params: &ModelParams, y: f64) -> Matrix2 {
    let co = model::coefficients(params);
    let eps = params.scales.eps_k;
    [
        [co.cubic_slope(y), -params.capital.feedback()],
        [eps * params.capital.s, -eps * params.capital.kappa],
    ]
}

/// Equilibria of the reduced production/capital system, sorted by Y.
///
/// Y0 always solves the fixed-point cubic, so the cubic is deflated by it and
/// the remaining pair comes from the quadratic formula. A general cubic
/// solve is used instead if the deflation remainder is suspicious.
pub fn fixed_points_2d(params: &ModelParams) -> Result<Vec<FixedPoint>> {
    params.validate()?;
    let defl = deflate_by_baseline(params);
    let y0 = params.production.y0;
    let mut ys = if defl.relative_remainder > DEFLATION_TOL {
        log::warn!(
            "baseline deflation remainder {:.3e} exceeds {:.0e}; using general cubic roots",
            defl.relative_remainder,
            DEFLATION_TOL
        );
        let [a, b, c, d] = defl.cubic;
        eigen::cubic_real_roots(a, b, c, d)
    } else {
        let mut ys = defl.quadratic_roots();
        ys.push(y0);
        ys
    };
    ys.sort_by(f64::total_cmp);
    ys.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * a.abs().max(1.0));
    if ys.is_empty() {
        return Err(Error::Degenerate("fixed-point cubic has no real root".into()));
    }

    let k_floor = params.production.k_floor;
    let ratio = params.capital.s / params.capital.kappa;
    let tags = BranchTag::for_count(ys.len());
    Ok(ys
        .iter()
        .zip(tags)
        .map(|(&y, &branch)| {
            let ev = eigen::eigenvalues_2x2(&jacobian_2d(params, y));
            FixedPoint {
                state: vec![y, k_floor + ratio * y],
                eigenvalues: ev.to_vec(),
                classification: classify(&ev),
                branch,
            }
        })
        .collect())
}

/// Jacobian of the full three-dimensional system in (Y, K, E) order.
pub fn jacobian_3d(params: &ModelParams, state: &State3) -> Result<Matrix3> {
    let gap = state.e - params.production.e_floor;
    if gap <= 0.0 {
        return Err(Error::Singular(format!(
            "energy {} at or below floor",
            state.e
        )));
    }
    let y = state.y;
    let en = params.energy;
    let g = params.eigen;
    let kappa = params.capital.kappa;
    let y_s = en.y_saturation();
    let eps_k = params.scales.eps_k;
    let eps_e = params.scales.eps_e;

    let dyy = (kappa - en.c) / 2.0 + en.q / (2.0 * gap) - g.g1 + g.g2 * params.production.y0
        + 2.0 * y * (en.zeta * y_s / 2.0 - g.g2)
        - 1.5 * en.zeta * y * y;
    let dyk = -params.capital.feedback();
    let dye = -y * en.q / (2.0 * gap * gap);
    let dey = -eps_e * gap * (2.0 * en.zeta * y - en.zeta * y_s);
    let dee = -eps_e * (en.c - en.zeta * y_s * y + en.zeta * y * y);
    Ok([
        [dyy, dyk, dye],
        [eps_k * params.capital.s, -eps_k * kappa, 0.0],
        [dey, 0.0, dee],
    ])
}

/// The baseline equilibrium (Y0, K0, E0) of the full system with its
/// linear stability.
pub fn fixed_point_3d(params: &ModelParams) -> Result<FixedPoint> {
    params.validate_for_dynamics()?;
    let d = model::derived_constants(params)?;
    let state = State3::new(params.production.y0, d.k0, d.e0);
    let residual = dynamics::rhs_full3(&state, params)?;
    let scale = 1.0 + state.y.abs() + state.k.abs() + state.e.abs();
    if residual.to_array().iter().any(|r| r.abs() > 1e-10 * scale) {
        return Err(Error::Degenerate(format!(
            "baseline is not an equilibrium (residual {residual:?})"
        )));
    }
    let ev = eigen::eigenvalues_3x3(&jacobian_3d(params, &state)?);
    Ok(FixedPoint {
        state: state.to_array().to_vec(),
        eigenvalues: ev.to_vec(),
        classification: classify(&ev),
        branch: BranchTag::Lower,
    })
}
