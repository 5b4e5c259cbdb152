//! Right-hand sides of every model and the string-keyed field catalog.
//!
//! Negative production is allowed everywhere; only the energy floor is a
//! hard boundary (the `q / (2(E − E_f))` coupling is singular there).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Coefficients, ModelParams, SolowParams, State3};

/// Van der Pol control parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdpParams {
    pub omega: f64,
}

impl VdpParams {
    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() {
            return Err(Error::param("omega", self.omega, "must be finite"));
        }
        if self.omega == 0.0 {
            return Err(Error::param("omega", self.omega, "must be nonzero"));
        }
        Ok(())
    }
}

fn energy_gap(e: f64, params: &ModelParams) -> Result<f64> {
    let gap = e - params.production.e_floor;
    if gap <= 0.0 || gap.is_nan() {
        return Err(Error::Singular(format!(
            "energy {e} at or below floor {}",
            params.production.e_floor
        )));
    }
    Ok(gap)
}

fn require_symmetric(params: &ModelParams) -> Result<()> {
    if params.production.is_symmetric() {
        Ok(())
    } else {
        Err(Error::Config(
            "dynamics require a_K = a_E = 0.5".to_string(),
        ))
    }
}

// Shared production terms; `linear` is the bracket multiplying Y.
fn production_rate(params: &ModelParams, y: f64, linear: f64) -> f64 {
    let g = params.eigen;
    let y_s = params.energy.y_saturation();
    let zeta = params.energy.zeta;
    y * linear + y * y * (zeta * y_s / 2.0 - g.g2) - y * y * y * zeta / 2.0
        + g.g1 * params.production.y0
}

fn energy_rate(params: &ModelParams, y: f64, gap: f64) -> f64 {
    let en = params.energy;
    let eps = params.scales.eps_e;
    eps * en.q - eps * gap * (en.c - en.zeta * en.y_saturation() * y + en.zeta * y * y)
}

fn capital_rate(params: &ModelParams, y: f64, k: f64) -> f64 {
    let eps = params.scales.eps_k;
    eps * params.capital.s * y - eps * params.capital.kappa * (k - params.production.k_floor)
}

/// Full three-dimensional production/capital/energy dynamics.
pub fn rhs_full3(state: &State3, params: &ModelParams) -> Result<State3> {
    require_symmetric(params)?;
    let gap = energy_gap(state.e, params)?;
    Ok(full3_unchecked(state, params, gap))
}

fn full3_unchecked(state: &State3, params: &ModelParams, gap: f64) -> State3 {
    let (y, k) = (state.y, state.k);
    let g = params.eigen;
    let kappa = params.capital.kappa;
    let linear = (kappa - params.energy.c) / 2.0 + params.energy.q / (2.0 * gap) - g.g1
        + g.g2 * params.production.y0;
    State3 {
        y: production_rate(params, y, linear)
            - params.capital.feedback() * (k - params.production.k_floor),
        k: capital_rate(params, y, k),
        e: energy_rate(params, y, gap),
    }
}

/// Production and energy with capital held at its quasi-stationary level.
pub fn rhs_reduced_ye(state: [f64; 2], params: &ModelParams) -> Result<[f64; 2]> {
    require_symmetric(params)?;
    let [y, e] = state;
    let gap = energy_gap(e, params)?;
    Ok(reduced_ye_unchecked(y, params, gap))
}

fn reduced_ye_unchecked(y: f64, params: &ModelParams, gap: f64) -> [f64; 2] {
    let g = params.eigen;
    let linear = -params.energy.c / 2.0 + params.energy.q / (2.0 * gap) - g.g1
        + g.g2 * params.production.y0;
    [production_rate(params, y, linear), energy_rate(params, y, gap)]
}

/// Production and capital with energy quasi-stationary in production.
pub fn rhs_reduced_yk_qs(state: [f64; 2], params: &ModelParams) -> Result<[f64; 2]> {
    require_symmetric(params)?;
    Ok(reduced_yk_qs_unchecked(state, params))
}

fn reduced_yk_qs_unchecked(state: [f64; 2], params: &ModelParams) -> [f64; 2] {
    let [y, k] = state;
    let kappa = params.capital.kappa;
    [
        model::eigendynamics(&params.eigen, params.production.y0, y) + kappa / 2.0 * y
            - params.capital.feedback() * (k - params.production.k_floor),
        capital_rate(params, y, k),
    ]
}

/// Production and capital with energy eliminated through the production
/// function; the compact cubic form.
pub fn rhs_reduced_yk_coupled(state: [f64; 2], params: &ModelParams) -> Result<[f64; 2]> {
    require_symmetric(params)?;
    Ok(reduced_yk_coupled_unchecked(
        state,
        params,
        &model::coefficients(params),
    ))
}

fn reduced_yk_coupled_unchecked(
    state: [f64; 2],
    params: &ModelParams,
    coeffs: &Coefficients,
) -> [f64; 2] {
    let [y, k] = state;
    [
        coeffs.cubic(y) - params.capital.feedback() * (k - params.production.k_floor),
        capital_rate(params, y, k),
    ]
}

/// Capital per capita in the neoclassical model.
pub fn rhs_solow(k: f64, params: &SolowParams) -> Result<f64> {
    if k < 0.0 || k.is_nan() {
        return Err(Error::Domain(format!("capital per capita {k} < 0")));
    }
    Ok(solow_unchecked(k, params))
}

fn solow_unchecked(k: f64, params: &SolowParams) -> f64 {
    params.s * params.tfp * k.powf(params.beta()) - (params.r + params.kappa) * k
}

/// Van der Pol oscillator in first-order (y, x) form.
pub fn rhs_vdp(state: [f64; 2], params: &VdpParams) -> Result<[f64; 2]> {
    if params.omega == 0.0 {
        return Err(Error::Domain("omega = 0 divides by zero".into()));
    }
    Ok(vdp_unchecked(state, params.omega))
}

fn vdp_unchecked(state: [f64; 2], omega: f64) -> [f64; 2] {
    let [y, x] = state;
    [omega * (y - y * y * y / 3.0 - x), y / omega]
}

/// Anything the integrator can step. Fields are autonomous in this crate but
/// the time argument is kept for generality.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()>;

    /// Catalog key.
    fn name(&self) -> &str;

    /// Column labels of the state vector.
    fn state_names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| format!("x{i}")).collect()
    }

    /// Components that must stay strictly above a floor, as (index, floor).
    fn floors(&self) -> Vec<(usize, f64)> {
        Vec::new()
    }
}

/// Catalog keys of the built-in fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    #[serde(rename = "full3")]
    Full3,
    #[serde(rename = "reduced-ye")]
    ReducedYE,
    #[serde(rename = "reduced-yk-qs")]
    ReducedYKQs,
    #[serde(rename = "reduced-yk-coupled")]
    ReducedYKCoupled,
    #[serde(rename = "solow")]
    Solow,
    #[serde(rename = "vdp")]
    Vdp,
}

impl FieldKind {
    pub const ALL: [FieldKind; 6] = [
        FieldKind::Full3,
        FieldKind::ReducedYE,
        FieldKind::ReducedYKQs,
        FieldKind::ReducedYKCoupled,
        FieldKind::Solow,
        FieldKind::Vdp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Full3 => "full3",
            FieldKind::ReducedYE => "reduced-ye",
            FieldKind::ReducedYKQs => "reduced-yk-qs",
            FieldKind::ReducedYKCoupled => "reduced-yk-coupled",
            FieldKind::Solow => "solow",
            FieldKind::Vdp => "vdp",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            FieldKind::Full3 => 3,
            FieldKind::Solow => 1,
            _ => 2,
        }
    }

    pub fn state_names(self) -> &'static [&'static str] {
        match self {
            FieldKind::Full3 => &["Y", "K", "E"],
            FieldKind::ReducedYE => &["Y", "E"],
            FieldKind::ReducedYKQs | FieldKind::ReducedYKCoupled => &["Y", "K"],
            FieldKind::Solow => &["k"],
            FieldKind::Vdp => &["y", "x"],
        }
    }

    /// True for fields parameterized by [`ModelParams`].
    pub fn uses_model_params(self) -> bool {
        !matches!(self, FieldKind::Solow | FieldKind::Vdp)
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FieldKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown field `{s}`")))
    }
}

/// A catalog field bound to its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Full3(ModelParams),
    ReducedYE(ModelParams),
    ReducedYKQs(ModelParams),
    ReducedYKCoupled(ModelParams, Coefficients),
    Solow(SolowParams),
    Vdp(VdpParams),
}

impl Field {
    /// Binds a model-family field. Fails for `solow` and `vdp`, and when the
    /// parameters are invalid or the elasticities are not both 1/2.
    pub fn model(kind: FieldKind, params: ModelParams) -> Result<Self> {
        params.validate_for_dynamics()?;
        Ok(match kind {
            FieldKind::Full3 => Field::Full3(params),
            FieldKind::ReducedYE => Field::ReducedYE(params),
            FieldKind::ReducedYKQs => Field::ReducedYKQs(params),
            FieldKind::ReducedYKCoupled => {
                Field::ReducedYKCoupled(params, model::coefficients(&params))
            }
            FieldKind::Solow | FieldKind::Vdp => {
                return Err(Error::Config(format!(
                    "field `{kind}` does not take model parameters"
                )))
            }
        })
    }

    pub fn solow(params: SolowParams) -> Result<Self> {
        params.validate()?;
        Ok(Field::Solow(params))
    }

    pub fn vdp(params: VdpParams) -> Result<Self> {
        params.validate()?;
        Ok(Field::Vdp(params))
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            Field::Full3(_) => FieldKind::Full3,
            Field::ReducedYE(_) => FieldKind::ReducedYE,
            Field::ReducedYKQs(_) => FieldKind::ReducedYKQs,
            Field::ReducedYKCoupled(..) => FieldKind::ReducedYKCoupled,
            Field::Solow(_) => FieldKind::Solow,
            Field::Vdp(_) => FieldKind::Vdp,
        }
    }

    pub fn model_params(&self) -> Option<&ModelParams> {
        match self {
            Field::Full3(p) | Field::ReducedYE(p) | Field::ReducedYKQs(p) => Some(p),
            Field::ReducedYKCoupled(p, _) => Some(p),
            _ => None,
        }
    }

    /// The analytic equilibrium every field is built around: (Y0, K0, E0)
    /// restricted to the field's variables, k* for Solow, the origin for
    /// Van der Pol.
    pub fn baseline_state(&self) -> Result<Vec<f64>> {
        Ok(match self {
            Field::Full3(p) => {
                let d = model::derived_constants(p)?;
                vec![p.production.y0, d.k0, d.e0]
            }
            Field::ReducedYE(p) => {
                let d = model::derived_constants(p)?;
                vec![p.production.y0, d.e0]
            }
            Field::ReducedYKQs(p) | Field::ReducedYKCoupled(p, _) => {
                vec![p.production.y0, model::baseline_capital(p)]
            }
            Field::Solow(p) => {
                vec![(p.s * p.tfp / (p.r + p.kappa)).powf(1.0 / p.alpha)]
            }
            Field::Vdp(_) => vec![0.0, 0.0],
        })
    }
}

impl VectorField for Field {
    fn dim(&self) -> usize {
        self.kind().dim()
    }

    fn eval(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        match self {
            Field::Full3(p) => {
                let gap = energy_gap(x[2], p)?;
                let d = full3_unchecked(&State3::from_slice(x), p, gap);
                dx.copy_from_slice(&d.to_array());
            }
            Field::ReducedYE(p) => {
                let gap = energy_gap(x[1], p)?;
                dx.copy_from_slice(&reduced_ye_unchecked(x[0], p, gap));
            }
            Field::ReducedYKQs(p) => {
                dx.copy_from_slice(&reduced_yk_qs_unchecked([x[0], x[1]], p));
            }
            Field::ReducedYKCoupled(p, c) => {
                dx.copy_from_slice(&reduced_yk_coupled_unchecked([x[0], x[1]], p, c));
            }
            Field::Solow(p) => {
                dx[0] = rhs_solow(x[0], p)?;
            }
            Field::Vdp(p) => {
                dx.copy_from_slice(&vdp_unchecked([x[0], x[1]], p.omega));
            }
        }
        Ok(())
    }

    fn name(&self) -> &str {
        self.kind().as_str()
    }

    fn state_names(&self) -> Vec<String> {
        self.kind()
            .state_names()
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn floors(&self) -> Vec<(usize, f64)> {
        match self {
            Field::Full3(p) => vec![(2, p.production.e_floor)],
            Field::ReducedYE(p) => vec![(1, p.production.e_floor)],
            _ => Vec::new(),
        }
    }
}
