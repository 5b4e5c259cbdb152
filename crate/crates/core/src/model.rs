//! Parameter and state types, the production function, and the coefficient
//! algebra shared by every vector field.
//!
//! All functions here are pure. Parameter structs are plain data with public
//! fields; `validate` enforces their ranges and is called by every
//! constructor and by the config loader.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HALF_TOL: f64 = 1e-12;

/// Cobb-Douglas production with a baseline and input floors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionParams {
    /// Total factor productivity.
    #[serde(rename = "A")]
    pub tfp: f64,
    #[serde(rename = "a_K")]
    pub a_k: f64,
    #[serde(rename = "a_E")]
    pub a_e: f64,
    /// Baseline production.
    #[serde(rename = "Y0")]
    pub y0: f64,
    #[serde(rename = "K_f")]
    pub k_floor: f64,
    #[serde(rename = "E_f")]
    pub e_floor: f64,
}

impl ProductionParams {
    pub fn validate(&self) -> Result<()> {
        finite("A", self.tfp)?;
        finite("a_K", self.a_k)?;
        finite("a_E", self.a_e)?;
        finite("Y0", self.y0)?;
        finite("K_f", self.k_floor)?;
        finite("E_f", self.e_floor)?;
        if self.tfp <= 0.0 {
            return Err(Error::param("A", self.tfp, "must be > 0"));
        }
        if self.a_k <= 0.0 {
            return Err(Error::param("a_K", self.a_k, "must be > 0"));
        }
        if self.a_e <= 0.0 {
            return Err(Error::param("a_E", self.a_e, "must be > 0"));
        }
        if ((self.a_k + self.a_e) - 1.0).abs() > HALF_TOL {
            return Err(Error::param("a_K", self.a_k, "a_K + a_E must equal 1"));
        }
        if self.y0 <= 0.0 {
            return Err(Error::param("Y0", self.y0, "must be > 0"));
        }
        if self.k_floor < 0.0 {
            return Err(Error::param("K_f", self.k_floor, "must be >= 0"));
        }
        if self.e_floor < 0.0 {
            return Err(Error::param("E_f", self.e_floor, "must be >= 0"));
        }
        Ok(())
    }

    /// True when both elasticities are 1/2, the only case with closed-form
    /// dynamics.
    pub fn is_symmetric(&self) -> bool {
        (self.a_k - 0.5).abs() <= HALF_TOL && (self.a_e - 0.5).abs() <= HALF_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapitalParams {
    /// Savings rate.
    pub s: f64,
    /// Depreciation rate.
    pub kappa: f64,
}

impl CapitalParams {
    pub fn validate(&self) -> Result<()> {
        finite("s", self.s)?;
        finite("kappa", self.kappa)?;
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::param("s", self.s, "must lie in (0, 1)"));
        }
        if self.kappa <= 0.0 {
            return Err(Error::param("kappa", self.kappa, "must be > 0"));
        }
        Ok(())
    }

    /// Capital feedback coefficient kappa²/(2s).
    pub fn feedback(&self) -> f64 {
        self.kappa * self.kappa / (2.0 * self.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyParams {
    /// Supply rate.
    pub q: f64,
    /// Dissipation rate.
    pub c: f64,
    /// Linear production coupling.
    pub d1: f64,
    /// Inefficiency, the negated quadratic coupling.
    pub zeta: f64,
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        finite("q", self.q)?;
        finite("c", self.c)?;
        finite("d1", self.d1)?;
        finite("zeta", self.zeta)?;
        if self.q < 0.0 {
            return Err(Error::param("q", self.q, "must be >= 0"));
        }
        if self.c <= 0.0 {
            return Err(Error::param("c", self.c, "must be > 0"));
        }
        if self.d1 < 0.0 {
            return Err(Error::param("d1", self.d1, "must be >= 0"));
        }
        if self.zeta <= 0.0 {
            return Err(Error::param("zeta", self.zeta, "must be > 0"));
        }
        Ok(())
    }

    /// Saturation level Y_s = d1 / zeta.
    pub fn y_saturation(&self) -> f64 {
        self.d1 / self.zeta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenParams {
    /// Cold-start rate.
    pub g1: f64,
    /// Amplification rate.
    pub g2: f64,
}

impl EigenParams {
    pub fn validate(&self) -> Result<()> {
        finite("g1", self.g1)?;
        finite("g2", self.g2)?;
        if self.g1 < 0.0 {
            return Err(Error::param("g1", self.g1, "must be >= 0"));
        }
        if self.g2 < 0.0 {
            return Err(Error::param("g2", self.g2, "must be >= 0"));
        }
        if self.g1 == 0.0 && self.g2 == 0.0 {
            return Err(Error::param("g1", self.g1, "g1 and g2 cannot both be zero"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeScales {
    #[serde(rename = "eps_K")]
    pub eps_k: f64,
    #[serde(rename = "eps_E")]
    pub eps_e: f64,
}

impl TimeScales {
    pub fn validate(&self) -> Result<()> {
        finite("eps_K", self.eps_k)?;
        finite("eps_E", self.eps_e)?;
        if self.eps_k < 0.0 {
            return Err(Error::param("eps_K", self.eps_k, "must be >= 0"));
        }
        if self.eps_e < 0.0 {
            return Err(Error::param("eps_E", self.eps_e, "must be >= 0"));
        }
        Ok(())
    }
}

/// Full parameter set of the production/capital/energy model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub production: ProductionParams,
    pub capital: CapitalParams,
    pub energy: EnergyParams,
    pub eigen: EigenParams,
    pub scales: TimeScales,
}

impl ModelParams {
    pub fn new(
        production: ProductionParams,
        capital: CapitalParams,
        energy: EnergyParams,
        eigen: EigenParams,
        scales: TimeScales,
    ) -> Result<Self> {
        let p = ModelParams {
            production,
            capital,
            energy,
            eigen,
            scales,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.production.validate()?;
        self.capital.validate()?;
        self.energy.validate()?;
        self.eigen.validate()?;
        self.scales.validate()
    }

    /// Additionally requires a_K = a_E = 1/2, which every vector field assumes.
    pub fn validate_for_dynamics(&self) -> Result<()> {
        self.validate()?;
        if !self.production.is_symmetric() {
            return Err(Error::Config(format!(
                "dynamics require a_K = a_E = 0.5 (got a_K = {}, a_E = {})",
                self.production.a_k, self.production.a_e
            )));
        }
        Ok(())
    }

    /// Denominator of the baseline energy level, c − zeta·Y0·(Y_s − Y0).
    pub fn energy_denominator(&self) -> f64 {
        let y0 = self.production.y0;
        self.energy.c - self.energy.zeta * y0 * (self.energy.y_saturation() - y0)
    }

    /// Figure-1 parameter set; `zeta` distinguishes the converging (0.04)
    /// and oscillating (0.02) cases.
    pub fn fig1(zeta: f64) -> Self {
        ModelParams {
            production: ProductionParams {
                tfp: 1.0,
                a_k: 0.5,
                a_e: 0.5,
                y0: 3.0,
                k_floor: 0.0,
                e_floor: 0.0,
            },
            capital: CapitalParams { s: 0.8, kappa: 0.6 },
            energy: EnergyParams {
                q: 0.5,
                c: 0.6,
                d1: 0.225,
                zeta,
            },
            eigen: EigenParams { g1: 0.05, g2: 0.01 },
            scales: TimeScales {
                eps_k: 0.5,
                eps_e: 1.0,
            },
        }
    }

    /// Parameter set of the bifurcation diagrams.
    pub fn fig2() -> Self {
        ModelParams {
            production: ProductionParams {
                tfp: 1.0,
                a_k: 0.5,
                a_e: 0.5,
                y0: 1.25,
                k_floor: 0.0,
                e_floor: 0.0,
            },
            capital: CapitalParams {
                s: 0.8,
                kappa: 0.36,
            },
            energy: EnergyParams {
                q: 1.0,
                c: 0.06,
                d1: 0.22,
                zeta: 0.02,
            },
            eigen: EigenParams {
                g1: 0.29,
                g2: 0.003,
            },
            scales: TimeScales {
                eps_k: 0.06,
                eps_e: 1.0,
            },
        }
    }

    /// Parameter set of the investment/saving split plots.
    pub fn fig3() -> Self {
        ModelParams {
            production: ProductionParams {
                tfp: 1.0,
                a_k: 0.5,
                a_e: 0.5,
                y0: 3.0,
                k_floor: 0.0,
                e_floor: 0.0,
            },
            capital: CapitalParams { s: 0.8, kappa: 0.7 },
            energy: EnergyParams {
                q: 1.0,
                c: 0.3,
                d1: 0.225,
                zeta: 0.02,
            },
            eigen: EigenParams { g1: 0.01, g2: 0.1 },
            scales: TimeScales {
                eps_k: 0.06,
                eps_e: 1.0,
            },
        }
    }
}

/// Neoclassical growth model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolowParams {
    #[serde(rename = "A")]
    pub tfp: f64,
    /// Labor elasticity; the capital elasticity is 1 − alpha.
    pub alpha: f64,
    pub s: f64,
    /// Labor growth rate.
    pub r: f64,
    pub kappa: f64,
}

impl SolowParams {
    pub fn validate(&self) -> Result<()> {
        finite("A", self.tfp)?;
        finite("alpha", self.alpha)?;
        finite("s", self.s)?;
        finite("r", self.r)?;
        finite("kappa", self.kappa)?;
        if self.tfp <= 0.0 {
            return Err(Error::param("A", self.tfp, "must be > 0"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param("alpha", self.alpha, "must lie in (0, 1)"));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::param("s", self.s, "must lie in (0, 1)"));
        }
        if self.r + self.kappa <= 0.0 {
            return Err(Error::param("r", self.r, "r + kappa must be > 0"));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        1.0 - self.alpha
    }
}

/// Instantaneous production, capital and energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State3 {
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "E")]
    pub e: f64,
}

impl State3 {
    pub fn new(y: f64, k: f64, e: f64) -> Self {
        State3 { y, k, e }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.y, self.k, self.e]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        State3::new(x[0], x[1], x[2])
    }
}

/// Coefficients of the compact cubic production dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    /// Linear.
    pub cl: f64,
    /// Quadratic.
    pub cs: f64,
    /// Cubic, always zeta/2.
    pub cq: f64,
    /// Constant.
    pub cc: f64,
}

impl Coefficients {
    /// Production part CL·Y + CS·Y² − CQ·Y³ + CC, without the capital term.
    pub fn cubic(&self, y: f64) -> f64 {
        ((-self.cq * y + self.cs) * y + self.cl) * y + self.cc
    }

    pub fn cubic_slope(&self, y: f64) -> f64 {
        self.cl + 2.0 * self.cs * y - 3.0 * self.cq * y * y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    #[serde(rename = "Y_s")]
    pub y_s: f64,
    #[serde(rename = "K0")]
    pub k0: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "E_Q")]
    pub e_q: f64,
    #[serde(rename = "A_squared")]
    pub a_squared: f64,
}

/// Y0 + A·(K − K_f)^a_K·(E − E_f)^a_E.
pub fn production(params: &ProductionParams, k: f64, e: f64) -> Result<f64> {
    let (kt, et) = shifted_inputs(params, k, e)?;
    Ok(params.y0 + params.tfp * kt.powf(params.a_k) * et.powf(params.a_e))
}

/// Partial derivatives (∂Y/∂K, ∂Y/∂E) of the non-baseline production.
pub fn production_partials(params: &ProductionParams, k: f64, e: f64) -> Result<(f64, f64)> {
    let (kt, et) = shifted_inputs(params, k, e)?;
    if kt == 0.0 || et == 0.0 {
        return Err(Error::Singular(
            "production partials are singular at an input floor".into(),
        ));
    }
    let yt = params.tfp * kt.powf(params.a_k) * et.powf(params.a_e);
    Ok((params.a_k * yt / kt, params.a_e * yt / et))
}

fn shifted_inputs(params: &ProductionParams, k: f64, e: f64) -> Result<(f64, f64)> {
    let kt = k - params.k_floor;
    let et = e - params.e_floor;
    if kt < 0.0 || kt.is_nan() {
        return Err(Error::Domain(format!(
            "capital {k} below floor {}",
            params.k_floor
        )));
    }
    if et < 0.0 || et.is_nan() {
        return Err(Error::Domain(format!(
            "energy {e} below floor {}",
            params.e_floor
        )));
    }
    Ok((kt, et))
}

/// Baseline levels and related constants.
///
/// Fails when c − zeta·Y0·(Y_s − Y0) ≤ 0, since no positive baseline energy
/// level exists then.
pub fn derived_constants(params: &ModelParams) -> Result<DerivedConstants> {
    let den = params.energy_denominator();
    if den <= 0.0 || !den.is_finite() {
        return Err(Error::Degenerate(format!(
            "c - zeta*Y0*(Y_s - Y0) = {den} must be > 0 for a baseline energy level"
        )));
    }
    let ProductionParams {
        y0,
        k_floor,
        e_floor,
        ..
    } = params.production;
    let CapitalParams { s, kappa } = params.capital;
    let EnergyParams { q, c, .. } = params.energy;
    Ok(DerivedConstants {
        y_s: params.energy.y_saturation(),
        k0: k_floor + (s / kappa) * y0,
        e0: e_floor + q / den,
        e_q: e_floor + q / c,
        a_squared: (y0 * kappa) / (s * q) * den,
    })
}

/// Baseline capital K_f + (s/kappa)·Y0, defined for every valid parameter set.
pub fn baseline_capital(params: &ModelParams) -> f64 {
    params.production.k_floor + params.capital.s / params.capital.kappa * params.production.y0
}

pub fn coefficients(params: &ModelParams) -> Coefficients {
    let y0 = params.production.y0;
    let kappa = params.capital.kappa;
    let EnergyParams { c, zeta, .. } = params.energy;
    let EigenParams { g1, g2 } = params.eigen;
    let y_s = params.energy.y_saturation();
    Coefficients {
        cl: (kappa - c) / 2.0 - g1 + g2 * y0,
        cs: zeta * y_s / 2.0 - g2,
        cq: zeta / 2.0,
        cc: y0 * (g1 + c / 2.0 - zeta / 2.0 * y0 * (y_s - y0)),
    }
}

/// Mixed-source eigendynamics g1·(Y0 − Y) + g2·Y·(Y0 − Y).
pub fn eigendynamics(params: &EigenParams, y0: f64, y: f64) -> f64 {
    (params.g1 + params.g2 * y) * (y0 - y)
}

/// Generalized energy dissipation c + zeta·Y².
pub fn dissipation_gamma_e(params: &EnergyParams, y: f64) -> f64 {
    params.c + params.zeta * y * y
}

fn finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, value, "must be finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_production(y0: f64, k_floor: f64, e_floor: f64) -> ProductionParams {
        ProductionParams {
            tfp: 1.0,
            a_k: 0.5,
            a_e: 0.5,
            y0,
            k_floor,
            e_floor,
        }
    }

    #[test]
    fn production_examples() {
        let p = unit_production(3.0, 0.0, 0.0);
        assert_eq!(production(&p, 0.0, 5.0).unwrap(), 3.0);
        assert_eq!(production(&p, 4.0, 4.0).unwrap(), 7.0);
        let p = ProductionParams {
            tfp: 2.0,
            y0: 1.25,
            ..unit_production(1.25, 1.0, 1.0)
        };
        assert_relative_eq!(production(&p, 5.0, 2.0).unwrap(), 5.25, epsilon = 1e-15);
        assert_eq!(production(&p, 1.0, 7.0).unwrap(), 1.25);
    }

    #[test]
    fn production_below_floor_is_domain_error() {
        let p = unit_production(3.0, 1.0, 1.0);
        assert!(matches!(production(&p, 0.5, 2.0), Err(Error::Domain(_))));
        assert!(matches!(production(&p, 2.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn partials_examples() {
        let p = unit_production(3.0, 0.0, 0.0);
        let (dk, de) = production_partials(&p, 4.0, 4.0).unwrap();
        assert_relative_eq!(dk, 0.5, epsilon = 1e-15);
        assert_relative_eq!(de, 0.5, epsilon = 1e-15);
        let (dk, de) = production_partials(&p, 2.5, 2.5).unwrap();
        assert_eq!(dk, de);
        assert!(matches!(
            production_partials(&p, 0.0, 1.0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn partials_match_central_differences() {
        let p = ProductionParams {
            a_k: 0.3,
            a_e: 0.7,
            tfp: 1.7,
            ..unit_production(2.0, 0.5, 0.25)
        };
        let (k, e, h) = (3.1, 1.9, 1e-6);
        let (dk, de) = production_partials(&p, k, e).unwrap();
        let fd_k = (production(&p, k + h, e).unwrap() - production(&p, k - h, e).unwrap()) / (2.0 * h);
        let fd_e = (production(&p, k, e + h).unwrap() - production(&p, k, e - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(dk, fd_k, max_relative = 1e-6);
        assert_relative_eq!(de, fd_e, max_relative = 1e-6);
    }

    #[test]
    fn derived_constants_fig1() {
        let d = derived_constants(&ModelParams::fig1(0.04)).unwrap();
        assert_relative_eq!(d.y_s, 5.625, epsilon = 1e-14);
        assert_relative_eq!(d.k0, 4.0, epsilon = 1e-14);
        assert_relative_eq!(d.e0, 0.5 / 0.285, epsilon = 1e-14);
        assert!((d.e0 - 1.7544).abs() < 1e-4);

        let d = derived_constants(&ModelParams::fig1(0.02)).unwrap();
        assert_relative_eq!(d.y_s, 11.25, epsilon = 1e-14);
        assert_relative_eq!(d.k0, 4.0, epsilon = 1e-14);
        assert!((d.e0 - 4.7619).abs() < 1e-4);
    }

    #[test]
    fn derived_constants_without_saturation_collapse_to_source() {
        let mut p = ModelParams::fig1(0.04);
        p.energy.zeta = 1e-300;
        p.energy.d1 = 0.0;
        let d = derived_constants(&p).unwrap();
        assert_eq!(d.e0, d.e_q);
        assert_relative_eq!(d.e_q, 0.5 / 0.6, epsilon = 1e-15);
    }

    #[test]
    fn derived_constants_reject_degenerate() {
        assert!(matches!(
            derived_constants(&ModelParams::fig2()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn coefficient_examples() {
        let c = coefficients(&ModelParams::fig2());
        assert_relative_eq!(c.cl, -0.13625, epsilon = 1e-15);
        assert_relative_eq!(c.cs, 0.107, epsilon = 1e-15);
        assert_relative_eq!(c.cq, 0.01, epsilon = 1e-15);
        assert_relative_eq!(c.cc, 0.24765625, epsilon = 1e-15);

        let c = coefficients(&ModelParams::fig1(0.02));
        assert_relative_eq!(c.cl, -0.02, epsilon = 1e-15);
        assert_relative_eq!(c.cs, 0.1025, epsilon = 1e-15);
        assert_relative_eq!(c.cq, 0.01, epsilon = 1e-15);
        assert_relative_eq!(c.cc, 0.3075, epsilon = 1e-15);

        let c = coefficients(&ModelParams::fig3());
        assert_relative_eq!(c.cl, 0.49, epsilon = 1e-15);
        assert_relative_eq!(c.cs, 0.0125, epsilon = 1e-15);
        assert_relative_eq!(c.cq, 0.01, epsilon = 1e-15);
        assert_relative_eq!(c.cc, -0.2625, epsilon = 1e-15);
    }

    #[test]
    fn eigendynamics_examples() {
        let g = EigenParams { g1: 0.05, g2: 0.01 };
        assert_eq!(eigendynamics(&g, 3.0, 3.0), 0.0);
        assert_eq!(eigendynamics(&g, 3.0, 0.0), 0.05 * 3.0);
        assert_relative_eq!(eigendynamics(&g, 3.0, 1.0), 0.12, epsilon = 1e-15);
    }

    #[test]
    fn gamma_e_examples() {
        let e = EnergyParams {
            q: 0.5,
            c: 0.6,
            d1: 0.225,
            zeta: 0.02,
        };
        assert_eq!(dissipation_gamma_e(&e, 0.0), 0.6);
        assert_relative_eq!(dissipation_gamma_e(&e, 3.0), 0.78, epsilon = 1e-15);
        for y in [-4.0, -0.3, 1.7, 9.0] {
            assert_eq!(dissipation_gamma_e(&e, y), dissipation_gamma_e(&e, -y));
        }
    }

    #[test]
    fn validation_rejects_bad_ranges() {
        let mut p = ModelParams::fig1(0.04);
        p.capital.s = 1.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::fig1(0.04);
        p.production.a_k = 0.6;
        assert!(p.validate().is_err());
        p.production.a_e = 0.4;
        assert!(p.validate().is_ok());
        assert!(matches!(p.validate_for_dynamics(), Err(Error::Config(_))));
        let mut p = ModelParams::fig1(0.04);
        p.eigen = EigenParams { g1: 0.0, g2: 0.0 };
        assert!(p.validate().is_err());
        let mut p = ModelParams::fig1(0.04);
        p.energy.c = f64::NAN;
        assert!(p.validate().is_err());
    }
}
