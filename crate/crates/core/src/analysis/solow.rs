use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SolowParams;

/// Steady state and golden-rule quantities of the neoclassical model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolowStatics {
    pub k_star: f64,
    pub y_star: f64,
    pub s_gold: f64,
    pub k_gold: f64,
    pub c_star: f64,
}

pub fn solow_statics(params: &SolowParams) -> Result<SolowStatics> {
    let drain = params.r + params.kappa;
    if !(drain > 0.0) {
        return Err(Error::Domain(format!("r + kappa = {drain} must be > 0")));
    }
    params.validate()?;
    let inv_alpha = 1.0 / params.alpha;
    let k_star = (params.s * params.tfp / drain).powf(inv_alpha);
    let y_star = params.tfp * k_star.powf(params.beta());
    let s_gold = 1.0 - params.alpha;
    let k_gold = (s_gold * params.tfp / drain).powf(inv_alpha);
    Ok(SolowStatics {
        k_star,
        y_star,
        s_gold,
        k_gold,
        c_star: (1.0 - params.s) * y_star,
    })
}
