//! Equilibria, stability, limit cycles and one-parameter bifurcation scans.

mod bisect;
pub mod eigen;
mod cycle;
mod fixed_points;
mod solow;
mod sweep;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use bisect::{bisect_threshold, BisectionResult, BranchSelector, Control, Criterion};
pub use cycle::{analyze_cycle, detect_limit_cycle, standard_initial_states, CycleInfo, PhaseDurations};
pub use fixed_points::{
    deflate_by_baseline, fixed_point_3d, fixed_points_2d, jacobian_2d, jacobian_3d, Deflation,
};
pub use solow::{solow_statics, SolowStatics};
pub use sweep::{
    link_branches, sweep, write_bifurcation_csv, BifurcationRow, BranchLine, SweepSpec,
    BIFURCATION_HEADER,
};

/// Eigenvalue real parts within this distance of zero are classified
/// center-marginal.
pub const CLASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    StableNode,
    StableFocus,
    UnstableNode,
    UnstableFocus,
    Saddle,
    CenterMarginal,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::StableNode => "stable-node",
            Classification::StableFocus => "stable-focus",
            Classification::UnstableNode => "unstable-node",
            Classification::UnstableFocus => "unstable-focus",
            Classification::Saddle => "saddle",
            Classification::CenterMarginal => "center-marginal",
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Classification::StableNode | Classification::StableFocus)
    }

    pub fn is_unstable(self) -> bool {
        matches!(
            self,
            Classification::UnstableNode | Classification::UnstableFocus
        )
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(eigenvalues: &[Complex64]) -> Classification {
    if eigenvalues.iter().any(|e| e.re.abs() <= CLASS_TOL) {
        return Classification::CenterMarginal;
    }
    let any_pos = eigenvalues.iter().any(|e| e.re > 0.0);
    let any_neg = eigenvalues.iter().any(|e| e.re < 0.0);
    let oscillatory = eigenvalues.iter().any(|e| e.im.abs() > CLASS_TOL);
    match (any_pos, any_neg, oscillatory) {
        (true, true, _) => Classification::Saddle,
        (false, _, true) => Classification::StableFocus,
        (false, _, false) => Classification::StableNode,
        (true, false, true) => Classification::UnstableFocus,
        (true, false, false) => Classification::UnstableNode,
    }
}

/// Position of a fixed point among the equilibria of one parameter set,
/// ordered by production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchTag {
    Lower,
    Middle,
    Upper,
}

impl BranchTag {
    /// Tags for `n` points sorted by Y: a single point is `lower`, two are
    /// `lower`/`upper`.
    pub fn for_count(n: usize) -> &'static [BranchTag] {
        match n {
            0 => &[],
            1 => &[BranchTag::Lower],
            2 => &[BranchTag::Lower, BranchTag::Upper],
            _ => &[BranchTag::Lower, BranchTag::Middle, BranchTag::Upper],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BranchTag::Lower => "lower",
            BranchTag::Middle => "middle",
            BranchTag::Upper => "upper",
        }
    }
}

impl fmt::Display for BranchTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub state: Vec<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub classification: Classification,
    pub branch: BranchTag,
}

impl FixedPoint {
    pub fn y(&self) -> f64 {
        self.state[0]
    }
}
