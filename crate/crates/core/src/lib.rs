//! Growth dynamics of an economy whose production depends on capital and a
//! depletable energy resource.
//!
//! The crate covers the full production/capital/energy system, its
//! two-dimensional reductions, the neoclassical growth model and the
//! Van der Pol oscillator; a fixed/adaptive Runge-Kutta integrator; fixed
//! points, stability, limit cycles and bifurcation scans; and the
//! investment/saving splits of the reduced production dynamics.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod kaldor;
pub mod model;

pub use dynamics::{Field, FieldKind, VdpParams, VectorField};
pub use error::{Error, Result};
pub use integrator::{Attractor, IntegratorSettings, Method, Trajectory};
pub use model::{ModelParams, SolowParams, State3};
