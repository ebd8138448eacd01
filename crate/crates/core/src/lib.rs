//! Characteristics solver for the massless nonlinear Dirac system
//!
//! ```text
//! i(u_t + u_x) = N₁(u, v),   i(v_t - v_x) = N₂(u, v),   N = ∂W/∂(ū, v̄)
//! W(u, v) = α|u|²|v|² + β(ūv + uv̄)²
//! ```
//!
//! on a unit-CFL lattice, together with numerical checks of the charge
//! balance laws, the pointwise envelopes along characteristics, and the
//! large-time scattering profiles `G₁`, `G₂`.

// `!(a <= b)` is used on purpose so that NaN fails validations
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod config;
pub mod conservation;
pub mod error;
pub mod experiment;
pub mod fields;
pub mod nonlinearity;
pub mod output;
pub mod solver;

pub use error::{Error, Result};
pub use fields::{
    charge, make_initial_data, DataFamily, DataSpec, Grid, InitialData, ModelParams, PulseShape,
    Side, SpinorField, TriangleRegion,
};
pub use solver::{run, run_observed, step, RecordPlan, Scheme, SchemeKind, Trajectory};
