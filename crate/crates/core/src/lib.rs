//! Numerics for the generalized KdV equation `v_t + (v_xx + f(v))_x = 0`
//! around a bounded background `Ψ`, written as `v = u + Ψ` with `u` in
//! `H^s`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod background;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod nonlinearity;
pub mod norms;
pub mod solver;
pub mod spectral;

pub use background::{BackgroundField, BackgroundSpec, Jet, Sign};
pub use diagnostics::{DiagnosticsReport, Verdict};
pub use error::{Error, Result};
pub use nonlinearity::{AnalyticNonlinearity, NonlinearityKind, NonlinearitySpec};
pub use norms::WeightSequence;
pub use solver::{evolve, Scheme, SolverConfig};
pub use spectral::{Grid, PhysicalField, SpectralField, Trajectory};
