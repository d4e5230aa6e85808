//! Numerical laboratory for stationary outflow solutions of the 1-D
//! compressible isentropic micropolar fluid on a half line and for the
//! large-time behaviour of perturbations around them.

pub mod analysis;
pub mod check;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod model;
pub mod numerics;
pub mod solver;
pub mod stationary;

pub use error::{Error, Result};
pub use grid::Grid;
pub use model::{derive_constants, DerivedConstants, ModelParams};
pub use stationary::{Regime, StationaryProfile};
