//! Stationary distribution of a degenerate reflected Brownian motion in the
//! quadrant: classification, Laplace transforms, boundary densities and a
//! Monte Carlo cross-check.

pub mod cli;
pub mod density;
pub mod error;
pub mod laplace;
pub mod model;
pub mod simulate;
pub mod specfun;
pub mod surface;

pub use error::{Error, Result};
pub use model::{ModelParams, Preset, Rational};
