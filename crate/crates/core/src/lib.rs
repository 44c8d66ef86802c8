//! Generalized Gamma laws, stable subordinators and their inverses, Fox
//! H-functions, and the time-fractional diffusion equation whose
//! fundamental solution they build.

pub mod error;
pub mod quadrature;
pub mod specfun;
pub mod gengamma;
pub mod foxh;
pub mod subordinator;

pub use error::{Error, Result};
pub mod fracpde;
pub mod montecarlo;
pub mod validation;
