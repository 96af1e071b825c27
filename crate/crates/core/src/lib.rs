//! Numerical laboratory for purely magnetic double wells: single-well
//! asymptotics, the tunneling interaction matrix, and the localization
//! flip caused by exponentially small ("flea") perturbations.

pub mod cli;
pub mod error;
pub mod fields;
pub mod planar;
pub mod quad;
pub mod radial;
pub mod tunneling;

pub use error::{Error, Result};
