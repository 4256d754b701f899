pub mod cli;
pub mod correlator;
pub mod curve;
pub mod diffbasis;
pub mod error;
pub mod fixtures;
pub mod kernel;
pub mod linalg;
pub mod localanalysis;
pub mod polyexpr;
pub mod quadrature;

pub use error::{Error, Result};
pub use polyexpr::{MultiPoly, C64};
