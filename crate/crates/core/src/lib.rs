//! Determinantal matrices for the universal plane curve of degree `d >= 3`,
//! the singular sheaves among them, and the R-bundles on the surfaces `D(p)`
//! that replace singular sheaves after blowing up.
//!
//! Everything is exact rational arithmetic. A sheaf is always represented by
//! the matrix of its resolution; cokernels are never materialized.

pub mod blowup;
pub mod error;
pub mod exactalg;
pub mod fibration;
pub mod instances;
pub mod plane;
pub mod singularlocus;
pub mod suite;

pub use error::{Error, Result};
