//! Analysis-formulation `lp` compressed-sensing toolkit: finite frames and
//! their duals, structured sparsifying transforms, measurement operators,
//! empirical Psi-RIP diagnostics, closed-form stability constants, the
//! reweighted analysis-l1 solver and desk-scale experiment drivers.

pub mod error;
pub mod experiments;
pub mod frame;
pub mod io;
pub mod linalg;
pub mod rip;
pub mod sensing;
pub mod solver;
pub mod stability;
pub mod transforms;

pub use error::{Error, Result};
