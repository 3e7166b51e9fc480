//! Numerical verification of generalized Kähler geometry on coordinate patches.
//!
//! The crate is organised bottom-up:
//!
//! * [`expr`] parses coordinate expressions and evaluates them as jets;
//! * [`patch`] does pointwise tensor calculus with exact first derivatives;
//! * [`gencomplex`] implements the doubled bundle `TM ⊕ T*M`;
//! * [`bihermitian`] holds the `(g, b, J₊, J₋)` dictionary and its identity residuals;
//! * [`eigendist`] splits `J₊J₋ + J₋J₊` into eigendistributions and tests foliations;
//! * [`harness`] loads spec files, generates the example zoo and writes reports.

pub mod bihermitian;
pub mod eigendist;
pub mod error;
pub mod expr;
pub mod gencomplex;
pub mod harness;
pub mod patch;
pub mod residual;
pub mod tol;

pub use error::{Error, Result};
