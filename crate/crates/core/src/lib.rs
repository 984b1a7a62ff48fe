//! Exact computations in the tautological ring of the moduli spaces of
//! stable curves at small genus and number of markings.

pub mod cache;
pub mod cli;
pub mod error;
pub mod graphs;
pub mod integrate;
pub mod linalg;
pub mod pixton;
pub mod product;
pub mod rational;
pub mod strata;
pub mod verify;

pub use error::{Error, Result};
