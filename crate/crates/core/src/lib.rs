//! Exact computations over F_p for minimal A-infinity structures on Ext algebras.

pub mod ainfinity;
pub mod error;
pub mod fp;
pub mod free;
pub mod graded;
pub mod hom;
pub mod model;
pub mod iwasawa;
pub mod json;
pub mod monomial;
pub mod resolution;
pub mod sparse;
pub mod splitting;

pub use error::{Error, Result};
pub use fp::{FpMatrix, Prime};
