pub mod error;
pub mod linalg;

pub use error::{Error, Result};
pub mod diagram;
pub mod algebra;
pub mod module;
pub mod commutant;
pub mod universal;
pub mod galois;
pub mod criterion;
pub mod graph;
pub mod cli;
