pub mod arithmetic;
pub mod circuit;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod fragmentation;
pub mod model;
pub mod observables;
pub mod simulator;
pub mod trotter;
pub mod verify;

pub use error::{Error, Result};
