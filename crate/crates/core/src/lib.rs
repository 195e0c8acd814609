pub mod adversarial;
pub mod convex;
pub mod error;
pub mod gauss;
pub mod grid;
pub mod harness;
pub mod one_sided;
pub mod quadrature;
pub mod rng;
pub mod sample;
pub mod two_sided;

pub use error::{Error, Result};
