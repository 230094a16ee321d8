pub mod coeff;
pub mod connection;
pub mod error;
pub mod fedosov;
pub mod forms;
pub mod grading;
pub mod par;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod weyl;

pub use coeff::{GaussianRational, Rational};
pub use error::{Error, Result};
