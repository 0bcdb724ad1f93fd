pub mod bch;
pub mod cli;
pub mod commpoly;
pub mod error;
pub mod hyperop;
pub mod matproof;
pub mod ncpoly;
pub mod qderiv;
pub mod series;

pub use error::{Error, Result};

pub type Rational = num_rational::BigRational;
