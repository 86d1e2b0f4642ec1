pub mod chow;
pub mod error;
pub mod exactlin;
pub mod fans;
pub mod pseudofan;
pub mod rational;
pub mod toricdata;

pub use error::{Error, Result};
pub use toricdata::{Degree, LabeledIntMatrix};
