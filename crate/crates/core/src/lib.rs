pub mod classify;
pub mod config;
pub mod dilation;
pub mod domains;
pub mod error;
pub mod families;
pub mod gamma;
pub mod json;
pub mod linalg;
pub mod random;
pub mod suite;
pub mod tetra;

pub use error::{Error, Result};
