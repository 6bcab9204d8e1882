pub mod calibration;
pub mod cli;
pub mod data_io;
pub mod distributions;
pub mod error;
pub mod realized;
pub mod returns_density;
pub mod sde;
pub mod special;

pub use error::{Error, Result};
