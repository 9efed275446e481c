pub mod calibration;
pub mod dispersion;
pub mod error;
pub mod kerr;
pub mod materials;
pub mod medium;
pub mod numerics;
pub mod units;
pub mod vacuum;
pub mod wave_sim;

pub use error::{Error, Flagged, Result, Warning};
pub use medium::Medium;
