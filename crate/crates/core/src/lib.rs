pub mod beam_oracle;
pub mod dynamics;
pub mod error;
pub mod explorer;
pub mod materials;
pub mod mechanics;
pub mod noise;
pub mod transduction;

pub use error::{Error, Result};
