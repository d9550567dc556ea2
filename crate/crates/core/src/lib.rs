pub mod cli;
pub mod config;
pub mod error;
pub mod figures;
pub mod lindblad;
pub mod linalg;
pub mod metrics;
pub mod noise;
pub mod propagate;
pub mod pulse;
pub mod scenario;
pub mod special;
pub mod sweep;
pub mod transmon;

pub use error::{Error, Result};
