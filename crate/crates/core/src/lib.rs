pub mod bounds;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod extremal;
pub mod matrix;
pub mod partition;
pub mod rooted;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use partition::Partition;
