pub mod algebra;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod oracle;
pub mod scalar;
pub mod shift;
pub mod subnormality;

pub use error::{Error, Result};
pub use scalar::Scalar;
