pub mod densela;
pub mod embed;
pub mod error;
pub mod fockoracle;
pub mod gausscore;
pub mod hafperm;
pub mod io;
pub mod random;
pub mod sampler;
pub mod scalar;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub type RealMatrix = densela::Matrix<f64>;
pub type ComplexMatrix = densela::Matrix<Complex64>;
