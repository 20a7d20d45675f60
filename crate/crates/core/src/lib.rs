pub mod basis;
pub mod boltzmann;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod landau;
pub mod longrange;
pub mod maxwellian;
pub mod pair;
pub mod pointwise;
pub mod profiles;
pub mod quadrature;
pub mod spectral;
pub mod test_function;

pub use error::{Error, Result};
