pub mod ansatz;
pub mod error;
pub mod fockspace;
pub mod labcli;
pub mod linalg;
pub mod molint;
pub mod optim;
pub mod orbrot;
pub mod response;
pub mod sampler;
pub mod scf;
pub mod systems;

pub use error::{Error, Result};
