pub mod cli_io;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod herglotz;
pub mod linalg;
pub mod lsm;
pub mod probes;
pub mod specialfn;
pub mod teig;

pub use error::{Error, Result};
