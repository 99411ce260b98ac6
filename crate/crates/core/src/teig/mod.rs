//! Interior transmission eigenvalues: the disk oracle, the grid pencil and
//! pair diagnostics.

pub mod pair;
pub mod qep;
pub mod radial;

pub use pair::{te_residual, with_residuals, TeResiduals, TransmissionEigenpair};
pub use qep::{qep_assemble, qep_pairs, qep_solve, recover_pair, QepDiscretization, QepMode, QepOptions};
pub use radial::{radial_determinant, radial_eigenpair, radial_te_roots, RadialRoot, TraceMatch};
