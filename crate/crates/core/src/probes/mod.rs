//! Numerical checks of geometric and analytic properties of transmission
//! eigenfunctions and of CGO-based uniqueness.

pub mod cgo;
pub mod corner;
pub mod identity;
pub mod invisibility;
pub mod surface;

pub use cgo::{calderon_recover, cgo_eval, cgo_pair, smooth_bump, CalderonResult, CgoPair, XiLattice};
pub use corner::{ball_average, corner_profile, CornerProbeResult};
pub use identity::{corner_identity_defect, IdentitySample};
pub use invisibility::{invisibility_defect, InvisibilityProbe, InvisibilityReport};
pub use surface::{localization_scan, smallest_radial_root, surface_ratio, LocalizationRecord};
