//! Configuration, file formats and the run driver behind the command line.

pub mod config;
pub mod formats;
pub mod run;

pub use config::{ExperimentKind, FitTarget, MediumConfig, RunConfig};
pub use formats::{
    far_field_json, grid_csv, parse_far_field_json, parse_grid_csv, real_grid_csv, sha256_hex, write_atomic, Artifact,
};
pub use run::{output_dir, run, Manifest, MANIFEST_NAME};
