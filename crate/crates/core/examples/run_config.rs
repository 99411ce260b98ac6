//! Build a run configuration in code, print the JSON the CLI would read,
//! execute it and list the written artifacts.
//!
//! cargo run --release --example run_config -- [experiment] [out_dir]

use translab::cli_io::{run, ExperimentKind, MediumConfig, RunConfig};
use translab::forward::{Contrast, ContrastSampling};
use translab::geometry::{Domain, Point};

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let kind: ExperimentKind = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(ExperimentKind::Simulate);
    let dir = args.get(2).map(std::path::PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("translab-run"));

    let mut cfg = RunConfig::new(
        kind,
        Some(MediumConfig {
            domain: Domain::Disk { center: Point::ORIGIN, radius: 1.0 },
            contrast: Contrast::Constant(1.0),
            sampling: ContrastSampling::NodeCenter,
        }),
    );
    cfg.grid.h = 0.08;
    cfg.quadrature.directions = 32;
    println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));

    std::fs::create_dir_all(&dir)?;
    let manifest = run(&cfg, &dir)?;
    println!("\nwrote to {}", dir.display());
    for a in &manifest.artifacts {
        println!("  {:<24} {:>9} bytes  {}", a.path, a.bytes, &a.sha256[..16]);
    }
    println!("summary {}", manifest.summary);
    Ok(())
}
