use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use translab::cli_io::{output_dir, run, ExperimentKind, RunConfig};
use translab::Error;

#[derive(Parser)]
#[command(name = "translab", version, about = "2D scattering, sampling and transmission eigenvalue experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's "output").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Turn resolution warnings into errors.
    #[arg(long)]
    strict: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Noise seed (overrides the config's "seed").
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Forward solve for one incident field.
    Simulate(RunArgs),
    /// Far-field matrix on the direction quadrature.
    Farfield(RunArgs),
    /// Linear sampling reconstruction.
    Lsm(RunArgs),
    /// Disk transmission eigenvalues by separation of variables.
    TeRadial(RunArgs),
    /// Transmission eigenvalues of the grid pencil.
    TeGrid(RunArgs),
    /// Eigenfunction averages near polygon corners.
    ProbeCorner(RunArgs),
    /// Boundary localization of high-order disk eigenfunctions.
    ProbeSurface(RunArgs),
    /// Regularized Herglotz approximation sweep.
    HerglotzFit(RunArgs),
    /// Contrast recovery from CGO-product moments.
    CalderonDemo(RunArgs),
    /// Transmission eigenvalue detection from far-field data.
    TeScan(RunArgs),
    /// Far field of Herglotz waves approximating an eigenfunction.
    Invisibility(RunArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        use ExperimentKind as E;
        match self {
            Command::Simulate(a) => (E::Simulate, a),
            Command::Farfield(a) => (E::Farfield, a),
            Command::Lsm(a) => (E::Lsm, a),
            Command::TeRadial(a) => (E::TeRadial, a),
            Command::TeGrid(a) => (E::TeGrid, a),
            Command::ProbeCorner(a) => (E::ProbeCorner, a),
            Command::ProbeSurface(a) => (E::ProbeSurface, a),
            Command::HerglotzFit(a) => (E::HerglotzFit, a),
            Command::CalderonDemo(a) => (E::CalderonDemo, a),
            Command::TeScan(a) => (E::TeScan, a),
            Command::Invisibility(a) => (E::Invisibility, a),
        }
    }
}

fn execute(kind: ExperimentKind, args: RunArgs) -> translab::Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut config = RunConfig::from_json(&text)?;
    if config.experiment != kind {
        return Err(Error::Validation(format!("config describes '{}', subcommand is '{kind}'", config.experiment)));
    }
    if args.strict {
        config.solver.strict = true;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Error::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    }
    let dir = output_dir(&config, args.out.as_deref())?;
    let manifest = run(&config, &dir)?;
    println!("{}", serde_json::to_string_pretty(&manifest.summary).unwrap_or_default());
    Ok(())
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::json!({"error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()});
            eprintln!("{report}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
