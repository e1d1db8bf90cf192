use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use shiftfem::experiment::{run_experiment, ExperimentConfig, ProblemKind};
use shiftfem::problems::ExtensionMode;
use shiftfem::Error;

#[derive(Parser)]
#[command(
    version,
    about = "Boundary-shifted Lagrange finite elements on curved domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a refinement sweep and write table.csv, table.md and diagnostics.csv.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    EllipseTest1,
    AnnulusTest2,
    PolygonPatch,
}

#[derive(Clone, Copy, ValueEnum)]
enum Extension {
    Analytic,
    Zero,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long, conflicts_with = "problem")]
    config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    problem: Option<Problem>,
    /// Polynomial degree.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated refinement levels, e.g. 4,8,16.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
    /// Source extension outside the domain.
    #[arg(long, value_enum)]
    extension: Option<Extension>,
    /// Output directory; overrides SHIFTFEM_OUT_DIR and the config file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write mesh_<param>.txt for every entry.
    #[arg(long)]
    dump_meshes: bool,
}

fn config_from(args: &RunArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&args.config, args.problem) {
        (Some(path), _) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
        (None, Some(p)) => ExperimentConfig::for_problem(match p {
            Problem::EllipseTest1 => ProblemKind::EllipseTest1,
            Problem::AnnulusTest2 => ProblemKind::AnnulusTest2,
            Problem::PolygonPatch => ProblemKind::PolygonPatch,
        }),
        (None, None) => return Err(Error::InvalidParam("need --config or --problem".into())),
    };
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(sweep) = &args.sweep {
        cfg.sweep = sweep.clone();
    }
    if let Some(ext) = args.extension {
        cfg.extension_mode = match ext {
            Extension::Analytic => ExtensionMode::Analytic,
            Extension::Zero => ExtensionMode::ZeroOutside,
        };
    }
    cfg.dump_meshes |= args.dump_meshes;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    let cfg = match config_from(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out_dir = cfg.resolve_out_dir(args.out.as_deref());
    match run_experiment(&cfg, &out_dir) {
        Ok(result) => {
            print!("{}", result.markdown());
            println!("\nwrote {}", out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}
