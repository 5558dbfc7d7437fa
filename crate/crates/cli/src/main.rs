//! `faddeev`: solve, check and export toroidal ansatz profiles.
//!
//! Exit codes: 0 success, 1 verification failure, 2 numerical failure, 64 usage error,
//! 66 missing or unreadable input. Every invocation writes one run manifest, to
//! `--manifest` when given and to stderr otherwise. Worker threads follow `RAYON_NUM_THREADS`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use faddeev_core::io::{sha256_hex, write_json, Provenance, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NOINPUT: i32 = 66;

#[derive(Parser, Debug)]
#[command(
    name = "faddeev",
    version,
    about = "Toroidal ansatz profiles of the Faddeev model"
)]
struct Cli {
    /// Where to write the run manifest (default: stderr).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the radial profile and classify it.
    Solve(SolveArgs),
    /// Hopf-type charge of a stored solution.
    Charge(ChargeArgs),
    /// Residual of the field equation and boundary audit.
    Verify(VerifyArgs),
    /// Classify profiles over a log-spaced range of the leading coefficient.
    Scan(ScanArgs),
    /// CSV tables for plotting.
    Export(ExportArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: i32,
    #[arg(long, allow_hyphen_values = true)]
    pub n: i32,
    #[arg(long, default_value_t = 1.0)]
    pub c_lead: f64,
    #[arg(long)]
    pub rho_eps: Option<f64>,
    #[arg(long)]
    pub g_max: Option<f64>,
    #[arg(long)]
    pub rho_max: Option<f64>,
    /// Relative tolerance; the absolute tolerance is 1% of it.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MethodArg {
    Closed,
    Reduced,
    Grid3d,
}

#[derive(Args, Debug)]
pub struct ChargeArgs {
    #[arg(long)]
    pub sol: PathBuf,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: MethodArg,
    /// Radial nodes of the 3-D grid.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Angular nodes per direction of the 3-D grid.
    #[arg(long, default_value_t = 32)]
    pub angular: usize,
    /// Axis excision radius of the 3-D grid.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Gauss-Legendre points per panel of the radial quadrature.
    #[arg(long, default_value_t = 3)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub sol: PathBuf,
    /// Window as fractions of the profile extent, `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.05, 0.9])]
    pub window: Vec<f64>,
    /// Radial nodes of the residual grid (default: spacing at most 0.01, at least 256 nodes).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Number of radial halvings for the convergence study (0 disables it).
    #[arg(long, default_value_t = 0)]
    pub refinements: u32,
    /// Pass threshold on the relative max-norm residual.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Difference all three directions instead of using exact angular derivatives.
    #[arg(long)]
    pub full_fd: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: i32,
    #[arg(long, allow_hyphen_values = true)]
    pub n: i32,
    #[arg(long)]
    pub c_from: f64,
    #[arg(long)]
    pub c_to: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ExportWhat {
    Profile,
    Energy,
    Integrand,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[arg(long)]
    pub sol: PathBuf,
    #[arg(long, value_enum)]
    pub what: ExportWhat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command reports back for the manifest.
#[derive(Debug, Default)]
pub struct Outcome {
    pub exit: i32,
    pub config: serde_json::Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub diagnostic: Option<String>,
}

/// `--manifest` from raw arguments, for runs whose flags fail to parse.
fn manifest_from_raw(args: &[String]) -> Option<PathBuf> {
    args.iter().enumerate().find_map(|(i, a)| {
        a.strip_prefix("--manifest=")
            .map(PathBuf::from)
            .or_else(|| {
                (a == "--manifest")
                    .then(|| args.get(i + 1).map(PathBuf::from))
                    .flatten()
            })
    })
}

fn emit_manifest(path: Option<&PathBuf>, manifest: &RunManifest) {
    match path {
        Some(p) => {
            if let Err(e) = write_json(p, manifest) {
                eprintln!("error: could not write manifest: {e}");
            }
        }
        None => match serde_json::to_string(manifest) {
            Ok(s) => eprintln!("{s}"),
            Err(e) => eprintln!("error: could not serialize manifest: {e}"),
        },
    }
}

fn paths(v: &[PathBuf]) -> Vec<String> {
    v.iter().map(|p| p.display().to_string()).collect()
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let started = Instant::now();

    let (subcommand, manifest_path, outcome) = match Cli::try_parse_from(&raw) {
        Ok(cli) => {
            let name = match &cli.command {
                Command::Solve(_) => "solve",
                Command::Charge(_) => "charge",
                Command::Verify(_) => "verify",
                Command::Scan(_) => "scan",
                Command::Export(_) => "export",
            };
            let outcome = match cli.command {
                Command::Solve(a) => commands::solve(&a),
                Command::Charge(a) => commands::charge(&a),
                Command::Verify(a) => commands::verify(&a),
                Command::Scan(a) => commands::scan(&a),
                Command::Export(a) => commands::export(&a),
            };
            (name.to_string(), cli.manifest, outcome)
        }
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            if informational {
                return ExitCode::SUCCESS;
            }
            let outcome = Outcome {
                exit: EXIT_USAGE,
                diagnostic: Some(e.kind().to_string()),
                ..Outcome::default()
            };
            (String::new(), manifest_from_raw(&raw), outcome)
        }
    };

    if let Some(d) = &outcome.diagnostic {
        if outcome.exit != EXIT_OK {
            eprintln!("error: {d}");
        }
    }
    let config_hash = sha256_hex(outcome.config.to_string().as_bytes());
    let manifest = RunManifest {
        command_line: raw,
        subcommand,
        resolved_config: outcome.config,
        inputs: paths(&outcome.inputs),
        outputs: paths(&outcome.outputs),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        exit_status: outcome.exit,
        diagnostic: outcome.diagnostic,
        provenance: Provenance::new(config_hash),
    };
    emit_manifest(manifest_path.as_ref(), &manifest);
    ExitCode::from(outcome.exit as u8)
}
