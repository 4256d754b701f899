//! The `weierkern` command line. [`run`] returns the exit code and the JSON
//! document to print, so the whole front end can be driven in-process.

mod commands;
pub mod io;
pub mod selftest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::curve::Chart;
use crate::error::{Error, ErrorKind, Result};
use crate::kernel::KernelVariant;
use crate::quadrature::GridConfig;

#[derive(Debug, Parser)]
#[command(name = "weierkern", version, about = "Weierstrass kernels and determinant correlators on space curves")]
pub struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect a curve.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Evaluate kernels and their local expansions.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// List the holomorphic (weight 1) or quadratic (weight 2) basis.
    Basis {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        weight: u8,
        /// Also evaluate the basis at this point.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Gram matrix of the holomorphic differentials.
    Periods {
        file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Determinant correlator of a b-c system.
    Correlator {
        file: PathBuf,
        #[arg(long)]
        lambda: u8,
        /// JSON array of b points.
        #[arg(long)]
        b: PathBuf,
        /// JSON array of c points (may be omitted when there are none).
        #[arg(long)]
        c: Option<PathBuf>,
    },
    /// Canonical third-kind Green function.
    Green {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        qp: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the invariant suite on a curve.
    Selftest { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CurveCmd {
    /// Smoothness, genus, branch points and points at infinity.
    Check {
        file: PathBuf,
        /// Random points for the smoothness rank test.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// The points above one base value.
    Fiber {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x1: String,
        #[arg(long, value_enum, default_value_t = ChartArg::Affine)]
        chart: ChartArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// `K(x, y)` as a differential in `x`.
    Eval {
        file: PathBuf,
        #[arg(long, default_value = "g4")]
        variant: KernelVariant,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Residue of `K(·, y)` on a lifted circle.
    Residue(ContourArgs),
    /// Laurent coefficient `c_k` of `K(·, y)` on a lifted circle.
    Laurent {
        #[command(flatten)]
        contour: ContourArgs,
        #[arg(long, allow_hyphen_values = true)]
        k: i32,
    },
}

#[derive(Debug, Args)]
pub struct ContourArgs {
    pub file: PathBuf,
    #[arg(long, default_value = "g4")]
    pub variant: KernelVariant,
    /// Circle center in the chart's base coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub center: String,
    #[arg(long, default_value_t = crate::localanalysis::DEFAULT_RADIUS)]
    pub radius: f64,
    #[arg(long, default_value_t = crate::localanalysis::DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value_t = ChartArg::Affine)]
    pub chart: ChartArg,
    /// A point on the sheet to follow, in affine coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: String,
    /// The kernel's second point; defaults to the anchor.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Keep following the sheet until the lifted contour closes.
    #[arg(long)]
    pub multi_sheet: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Target relative error.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Polar cells per side on each chart.
    #[arg(long, default_value_t = 24)]
    pub grid: usize,
    /// Maximum refinement depth.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
}

impl GridArgs {
    pub fn config(&self) -> GridConfig {
        GridConfig {
            base_cells: self.grid,
            max_depth: self.depth,
            target_rel_error: self.tol,
            ..GridConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChartArg {
    Affine,
    Inf,
}

impl From<ChartArg> for Chart {
    fn from(c: ChartArg) -> Chart {
        match c {
            ChartArg::Affine => Chart::Affine,
            ChartArg::Inf => Chart::Infinity,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Usage => 2,
        ErrorKind::MathDomain => 3,
        ErrorKind::Convergence => 4,
    }
}

/// Caps the global thread pool from `WEIERKERN_THREADS`, if set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("WEIERKERN_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // Fails only if the pool was already built, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Help and version requests come back with exit code 0 and plain text.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                return (0, e.to_string());
            }
            let v = json!({ "error": { "kind": "usage", "detail": e.to_string() } });
            return (2, v.to_string());
        }
    };
    match execute(&cli) {
        Ok(v) => {
            let text = serde_json::to_string_pretty(&v).expect("serializable");
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &text) {
                    let e = Error::Io(format!("{}: {e}", path.display()));
                    return (exit_code(&e), io::error_json(&e).to_string());
                }
                return (0, String::new());
            }
            (0, text)
        }
        Err(e) => (exit_code(&e), io::error_json(&e).to_string()),
    }
}

fn execute(cli: &Cli) -> Result<Value> {
    use commands::*;
    match &cli.command {
        Command::Curve(CurveCmd::Check { file, samples }) => curve_check(file, *samples, cli.seed),
        Command::Curve(CurveCmd::Fiber { file, x1, chart }) => curve_fiber(file, x1, (*chart).into()),
        Command::Kernel(KernelCmd::Eval { file, variant, x, y }) => kernel_eval(file, *variant, x, y),
        Command::Kernel(KernelCmd::Residue(a)) => kernel_laurent(a, -1),
        Command::Kernel(KernelCmd::Laurent { contour, k }) => kernel_laurent(contour, *k),
        Command::Basis { file, weight, at } => basis(file, *weight, at.as_deref()),
        Command::Periods { file, grid } => periods(file, &grid.config()),
        Command::Correlator { file, lambda, b, c } => correlator(file, *lambda, b, c.as_deref(), cli.seed),
        Command::Green { file, p, q, qp, grid } => green(file, p, q, qp, &grid.config()),
        Command::Selftest { file } => selftest::run(file, cli.seed),
    }
}
