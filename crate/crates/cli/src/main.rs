//! `vlineq`: verify instance files or seeded suites, and generate instances.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vlineq_core::harness::{
    exit, generate_instance, load_instance, run_instance, run_suite, save_instance, GeneratorKind,
    HarnessError, Suite,
};
use vlineq_core::{GridConfig, ScalarField, VerificationReport};

const DEFAULT_TRIALS: usize = 1000;
const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "vlineq", version, about = "Lattice-valued inequality verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the checks of an instance file, or the seeded property suites.
    Verify(VerifyArgs),
    /// Write a seeded random instance file.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Field {
    Real,
    Complex,
}

impl From<Field> for ScalarField {
    fn from(f: Field) -> Self {
        match f {
            Field::Real => ScalarField::Real,
            Field::Complex => ScalarField::Complex,
        }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Instance file; without it the random suites run instead.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Absolute tolerance for exact identities and inequalities.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of log-spaced grid points for the scale parameter.
    #[arg(long)]
    grid_theta: Option<usize>,
    /// Number of unit-circle grid points (complex field only).
    #[arg(long)]
    grid_lambda: Option<usize>,
    /// Ternary refinement iterations after the grid pass.
    #[arg(long)]
    refine: Option<usize>,
    /// Random instances per suite.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, env = "VLINEQ_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// One of psd-form, positive-map, lattice-hom, positive-elements.
    #[arg(long)]
    kind: String,
    /// Dimensions as `m,n`.
    #[arg(long)]
    dims: String,
    #[arg(long, env = "VLINEQ_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Field::Complex)]
    field: Field,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => verify(args),
        Command::Generate(args) => generate(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn grid_config(args: &VerifyArgs) -> vlineq_core::Result<GridConfig> {
    let mut cfg = GridConfig::default();
    if let Some(t) = args.tol {
        cfg.abs_tol = t;
    }
    if let Some(n) = args.grid_theta {
        cfg.theta_points = n;
    }
    if let Some(n) = args.grid_lambda {
        cfg.lambda_points = n;
    }
    if let Some(n) = args.refine {
        cfg.refine_iters = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn verify(args: VerifyArgs) -> Result<i32, HarnessError> {
    let suite: Suite = args.suite.parse()?;
    let cfg = match grid_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit::USAGE);
        }
    };
    let start = Instant::now();
    let report = match &args.instance {
        Some(path) => {
            let instance = load_instance(path, &cfg)?;
            run_instance(&instance, suite, &cfg, args.seed)?
        }
        None => run_suite(suite, &cfg, args.trials, args.seed)?,
    };
    let rendered = render(&report, args.format);
    match &args.report {
        Some(path) => fs::write(path, &rendered).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        })?,
        None => print!("{rendered}"),
    }
    eprintln!(
        "{}: {}/{} instances passed, max violation {:.3e} ({:.2} s)",
        report.suite,
        report.passes,
        report.instances,
        report.max_violation,
        start.elapsed().as_secs_f64()
    );
    Ok(if report.all_passed() {
        exit::SUCCESS
    } else {
        exit::VERIFICATION_FAILED
    })
}

fn render(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => report.to_string(),
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize), HarnessError> {
    let bad = || HarnessError::InvalidDims(format!("`{s}`: expected two positive integers `m,n`"));
    let (m, n) = s.split_once(',').ok_or_else(bad)?;
    let m = m.trim().parse().map_err(|_| bad())?;
    let n = n.trim().parse().map_err(|_| bad())?;
    Ok((m, n))
}

fn generate(args: GenerateArgs) -> Result<i32, HarnessError> {
    let kind: GeneratorKind = args.kind.parse()?;
    let dims = parse_dims(&args.dims)?;
    let file = generate_instance(kind, dims, args.field.into(), args.seed)?;
    save_instance(&file, &args.out)?;
    eprintln!("wrote {} ({} checks)", args.out.display(), file.checks.len());
    Ok(exit::SUCCESS)
}
