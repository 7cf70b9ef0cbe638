use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use symspace::campaign::{
    self, CampaignConfig, FactorSpec, SpaceConfig, SpaceSpec, Status, SubmersionConfig,
    VerificationReport,
};
use symspace::nalgebra::DMatrix;
use symspace::sampling::FrameSearch;
use symspace::submersion::FibrationKind;

#[derive(Parser, Debug)]
#[command(
    name = "symspace",
    version,
    about = "Curvature computations and verification campaigns on compact symmetric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Curvature summary of a single symmetric pair.
    Space(FactorArgs),
    /// Constants of a product of two symmetric spaces.
    Constants(SpaceArgs),
    /// Random-germ campaign for the Simons-type inequality and its lemmas.
    SimonsVerify(CampaignArgs),
    /// Lie triple system checks, for one subspace or a sampled suite.
    TripleCheck(TripleArgs),
    /// Hopf-type fibration identities over CP^n or HP^n.
    Submersion(SubmersionArgs),
    /// Every campaign for one product space.
    All(CampaignArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Random starts for curvature extrema.
    #[arg(long)]
    frame_samples: Option<usize>,
    #[arg(long)]
    refine_steps: Option<usize>,
}

#[derive(Args, Debug)]
struct FactorArgs {
    /// e.g. sphere:4, cpn:2, hpn:1
    #[arg(long, alias = "f1")]
    factor: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SpaceArgs {
    /// First factor, e.g. sphere:4
    #[arg(long)]
    f1: Option<String>,
    /// Second factor, e.g. sphere:3
    #[arg(long)]
    f2: Option<String>,
    /// Both factors at once, e.g. sphere:4xsphere:3
    #[arg(long, conflicts_with_all = ["f1", "f2"])]
    space: Option<String>,
    /// JSON campaign config; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct CampaignArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long)]
    magnitude: Option<f64>,
    /// Leave per-sample data out of the report.
    #[arg(long)]
    summary_only: bool,
}

#[derive(Args, Debug)]
struct TripleArgs {
    #[command(flatten)]
    campaign: CampaignArgs,
    /// JSON file with a list of basis vectors in m-coordinates.
    #[arg(long)]
    subspace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Cpn,
    Hpn,
}

#[derive(Args, Debug)]
struct SubmersionArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    n: usize,
    /// Fibred germs sampled for the twisting bound.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Config(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<symspace::error::SymError> for CliError {
    fn from(e: symspace::error::SymError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn apply_output(cfg: &mut CampaignConfig, out: &OutputArgs) {
    if let Some(s) = out.seed {
        cfg.seed = s;
    }
    if let Some(t) = out.tol {
        cfg.tol = t;
    }
    if let Some(f) = out.frame_samples {
        cfg.frame_samples = f;
    }
    if let Some(r) = out.refine_steps {
        cfg.refine_steps = r;
    }
    if let Some(p) = &out.output {
        cfg.output_path = Some(p.display().to_string());
    }
}

fn space_config(args: &SpaceArgs) -> Result<CampaignConfig, CliError> {
    let spec = match (&args.space, &args.f1, &args.f2) {
        (Some(s), _, _) => Some(s.parse::<SpaceSpec>()?),
        (None, Some(a), Some(b)) => Some(SpaceSpec {
            factor1: a.parse()?,
            factor2: b.parse()?,
        }),
        (None, Some(_), None) | (None, None, Some(_)) => {
            return Err(CliError::Usage(
                "--f1 and --f2 must be given together".into(),
            ))
        }
        (None, None, None) => None,
    };
    let mut cfg = match (&args.config, spec) {
        (Some(path), spec) => {
            let mut cfg = CampaignConfig::from_json(&read_file(path)?)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if let Some(spec) = spec {
                cfg.space_spec = spec;
            }
            cfg
        }
        (None, Some(spec)) => CampaignConfig::new(spec),
        (None, None) => {
            return Err(CliError::Usage(
                "a space is required: --space, --f1/--f2 or --config".into(),
            ))
        }
    };
    apply_output(&mut cfg, &args.out);
    cfg.validate()?;
    Ok(cfg)
}

fn campaign_config(args: &CampaignArgs) -> Result<CampaignConfig, CliError> {
    let mut cfg = space_config(&args.space)?;
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    if args.lambda_max.is_some() {
        cfg.lambda_max = args.lambda_max;
    }
    if let Some(m) = args.magnitude {
        cfg.magnitude = m;
    }
    if args.summary_only {
        cfg.record_samples = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_subspace(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let vectors: Vec<Vec<f64>> = serde_json::from_str(&read_file(path)?).map_err(|e| {
        CliError::Config(format!(
            "{}: expected a list of coordinate vectors: {e}",
            path.display()
        ))
    })?;
    let n = vectors.first().map_or(0, Vec::len);
    if vectors.is_empty() || n == 0 || vectors.iter().any(|v| v.len() != n) {
        return Err(CliError::Config(format!(
            "{}: subspace vectors must be non-empty and of equal length",
            path.display()
        )));
    }
    Ok(DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]))
}

fn emit<T: Serialize>(
    report: &VerificationReport<T>,
    output: Option<&str>,
) -> Result<Status, CliError> {
    let json = report.to_json()?;
    match output {
        Some(path) => {
            fs::write(path, json + "\n").map_err(|e| CliError::Io(format!("{path}: {e}")))?;
            eprintln!(
                "{}: {}",
                report.command,
                format!("{:?}", report.status).to_lowercase()
            );
        }
        None => {
            let mut stdout = io::stdout().lock();
            match writeln!(stdout, "{json}") {
                Ok(()) => {}
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                Err(e) => return Err(CliError::Io(format!("stdout: {e}"))),
            }
        }
    }
    Ok(report.status)
}

fn search_from(out: &OutputArgs) -> FrameSearch {
    let d = FrameSearch::default();
    FrameSearch::new(
        out.frame_samples.unwrap_or(d.samples),
        out.refine_steps.unwrap_or(d.refine_steps),
        out.seed.unwrap_or(d.seed),
    )
}

fn execute(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Space(a) => {
            let factor: FactorSpec = a.factor.parse()?;
            let cfg = SpaceConfig {
                factor,
                search: search_from(&a.out),
            };
            let tol = a.out.tol.unwrap_or(1e-9);
            let report = campaign::run_space(&cfg, tol)?;
            emit(&report, a.out.output.as_deref().and_then(Path::to_str))
        }
        Command::Constants(a) => {
            let cfg = space_config(&a)?;
            emit(&campaign::run_constants(&cfg)?, cfg.output_path.as_deref())
        }
        Command::SimonsVerify(a) => {
            let cfg = campaign_config(&a)?;
            emit(&campaign::run_simons(&cfg)?, cfg.output_path.as_deref())
        }
        Command::TripleCheck(a) => {
            let cfg = campaign_config(&a.campaign)?;
            let report = match &a.subspace {
                Some(path) => campaign::run_triple_single(&cfg, &read_subspace(path)?)?,
                None => campaign::run_triple_suite(&cfg)?,
            };
            emit(&report, cfg.output_path.as_deref())
        }
        Command::Submersion(a) => {
            let kind = match a.model {
                Model::Cpn => FibrationKind::Cpn,
                Model::Hpn => FibrationKind::Hpn,
            };
            let search = search_from(&a.out);
            let mut cfg = SubmersionConfig::new(kind, a.n);
            cfg.seed = search.seed;
            cfg.frame_samples = search.samples;
            cfg.refine_steps = search.refine_steps;
            if let Some(s) = a.samples {
                cfg.samples = s;
            }
            if let Some(t) = a.out.tol {
                cfg.tol = t;
            }
            emit(
                &campaign::run_submersion(&cfg)?,
                a.out.output.as_deref().and_then(Path::to_str),
            )
        }
        Command::All(a) => {
            let cfg = campaign_config(&a)?;
            emit(&campaign::run_all(&cfg)?, cfg.output_path.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("symspace: {e}");
            ExitCode::from(1)
        }
    }
}
