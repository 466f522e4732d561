//! Command-line front end for `piezo-core`.
//!
//! Everything except argument parsing lives here so that tests can drive
//! commands in-process. [`execute`] returns the text a command would print;
//! [`run`] writes it and maps failures to exit codes.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use piezo_core::catalog::{self, dataset, dataset_names};
use piezo_core::format::{format_sig, format_sig_clamped};
use piezo_core::io::{load_tensor, write_tensor};
use piezo_core::physics::{
    max_polarization, max_strain_spectral_norm, polarization, spectral_norm, strain, FieldVector, StressDirection,
};
use piezo_core::solver::{largest, solve_spectrum, CEigenPair, EigenSpectrum, SolverConfig};
use piezo_core::unfold::{compare, largest_singular_value, unfold};
use piezo_core::{OrthogonalMatrix, PiezoError, PiezoTensor, Rank1PiezoTensor, SymmetryMode, UnitVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Significant digits in `table` output.
pub const TABLE_DIGITS: usize = 6;
/// Magnitudes below this print as `0.0` in `table` output.
pub const DISPLAY_ZERO: f64 = 1e-9;
/// `rotate-check` fails above this spectrum deviation.
pub const ROTATION_TOL: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CERTIFY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(PiezoError),
    #[error("{0}")]
    Certify(PiezoError),
    #[error("rotated spectrum deviates by {deviation:e} (tolerance {ROTATION_TOL:e})")]
    RotationDeviation { deviation: f64, report: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Usage(_) => EXIT_INPUT,
            CliError::Certify(_) | CliError::RotationDeviation { .. } => EXIT_CERTIFY,
        }
    }
}

impl From<PiezoError> for CliError {
    fn from(e: PiezoError) -> Self {
        match e {
            PiezoError::SolverMiss { .. } | PiezoError::GapViolation { .. } => CliError::Certify(e),
            other => CliError::Input(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    /// Aligned columns at 6 significant digits.
    #[default]
    Table,
    /// One `key=value` record per line at full precision.
    Lines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhysicsMode {
    Polarization,
    Strain,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Tensor(PathBuf),
    Catalog(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Solve,
    Largest,
    Rank1,
    Compare,
    Unfold,
    Physics {
        mode: PhysicsMode,
        direction: Option<Vec<f64>>,
        field: Option<Vec<f64>>,
    },
    RotateCheck {
        trials: usize,
    },
    CatalogList,
    CatalogShow(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Required by every command except the catalog ones.
    pub input: Option<Input>,
    pub solver: SolverConfig,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, input: Option<Input>) -> Self {
        Self {
            command,
            input,
            solver: SolverConfig::default(),
            format: OutputFormat::default(),
            out: None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "piezo", version, about = "C-eigenpairs of piezoelectric-type tensors")]
pub struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Tensor file in `piezo-tensor v1` format.
    #[arg(long)]
    tensor: Option<PathBuf>,
    /// Bundled dataset name.
    #[arg(long)]
    catalog: Option<String>,
}

#[derive(Debug, Args)]
struct Common {
    #[command(flatten)]
    source: Source,
    /// Number of random starts.
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Residual tolerance for refinement.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Deduplicated spectrum of canonical eigenpairs.
    Solve(Common),
    /// Largest eigenpair, certified against a grid search.
    Largest(Common),
    /// Best rank-one approximation.
    Rank1(Common),
    /// Largest eigenvalue against the largest singular value of the unfolding.
    Compare(Common),
    /// The unfolding matrix.
    Unfold(Common),
    Physics {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: PhysicsMode,
        /// Stress axis `a,b,c`, normalized before use.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        direction: Option<Vec<f64>>,
        /// Electric field `a,b,c`, normalized before use.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        field: Option<Vec<f64>>,
    },
    /// Spectrum invariance under random orthogonal changes of basis.
    RotateCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Bundled datasets.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Debug, Subcommand)]
enum CatalogCommand {
    List,
    /// Print a dataset in tensor file format.
    Show {
        name: String,
    },
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        let build = |command: Command, c: Common| {
            let input = match (c.source.tensor, c.source.catalog) {
                (Some(p), _) => Some(Input::Tensor(p)),
                (None, Some(n)) => Some(Input::Catalog(n)),
                (None, None) => None,
            };
            let mut solver = SolverConfig::default();
            if let Some(s) = c.starts {
                solver.num_starts = s;
            }
            if let Some(s) = c.seed {
                solver.rng_seed = s;
            }
            if let Some(t) = c.tol {
                solver.refine_tol = t;
            }
            RunConfig {
                command,
                input,
                solver,
                format: c.format,
                out: c.out,
            }
        };
        match self.command {
            CliCommand::Solve(c) => build(Command::Solve, c),
            CliCommand::Largest(c) => build(Command::Largest, c),
            CliCommand::Rank1(c) => build(Command::Rank1, c),
            CliCommand::Compare(c) => build(Command::Compare, c),
            CliCommand::Unfold(c) => build(Command::Unfold, c),
            CliCommand::Physics {
                common,
                mode,
                direction,
                field,
            } => build(Command::Physics { mode, direction, field }, common),
            CliCommand::RotateCheck { common, trials } => build(Command::RotateCheck { trials }, common),
            CliCommand::Catalog(CatalogCommand::List) => RunConfig::new(Command::CatalogList, None),
            CliCommand::Catalog(CatalogCommand::Show { name }) => RunConfig::new(Command::CatalogShow(name), None),
        }
    }
}

/// Parses `args` (including the program name).
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args).map(Cli::into_config)
}

pub fn load_input(input: &Input) -> Result<PiezoTensor, CliError> {
    Ok(match input {
        Input::Tensor(path) => load_tensor(path, SymmetryMode::Strict)?,
        Input::Catalog(name) => dataset(name)?.tensor,
    })
}

/// Runs `config`, writes the output, and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(text) => match &config.out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    EXIT_INPUT
                }
            },
            None => {
                print!("{text}");
                EXIT_OK
            }
        },
        Err(e) => {
            if let CliError::RotationDeviation { report, .. } = &e {
                print!("{report}");
            }
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// The text `config` would print.
pub fn execute(config: &RunConfig) -> Result<String, CliError> {
    config.solver.validate()?;
    let fmt = config.format;
    match &config.command {
        Command::CatalogList => {
            let mut out = String::new();
            for d in catalog::all_datasets() {
                writeln!(out, "{:<10} {}", d.name, d.point_group).unwrap();
            }
            return Ok(out);
        }
        Command::CatalogShow(name) => return Ok(write_tensor(&dataset(name)?.tensor)),
        _ => {}
    }
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("one of --tensor or --catalog is required".into()))?;
    let a = load_input(input)?;
    let cfg = &config.solver;

    match &config.command {
        Command::Solve => Ok(render_pairs(&solve_spectrum(&a, cfg)?.pairs, fmt)),
        Command::Largest => Ok(render_pairs(std::slice::from_ref(&largest(&a, cfg)?), fmt)),
        Command::Rank1 => {
            let top = largest(&a, cfg)?;
            let r1 = Rank1PiezoTensor::new(top.value, top.left.clone(), top.right.clone())?;
            let mut out = render_pairs(std::slice::from_ref(&top), fmt);
            let norm_sq = a.frobenius_norm().powi(2);
            writeln!(
                out,
                "residual_norm_sq={} tensor_norm_sq={}",
                num(a.rank1_residual(&r1)?, fmt),
                num(norm_sq, fmt)
            )
            .unwrap();
            Ok(out)
        }
        Command::Compare => {
            let r = compare(&a, cfg)?;
            Ok(format!(
                "lambda_star={} mu_star={} gap={} strict={}\n",
                num(r.lambda_star, fmt),
                num(r.mu_star, fmt),
                num(r.gap, fmt),
                r.strict
            ))
        }
        Command::Unfold => {
            let m = unfold(&a);
            let rows: Vec<Vec<f64>> = (0..m.rows())
                .map(|r| (0..m.cols()).map(|c| m.matrix()[(r, c)]).collect())
                .collect();
            let mut out = render_matrix(&rows, fmt);
            writeln!(out, "mu_star={}", num(largest_singular_value(&m), fmt)).unwrap();
            Ok(out)
        }
        Command::Physics { mode, direction, field } => physics(&a, cfg, *mode, direction, field, fmt),
        Command::RotateCheck { trials } => {
            let report = rotate_check(&a, cfg, *trials)?;
            let text = report.render(fmt);
            if report.max_deviation > ROTATION_TOL {
                return Err(CliError::RotationDeviation {
                    deviation: report.max_deviation,
                    report: text,
                });
            }
            Ok(text)
        }
        Command::CatalogList | Command::CatalogShow(_) => unreachable!(),
    }
}

fn unit_arg(flag: &str, v: &Option<Vec<f64>>, dim: usize) -> Result<UnitVector, CliError> {
    let v = v
        .clone()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required for this mode")))?;
    if v.len() != dim {
        return Err(PiezoError::DimensionMismatch {
            expected: dim,
            found: v.len(),
        }
        .into());
    }
    Ok(UnitVector::normalize(v)?)
}

fn physics(
    a: &PiezoTensor,
    cfg: &SolverConfig,
    mode: PhysicsMode,
    direction: &Option<Vec<f64>>,
    field: &Option<Vec<f64>>,
    fmt: OutputFormat,
) -> Result<String, CliError> {
    let mut out = String::new();
    match mode {
        PhysicsMode::Polarization => {
            let y = unit_arg("direction", direction, a.dim())?;
            let p = polarization(a, &StressDirection(y))?;
            let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            writeln!(out, "polarization={} norm={}", vector(&p, fmt), num(norm, fmt)).unwrap();
        }
        PhysicsMode::Strain => {
            let e = unit_arg("field", field, a.dim())?;
            let s = strain(a, &FieldVector(e))?;
            let m = s.matrix();
            let rows: Vec<Vec<f64>> = (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
                .collect();
            out.push_str(&render_matrix(&rows, fmt));
            let n = spectral_norm(&s);
            writeln!(
                out,
                "max_eigenvalue={} max_abs_eigenvalue={}",
                num(n.max_eigenvalue, fmt),
                num(n.max_abs_eigenvalue, fmt)
            )
            .unwrap();
        }
        PhysicsMode::Max => {
            let p = max_polarization(a, cfg)?;
            writeln!(
                out,
                "max_polarization={} direction={}",
                num(p.norm, fmt),
                vector(&p.direction, fmt)
            )
            .unwrap();
            let s = max_strain_spectral_norm(a, cfg)?;
            writeln!(
                out,
                "max_strain={} field={} direction={}",
                num(s.norm, fmt),
                vector(&s.field, fmt),
                vector(&s.direction, fmt)
            )
            .unwrap();
        }
    }
    Ok(out)
}

/// Full-precision shortest round-trip form, `-0` folded into `0`.
pub fn full(v: f64) -> String {
    format!("{:?}", v + 0.0)
}

fn num(v: f64, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Table => format_sig_clamped(v, TABLE_DIGITS, DISPLAY_ZERO),
        OutputFormat::Lines => full(v),
    }
}

fn vector(v: &[f64], fmt: OutputFormat) -> String {
    v.iter().map(|c| num(*c, fmt)).collect::<Vec<_>>().join(",")
}

fn render_matrix(rows: &[Vec<f64>], fmt: OutputFormat) -> String {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| num(*v, fmt)).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        writeln!(out, "{}", line.join("  ")).unwrap();
    }
    out
}

/// Eigenpairs as a table or as `lines` records.
pub fn render_pairs(pairs: &[CEigenPair], fmt: OutputFormat) -> String {
    let mut out = String::new();
    if fmt == OutputFormat::Lines {
        for p in pairs {
            write!(
                out,
                "lambda={} x={} y={} residual={}",
                full(p.value),
                vector(&p.left, fmt),
                vector(&p.right, fmt),
                full(p.residual)
            )
            .unwrap();
            let flags = p.diagnostics.labels();
            if !flags.is_empty() {
                write!(out, " flags={}", flags.join(",")).unwrap();
            }
            out.push('\n');
        }
        return out;
    }

    let cell = |v: f64| num(v, fmt);
    let comp = pairs
        .iter()
        .flat_map(|p| p.left.iter().chain(p.right.iter()).map(|v| cell(*v).len()))
        .max()
        .unwrap_or(3);
    let vec_cell = |v: &[f64]| {
        v.iter()
            .map(|c| format!("{:>comp$}", cell(*c)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut rows = vec![[
        "No.".to_string(),
        "lambda".into(),
        "x^T".into(),
        "y^T".into(),
        "flags".into(),
    ]];
    for (i, p) in pairs.iter().enumerate() {
        rows.push([
            (i + 1).to_string(),
            cell(p.value),
            vec_cell(&p.left),
            vec_cell(&p.right),
            p.diagnostics.labels().join(","),
        ]);
    }
    let widths: Vec<usize> = (0..5)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    for row in rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
    }
    out
}

/// Result of comparing spectra before and after random rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationReport {
    pub trials: usize,
    /// Distinct positive values of the unrotated tensor, descending.
    pub baseline: Vec<f64>,
    /// Largest absolute deviation over all trials; infinite when the
    /// number of distinct values changed.
    pub max_deviation: f64,
}

impl RotationReport {
    pub fn render(&self, fmt: OutputFormat) -> String {
        format!(
            "trials={} values={} max_deviation={}\n",
            self.trials,
            vector(&self.baseline, fmt),
            match fmt {
                OutputFormat::Table => format_sig(self.max_deviation, 3),
                OutputFormat::Lines => full(self.max_deviation),
            }
        )
    }
}

/// Distinct positive eigenvalues, descending, merged at the solver's
/// value tolerance.
pub fn distinct_positive(s: &EigenSpectrum, a: &PiezoTensor, cfg: &SolverConfig) -> Vec<f64> {
    let zero = cfg.dedup_tol * a.frobenius_norm().max(1.0);
    let mut out: Vec<f64> = Vec::new();
    for v in s.positive_values(zero) {
        match out.last() {
            Some(&last) if (last - v).abs() <= cfg.dedup_tol * last.max(1.0) => {}
            _ => out.push(v),
        }
    }
    out
}

/// `trials` seeded random rotations of `a`, seeded from the solver seed.
pub fn rotate_check(a: &PiezoTensor, cfg: &SolverConfig, trials: usize) -> Result<RotationReport, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let rotations: Vec<OrthogonalMatrix> = (0..trials)
        .map(|_| OrthogonalMatrix::random(a.dim(), &mut rng))
        .collect();
    rotate_check_with(a, cfg, &rotations)
}

/// [`rotate_check`] with explicit rotations.
pub fn rotate_check_with(
    a: &PiezoTensor,
    cfg: &SolverConfig,
    rotations: &[OrthogonalMatrix],
) -> Result<RotationReport, CliError> {
    let baseline = distinct_positive(&solve_spectrum(a, cfg)?, a, cfg);
    let mut max_deviation = 0.0f64;
    for q in rotations {
        let b = a.rotate(q)?;
        let rotated = distinct_positive(&solve_spectrum(&b, cfg)?, &b, cfg);
        if rotated.len() != baseline.len() {
            max_deviation = f64::INFINITY;
            continue;
        }
        for (u, v) in baseline.iter().zip(&rotated) {
            max_deviation = max_deviation.max((u - v).abs());
        }
    }
    Ok(RotationReport {
        trials: rotations.len(),
        baseline,
        max_deviation,
    })
}

/// Parses a `lines` record into `(λ, x, y, residual)`.
pub fn parse_record(line: &str) -> Option<(f64, Vec<f64>, Vec<f64>, f64)> {
    let mut lambda = None;
    let mut x = None;
    let mut y = None;
    let mut residual = None;
    let list = |s: &str| s.split(',').map(|t| t.parse().ok()).collect::<Option<Vec<f64>>>();
    for field in line.split_whitespace() {
        let (k, v) = field.split_once('=')?;
        match k {
            "lambda" => lambda = v.parse().ok(),
            "x" => x = list(v),
            "y" => y = list(v),
            "residual" => residual = v.parse().ok(),
            "flags" => {}
            _ => return None,
        }
    }
    Some((lambda?, x?, y?, residual?))
}

pub fn available_datasets() -> String {
    dataset_names().join(", ")
}
