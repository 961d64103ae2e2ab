//! `fracbb`: command-line front end for the fracbb toolkit.
//!
//! Every run writes its artifacts deterministically: the same arguments and
//! inputs produce the same bytes, regardless of `FRACBB_THREADS`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use fracbb_core::experiments::{bilinear_a_diracs, bilinear_a_fields};
use fracbb_core::io::{
    fmt17, json17, read_grid_csv, read_spectral_json, report_json, spectral_to_json, SCHEMA_VERSION,
};
use fracbb_core::kernels::Assembly;
use fracbb_core::norms::sobolev_norm_weighted;
use fracbb_core::operators::{invert_d, invert_d2};
use fracbb_core::{
    forward_transform, inverse_transform, l1_norm, l2_norm, solve_decomposition, sum_space_norm_with,
    sup_norm_scan, verify_bb, verify_bergman, BergmanConfig, Error, ExperimentConfig, GridField, KernelSpec,
    MultiplierOp, SobolevWeight, SpectralField, SumSpaceOptions, Tolerance,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(
    name = "fracbb",
    version,
    about = "Spectral toolkit for fractional Bourgain-Brezis inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert between a grid CSV and a coefficient JSON.
    Transform(TransformArgs),
    /// Apply a Fourier multiplier to a coefficient file.
    ApplyOp(ApplyOpArgs),
    /// Emit truncated kernel coefficients and optionally scan their sup norms.
    Kernel(KernelArgs),
    /// Evaluate an L¹, L², sup or Sobolev norm of a coefficient file.
    Norm(NormArgs),
    /// Evaluate the sum-space norm L¹ + H^s with its optimal split.
    MixedNorm(MixedNormArgs),
    /// Randomized check of the fractional Bourgain-Brezis inequality.
    VerifyBb(VerifyBbArgs),
    /// Bergman-norm ratios over a random power-series corpus.
    VerifyBergman(VerifyBergmanArgs),
    /// Evaluate the bilinear form A on two fields or on a grid of Dirac pairs.
    BilinearA(BilinearAArgs),
    /// Decompose a zero-mean field into Riesz-transform parts.
    Decompose(DecomposeArgs),
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum Direction {
    /// Grid CSV to coefficient JSON.
    Forward,
    /// Coefficient JSON to grid CSV.
    Inverse,
}

#[derive(Args, Debug, Serialize)]
struct TransformArgs {
    #[arg(long, value_enum)]
    direction: Direction,
    /// Input grid CSV (forward) or coefficient JSON (inverse).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Band of the forward transform.
    #[arg(long, required_if_eq("direction", "forward"))]
    band: Option<usize>,
    /// Grid points per axis of the inverse transform; defaults to 2N+1.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
enum OpName {
    #[value(name = "fraclap")]
    #[serde(rename = "fraclap")]
    FracLap,
    #[value(name = "riesz")]
    #[serde(rename = "riesz")]
    Riesz,
    #[value(name = "riesz-conj")]
    #[serde(rename = "riesz-conj")]
    RieszConj,
    #[value(name = "D")]
    #[serde(rename = "D")]
    Dirac,
    #[value(name = "Dbar")]
    #[serde(rename = "Dbar")]
    DiracBar,
    #[value(name = "invD")]
    #[serde(rename = "invD")]
    InvDirac,
    #[value(name = "invD2")]
    #[serde(rename = "invD2")]
    InvDiracSquared,
}

#[derive(Args, Debug, Serialize)]
struct ApplyOpArgs {
    #[arg(long, value_enum)]
    op: OpName,
    /// Exponent of `fraclap`.
    #[arg(long, required_if_eq("op", "fraclap"), allow_negative_numbers = true)]
    s: Option<f64>,
    /// 1-based axis of `riesz` and `riesz-conj`.
    #[arg(long)]
    axis: Option<usize>,
    #[arg(long = "in")]
    input: PathBuf,
    /// Output coefficient file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum CircleKernel {
    /// `K = -k/2`, the inverse of `D²`.
    InverseD2,
    /// The sawtooth `k`.
    Sawtooth,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum AssemblyName {
    Dyadic,
    Direct,
}

#[derive(Args, Debug, Serialize)]
struct KernelArgs {
    #[arg(long)]
    dim: usize,
    /// 1-based axis of the directional kernel (dimension at least 2).
    #[arg(long, default_value_t = 1)]
    axis: usize,
    #[arg(long)]
    band: usize,
    /// Circle kernel; ignored in higher dimensions.
    #[arg(long, value_enum, default_value_t = CircleKernel::InverseD2)]
    circle_kernel: CircleKernel,
    /// Grid assembly used by the scan.
    #[arg(long, value_enum, default_value_t = AssemblyName::Dyadic)]
    assembly: AssemblyName,
    /// Strictly increasing bands for the sup-norm scan, comma separated.
    #[arg(long, value_delimiter = ',', requires = "scan_out")]
    scan_bands: Vec<usize>,
    /// Scan grid points per axis per unit of band.
    #[arg(long, default_value_t = 8)]
    oversample: usize,
    /// Coefficient file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scan table CSV.
    #[arg(long)]
    scan_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum NormKind {
    L1,
    L2,
    Sup,
    Sobolev,
}

#[derive(Args, Debug, Serialize)]
struct NormArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: NormKind,
    /// Sobolev exponent.
    #[arg(long, required_if_eq("kind", "sobolev"), allow_negative_numbers = true)]
    s: Option<f64>,
    /// Homogeneous weight `|m|^{2s}` instead of `(1+|m|²)^s`.
    #[arg(long)]
    homogeneous: bool,
    /// Quadrature points per axis for grid norms; defaults to 4N.
    #[arg(long)]
    points: Option<usize>,
    /// Report file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MixedNormArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Sobolev exponent of the `h` part.
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    #[arg(long)]
    homogeneous: bool,
    /// Stopping tolerance on the duality gap.
    #[arg(long, default_value_t = SumSpaceOptions::DEFAULT_TOL)]
    tol: f64,
    /// Interpret `--tol` relative to the norm.
    #[arg(long)]
    relative: bool,
    /// Solver grid points per axis; defaults to 4N.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, default_value_t = SumSpaceOptions::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Writes `<prefix>_g.csv` and `<prefix>_h.json`.
    #[arg(long)]
    split_out: Option<PathBuf>,
    /// Report file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyBbArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    band: usize,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coefficient magnitudes `|m|^{-decay}`.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    decay: f64,
    /// Relative tolerance of each sum-space solve.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, default_value_t = SumSpaceOptions::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Multiplies every sample.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    scale: f64,
    /// Report file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-sample table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyBergmanArgs {
    #[arg(long, default_value_t = 500)]
    corpus_size: usize,
    /// Decay laws cycled through the corpus, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.75, 1.0, 1.5])]
    decay: Vec<f64>,
    /// Dilation radii, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.99, 0.999, 0.9999])]
    radii: Vec<f64>,
    /// Relative tolerance of each boundary-norm solve.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Polynomial order of every series.
    #[arg(long, default_value_t = 32)]
    order: usize,
    /// Report file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-row table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct BilinearAArgs {
    /// First coefficient file; with `--in2` evaluates A on the pair.
    #[arg(long, requires = "in2")]
    in1: Option<PathBuf>,
    #[arg(long, requires = "in1")]
    in2: Option<PathBuf>,
    /// Dirac positions per axis of the `(a, b)` grid on `[0, 2π)²`.
    #[arg(long, default_value_t = 32)]
    grid: usize,
    /// Largest partial-sum index.
    #[arg(long, default_value_t = 100_000)]
    truncation: usize,
    /// Report file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-pair table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct DecomposeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Expected dimension of the input.
    #[arg(long)]
    dim: Option<usize>,
    /// Reconstruct with the conjugated Riesz transforms `R̄_j` (default) or,
    /// with `--conjugated=false`, with `R_j`.
    #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = ArgAction::Set)]
    conjugated: bool,
    /// Writes `<prefix>_f<j>.json` and `<prefix>_report.json`; defaults to the
    /// input path without its extension.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
}

/// Failure of a run, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Core(Error),
    Usage(String),
    /// The run completed and wrote its outputs but did not meet its criterion.
    Unconverged(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::NonConvergence { .. }) | Failure::Unconverged(_) => 3,
            Failure::Core(Error::Invariant(_)) => 4,
            _ => 2,
        }
    }

    fn report(&self) -> Value {
        let (class, message, extra) = match self {
            Failure::Core(e) => {
                let class = match e {
                    Error::NonConvergence { .. } => "non_convergence",
                    Error::Invariant(_) => "invariant",
                    Error::Parse(_) | Error::Json(_) | Error::Csv(_) => "parse",
                    Error::Io(_) => "io",
                    _ => "input",
                };
                let extra = match e {
                    Error::NonConvergence {
                        iterations,
                        gap,
                        partial,
                    } => json!({
                        "iterations": iterations,
                        "gap": json17(*gap),
                        "value": json17(partial.value),
                    }),
                    _ => json!({}),
                };
                (class, e.to_string(), extra)
            }
            Failure::Usage(m) => ("usage", m.clone(), json!({})),
            Failure::Unconverged(m) => ("non_convergence", m.clone(), json!({})),
        };
        let mut obj = Map::new();
        obj.insert("class".into(), Value::from(class));
        obj.insert("message".into(), Value::from(message));
        if let Value::Object(extra) = extra {
            obj.extend(extra);
        }
        json!({ "error": obj })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&Failure::Usage(e.render().to_string().trim_end().to_string())),
    };
    match configure_threads().and_then(|()| run(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(&f),
    }
}

fn fail(f: &Failure) -> ExitCode {
    eprintln!("{}", f.report());
    ExitCode::from(f.exit_code())
}

/// Caps the rayon pool at `FRACBB_THREADS` workers when set.
fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("FRACBB_THREADS") else {
        return Ok(());
    };
    let n: usize =
        raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Failure::Usage(format!("FRACBB_THREADS must be a positive integer, got `{raw}`"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::Transform(a) => transform(a),
        Command::ApplyOp(a) => apply_op(a),
        Command::Kernel(a) => kernel(a),
        Command::Norm(a) => norm(a),
        Command::MixedNorm(a) => mixed_norm(a),
        Command::VerifyBb(a) => verify_bb_cmd(a),
        Command::VerifyBergman(a) => verify_bergman_cmd(a),
        Command::BilinearA(a) => bilinear_a_cmd(a),
        Command::Decompose(a) => decompose(a),
    }
}

/// Config echo: subcommand name, schema version and arguments.
fn config_echo<T: Serialize>(name: &str, args: &T) -> CliResult<Value> {
    let mut obj = Map::new();
    obj.insert("subcommand".into(), Value::from(name));
    obj.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    obj.insert("args".into(), serde_json::to_value(args).map_err(Error::from)?);
    Ok(Value::Object(obj))
}

fn read_field(path: &Path) -> CliResult<SpectralField> {
    Ok(read_spectral_json(BufReader::new(File::open(path)?))?)
}

fn read_grid(path: &Path) -> CliResult<GridField> {
    Ok(read_grid_csv(BufReader::new(File::open(path)?))?)
}

/// Writes `bytes` to `path`, or to standard output when `path` is `None`.
fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(bytes)?;
            w.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Coefficient file carrying the config echo under `run_config`.
fn field_bytes(f: &SpectralField, config: &Value) -> CliResult<Vec<u8>> {
    let mut v = spectral_to_json(f);
    if let Value::Object(o) = &mut v {
        o.insert("run_config".into(), config.clone());
    }
    Ok(fracbb_core::io::to_json_string(&v)?.into_bytes())
}

fn report_bytes(kind: &str, config: &Value, payload: Value) -> CliResult<Vec<u8>> {
    let mut obj = Map::new();
    obj.insert("run_config".into(), config.clone());
    if let Value::Object(p) = payload {
        obj.extend(p);
    }
    Ok(report_json(kind, &Value::Object(obj))?.into_bytes())
}

/// CSV table with a schema comment, the config echo, a header and `rows`.
fn table_bytes(kind: &str, config: &Value, header: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut s = format!("# fracbb {kind} schema_version={SCHEMA_VERSION}\n# run_config: {config}\n");
    s.push_str(&header.join(","));
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s.into_bytes()
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn transform(a: &TransformArgs) -> CliResult<()> {
    let config = config_echo("transform", a)?;
    match a.direction {
        Direction::Forward => {
            let band = a
                .band
                .ok_or_else(|| Failure::Usage("--band is required".into()))?;
            let f = forward_transform(&read_grid(&a.input)?, band)?;
            emit(a.out.as_deref(), &field_bytes(&f, &config)?)
        }
        Direction::Inverse => {
            let f = read_field(&a.input)?;
            let g = inverse_transform(&f, a.points.unwrap_or(2 * f.band() + 1))?;
            let mut bytes = format!("# run_config: {config}\n").into_bytes();
            fracbb_core::io::write_grid_csv(&g, &mut bytes)?;
            emit(a.out.as_deref(), &bytes)
        }
    }
}

fn apply_op(a: &ApplyOpArgs) -> CliResult<()> {
    let config = config_echo("apply-op", a)?;
    let f = read_field(&a.input)?;
    let dim = f.dim();
    let axis = || {
        a.axis
            .ok_or_else(|| Failure::Usage("--axis is required for Riesz transforms".into()))
    };
    let op = match a.op {
        OpName::FracLap => {
            let s =
                a.s.ok_or_else(|| Failure::Usage("--s is required for fraclap".into()))?;
            MultiplierOp::fractional_laplacian(dim, s)?
        }
        OpName::Riesz => MultiplierOp::riesz(dim, axis()?, false)?,
        OpName::RieszConj => MultiplierOp::riesz(dim, axis()?, true)?,
        OpName::Dirac => MultiplierOp::dirac(dim)?,
        OpName::DiracBar => MultiplierOp::dirac_bar(dim)?,
        OpName::InvDirac => return emit(a.out.as_deref(), &field_bytes(&invert_d(&f)?, &config)?),
        OpName::InvDiracSquared => return emit(a.out.as_deref(), &field_bytes(&invert_d2(&f)?, &config)?),
    };
    emit(a.out.as_deref(), &field_bytes(&op.apply(&f)?, &config)?)
}

fn kernel(a: &KernelArgs) -> CliResult<()> {
    let config = config_echo("kernel", a)?;
    let spec = match (a.dim, a.circle_kernel) {
        (1, CircleKernel::InverseD2) => KernelSpec::inverse_dirac_squared_1d(a.band),
        (1, CircleKernel::Sawtooth) => KernelSpec::sawtooth(a.band),
        (dim, _) => KernelSpec::directional(dim, a.axis, a.band)?,
    }
    .with_assembly(match a.assembly {
        AssemblyName::Dyadic => Assembly::DyadicBlocks,
        AssemblyName::Direct => Assembly::Direct,
    });
    emit(a.out.as_deref(), &field_bytes(&spec.coefficients()?, &config)?)?;
    if !a.scan_bands.is_empty() {
        let scan = sup_norm_scan(&spec, &a.scan_bands, a.oversample)?;
        let header = ["band", "points", "sup", "ratio"].map(String::from);
        let rows: Vec<Vec<String>> = scan
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.band.to_string(),
                    r.points.to_string(),
                    fmt17(r.sup),
                    r.ratio.map(fmt17).unwrap_or_default(),
                ]
            })
            .collect();
        emit(
            a.scan_out.as_deref(),
            &table_bytes("kernel-scan", &config, &header, &rows),
        )?;
    }
    Ok(())
}

fn norm(a: &NormArgs) -> CliResult<()> {
    let config = config_echo("norm", a)?;
    let f = read_field(&a.input)?;
    let points = a.points.unwrap_or(4 * f.band()).max(2 * f.band() + 1);
    let value = match a.kind {
        NormKind::L1 => l1_norm(&inverse_transform(&f, points)?),
        NormKind::L2 => l2_norm(&inverse_transform(&f, points)?),
        NormKind::Sup => inverse_transform(&f, points)?.sup_norm(),
        NormKind::Sobolev => {
            let s =
                a.s.ok_or_else(|| Failure::Usage("--s is required for Sobolev norms".into()))?;
            sobolev_norm_weighted(&f, s, SobolevWeight::from_homogeneous_flag(a.homogeneous))?
        }
    };
    emit(
        a.out.as_deref(),
        &report_bytes("norm", &config, json!({ "value": json17(value) }))?,
    )
}

fn mixed_norm(a: &MixedNormArgs) -> CliResult<()> {
    let config = config_echo("mixed-norm", a)?;
    let f = read_field(&a.input)?;
    let tol = if a.relative {
        Tolerance::Relative(a.tol)
    } else {
        Tolerance::Absolute(a.tol)
    };
    let mut opts = SumSpaceOptions::new(a.s, SobolevWeight::from_homogeneous_flag(a.homogeneous))
        .with_tol(tol)
        .with_max_iter(a.max_iter);
    opts.points = a.points;
    let split = sum_space_norm_with(&f, &opts)?;
    if let Some(prefix) = &a.split_out {
        let mut g = format!("# run_config: {config}\n").into_bytes();
        fracbb_core::io::write_grid_csv(&split.g, &mut g)?;
        emit(Some(&with_suffix(prefix, "_g.csv")), &g)?;
        emit(
            Some(&with_suffix(prefix, "_h.json")),
            &field_bytes(&split.h, &config)?,
        )?;
    }
    let payload = json!({
        "value": json17(split.value),
        "gap": json17(split.gap),
        "iterations": split.iterations,
        "lower_bound": json17(split.lower_bound),
        "l1_part": json17(split.l1_part),
        "sobolev_part": json17(split.sobolev_part),
    });
    emit(a.out.as_deref(), &report_bytes("mixed-norm", &config, payload)?)
}

fn verify_bb_cmd(a: &VerifyBbArgs) -> CliResult<()> {
    let config = config_echo("verify-bb", a)?;
    let mut cfg = ExperimentConfig::new(a.dim, a.band, a.samples, a.seed);
    cfg.decay = a.decay;
    cfg.tol = a.tol;
    cfg.points = a.points;
    cfg.max_iter = a.max_iter;
    cfg.scale = a.scale;
    let report = verify_bb(&cfg)?;
    if let Some(path) = &a.csv {
        let mut header: Vec<String> = ["id", "lhs", "rhs", "ratio"].map(String::from).to_vec();
        header.extend((0..=a.dim).map(|j| format!("gap{j}")));
        let rows: Vec<Vec<String>> = report
            .samples
            .iter()
            .map(|s| {
                let mut r = vec![s.id.to_string(), fmt17(s.lhs), fmt17(s.rhs), fmt17(s.ratio)];
                r.extend(s.gaps.iter().map(|&g| fmt17(g)));
                r
            })
            .collect();
        emit(Some(path), &table_bytes("verify-bb", &config, &header, &rows))?;
    }
    let payload = serde_json::to_value(&report).map_err(Error::from)?;
    emit(a.out.as_deref(), &report_bytes("verify-bb", &config, payload)?)?;
    if report.failed {
        return Err(Failure::Unconverged(format!(
            "{} of {} samples did not converge",
            report.failed_ids.len(),
            a.samples
        )));
    }
    Ok(())
}

fn verify_bergman_cmd(a: &VerifyBergmanArgs) -> CliResult<()> {
    let config = config_echo("verify-bergman", a)?;
    let mut cfg = BergmanConfig::new(a.corpus_size, a.seed);
    cfg.decays = a.decay.clone();
    cfg.radii = a.radii.clone();
    cfg.tol = a.tol;
    cfg.order = a.order;
    let report = verify_bergman(&cfg)?;
    if let Some(path) = &a.csv {
        let header = [
            "series_id",
            "decay",
            "r",
            "bergman",
            "l1",
            "hminushalf",
            "mixed",
            "gap",
            "ratio",
        ]
        .map(String::from);
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|rec| {
                let r = &rec.row;
                vec![
                    rec.series_id.to_string(),
                    fmt17(rec.decay),
                    fmt17(r.r),
                    fmt17(r.bergman),
                    fmt17(r.l1),
                    fmt17(r.hminushalf),
                    fmt17(r.mixed),
                    fmt17(r.gap),
                    fmt17(r.ratio),
                ]
            })
            .collect();
        emit(
            Some(path),
            &table_bytes("verify-bergman", &config, &header, &rows),
        )?;
    }
    let payload = json!({
        "max_ratio": json17(report.max_ratio),
        "max_l1_ratio": json17(report.max_l1_ratio),
        "ladder_max": report.ladder_max.iter().map(|&(r, m)| json!([json17(r), json17(m)])).collect::<Vec<_>>(),
        "rows": report.rows.len(),
    });
    emit(
        a.out.as_deref(),
        &report_bytes("verify-bergman", &config, payload)?,
    )
}

fn bilinear_a_cmd(a: &BilinearAArgs) -> CliResult<()> {
    let config = config_echo("bilinear-a", a)?;
    if let (Some(p1), Some(p2)) = (&a.in1, &a.in2) {
        let z = bilinear_a_fields(&read_field(p1)?, &read_field(p2)?)?;
        let payload = json!({ "re": json17(z.re), "im": json17(z.im), "abs": json17(z.norm()) });
        return emit(a.out.as_deref(), &report_bytes("bilinear-a", &config, payload)?);
    }
    if a.grid == 0 {
        return Err(Failure::Usage("--grid must be positive".into()));
    }
    let step = 2.0 * std::f64::consts::PI / a.grid as f64;
    let traces: Vec<_> = (0..a.grid * a.grid)
        .into_par_iter()
        .map(|id| {
            let (ia, ib) = (id / a.grid, id % a.grid);
            let (x, y) = (ia as f64 * step, ib as f64 * step);
            (id, x, y, bilinear_a_diracs(x, y, &[a.truncation]))
        })
        .collect();
    let sup_abs = traces.iter().map(|t| t.3.sup_abs).fold(0.0, f64::max);
    let max_limit_error = traces
        .iter()
        .map(|t| (t.3.partial_sums[0].1 - t.3.limit).abs())
        .fold(0.0, f64::max);
    if let Some(path) = &a.csv {
        let header = ["id", "a", "b", "theta", "partial_sum", "limit", "sup_abs"].map(String::from);
        let rows: Vec<Vec<String>> = traces
            .iter()
            .map(|(id, x, y, t)| {
                vec![
                    id.to_string(),
                    fmt17(*x),
                    fmt17(*y),
                    fmt17(t.theta),
                    fmt17(t.partial_sums[0].1),
                    fmt17(t.limit),
                    fmt17(t.sup_abs),
                ]
            })
            .collect();
        emit(Some(path), &table_bytes("bilinear-a", &config, &header, &rows))?;
    }
    let payload = json!({
        "pairs": traces.len(),
        "sup_abs": json17(sup_abs),
        "max_limit_error": json17(max_limit_error),
    });
    emit(a.out.as_deref(), &report_bytes("bilinear-a", &config, payload)?)
}

fn decompose(a: &DecomposeArgs) -> CliResult<()> {
    let config = config_echo("decompose", a)?;
    let g = read_field(&a.input)?;
    if let Some(dim) = a.dim {
        if dim != g.dim() {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: g.dim(),
            }
            .into());
        }
    }
    let result = solve_decomposition(&g, a.conjugated)?;
    let prefix = a.out_prefix.clone().unwrap_or_else(|| a.input.with_extension(""));
    for (j, part) in result.parts.iter().enumerate() {
        emit(
            Some(&with_suffix(&prefix, &format!("_f{j}.json"))),
            &field_bytes(part, &config)?,
        )?;
    }
    let payload = serde_json::to_value(result.report()).map_err(Error::from)?;
    emit(
        Some(&with_suffix(&prefix, "_report.json")),
        &report_bytes("decompose", &config, payload)?,
    )
}
