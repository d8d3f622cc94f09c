//! Command-line surface of the 0-1 chaos test toolkit.
//!
//! Exit codes: 0 success, 1 input error (bad flags, unreadable or
//! malformed files, invalid parameters), 2 numerical degeneracy (series
//! too short, no usable spectral frequency, empty frequency grid).

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use chaos01::bench::{k_dump_csv, rows_to_csv, rows_to_json, run_benchmark, BenchConfig};
use chaos01::hrv::{analyze_long_term_with, read_rr_series, RrFormat, RrRecord};
use chaos01::io::{
    k_result_to_json, kc_dump_csv, long_term_report_to_json, long_term_reports_to_csv,
    read_series_file, series_to_csv, trajectory_to_csv,
};
use chaos01::ktest::translation_vars;
use chaos01::maps::{calibrate_sigma, generate, MapKind, MapSpec, NoiseKind, NoiseSpec};
use chaos01::{Error, IgMode, TestConfig, Unit};

#[derive(Parser)]
#[command(
    name = "chaos01",
    about = "Noise-aware 0-1 test for chaos: simulate map ensembles, estimate K, analyze RR series",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic map series and write it as CSV.
    Simulate(SimulateArgs),
    /// Run the K test on a series file and write the result as JSON.
    Test(TestArgs),
    /// Long-term RR analysis: windowed sigma, full-series K, LF/HF band K.
    Hrv(HrvArgs),
    /// Run an ensemble benchmark campaign from a config file.
    Bench(BenchArgs),
    /// Emit the (p, q) phase-space trajectory at a fixed frequency.
    Phase(PhaseArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    Logistic,
    Pm,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    None,
    Dynamical,
    Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum IgModeArg {
    Oscillatory,
    ConstantLiteral,
    Off,
}

impl From<IgModeArg> for IgMode {
    fn from(arg: IgModeArg) -> Self {
        match arg {
            IgModeArg::Oscillatory => IgMode::Oscillatory,
            IgModeArg::ConstantLiteral => IgMode::ConstantLiteral,
            IgModeArg::Off => IgMode::Off,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Map family.
    #[arg(long, value_enum)]
    map: MapArg,
    /// Map parameter: mu for logistic, gamma for pm.
    #[arg(long)]
    param: f64,
    /// Noise kind.
    #[arg(long, value_enum, default_value = "none")]
    noise: NoiseArg,
    /// Noise standard deviation as a percentage of the noise-free range.
    #[arg(long, default_value_t = 0.0)]
    pct: f64,
    /// Series length.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Noise generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial condition in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    x0: f64,
    /// Output series file (CSV, one sample per line).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TestArgs {
    /// Input series file (one sample per line).
    #[arg(long)]
    input: PathBuf,
    /// Noise standard deviation, or `auto` to estimate it.
    #[arg(long, default_value = "auto")]
    sigma: String,
    /// Displacement lag cutoff; defaults to N/10.
    #[arg(long = "n-cut")]
    n_cut: Option<usize>,
    /// Regularization term form.
    #[arg(long = "ig-mode", value_enum, default_value = "oscillatory")]
    ig_mode: IgModeArg,
    /// Power of the series mean in the oscillation correction (1 or 2).
    #[arg(long = "osc-exponent", default_value_t = 2)]
    osc_exponent: u32,
    /// Classification threshold.
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
    /// Literal-text reproduction: osc-exponent 1 and constant-literal mode.
    #[arg(long = "strict-paper", conflicts_with_all = ["ig_mode", "osc_exponent"])]
    strict_paper: bool,
    /// Output result file (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Optional per-frequency score dump (CSV: c, k_c).
    #[arg(long = "dump-kc")]
    dump_kc: Option<PathBuf>,
}

#[derive(Args)]
struct HrvArgs {
    /// Input RR file; repeat for batch mode (emits a CSV table).
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    /// Truncate each record to its first N intervals.
    #[arg(long)]
    take: Option<usize>,
    /// Window width in samples for the windowed sigma estimate.
    #[arg(long, default_value_t = 5000)]
    window: usize,
    /// Shift between consecutive windows in samples.
    #[arg(long, default_value_t = 2500)]
    shift: usize,
    /// Literal-text reproduction: osc-exponent 1 and constant-literal mode.
    #[arg(long = "strict-paper")]
    strict_paper: bool,
    /// Output file: JSON for one input, CSV table for several.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Campaign config file (JSON object or array of objects).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for results.csv, results.json and K dumps.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PhaseArgs {
    /// Input series file (one sample per line).
    #[arg(long)]
    input: PathBuf,
    /// Normalized frequency in (0, 2*pi).
    #[arg(long)]
    c: f64,
    /// Output trajectory file (CSV: p, q).
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    /// Bad flags, unreadable or malformed inputs: exit 1.
    Input(String),
    /// Degenerate numerics: exit 2.
    Degenerate(String),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::TooShort { .. }
            | Error::NoValidFrequency
            | Error::EmptyGrid
            | Error::ZeroVariance
            | Error::ResonantC { .. } => CliError::Degenerate(err.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Input(err.to_string())
    }
}

/// Write a file atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    use std::io::Write;
    tmp.write_all(content.as_bytes())?;
    tmp.persist(path)
        .map_err(|e| CliError::Input(format!("cannot persist {}: {}", path.display(), e.error)))?;
    Ok(())
}

fn map_spec(map: MapArg, param: f64) -> MapSpec {
    MapSpec {
        kind: match map {
            MapArg::Logistic => MapKind::Logistic,
            MapArg::Pm => MapKind::PomeauManneville,
        },
        param,
    }
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let spec = map_spec(args.map, args.param);
    let noise = match args.noise {
        NoiseArg::None => NoiseSpec::none(),
        kind => {
            let kind = match kind {
                NoiseArg::Dynamical => NoiseKind::Dynamical,
                NoiseArg::Output => NoiseKind::Output,
                NoiseArg::None => unreachable!(),
            };
            let sigma = if args.pct == 0.0 {
                0.0
            } else {
                calibrate_sigma(&spec, args.x0, args.n, args.pct)?
            };
            NoiseSpec {
                kind,
                sigma,
                pct: Some(args.pct),
                seed: args.seed,
            }
        }
    };
    let series = generate(&spec, &noise, args.x0, args.n)?;
    write_atomic(&args.out, &series_to_csv(&series))
}

fn parse_sigma(text: &str) -> Result<Option<f64>, CliError> {
    if text == "auto" {
        return Ok(None);
    }
    let sigma: f64 = text
        .parse()
        .map_err(|_| CliError::Input(format!("--sigma must be `auto` or a number, got `{text}`")))?;
    Ok(Some(sigma))
}

fn run_test(args: &TestArgs) -> Result<(), CliError> {
    let series = read_series_file(&args.input, Unit::Unitless)?;
    let mut cfg = if args.strict_paper {
        TestConfig::strict_paper()
    } else {
        TestConfig {
            ig_mode: args.ig_mode.into(),
            osc_exponent: args.osc_exponent,
            ..TestConfig::default()
        }
    };
    cfg.n_cut = args.n_cut;
    cfg.threshold = args.threshold;
    cfg.sigma = parse_sigma(&args.sigma)?;
    let result = chaos01::k_statistic(&series, &cfg)?;
    write_atomic(&args.out, &k_result_to_json(&result))?;
    if let Some(dump) = &args.dump_kc {
        write_atomic(dump, &kc_dump_csv(&result))?;
    }
    Ok(())
}

fn rr_format_for(path: &Path) -> RrFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => RrFormat::Csv,
        _ => RrFormat::Plain,
    }
}

fn run_hrv(args: &HrvArgs) -> Result<(), CliError> {
    let cfg = if args.strict_paper {
        TestConfig::strict_paper()
    } else {
        TestConfig::default()
    };
    let mut reports = Vec::new();
    for path in &args.input {
        let mut record = read_rr_series(path, rr_format_for(path))?;
        if let Some(take) = args.take {
            record = RrRecord {
                series: record.series.truncated(take),
                ..record
            };
        }
        reports.push(analyze_long_term_with(&record, &cfg, args.window, args.shift)?);
    }
    let content = if reports.len() == 1 {
        long_term_report_to_json(&reports[0])
    } else {
        long_term_reports_to_csv(&reports)
    };
    write_atomic(&args.out, &content)
}

fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' })
        .collect()
}

fn run_bench(args: &BenchArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)?;
    let configs: Vec<BenchConfig> = match serde_json::from_str::<Vec<BenchConfig>>(&text) {
        Ok(list) => list,
        Err(_) => vec![serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("cannot parse bench config: {e}")))?],
    };
    std::fs::create_dir_all(&args.out)?;
    let mut all_rows = Vec::new();
    for cfg in &configs {
        let rows = run_benchmark(cfg)?;
        if cfg.dump_k {
            for row in &rows {
                let name = sanitize_label(&format!(
                    "k_values_{}_{:?}_{}",
                    row.map, row.noise_kind, row.pct
                ));
                write_atomic(&args.out.join(format!("{name}.csv")), &k_dump_csv(row))?;
            }
        }
        all_rows.extend(rows);
    }
    write_atomic(&args.out.join("results.csv"), &rows_to_csv(&all_rows))?;
    write_atomic(&args.out.join("results.json"), &rows_to_json(&all_rows))?;
    Ok(())
}

fn run_phase(args: &PhaseArgs) -> Result<(), CliError> {
    let series = read_series_file(&args.input, Unit::Unitless)?;
    let traj = translation_vars(&series, args.c)?;
    write_atomic(&args.out, &trajectory_to_csv(&traj))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Test(args) => run_test(args),
        Command::Hrv(args) => run_hrv(args),
        Command::Bench(args) => run_bench(args),
        Command::Phase(args) => run_phase(args),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => match err.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{err}");
                std::process::exit(0);
            }
            _ => {
                eprint!("{err}");
                std::process::exit(1);
            }
        },
    };
    match run(&cli) {
        Ok(()) => {}
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::Degenerate(msg)) => {
            eprintln!("degenerate input: {msg}");
            std::process::exit(2);
        }
    }
}
