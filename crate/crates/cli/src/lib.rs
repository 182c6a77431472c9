//! Command-line front end: `analyze`, `simulate` and `dist`.
//!
//! [`run`] does all the work and returns the process exit code, so the
//! binary is a thin wrapper and tests can drive the CLI in-process.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use consistency_core::dataset::parse_csv;
use consistency_core::distributions::{self as dist, DistError};
use consistency_core::hypothesis::{CorrelationKind, TestId};
use consistency_core::report::{analyze, render_text, AnalysisConfig, OutputFormat};
use consistency_core::simulate::{
    calibrate_pipeline, calibrate_type1, generate_dataset, power_curve, CalibrationResult,
    NullScenario, SimulationSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "consistency",
    version,
    about = "Inter-rater and inter-method consistency of measurement methods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a CSV file of measurements (header `project,method,rater,value`).
    Analyze(AnalyzeArgs),
    /// Generate synthetic datasets and run Monte Carlo calibrations.
    Simulate(SimulateArgs),
    /// Query the reference distributions.
    Dist {
        #[command(subcommand)]
        query: DistQuery,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Correlation {
    Pearson,
    Spearman,
    Kendall,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    csv: PathBuf,
    /// JSON file with analysis settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Coefficient for the correlation gate (default: Pearson when both
    /// samples are normal, Spearman otherwise).
    #[arg(long, value_enum)]
    correlation: Option<Correlation>,
    /// Minimum |r| for fitting a calibration line.
    #[arg(long)]
    strong_r: Option<f64>,
    /// Lilliefors p-values for the normality gates.
    #[arg(long)]
    lilliefors: bool,
    /// Exit with status 1 when a method is less consistent or a rater pair
    /// disagrees systematically.
    #[arg(long)]
    fail_on_inconsistent: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON simulation spec; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of projects per dataset.
    #[arg(long)]
    projects: Option<usize>,
    /// Noise sd for every method.
    #[arg(long)]
    sigma: Option<f64>,
    /// Write the generated dataset as CSV to this path.
    #[arg(long)]
    emit_dataset: Option<PathBuf>,
    /// Estimate the type-I error of a test id, or of the whole pipeline
    /// with `pipeline`.
    #[arg(long, conflicts_with = "power")]
    calibrate: Option<String>,
    /// Estimate the power curve of a test id over `--effects`.
    #[arg(long, requires = "effects")]
    power: Option<String>,
    /// Comma-separated nondecreasing effect sizes.
    #[arg(long, value_delimiter = ',')]
    effects: Option<Vec<f64>>,
    #[arg(long, default_value_t = 5000)]
    replications: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Lilliefors p-values in pipeline calibration.
    #[arg(long)]
    lilliefors: bool,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum DistQuery {
    NormalCdf {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    NormalQuantile {
        #[arg(long)]
        p: f64,
    },
    TCdf {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long)]
        df: f64,
    },
    TQuantile {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        df: f64,
    },
    FCdf {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        d1: f64,
        #[arg(long)]
        d2: f64,
    },
    FQuantile {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d1: f64,
        #[arg(long)]
        d2: f64,
    },
    Chi2Cdf {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        df: f64,
    },
    Chi2Quantile {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        df: f64,
    },
    /// Null pmf of U_A; one `u probability` line per value unless `--u` is given.
    UPmf {
        #[arg(long)]
        na: usize,
        #[arg(long)]
        nb: usize,
        #[arg(long)]
        u: Option<usize>,
    },
    /// Largest u with 2·P(U ≤ u) ≤ alpha, or `none`.
    UCritical {
        #[arg(long)]
        na: usize,
        #[arg(long)]
        nb: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Null pmf of T_p; one `t probability` line per value unless `--t` is given.
    WilcoxonPmf {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: Option<usize>,
    },
    WilcoxonCritical {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

/// Error type of the command handlers; every variant maps to exit code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return EXIT_OK;
                }
                _ => EXIT_INPUT,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Simulate(s) => cmd_simulate(&s, out),
        Command::Dist { query } => cmd_dist(&query, out),
    };
    match result {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, InputError> {
    fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let bytes = read_file(path)?;
    serde_json::from_slice(&bytes).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn analysis_config(a: &AnalyzeArgs) -> Result<AnalysisConfig, InputError> {
    let mut cfg = match &a.config {
        Some(p) => read_json::<AnalysisConfig>(p)?,
        None => AnalysisConfig::default(),
    };
    if let Some(alpha) = a.alpha {
        cfg.alpha = alpha;
    }
    if let Some(f) = a.format {
        cfg.format = match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(c) = a.correlation {
        cfg.correlation = Some(match c {
            Correlation::Pearson => CorrelationKind::Pearson,
            Correlation::Spearman => CorrelationKind::Spearman,
            Correlation::Kendall => CorrelationKind::Kendall,
        });
    }
    if let Some(r) = a.strong_r {
        cfg.strong_r = r;
    }
    cfg.lilliefors |= a.lilliefors;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let cfg = analysis_config(a)?;
    let bytes = read_file(&a.csv)?;
    let ds = parse_csv(&bytes).map_err(|e| InputError(format!("{}: {e}", a.csv.display())))?;
    let report = analyze(&ds, &cfg).map_err(|e| InputError(format!("{}: {e}", a.csv.display())))?;
    match cfg.format {
        OutputFormat::Json => writeln!(out, "{}", report.to_json())?,
        OutputFormat::Text => write!(out, "{}", render_text(&report))?,
    }
    Ok(if a.fail_on_inconsistent && report.has_findings() {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct TestCalibrationOutput<'a> {
    #[serde(flatten)]
    result: &'a CalibrationResult,
    scenario: &'a NullScenario,
}

#[derive(Serialize)]
struct PowerOutput<'a> {
    test_id: TestId,
    scenario: &'a NullScenario,
    points: &'a [CalibrationResult],
}

#[derive(Serialize)]
struct DatasetOutput {
    records: usize,
    projects: usize,
    resamples: usize,
    path: String,
}

fn simulation_spec(s: &SimulateArgs) -> Result<SimulationSpec, InputError> {
    let mut spec = match &s.config {
        Some(p) => read_json::<SimulationSpec>(p)?,
        None => SimulationSpec::default(),
    };
    if let Some(seed) = s.seed {
        spec.seed = seed;
    }
    if let Some(n) = s.projects {
        spec.n_projects = n;
    }
    if let Some(sigma) = s.sigma {
        for m in &mut spec.methods {
            m.sigma = Some(sigma);
        }
    }
    spec.validate()?;
    Ok(spec)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn cmd_simulate(s: &SimulateArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let spec = simulation_spec(s)?;
    let pool = rayon_pool(s.threads)?;
    if let Some(path) = &s.emit_dataset {
        let g = generate_dataset(&spec)?;
        fs::write(path, g.dataset.to_csv())
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        if s.calibrate.is_none() && s.power.is_none() {
            let summary = DatasetOutput {
                records: g.dataset.records().len(),
                projects: g.dataset.projects().len(),
                resamples: g.resamples,
                path: path.display().to_string(),
            };
            writeln!(out, "{}", to_json(&summary))?;
            return Ok(EXIT_OK);
        }
    }
    if let Some(target) = &s.calibrate {
        if target.eq_ignore_ascii_case("pipeline") {
            let cfg = AnalysisConfig {
                alpha: s.alpha,
                lilliefors: s.lilliefors,
                ..Default::default()
            };
            cfg.validate()?;
            let r = pool.install(|| calibrate_pipeline(&spec, s.replications, &cfg))?;
            writeln!(out, "{}", to_json(&r))?;
        } else {
            let test: TestId = target.parse().map_err(InputError)?;
            let scenario = NullScenario::default_for(test);
            let r = pool
                .install(|| calibrate_type1(test, &scenario, s.replications, s.alpha, spec.seed))?;
            writeln!(
                out,
                "{}",
                to_json(&TestCalibrationOutput {
                    result: &r,
                    scenario: &scenario
                })
            )?;
        }
        return Ok(EXIT_OK);
    }
    if let Some(target) = &s.power {
        let test: TestId = target.parse().map_err(InputError)?;
        let scenario = NullScenario::default_for(test);
        let effects = s.effects.clone().unwrap_or_default();
        let points = pool.install(|| {
            power_curve(
                test,
                &scenario,
                &effects,
                s.replications,
                s.alpha,
                spec.seed,
            )
        })?;
        writeln!(
            out,
            "{}",
            to_json(&PowerOutput {
                test_id: test,
                scenario: &scenario,
                points: &points
            })
        )?;
        return Ok(EXIT_OK);
    }
    let g = generate_dataset(&spec)?;
    write!(out, "{}", g.dataset.to_csv())?;
    Ok(EXIT_OK)
}

fn rayon_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, InputError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(InputError("--threads must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..12).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let s = format!("{x:.prec$}", prec = (11 - exp) as usize);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

fn dist_err(e: DistError) -> InputError {
    InputError(e.to_string())
}

fn cmd_dist(q: &DistQuery, out: &mut dyn Write) -> Result<i32, InputError> {
    let value = |r: Result<f64, DistError>| r.map(format_g12).map_err(dist_err);
    let line = match *q {
        DistQuery::NormalCdf { x } => format_g12(dist::std_normal_cdf(x)),
        DistQuery::NormalQuantile { p } => value(dist::std_normal_quantile(p))?,
        DistQuery::TCdf { x, df } => value(dist::student_t_cdf(x, df))?,
        DistQuery::TQuantile { p, df } => value(dist::student_t_quantile(p, df))?,
        DistQuery::FCdf { x, d1, d2 } => value(dist::f_cdf(x, d1, d2))?,
        DistQuery::FQuantile { p, d1, d2 } => value(dist::f_quantile(p, d1, d2))?,
        DistQuery::Chi2Cdf { x, df } => value(dist::chi_square_cdf(x, df))?,
        DistQuery::Chi2Quantile { p, df } => value(dist::chi_square_quantile(p, df))?,
        DistQuery::UPmf { na, nb, u } => {
            pmf_lines(&dist::exact_u_pmf(na, nb).map_err(dist_err)?, u)?
        }
        DistQuery::WilcoxonPmf { n, t } => pmf_lines(&dist::exact_t_pmf(n).map_err(dist_err)?, t)?,
        DistQuery::UCritical { na, nb, alpha } => {
            critical(dist::u_critical(na, nb, check_alpha(alpha)?))?
        }
        DistQuery::WilcoxonCritical { n, alpha } => {
            critical(dist::t_critical(n, check_alpha(alpha)?))?
        }
    };
    writeln!(out, "{line}")?;
    Ok(EXIT_OK)
}

fn check_alpha(alpha: f64) -> Result<f64, InputError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(alpha)
    } else {
        Err(InputError(format!("alpha must lie in [0, 1], got {alpha}")))
    }
}

fn critical(r: Result<Option<usize>, DistError>) -> Result<String, InputError> {
    Ok(r.map_err(dist_err)?
        .map_or_else(|| "none".to_owned(), |v| v.to_string()))
}

fn pmf_lines(pmf: &dist::ExactRankPmf, at: Option<usize>) -> Result<String, InputError> {
    match at {
        Some(k) if k > pmf.max_value() => Err(InputError(format!(
            "{k} is outside 0..={}",
            pmf.max_value()
        ))),
        Some(k) => Ok(format_g12(pmf.pmf(k))),
        None => Ok((0..=pmf.max_value())
            .map(|k| format!("{k} {}", format_g12(pmf.pmf(k))))
            .collect::<Vec<_>>()
            .join("\n")),
    }
}
