//! Command-line surface for Hénon map arithmetic over Q and Q(t).
//!
//! Results go to stdout in the requested format; diagnostics go to stderr.
//! Exit codes: 0 success (verified or vacuous), 2 parse error, 3 iteration
//! budget exhausted, 4 conjecture refuted, 5 checkpoint I/O failure,
//! 6 unsupported non-constant multiplier.

mod parse;
mod render;

use clap::{Args, Parser, Subcommand, ValueEnum};
use henon::funcfield::{
    height_divisor_entries, is_isotrivial, specialization_experiment, FfError,
};
use henon::local_heights::{canonical_height, HeightConfig, HeightError};
use henon::map::{HenonMap, OrbitDirection, OrbitStatus, PlanePoint};
use henon::modp::default_filter_primes;
use henon::search::{batch_verify, verify_conjecture_for, BatchConfig, PrimeSelection, Verdict};
use henon::Rational;
use parse::{parse_point_ratfunc, parse_point_rational, parse_rational, parse_rational_list};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "henon", about = "Exact arithmetic for Hénon map dynamics over Q and Q(t)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct FormatArg {
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical height of a point for f(y) = y² + b, with local breakdown
    Height {
        /// Parameter b as a rational, e.g. -9/16
        #[arg(short, long, allow_hyphen_values = true)]
        b: String,
        /// Point as x,y with rational coordinates
        #[arg(short = 'P', long, allow_hyphen_values = true)]
        point: String,
        /// Target width of the archimedean interval
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Iteration budget for entering an escape region
        #[arg(long, default_value_t = 64)]
        cap: u32,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Verdict for the rational-period conjecture at one parameter
    Verify {
        #[arg(short, long, allow_hyphen_values = true)]
        b: String,
        /// Filter primes (default: first 8 good primes ≥ 5)
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Skip the mod-p filters and go straight to the exhaustive search
        #[arg(long)]
        force_search: bool,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Run the verdict pipeline over every b with H(b) ≤ max-height
    Batch {
        #[arg(long)]
        max_height: u64,
        /// Worker threads (default: HENON_WORKERS or the available cores)
        #[arg(long)]
        workers: Option<usize>,
        /// Checkpoint file: one record per parameter, crash-safe
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Resume from an existing checkpoint instead of starting over
        #[arg(long)]
        resume: bool,
        /// Filter primes for every parameter (default: first 8 good per b)
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Height divisors, generic height, and the specialization table for a
    /// family b(t)
    Family {
        /// Parameter as an expression in t, e.g. t^2+2t or 1/t
        #[arg(short, long, allow_hyphen_values = true)]
        b: String,
        /// Point as x(t),y(t)
        #[arg(short = 'P', long, allow_hyphen_values = true, default_value = "0,0")]
        point: String,
        /// Sample parameters t₀ for the specialization table
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        samples: Vec<String>,
        /// Only test whether the family is isotrivial
        #[arg(long)]
        isotriviality: bool,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Scan one orbit: periodicity, escape, or cap
    Orbit {
        #[arg(short, long, allow_hyphen_values = true)]
        b: String,
        #[arg(short = 'P', long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 512)]
        cap: u32,
        /// Iterate the inverse map instead
        #[arg(long)]
        backward: bool,
        /// Retain and print the visited points
        #[arg(long)]
        trace: bool,
        /// Disable the confinement-based escape test (beware: escaping
        /// orbits grow doubly exponentially)
        #[arg(long)]
        no_escape_test: bool,
        #[command(flatten)]
        format: FormatArg,
    },
}

enum CliError {
    Parse(String),
    CapExceeded(String),
    Io(String),
    NonConstantA,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::CapExceeded(_) => 3,
            CliError::Io(_) => 5,
            CliError::NonConstantA => 6,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse(m) => format!("parse error: {m}"),
            CliError::CapExceeded(m) => format!("iteration budget exhausted: {m}"),
            CliError::Io(m) => format!("I/O error: {m}"),
            CliError::NonConstantA => "the family operations need a constant multiplier".into(),
        }
    }
}

impl From<parse::ParseError> for CliError {
    fn from(e: parse::ParseError) -> Self {
        CliError::Parse(e.0)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Height { b, point, tol, cap, format } => cmd_height(&b, &point, tol, cap, format.format),
        Command::Verify { b, primes, force_search, format } => {
            cmd_verify(&b, primes, force_search, format.format)
        }
        Command::Batch { max_height, workers, checkpoint, resume, primes, format } => {
            cmd_batch(max_height, workers, checkpoint, resume, primes, format.format)
        }
        Command::Family { b, point, samples, isotriviality, format } => {
            cmd_family(&b, &point, &samples, isotriviality, format.format)
        }
        Command::Orbit { b, point, cap, backward, trace, no_escape_test, format } => {
            cmd_orbit(&b, &point, cap, backward, trace, no_escape_test, format.format)
        }
    }
}

fn height_config(tol: f64, cap: u32) -> HeightConfig {
    HeightConfig { arch_tolerance: tol, pre_escape_cap: cap, ..HeightConfig::default() }
}

fn cmd_height(
    b: &str,
    point: &str,
    tol: f64,
    cap: u32,
    format: Format,
) -> Result<ExitCode, CliError> {
    let b = parse_rational(b)?;
    let (x, y) = parse_point_rational(point)?;
    let map = HenonMap::quadratic(b.clone());
    let p = PlanePoint::new(x, y);
    let cfg = height_config(tol, cap);
    let h = match canonical_height(&map, &p, &cfg) {
        Ok(h) => h,
        Err(HeightError::CanonicalCapExceeded { partial }) => {
            eprintln!(
                "partial result: total {} with error radius {}",
                partial.total, partial.error_radius
            );
            return Err(CliError::CapExceeded(format!(
                "tolerance {tol} not reached within {cap} steps"
            )));
        }
        Err(e) => return Err(CliError::CapExceeded(e.to_string())),
    };
    match format {
        Format::Json => println!("{}", render::height_json(&b, &p, &h)),
        Format::Text => print!("{}", render::height_text(&h)),
        Format::Csv => print!("{}", render::height_csv(&h)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    b: &str,
    primes: Option<Vec<u64>>,
    force_search: bool,
    format: Format,
) -> Result<ExitCode, CliError> {
    let b = parse_rational(b)?;
    let primes = primes.unwrap_or_else(|| default_filter_primes(&b, 8));
    let verdict =
        verify_conjecture_for(&b, &primes, force_search).map_err(|e| CliError::Io(e.to_string()))?;
    match format {
        Format::Json => println!("{}", render::verdict_json(&b, &verdict)),
        Format::Text | Format::Csv => print!("{}", render::verdict_text(&b, &verdict)),
    }
    if matches!(verdict, Verdict::Refuted { .. }) {
        Ok(ExitCode::from(4))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_batch(
    max_height: u64,
    workers: Option<usize>,
    checkpoint: Option<PathBuf>,
    resume: bool,
    primes: Option<Vec<u64>>,
    format: Format,
) -> Result<ExitCode, CliError> {
    let workers = workers
        .or_else(|| std::env::var("HENON_WORKERS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let mut cfg = BatchConfig::new(max_height);
    cfg.workers = workers;
    cfg.checkpoint = checkpoint;
    cfg.resume = resume;
    if let Some(ps) = primes {
        cfg.primes = PrimeSelection::Explicit(ps);
    }
    eprintln!("batch: H(b) ≤ {max_height} with {workers} workers");
    let report = batch_verify(&cfg).map_err(|e| CliError::Io(e.to_string()))?;
    match format {
        Format::Json => println!("{}", render::batch_json(&report)),
        Format::Text => print!("{}", report.canonical_text()),
        Format::Csv => print!("{}", render::batch_csv(&report)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_family(
    b: &str,
    point: &str,
    samples: &[String],
    isotriviality: bool,
    format: Format,
) -> Result<ExitCode, CliError> {
    let b = parse::parse_ratfunc(b)?;
    let (x, y) = parse_point_ratfunc(point)?;
    let map = HenonMap::quadratic(b.clone());
    let p = PlanePoint::new(x, y);

    if isotriviality {
        let iso = match is_isotrivial(&map) {
            Ok(v) => v,
            Err(FfError::UnsupportedNonConstantA) => return Err(CliError::NonConstantA),
            Err(e) => return Err(CliError::CapExceeded(e.to_string())),
        };
        match format {
            Format::Json => println!("{}", json!({"b": b.to_string(), "isotrivial": iso})),
            Format::Text | Format::Csv => println!("isotrivial: {iso}"),
        }
        return Ok(ExitCode::SUCCESS);
    }

    let (plus, minus) = match height_divisor_entries(&map, &p) {
        Ok(v) => v,
        Err(FfError::UnsupportedNonConstantA) => return Err(CliError::NonConstantA),
        Err(e) => return Err(CliError::CapExceeded(e.to_string())),
    };
    let deg = |entries: &[henon::funcfield::DivisorEntry]| {
        let mut acc = Rational::from_integer(0.into());
        for e in entries {
            acc += &e.weight * Rational::from_integer((e.place.degree() as i64).into());
        }
        acc
    };
    let generic_height = deg(&plus) + deg(&minus);

    let sample_values: Result<Vec<Rational>, _> =
        samples.iter().map(|s| parse_rational_list(s)).collect::<Result<Vec<_>, _>>().map(|v| {
            v.into_iter().flatten().collect()
        });
    let sample_values = sample_values?;
    let rows = if sample_values.is_empty() {
        Vec::new()
    } else {
        specialization_experiment(&map, &p, &sample_values, &HeightConfig::default())
    };

    match format {
        Format::Json => {
            println!(
                "{}",
                json!({
                    "b": b.to_string(),
                    "point": format!("{},{}", p.x, p.y),
                    "divisor_plus": render::divisor_json(&plus),
                    "divisor_minus": render::divisor_json(&minus),
                    "generic_height": generic_height.to_string(),
                    "rows": render::spec_rows_json(&rows),
                })
            );
        }
        Format::Text => {
            let show = |label: &str, entries: &[henon::funcfield::DivisorEntry]| {
                if entries.is_empty() {
                    println!("{label} = 0");
                } else {
                    let parts: Vec<String> = entries
                        .iter()
                        .map(|e| format!("{}·({})", e.weight, e.place))
                        .collect();
                    println!("{label} = {}", parts.join(" + "));
                }
            };
            show("D_plus ", &plus);
            show("D_minus", &minus);
            println!("generic canonical height = {generic_height}");
            if !rows.is_empty() {
                print!("{}", render::spec_rows_csv(&rows));
            }
        }
        Format::Csv => print!("{}", render::spec_rows_csv(&rows)),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_orbit(
    b: &str,
    point: &str,
    cap: u32,
    backward: bool,
    trace: bool,
    no_escape_test: bool,
    format: Format,
) -> Result<ExitCode, CliError> {
    let b = parse_rational(b)?;
    let (x, y) = parse_point_rational(point)?;
    let map = HenonMap::quadratic(b.clone());
    let p = PlanePoint::new(x, y);
    let direction = if backward { OrbitDirection::Backward } else { OrbitDirection::Forward };
    // periodic orbits satisfy the confinement bound everywhere, so violating
    // it certifies non-periodicity and stops the doubly exponential growth
    let confinement = {
        let map = map.clone();
        move |q: &PlanePoint<Rational>| !henon::local_heights::confinement_check(&map, q)
    };
    let escape: Option<&dyn Fn(&PlanePoint<Rational>) -> bool> =
        if no_escape_test { None } else { Some(&confinement) };
    let report = map.orbit(&p, cap, escape, direction, trace);
    let (status, step): (&str, Option<u32>) = match report.status {
        OrbitStatus::Periodic(n) => ("periodic", Some(n)),
        OrbitStatus::EscapedForward(k) => ("escaped_forward", Some(k)),
        OrbitStatus::EscapedBackward(k) => ("escaped_backward", Some(k)),
        OrbitStatus::CapReached => ("cap_reached", None),
    };
    match format {
        Format::Json => {
            let trace_json: Option<Vec<String>> = report
                .trace
                .as_ref()
                .map(|t| t.iter().map(render::point_str).collect());
            let mut obj = json!({
                "b": render::rational_str(&b),
                "point": render::point_str(&p),
                "status": status,
            });
            if let Some(n) = step {
                if status == "periodic" {
                    obj["period"] = json!(n);
                } else {
                    obj["escape_step"] = json!(n);
                }
            }
            if let Some(t) = trace_json {
                obj["trace"] = json!(t);
            }
            println!("{obj}");
        }
        Format::Text => {
            match (status, step) {
                ("periodic", Some(n)) => println!("periodic with minimal period {n}"),
                ("cap_reached", _) => println!("no repeat or escape within {cap} steps"),
                (s, Some(k)) => println!("{s} at step {k}"),
                _ => unreachable!(),
            }
            if let Some(t) = &report.trace {
                for (i, q) in t.iter().enumerate() {
                    println!("  {i}: {q}");
                }
            }
        }
        Format::Csv => {
            println!("step,x,y");
            if let Some(t) = &report.trace {
                for (i, q) in t.iter().enumerate() {
                    println!("{i},{},{}", q.x, q.y);
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
