use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use freelat::harness::{
    congruence_density, euler_product, freeness_floor_check, run_survey, write_records,
    ReportFormat, SurveyConfig,
};
use freelat::lattice::{lattice_from_json, slope_profile_with};
use freelat::pairs::SParams;
use freelat::projective::pair_freeness_with;
use freelat::{Error, Limits, PointPair, ProjectivePoint};

#[derive(Parser)]
#[command(name = "freelat", version, about = "Lattice slopes, freeness and pair surveys on P^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Slope profile of a lattice given by its Gram matrix.
    Slopes {
        /// JSON `{"rank":m,"gram":[[num,den],...]}`, or `@path` to read it from a file.
        #[arg(long)]
        gram: String,
    },
    /// Freeness and slopes of a rational point.
    Freeness {
        /// Homogeneous coordinates, `x0:x1:...`.
        #[arg(long)]
        point: ProjectivePoint,
    },
    /// Invariants of a pair of points and membership in S.
    Pair {
        #[arg(long)]
        p1: ProjectivePoint,
        #[arg(long)]
        p2: ProjectivePoint,
        #[arg(long = "C", default_value_t = 3.0)]
        c: f64,
        #[arg(long, default_value_t = 0.4)]
        delta: f64,
    },
    /// Dyadic survey of pair counts and freeness.
    Survey {
        /// JSON file with the survey configuration; overrides the other flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long = "C", default_value_t = 3.0)]
        c: f64,
        #[arg(long, default_value_t = 0.4)]
        delta: f64,
        /// Smallest bound; bounds double up to --bmax.
        #[arg(long, default_value_t = 1024)]
        bmin: u64,
        #[arg(long, default_value_t = 1 << 14)]
        bmax: u64,
        #[arg(long)]
        max_points: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a freeness floor report (JSON) here.
        #[arg(long)]
        floor_report: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        floor_tolerance: f64,
    },
    /// Empirical frequency of pairs congruent modulo p.
    Density {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        /// Points with |v|² up to this bound are sampled.
        #[arg(long)]
        bound: u64,
    },
    /// Partial Euler product of the local congruence densities.
    Euler {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 1,
        e if e.is_resource_limit() => 3,
        _ => 2,
    }
}

fn print_json(v: &Value) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn read_gram(arg: &str) -> Result<String, Error> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(fs::read_to_string(path)?),
        None => Ok(arg.to_string()),
    }
}

fn pair_report(p1: ProjectivePoint, p2: ProjectivePoint, c: f64, delta: f64, limits: &Limits) -> Result<Value, Error> {
    let params = SParams::new(c, delta)?;
    let pair = PointPair::new(p1, p2)?;
    let row = pair.row(&params);
    let freeness = match pair_freeness_with(&pair.x1, &pair.x2, limits) {
        Ok(f) => Some(f),
        Err(Error::DegenerateHeight) => None,
        Err(e) => return Err(e),
    };
    Ok(json!({
        "x1": pair.x1,
        "x2": pair.x2,
        "W": row.w,
        "dist_sq": [row.dist_sq_num, row.dist_sq_den],
        "d": (row.dist_sq_num as f64 / row.dist_sq_den as f64).sqrt(),
        "c": row.c,
        "logH1": row.log_h1,
        "logH2": row.log_h2,
        "balanced": params.balanced(pair.x1.norm_sq(), pair.x2.norm_sq()),
        "in_S": row.in_s,
        "C": c,
        "delta": delta,
        "pair_freeness": freeness,
    }))
}

fn run(cli: Cli) -> Result<(), Error> {
    let limits = Limits::from_env();
    match cli.command {
        Command::Slopes { gram } => {
            let lattice = lattice_from_json(&read_gram(&gram)?)?;
            let profile = slope_profile_with(&lattice, &limits)?;
            print_json(&serde_json::to_value(&profile)?)
        }
        Command::Freeness { point } => {
            let profile = point.slope_profile(&limits)?;
            let data = point.freeness_data(&limits)?;
            print_json(&json!({
                "point": point,
                "normSq": point.norm_sq(),
                "logH": data.log_height,
                "freeness": data.freeness,
                "degenerate": point.norm_sq() == 1,
                "slopes": profile.slopes(),
                "profile": profile,
            }))
        }
        Command::Pair { p1, p2, c, delta } => print_json(&pair_report(p1, p2, c, delta, &limits)?),
        Command::Survey {
            config,
            n,
            c,
            delta,
            bmin,
            bmax,
            max_points,
            threads,
            format,
            out,
            floor_report,
            floor_tolerance,
        } => {
            let mut cfg = match config {
                Some(path) => serde_json::from_str::<SurveyConfig>(&fs::read_to_string(path)?)?,
                None => {
                    if bmin < 2 || bmin > bmax {
                        return Err(Error::InvalidArgument(format!("need 2 ≤ bmin ≤ bmax, got {bmin}, {bmax}")));
                    }
                    let bounds: Vec<u64> =
                        std::iter::successors(Some(bmin), |b| b.checked_mul(2)).take_while(|&b| b <= bmax).collect();
                    SurveyConfig { bounds, ..SurveyConfig::dyadic(n, c, delta, 1, 1) }
                }
            };
            if threads.is_some() {
                cfg.thread_hint = threads;
            }
            if let Some(m) = max_points {
                cfg.max_points = m;
            }
            let (records, failure) = match run_survey(&cfg) {
                Ok(r) => (r, None),
                Err(Error::SurveyBudget { limit, completed }) => {
                    eprintln!(
                        "warning: point budget {limit} exhausted; {} of {} bounds completed",
                        completed.len(),
                        cfg.bounds.len()
                    );
                    (completed, Some(Error::SurveyBudget { limit, completed: Vec::new() }))
                }
                Err(e) => return Err(e),
            };
            match &out {
                Some(path) => write_records(&records, format.into(), io::BufWriter::new(fs::File::create(path)?))?,
                None => write_records(&records, format.into(), io::stdout().lock())?,
            }
            if let Some(path) = floor_report {
                let report = freeness_floor_check(&records, &cfg, floor_tolerance)?;
                let mut f = io::BufWriter::new(fs::File::create(path)?);
                serde_json::to_writer_pretty(&mut f, &report)?;
                writeln!(f)?;
                if !report.passed {
                    eprintln!("warning: {} bounds below the freeness floor", report.violations.len());
                }
            }
            failure.map_or(Ok(()), Err)
        }
        Command::Density { n, p, bound } => {
            let est = congruence_density(n, p, bound)?;
            if let Some(w) = &est.warning {
                eprintln!("warning: {w}");
            }
            print_json(&serde_json::to_value(&est)?)
        }
        Command::Euler { n, cutoff } => print_json(&serde_json::to_value(euler_product(n, cutoff)?)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
