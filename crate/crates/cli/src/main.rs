//! `loewner`: evaluate, lift and validate Loewner chains of covering maps.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a
//! numerical routine gives up, 2 for usage, input and schema errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use log::{debug, info};

use loewner::covers::ChainSpec;
use loewner::embed::{embed_annulus_until, RoundAnnulus, ScheduleParams};
use loewner::io::{write_lift_csv, RunConfig, SampleDump};
use loewner::lifting::{lift_path, PathSample};
use loewner::sampling::{ball_points, rng, unit_draws};
use loewner::topology::{deck_index, seam, LoopShape, LoopSample};
use loewner::validate::{
    approximant_check, factorization_check, report_diff, validate_chain, validate_evolution, ApproximantSeq,
    EvolutionGrid, ValidationReport,
};
use loewner::{CPoint, Complex64, Error};

const LOG_ENV: &str = "LOEWNER_LOG_LEVEL";

#[derive(Parser)]
#[command(name = "loewner", version, about = "Loewner chains of holomorphic covering mappings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the chain and evolution-family checks and write a JSON report.
    Validate(ValidateArgs),
    /// Evaluate f_t at random points of the ball.
    Eval(EvalArgs),
    /// Embed the cover of a round annulus into a chain.
    Embed(EmbedArgs),
    /// Lift a loop through f_t and report its deck index.
    Lift(LiftArgs),
    /// Errors of Taylor-truncated normal factors against f_t.
    Approximant(ApproximantArgs),
    /// Compare two validation reports.
    ReportDiff(DiffArgs),
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    chain: Option<String>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Skip the evolution-family checks.
    #[arg(long)]
    no_evolution: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    chain: String,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0.9)]
    radius: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// `.csv` or `.json`; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Real part of the centre.
    #[arg(long, allow_hyphen_values = true)]
    center: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    center_im: f64,
    #[arg(long)]
    rin: f64,
    #[arg(long)]
    rout: f64,
    /// Build the chain at least up to this time.
    #[arg(long, default_value_t = 3.0)]
    horizon: f64,
    /// Growth schedule as JSON (default: both radii grow like e^tau).
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LiftArgs {
    #[arg(long)]
    chain: String,
    #[arg(long)]
    t: f64,
    /// `seam` (unit circle about -1) or `wobble` (random loop about -1).
    #[arg(long = "loop", default_value = "seam")]
    loop_kind: String,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    turns: i64,
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ApproximantArgs {
    #[arg(long, default_value = "annulus")]
    chain: String,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value_t = 12)]
    terms: usize,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiffArgs {
    first: PathBuf,
    second: PathBuf,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Check(anyhow::Error),
    Usage(anyhow::Error),
}

type Outcome = std::result::Result<bool, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

/// Bad input is a usage error; anything else the library reports is a
/// numerical failure.
fn classify(e: Error) -> Failure {
    match e {
        Error::Invalid(_)
        | Error::DimensionMismatch { .. }
        | Error::OriginOutside
        | Error::ScheduleNotAdmissible(_)
        | Error::NoClosedForm(_)
        | Error::MixedNormalization
        | Error::NoApproximants
        | Error::OutsideBall(_)
        | Error::OutsideDisk(_) => Failure::Usage(e.into()),
        other => Failure::Check(other.into()),
    }
}

fn write_out(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, body)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(usage),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn init_logging() -> Result<(), Failure> {
    let level = std::env::var(LOG_ENV).unwrap_or_else(|_| "error".into());
    let level = level.trim().to_ascii_lowercase();
    if !matches!(level.as_str(), "error" | "info" | "debug") {
        return Err(usage(anyhow!("{LOG_ENV} must be error, info or debug, got {level:?}")));
    }
    env_logger::Builder::new()
        .parse_filters(&level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    Ok(())
}

fn validate(args: ValidateArgs) -> Outcome {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p).map_err(classify)?,
        None => RunConfig::default(),
    };
    if let Some(c) = args.chain {
        cfg.chain = c;
    }
    if let Some(t) = args.tmax {
        cfg.tmax = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.no_evolution {
        cfg.evolution = false;
    }
    cfg.check().map_err(classify)?;
    let chain = ChainSpec::parse(&cfg.chain).map_err(classify)?;
    if cfg.tmax > chain.t_max() {
        return Err(usage(anyhow!("tmax {} exceeds the chain horizon {}", cfg.tmax, chain.t_max())));
    }
    info!("validating {} up to t = {} (seed {})", chain, cfg.tmax, cfg.seed);
    let grid = cfg.sampling();
    let mut report = validate_chain(&chain, &grid);
    if cfg.evolution {
        debug!("running evolution-family checks");
        report.merge(validate_evolution(&chain, &EvolutionGrid::standard(&chain, cfg.tmax, cfg.seed)));
    }
    match factorization_check(&chain, &grid) {
        Ok(r) => report.merge(r),
        Err(Error::NoClosedForm(_)) => debug!("no closed-form factorization for {chain}"),
        Err(e) => return Err(classify(e)),
    }
    eprint!("{}", report.summary());
    write_out(args.out.as_deref(), &report.to_json())?;
    Ok(report.passed())
}

fn eval(args: EvalArgs) -> Outcome {
    let chain = ChainSpec::parse(&args.chain).map_err(classify)?;
    if !(0.0 < args.radius && args.radius < 1.0) {
        return Err(usage(anyhow!("radius must lie in (0, 1)")));
    }
    let f = chain.slice(args.t).map_err(classify)?;
    let points = ball_points(chain.dim, chain.norm, args.radius, args.samples, &mut rng(args.seed));
    let values = points
        .iter()
        .map(|z| f.eval(z))
        .collect::<Result<Vec<CPoint>, _>>()
        .map_err(classify)?;
    let dump = SampleDump {
        chain: chain.id(),
        t: args.t,
        points,
        values,
    };
    let json = args
        .out
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    let body = if json {
        dump.to_json()
    } else {
        let mut buf = Vec::new();
        dump.write_csv(&mut buf).map_err(classify)?;
        String::from_utf8(buf).map_err(usage)?
    };
    write_out(args.out.as_deref(), &body)?;
    Ok(true)
}

fn embed(args: EmbedArgs) -> Outcome {
    let annulus =
        RoundAnnulus::new(num_complex_c(args.center, args.center_im), args.rin, args.rout).map_err(classify)?;
    let schedule = match &args.schedule {
        Some(p) => {
            let s = fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(usage)?;
            serde_json::from_str::<ScheduleParams>(&s)
                .context("schedule schema")
                .map_err(usage)?
        }
        None => ScheduleParams::default(),
    };
    let chain = embed_annulus_until(&annulus, &schedule, args.horizon).map_err(classify)?;
    let loewner::covers::ChainKind::Embedded(e) = &chain.kind else {
        return Err(Failure::Check(anyhow!("embedding did not produce an embedded chain")));
    };
    let betas = (0..=30)
        .map(|k| {
            let t = args.horizon * k as f64 / 30.0;
            e.beta(t).map(|b| serde_json::json!({"t": t, "beta": b}))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(classify)?;
    info!("alpha0 = {}, t_max = {}", e.alpha0, e.t_max());
    let body = serde_json::json!({
        "chain": &**e,
        "t_max": e.t_max(),
        "beta": betas,
    });
    write_out(args.out.as_deref(), &(serde_json::to_string_pretty(&body).map_err(usage)? + "\n"))?;
    Ok(true)
}

fn num_complex_c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn lift(args: LiftArgs) -> Outcome {
    let chain = ChainSpec::parse(&args.chain).map_err(classify)?;
    let cover = chain.slice(args.t).map_err(classify)?;
    let planar = match args.loop_kind.as_str() {
        "seam" => seam(args.turns, args.nodes).map_err(classify)?,
        "wobble" => {
            let u = unit_draws(args.seed, 2);
            LoopShape {
                turns: args.turns,
                radial_amp: 0.3 * u[0],
                radial_freq: 2,
                angular_amp: 0.5 * u[1],
                angular_freq: 3,
            }
            .sample(args.nodes)
            .map_err(classify)?
        }
        other => return Err(usage(anyhow!("unknown loop {other:?}; expected seam or wobble"))),
    };
    // The loop runs in the first coordinate; the others stay at 0.
    let dim = chain.dim;
    let path: PathSample = planar
        .path()
        .map(|p| {
            let mut c = vec![p[0]];
            c.resize(dim, num_complex_c(0.0, 0.0));
            CPoint::new(c)
        })
        .map_err(classify)?;
    let lp = LoopSample::new(path.clone()).map_err(classify)?;
    let lifted = lift_path(&cover, &path, &CPoint::zeros(dim), 1e-12).map_err(classify)?;
    let class = deck_index(&cover, &lp, 1e-8).map_err(classify)?;
    eprintln!("deck index: {:?} (max defect {:e})", class.0, lifted.max_defect);
    let mut buf = Vec::new();
    write_lift_csv(&mut buf, &lifted.lifted, &path).map_err(classify)?;
    write_out(args.out.as_deref(), &String::from_utf8(buf).map_err(usage)?)?;
    Ok(true)
}

fn approximant(args: ApproximantArgs) -> Outcome {
    let chain = ChainSpec::parse(&args.chain).map_err(classify)?;
    let seq = ApproximantSeq::taylor(&chain, args.t, args.terms).map_err(classify)?;
    let out = approximant_check(&chain, args.t, &seq, &[args.rho]).map_err(classify)?;
    let mut body = String::from("terms,error\n");
    for (k, e) in out.errors[0].iter().enumerate() {
        body.push_str(&format!("{},{}\n", k + 1, loewner::validate::format_f64(*e)));
    }
    eprint!("{}", out.report.summary());
    write_out(args.out.as_deref(), &body)?;
    Ok(out.report.passed())
}

fn read_report(p: &Path) -> Result<ValidationReport, Failure> {
    let s = fs::read_to_string(p)
        .with_context(|| format!("reading {}", p.display()))
        .map_err(usage)?;
    ValidationReport::from_json(&s)
        .with_context(|| p.display().to_string())
        .map_err(usage)
}

fn diff(args: DiffArgs) -> Outcome {
    let a = read_report(&args.first)?;
    let b = read_report(&args.second)?;
    let d = report_diff(&a, &b);
    for line in &d.lines {
        println!("{line}");
    }
    println!("verdicts {}", if d.verdicts_match { "match" } else { "differ" });
    Ok(d.verdicts_match)
}

fn run(cli: Cli) -> Outcome {
    init_logging()?;
    match cli.command {
        Command::Validate(a) => validate(a),
        Command::Eval(a) => eval(a),
        Command::Embed(a) => embed(a),
        Command::Lift(a) => lift(a),
        Command::Approximant(a) => approximant(a),
        Command::ReportDiff(a) => diff(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(Failure::Check(e))) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Usage(e))) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(1)
        }
    }
}
