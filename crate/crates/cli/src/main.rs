//! `walker`: batch runs for frames and constant-breadth pairs on strict Walker 3-manifolds.
//!
//! Exit codes: 0 ok, 2 configuration or parse error, 3 numeric failure.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use walker_core::breadth::suite::{theorem_suite, SuiteConfig, Verdict};
use walker_core::config::RunConfig;
use walker_core::expr::Formula;
use walker_core::{io, pipeline, Error};

#[derive(Parser)]
#[command(name = "walker", version, about = "Frames and constant-breadth pairs on strict Walker 3-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the integration step.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Frenet (and Darboux) frames of the configured curve or profile.
    Frames(Common),
    /// Integrate the coefficients, assemble the partner curve and verify it.
    Pair(Common),
    /// Re-verify a pair from a coefficient CSV.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Coefficient CSV; defaults to the config's `coefficients` entry.
        #[arg(long)]
        coefficients: Option<PathBuf>,
    },
    /// Randomized theorem checks.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        step: Option<f64>,
        /// Samples per theorem.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Parse every expression of a config, or a single expression.
    ParseCheck {
        #[arg(long, conflicts_with = "expr")]
        config: Option<PathBuf>,
        #[arg(long)]
        expr: Option<String>,
        /// Comma-separated variable names for `--expr`.
        #[arg(long, default_value = "y,z")]
        vars: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("WALKER_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialization only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Parse(p) = &e {
                eprintln!("at byte offset {}", p.offset());
            }
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}

fn load(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::from_path(&common.config)?;
    if let Some(step) = common.step {
        cfg.numerics.step = step;
        cfg.validate()?;
    }
    fs::create_dir_all(&common.out)?;
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Error> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?))
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Frames(common) => {
            let cfg = load(&common)?;
            let rows = pipeline::run_frames(&cfg)?;
            io::write_frames(create(&common.out, "frames.csv")?, &rows)?;
            println!("wrote {} frame rows", rows.len());
        }
        Command::Pair(common) => {
            let cfg = load(&common)?;
            let run = pipeline::run_pair(&cfg)?;
            io::write_coefficients(create(&common.out, "coefficients.csv")?, &run.coeffs)?;
            io::write_pair(create(&common.out, "pair.csv")?, &run.pair)?;
            write_report(&common.out, &run)?;
        }
        Command::Verify { common, coefficients } => {
            let cfg = load(&common)?;
            let path = coefficients
                .or_else(|| cfg.coefficients.as_ref().map(PathBuf::from))
                .ok_or_else(|| Error::Config("no coefficient CSV given".into()))?;
            let case = cfg.profile.as_ref().ok_or_else(|| Error::Config("missing `profile` section".into()))?.case;
            let file = File::open(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let coeffs = io::read_coefficients(file, case)?;
            let run = pipeline::verify_coefficients(&cfg, coeffs)?;
            write_report(&common.out, &run)?;
        }
        Command::Sweep { config, out, seed, step, samples } => {
            let mut suite = match config {
                Some(path) => RunConfig::from_path(&path)?.sweep.unwrap_or_default(),
                None => SuiteConfig::default(),
            };
            suite.seed = seed.unwrap_or(suite.seed);
            suite.step = step.unwrap_or(suite.step);
            suite.samples = samples.unwrap_or(suite.samples);
            fs::create_dir_all(&out)?;
            let outcomes = theorem_suite(&suite)?;
            io::write_sweep(create(&out, "sweep.csv")?, &outcomes)?;
            io::write_sweep_samples(create(&out, "sweep_samples.csv")?, &outcomes)?;
            io::write_json(create(&out, "sweep.json")?, &json!({ "config": suite, "theorems": outcomes }))?;
            for o in &outcomes {
                println!(
                    "{:<40} {:<12} pass {:>4} fail {:>4} unsatisfiable {:>4}",
                    o.id,
                    format!("{:?}", o.verdict).to_lowercase(),
                    o.passed,
                    o.failed,
                    o.unsatisfiable
                );
            }
            if outcomes.iter().any(|o| o.verdict == Verdict::Inconclusive) {
                eprintln!("error: more than half of the samples were unsatisfiable for some theorem");
                return Ok(ExitCode::from(3));
            }
        }
        Command::ParseCheck { config, expr, vars } => {
            let items = match (config, expr) {
                (Some(path), _) => {
                    let text = fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
                    cfg.expressions()
                        .into_iter()
                        .map(|(k, v, vars)| (k, v, vars.into_iter().map(String::from).collect()))
                        .collect::<Vec<(String, String, Vec<String>)>>()
                }
                (None, Some(e)) => {
                    vec![("expr".to_string(), e, vars.split(',').map(|v| v.trim().to_string()).collect())]
                }
                (None, None) => return Err(Error::Config("give --config or --expr".into())),
            };
            for (key, text, vars) in items {
                let names: Vec<&str> = vars.iter().map(String::as_str).collect();
                let f = Formula::parse(&text, &names).inspect_err(|_| eprintln!("in `{key}`: {text}"))?;
                let partials: Vec<String> =
                    names.iter().map(|v| format!("d/d{v} = {}", f.derivative(v).source())).collect();
                println!("{key}: {}  [{}]", f.source(), partials.join("; "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_report(out: &Path, run: &pipeline::PairRun) -> Result<(), Error> {
    let summary = json!({
        "case": run.profile.case(),
        "kind": run.profile.kind(),
        "m0": run.coeffs.m(0),
        "halving_change": run.coeffs.halving_change,
        "frame_max_correction": run.frames.max_correction,
        "report": run.report,
    });
    io::write_json(create(out, "report.json")?, &summary)?;
    println!(
        "breadth {:.6e}  variation {:.3e}  tangent opposition {:.3e}",
        run.report.breadth, run.report.breadth_variation, run.report.tangent_opposition
    );
    Ok(())
}
