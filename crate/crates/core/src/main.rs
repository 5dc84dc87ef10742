use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use surfcauchy::cauchydata::CATALOG;
use surfcauchy::cli::{self, JobConfig, Problem};
use surfcauchy::error::{Error, Result};

/// Timelike CMC surfaces in Minkowski space and K = -1 surfaces in Euclidean
/// space through a prescribed curve, by loop-group potentials.
#[derive(Parser)]
#[command(name = "surfcauchy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a Cauchy problem, write meshes and diagnostics.
    Solve {
        /// cmc, cmc-null, cmc-revolution, psph or psph-asymptotic.
        problem: String,
        #[command(flatten)]
        job: JobArgs,
    },
    /// Rerun diagnostics on the artifacts of an earlier solve.
    Check {
        /// Output prefix used by the solve.
        #[arg(long, default_value = "surface")]
        out: PathBuf,
        /// Comma-separated grid sizes: solve again at each and print a
        /// convergence table.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<usize>>,
    },
    /// List the built-in curves.
    Catalog,
}

#[derive(Args)]
struct JobArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog curve `name:k=v,...`.
    #[arg(long)]
    curve: Option<String>,
    /// Curve CSV with header `t,fx,fy,fz[,vx,vy,vz]`.
    #[arg(long)]
    curve_csv: Option<PathBuf>,
    /// Mean curvature.
    #[arg(long = "H", allow_negative_numbers = true)]
    h: Option<f64>,
    /// Free function alpha(y).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Free function beta(y).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Axis of revolution: timelike or null.
    #[arg(long)]
    axis: Option<String>,
    /// Radius of the timelike-axis revolution surface
    #[arg(long)]
    rho: Option<f64>,
    /// The prescribed normal is the principal normal; check the geodesic
    /// property.
    #[arg(long)]
    geodesic: bool,
    /// Grid nodes per direction.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated spectral parameters.
    #[arg(long)]
    lambda: Option<String>,
    /// Output prefix.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run per-node work on one thread.
    #[arg(long)]
    sequential: bool,
    /// Extra `key=value` settings, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn build_config(problem: &str, a: &JobArgs) -> Result<JobConfig> {
    let mut c = JobConfig::default();
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        c.apply_text(&text)?;
    }
    c.problem = problem.parse::<Problem>()?;
    let mut flags: Vec<String> = Vec::new();
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            flags.push(format!("{k}={v}"));
        }
    };
    push("curve", a.curve.clone());
    push("curve_csv", a.curve_csv.as_ref().map(|p| p.display().to_string()));
    push("H", a.h.map(|h| h.to_string()));
    push("alpha", a.alpha.clone());
    push("beta", a.beta.clone());
    push("axis", a.axis.clone());
    push("rho", a.rho.map(|r| r.to_string()));
    push("n", a.n.map(|n| n.to_string()));
    push("lambda", a.lambda.clone());
    push("out", a.out.as_ref().map(|p| p.display().to_string()));
    if a.geodesic {
        push("geodesic", Some("true".into()));
    }
    if a.sequential {
        push("sequential", Some("true".into()));
    }
    c.apply_overrides(&flags)?;
    c.apply_overrides(&a.set)?;
    c.validate()?;
    Ok(c)
}

fn verdict(pass: bool) -> u8 {
    if pass {
        0
    } else {
        1
    }
}

fn execute(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Solve { problem, job } => {
            let cfg = build_config(&problem, &job)?;
            let d = cli::run(&cfg)?;
            print!("{}", d.summary());
            println!("wrote {}.*", cfg.out.display());
            Ok(verdict(d.pass))
        }
        Command::Check { out, sweep: None } => {
            let d = cli::check(&out)?;
            print!("{}", d.summary());
            Ok(verdict(d.pass))
        }
        Command::Check {
            out,
            sweep: Some(sizes),
        } => {
            let cache = cli::load_cache(&out)?;
            let s = cli::sweep(&cache.config, &sizes)?;
            print!("{}", s.table());
            Ok(verdict(s.pass()))
        }
        Command::Catalog => {
            for e in CATALOG {
                let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!(
                    "{:<18} {:<7} {:<16} {}",
                    e.name,
                    format!("{:?}", e.ambient).to_lowercase(),
                    params.join(","),
                    e.about
                );
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match execute(args.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
