use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fpplab_core::oracle::{self, DEFAULT_PATH_CAP};
use fpplab_core::{
    describe, CrossingProblem, CrossingSolver, DistributionSpec, Environment, Error, ExperimentConfig, Rational,
    Region, DEFAULT_CANONICAL_CAP,
};

#[derive(Parser)]
#[command(name = "fpplab", version, about = "Restricted first-passage percolation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = all cores); overrides `threads`.
        #[arg(long, env = "FPPLAB_THREADS")]
        threads: Option<usize>,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the config schema and output columns of an experiment kind.
    Describe { kind: String },
    /// Brute-force spot checks on small instances.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
struct Instance {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Solve on the vertical cylinder instead of the square.
    #[arg(long)]
    cylinder: bool,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
}

impl Instance {
    fn problem(&self) -> fpplab_core::Result<CrossingProblem> {
        if self.cylinder {
            CrossingProblem::tau_cylinder(self.n, self.k)
        } else {
            CrossingProblem::tau(self.n, self.k)
        }
    }

    fn spec(&self) -> fpplab_core::Result<DistributionSpec> {
        DistributionSpec::two_point(self.a, self.b, self.p)
    }
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Compare the solver with brute force on one sampled environment.
    Crossing {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact law, quantile, influences and noise covariance of a small crossing.
    Distribution {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn execute(command: Command) -> fpplab_core::Result<bool> {
    match command {
        Command::Run { config, out, threads, seed } => {
            let mut config = ExperimentConfig::from_file(&config)?;
            if let Some(out) = out {
                config.out_dir = out;
            }
            if let Some(threads) = threads {
                config.threads = threads;
            }
            if let Some(seed) = seed {
                config.master_seed = seed;
            }
            let report = fpplab_core::run(&config)?;
            for f in &report.files {
                println!("{}", f.display());
            }
            Ok(true)
        }
        Command::Describe { kind } => {
            print!("{}", describe(&kind)?);
            Ok(true)
        }
        Command::Oracle(OracleCommand::Crossing { instance, seed }) => oracle_crossing(&instance, seed),
        Command::Oracle(OracleCommand::Distribution { instance, alpha, eps }) => {
            oracle_distribution(&instance, alpha, eps)
        }
    }
}

fn edges_text(edges: &[fpplab_core::Edge]) -> String {
    edges.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

fn oracle_crossing(instance: &Instance, seed: u64) -> fpplab_core::Result<bool> {
    let problem = instance.problem()?;
    let env = Environment::sample(instance.spec()?, Region::square(instance.n), seed)?;
    let weights = env.weights_as::<Rational>()?;
    let solver = CrossingSolver::new(&weights, problem)?;
    let brute = oracle::brute_force_value(&weights, &problem, DEFAULT_PATH_CAP)?;
    if !brute.all_geodesics.complete {
        return Err(Error::EnumerationOverflow { cap: DEFAULT_PATH_CAP });
    }

    let value = solver.value();
    let pi: Vec<_> = solver.intersection().into_iter().map(|p| p.edge).collect();
    let pi_brute = brute.all_geodesics.intersection();
    let canonical = solver.canonical(DEFAULT_CANONICAL_CAP);
    let path = canonical.result.path.map(|p| p.sorted_edges()).unwrap_or_default();
    let path_brute = brute.all_geodesics.minimal_star().map(|p| p.sorted_edges()).unwrap_or_default();

    let checks = [
        ("value", value == brute.value, value.to_string(), brute.value.to_string()),
        ("pi", pi == pi_brute, edges_text(&pi), edges_text(&pi_brute)),
        ("canonical", path == path_brute, edges_text(&path), edges_text(&path_brute)),
    ];
    println!("geodesics {}", brute.all_geodesics.len());
    let mut ok = true;
    for (name, agree, solver_text, brute_text) in checks {
        println!("{name} {}", if agree { "agree" } else { "DISAGREE" });
        println!("  solver: {solver_text}");
        println!("  brute:  {brute_text}");
        ok &= agree;
    }
    Ok(ok)
}

fn oracle_distribution(instance: &Instance, alpha: f64, eps: f64) -> fpplab_core::Result<bool> {
    let dist = oracle::exact_distribution(&instance.spec()?, &instance.problem()?)?;
    println!("relevant edges {}", dist.relevant_edges().len());
    println!("pmf");
    for (value, mass) in dist.pmf() {
        println!("  {value} {mass}");
    }
    println!("mean {}", dist.mean());
    println!("variance {}", dist.variance());
    let q = dist.quantile(alpha)?;
    println!("q_{alpha} {q}");
    println!("sum_inf2 {}", dist.sum_of_squared_influences(q));
    println!("cov(eps={eps}) {}", dist.noise_covariance(q, eps)?);
    println!("influences");
    for (edge, inf) in dist.influences(q) {
        println!("  {edge} {inf}");
    }
    Ok(true)
}
