//! Batch experiment runner. Every study is a subcommand writing CSV data
//! plus a reproducibility manifest into --out; rerunning with the same
//! flags and seed reproduces the CSVs byte for byte. Worker count comes
//! from the HARDEDGE_WORKERS environment variable (default: all cores).
//!
//! Exit codes: 0 ok, 1 check failure, 2 parameter error, 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hardedge::experiments::{
    run_ensemble, run_riccati_cdf, run_sbo, run_transition, EnsembleRunParams,
    RiccatiCdfRunParams, SboRunParams, TransitionRunParams,
};
use hardedge::riccati::{CountRoute, HardEdgeParams};
use hardedge::sbo::RightBoundary;
use hardedge::validate::run_validate;
use hardedge::Error;

#[derive(Parser)]
#[command(
    name = "hardedge",
    version,
    about = "Hard-edge random matrix experiments: ensemble sampling, generator spectra, Riccati counting, and the hard-to-soft transition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOut {
    /// Master seed for all streams.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Sample scaled smallest eigenvalues of the bidiagonal (beta, a) model.
    Ensemble {
        /// Matrix size.
        #[arg(long)]
        n: usize,
        /// Ensemble beta > 0.
        #[arg(long)]
        beta: f64,
        /// Hard-edge exponent a > -1.
        #[arg(long)]
        a: f64,
        /// Number of smallest eigenvalues per draw.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Number of independent draws.
        #[arg(long)]
        samples: usize,
        #[command(flatten)]
        io: CommonOut,
    },
    /// Sample the lowest eigenvalues of the discretized generator
    /// ("inf" accepted for --beta: deterministic zero-noise mode).
    Sbo {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        a: f64,
        /// Domain truncation length L.
        #[arg(long = "domain-length", default_value_t = 12.0)]
        domain_length: f64,
        /// Mesh width h.
        #[arg(long = "step", default_value_t = 1.0 / 512.0)]
        step: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        samples: usize,
        /// Right-end boundary: "free" (half-line estimation) or "dirichlet".
        #[arg(long, default_value = "free")]
        boundary: String,
        #[command(flatten)]
        io: CommonOut,
    },
    /// Estimate P(Lambda_k < lambda) over a lambda grid by diffusion
    /// counting.
    RiccatiCdf {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        a: f64,
        /// Comma-separated lambda grid, e.g. --grid 0.5,1,2.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        /// Eigenvalue index k (0 = smallest).
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        paths: usize,
        /// Domain truncation; defaults to max(12, ln(max lambda) + 5).
        #[arg(long = "domain-length")]
        domain_length: Option<f64>,
        /// Base integration step.
        #[arg(long = "step", default_value_t = 1e-3)]
        step: f64,
        /// Counting route: "psi" (linear system, default) or "riccati".
        #[arg(long, default_value = "psi")]
        route: String,
        #[command(flatten)]
        io: CommonOut,
    },
    /// Hard-to-soft transition: paired survival probabilities on an
    /// (eta, mu) grid.
    Transition {
        #[arg(long)]
        beta: f64,
        /// Comma-separated mu grid.
        #[arg(long = "mu-grid", value_delimiter = ',')]
        mu_grid: Vec<f64>,
        /// Comma-separated eta list.
        #[arg(long = "eta-list", value_delimiter = ',')]
        eta_list: Vec<f64>,
        #[arg(long)]
        paths: usize,
        /// Base step in critical-window units for the scaled hard-edge
        /// process.
        #[arg(long = "step", default_value_t = 1e-2)]
        step: f64,
        #[command(flatten)]
        io: CommonOut,
    },
    /// Run the validation suite and write a deterministic JSON report.
    Validate {
        /// Scale factor for sample counts (1 = published thresholds).
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[command(flatten)]
        io: CommonOut,
    },
}

fn configure_workers() {
    if let Ok(v) = std::env::var("HARDEDGE_WORKERS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                // Ignore the error if a global pool already exists.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn parse_boundary(s: &str) -> Result<RightBoundary, Error> {
    match s.to_ascii_lowercase().as_str() {
        "free" | "reflecting" => Ok(RightBoundary::Free),
        "dirichlet" => Ok(RightBoundary::Dirichlet),
        other => Err(Error::Domain(format!("unknown boundary '{other}' (free | dirichlet)"))),
    }
}

fn parse_route(s: &str) -> Result<CountRoute, Error> {
    match s.to_ascii_lowercase().as_str() {
        "psi" | "zeros" => Ok(CountRoute::PsiZeros),
        "riccati" | "explosions" => Ok(CountRoute::RiccatiExplosions),
        other => Err(Error::Domain(format!("unknown route '{other}' (psi | riccati)"))),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Ensemble { n, beta, a, k, samples, io } => {
            let csv = run_ensemble(
                &EnsembleRunParams { n, beta, a, k, samples, seed: io.seed },
                &io.out,
            )?;
            println!("wrote {}", csv.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sbo { beta, a, domain_length, step, k, samples, boundary, io } => {
            let csv = run_sbo(
                &SboRunParams {
                    beta,
                    a,
                    l: domain_length,
                    h: step,
                    k,
                    samples,
                    seed: io.seed,
                    boundary: parse_boundary(&boundary)?,
                },
                &io.out,
            )?;
            println!("wrote {}", csv.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::RiccatiCdf { beta, a, grid, k, paths, domain_length, step, route, io } => {
            let l = domain_length.unwrap_or_else(|| {
                HardEdgeParams::default_domain_length(
                    grid.iter().cloned().fold(0.0f64, f64::max),
                )
            });
            let csv = run_riccati_cdf(
                &RiccatiCdfRunParams {
                    beta,
                    a,
                    lambda_grid: grid,
                    k,
                    paths,
                    l,
                    dx: step,
                    seed: io.seed,
                    route: parse_route(&route)?,
                },
                &io.out,
            )?;
            println!("wrote {}", csv.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Transition { beta, mu_grid, eta_list, paths, step, io } => {
            let csv = run_transition(
                &TransitionRunParams {
                    beta,
                    mu_grid,
                    eta_list,
                    paths,
                    dx_scale: step,
                    dx_soft: 1e-3,
                    seed: io.seed,
                },
                &io.out,
            )?;
            println!("wrote {}", csv.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scale, io } => {
            let (report, path) = run_validate(io.seed, scale, &io.out)?;
            for c in &report.checks {
                println!(
                    "{} {:<28} measured {:.6e} vs {:.6e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.measured,
                    c.threshold
                );
            }
            println!("report: {}", path.display());
            if report.ok {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn main() -> ExitCode {
    configure_workers();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
