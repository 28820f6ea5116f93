//! Command-line front end. Exit codes: 0 success, 2 input error, 3 numerical
//! failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use directed_ggm::ggcem::{learn_ggcem, learn_ggcem_extended};
use directed_ggm::ggim::{compute_bound, learn_ggim, learn_ggim_bounded};
use directed_ggm::graph::{Edge, Orientation, DEFAULT_EDGE_TOLERANCE};
use directed_ggm::lasso::LassoOptions;
use directed_ggm::linalg::{sample_diffusion, DiffusionConfig};
use directed_ggm::pipeline::{
    center, fmt_sig, load_csv, load_gold, load_matrix_csv, parse_rho_path, read_scores, roc_auc,
    run_hybrid, sample_covariance, write_edges, write_observations, write_roc, write_scores, CenterMode,
    FitOptions, Format,
};
use directed_ggm::semidef::{learn_ggim_semidef, SemidefOptions};
use directed_ggm::{Error, Matrix, Result};

#[derive(Parser)]
#[command(name = "dggm", version, about = "Directed Gaussian graphical models from stationary data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sparse Laplacian from the full Lyapunov system.
    Ggim(FitArgs),
    /// Off-diagonal Laplacian with a diagonal that certifies the covariance bound.
    GgimBounded {
        #[command(flatten)]
        fit: FitArgs,
        /// Diagonal margin; defaults to 1e-6 (1 + row sum + column sum).
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Sparse adjacency from the pairwise conditional balance equations.
    Ggcem(FitArgs),
    /// As ggcem, with every component of the pairwise equations.
    GgcemExt(FitArgs),
    /// Laplacian from a singular covariance (null space spanned by ones).
    Semidef(FitArgs),
    /// Combined per-condition scores, with optional AUC against a gold standard.
    Hybrid {
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, value_name = "CSV")]
        gold: Option<PathBuf>,
    },
    /// ROC curve of a score file against a gold standard.
    Roc {
        /// `from,to,score` CSV as written by `hybrid`.
        #[arg(long, value_name = "CSV")]
        scores: PathBuf,
        #[arg(long, value_name = "CSV")]
        gold: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Samples the stationary diffusion of a Laplacian.
    Simulate {
        /// Square matrix CSV with a header of variable names.
        #[arg(long, value_name = "CSV")]
        laplacian: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Integration steps between recorded samples.
        #[arg(long, default_value_t = 100)]
        stride: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct FitArgs {
    /// Observation CSV (optional `time` and `condition` columns).
    input: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    rho: f64,
    /// Log-spaced path `a:b:n`, solved with warm starts from large to small.
    #[arg(long, value_name = "A:B:N", conflicts_with = "rho")]
    rho_path: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_sweeps: usize,
    #[arg(long, default_value = "sending")]
    orientation: Orientation,
    #[arg(long, default_value_t = DEFAULT_EDGE_TOLERANCE)]
    edge_tol: f64,
    #[arg(long, default_value = "mean")]
    center: CenterMode,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl FitArgs {
    fn lasso(&self) -> LassoOptions {
        LassoOptions { tolerance: self.tol, max_sweeps: self.max_sweeps, ..LassoOptions::default() }
    }

    fn rhos(&self) -> Result<Vec<f64>> {
        match &self.rho_path {
            Some(spec) => {
                let mut path = parse_rho_path(spec)?;
                path.sort_by(|a, b| b.total_cmp(a));
                Ok(path)
            }
            None if self.rho >= 0.0 && self.rho.is_finite() => Ok(vec![self.rho]),
            None => Err(Error::InvalidArgument(format!("rho must be non-negative, got {}", self.rho))),
        }
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

enum Model {
    Ggim,
    Bounded(Option<f64>),
    Ggcem,
    GgcemExt,
    Semidef,
}

/// One graph per ρ; with a path the CSV gains a leading `rho` column and
/// other formats emit one document per ρ.
fn fit_single(args: &FitArgs, model: Model) -> Result<()> {
    let obs = center(&load_csv(&args.input)?, args.center)?;
    let s = sample_covariance(&obs);
    let lasso = args.lasso();
    let rhos = args.rhos()?;
    let fit_one = |rho: f64| -> Result<Vec<Edge>> {
        let (o, t) = (args.orientation, args.edge_tol);
        let warn = |converged: bool| {
            if !converged {
                eprintln!("warning: rho={}: LASSO stopped at --max-sweeps before converging", fmt_sig(rho));
            }
        };
        Ok(match model {
            Model::Ggim => {
                let est = learn_ggim(&s, rho, &lasso)?;
                warn(est.converged);
                eprintln!("rho={} xi={}", fmt_sig(rho), fmt_sig(est.xi));
                est.edges(o, t)
            }
            Model::Bounded(delta) => {
                let est = learn_ggim_bounded(&s, rho, delta, &lasso)?;
                warn(est.converged);
                match compute_bound(&est, &s) {
                    Ok(b) => eprintln!(
                        "rho={} xi={} alpha={} bound={} lhs={} holds={}",
                        fmt_sig(rho),
                        fmt_sig(b.xi),
                        fmt_sig(b.alpha),
                        fmt_sig(b.bound),
                        fmt_sig(b.lhs),
                        b.holds
                    ),
                    Err(e) => eprintln!("rho={}: bound unavailable: {e}", fmt_sig(rho)),
                }
                est.edges(o, t)
            }
            Model::Ggcem | Model::GgcemExt => {
                let est = if matches!(model, Model::Ggcem) {
                    learn_ggcem(&s, rho, &lasso)?
                } else {
                    learn_ggcem_extended(&s, rho, &lasso)?
                };
                warn(est.converged);
                est.edges(o, t)
            }
            Model::Semidef => {
                let opts = SemidefOptions { lasso: lasso.clone(), ..SemidefOptions::default() };
                let est = learn_ggim_semidef(&s, rho, &opts)?;
                warn(est.converged);
                eprintln!(
                    "rho={} reduced_residual={} row_sum_residual={}",
                    fmt_sig(rho),
                    fmt_sig(est.reduced_residual),
                    fmt_sig(est.row_sum_residual)
                );
                directed_ggm::graph::laplacian_edges(&est.l_hat, o, t)
            }
        })
    };
    let graphs = rhos.par_iter().map(|&r| fit_one(r)).collect::<Result<Vec<_>>>()?;

    let mut out = open_output(&args.output)?;
    if rhos.len() == 1 {
        write_edges(&mut out, obs.names(), &graphs[0], args.orientation, args.format)?;
    } else if args.format == Format::Csv {
        writeln!(out, "rho,from,to,weight")?;
        for (rho, edges) in rhos.iter().zip(&graphs) {
            let mut buf = Vec::new();
            write_edges(&mut buf, obs.names(), edges, args.orientation, Format::Csv)?;
            for line in String::from_utf8_lossy(&buf).lines().skip(1) {
                writeln!(out, "{},{line}", fmt_sig(*rho))?;
            }
        }
    } else {
        for (rho, edges) in rhos.iter().zip(&graphs) {
            if args.format == Format::Dot {
                writeln!(out, "// rho = {}", fmt_sig(*rho))?;
            }
            write_edges(&mut out, obs.names(), edges, args.orientation, args.format)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn hybrid(args: &FitArgs, gold: &Option<PathBuf>) -> Result<()> {
    let obs = load_csv(&args.input)?;
    let opts = FitOptions { lasso: args.lasso(), center: args.center, ..FitOptions::default() };
    let gold = gold.as_ref().map(|g| load_gold(g, obs.names())).transpose()?;
    let rhos = args.rhos()?;
    let mut out = open_output(&args.output)?;
    if rhos.len() > 1 {
        writeln!(out, "rho,auc")?;
    }
    for &rho in &rhos {
        let result = run_hybrid(&obs, rho, &opts, args.orientation)?;
        for (label, fit) in &result.conditions {
            let ggcem_ok = fit.ggcem.as_ref().is_none_or(|g| g.converged);
            if !fit.ggim.converged() || !ggcem_ok {
                eprintln!("warning: rho={} condition '{label}': LASSO stopped at --max-sweeps", fmt_sig(rho));
            }
        }
        let auc = gold.as_ref().map(|g| roc_auc(&result.scores, g)).transpose()?.map(|r| r.auc);
        if rhos.len() > 1 {
            let auc = auc.map(fmt_sig).unwrap_or_else(|| "NA".into());
            writeln!(out, "{},{auc}", fmt_sig(rho))?;
        } else {
            if let Some(a) = auc {
                eprintln!("auc={}", fmt_sig(a));
            }
            write_scores(&mut out, obs.names(), &result.scores, args.format)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ggim(a) => fit_single(&a, Model::Ggim),
        Command::GgimBounded { fit, delta } => fit_single(&fit, Model::Bounded(delta)),
        Command::Ggcem(a) => fit_single(&a, Model::Ggcem),
        Command::GgcemExt(a) => fit_single(&a, Model::GgcemExt),
        Command::Semidef(a) => fit_single(&a, Model::Semidef),
        Command::Hybrid { fit, gold } => hybrid(&fit, &gold),
        Command::Roc { scores, gold, format, output } => {
            let (names, scores) = read_scores(File::open(scores)?, Orientation::Sending)?;
            let roc = roc_auc(&scores, &load_gold(gold, &names)?)?;
            eprintln!("auc={}", fmt_sig(roc.auc));
            let mut out = open_output(&output)?;
            write_roc(&mut out, &roc, format)?;
            out.flush()?;
            Ok(())
        }
        Command::Simulate { laplacian, samples, dt, stride, seed, output } => {
            let (names, l): (Vec<String>, Matrix) = load_matrix_csv(laplacian)?;
            let cfg = DiffusionConfig {
                dt,
                sample_steps: samples * stride,
                sample_stride: stride,
                seed,
                ..DiffusionConfig::default()
            };
            let data = sample_diffusion(&l, &cfg)?;
            let times: Vec<f64> = (0..data.nrows()).map(|k| (k * stride) as f64 * dt).collect();
            let mut out = open_output(&output)?;
            write_observations(&mut out, &names, &data, Some(&times))?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
