//! `vf` — batch driver for vertex-frequency analysis experiments.

mod commands;
mod config;
mod report;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use vfa::graph::{GraphSpec, SwissRollParams};
use vfa::spectral::BasisKind;

use commands::{BankChoice, LgftOptions};

#[derive(Parser)]
#[command(name = "vf", version, about = "Vertex-frequency analysis of graph signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file stem (expects <stem>.csv and <stem>.json).
    #[arg(long)]
    graph: PathBuf,
    /// Spectral basis.
    #[arg(long, default_value = "laplacian", value_parser = parse_basis)]
    basis: BasisKind,
}

#[derive(Args)]
struct BankArgs {
    /// Bank family: binomial | raised-cosine | meyer | adaptive | wavelet.
    #[arg(long, default_value = "raised-cosine")]
    bank: String,
    /// Number of bands.
    #[arg(short, long, default_value_t = 15)]
    k: usize,
    /// Use the squared (partition-of-unity) raised-cosine variant.
    #[arg(long, default_value_t = false)]
    squared: bool,
    /// Scale factor for wavelet banks.
    #[arg(long, default_value_t = 2.0)]
    scale_factor: f64,
    /// Target eigenvalues for adaptive banks (repeatable).
    #[arg(long = "target")]
    targets: Vec<f64>,
    /// Load the bank from an exported JSON descriptor instead.
    #[arg(long)]
    bank_file: Option<PathBuf>,
}

impl BankArgs {
    fn choice(&self) -> BankChoice {
        BankChoice {
            kind: self.bank.clone(),
            k: self.k,
            squared: self.squared,
            scale_factor: self.scale_factor,
            targets: self.targets.clone(),
            bank_file: self.bank_file.clone(),
        }
    }
}

fn parse_basis(s: &str) -> Result<BasisKind, String> {
    match s {
        "laplacian" => Ok(BasisKind::Laplacian),
        "normalized-laplacian" => Ok(BasisKind::NormalizedLaplacian),
        "generalized-laplacian" => Ok(BasisKind::GeneralizedLaplacian),
        "adjacency" => Ok(BasisKind::Adjacency),
        "normalized-adjacency" => Ok(BasisKind::NormalizedAdjacency),
        "analytic-dft" => Ok(BasisKind::AnalyticDft),
        other => Err(format!("unknown basis '{other}'")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write its edge list + sidecar.
    Gen {
        /// path | cycle | directed-cycle | swiss-roll
        #[arg(long)]
        kind: String,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 100.0)]
        alpha: f64,
        #[arg(long, default_value_t = 7)]
        kappa: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "graph")]
        stem: String,
    },
    /// Eigendecomposition export (eigenvalues + eigenvectors CSV).
    Eig {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Graph Fourier transform of a signal.
    Gft {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Localized GFT: window form, spectral-shift form or band form.
    Lgft {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        signal: PathBuf,
        /// Window kind: heat | hann | rectangular | spectral-shift
        /// (mutually exclusive with the bank options).
        #[arg(long)]
        window: Option<String>,
        /// Heat window width parameter.
        #[arg(long, default_value_t = 3.0)]
        tau: f64,
        /// Vertex-window width in hops.
        #[arg(long, default_value_t = 3)]
        width: usize,
        /// Use a transfer bank instead of a window.
        #[arg(long, default_value_t = false)]
        use_bank: bool,
        #[command(flatten)]
        bank: BankArgs,
        /// spectral | polynomial
        #[arg(long, default_value = "spectral")]
        mode: String,
        /// Chebyshev coefficient count for the polynomial mode.
        #[arg(long, default_value_t = 40)]
        order: usize,
        /// Reassign map values to the per-vertex argmax band.
        #[arg(long, default_value_t = false)]
        reassign: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Spectral graph wavelet transform.
    Wavelet {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        signal: PathBuf,
        #[arg(short, long, default_value_t = 9)]
        k: usize,
        #[arg(long, default_value_t = 2.0)]
        scale_factor: f64,
        #[arg(long, default_value = "spectral")]
        mode: String,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Vertex-frequency energy distribution (windowless).
    Energy {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        signal: PathBuf,
        /// delta (Rihaczek) | sinc
        #[arg(long, default_value = "delta")]
        kernel: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Reduced-interference distribution with a marginal-preserving kernel.
    Rid {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        signal: PathBuf,
        /// delta | sinc
        #[arg(long, default_value = "sinc")]
        kernel: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Global and local smoothness indices.
    Smoothness {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Vertex-varying filtering by thresholding the band-form LGFT.
    Filter {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        signal: PathBuf,
        #[command(flatten)]
        bank: BankArgs,
        /// Explicit threshold; omit to grid-tune against --snr-ref.
        #[arg(long)]
        threshold: Option<f64>,
        /// Clean reference signal for SNR reporting / threshold tuning.
        #[arg(long)]
        snr_ref: Option<PathBuf>,
        #[arg(long, default_value_t = 120)]
        grid: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Optimize the heat-window width by the concentration measure.
    OptimizeTau {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tau0: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 60)]
        max_iter: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Frame bounds of a transfer bank.
    FrameBounds {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        bank: BankArgs,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a full experiment from a TOML config.
    Run {
        config: PathBuf,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check every invariant recorded in a run report.
    Verify { report: PathBuf },
}

fn main() {
    if let Ok(threads) = std::env::var("VF_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            vfa::cap_threads(n.max(1));
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen { kind, n, alpha, kappa, seed, out, stem } => {
            let spec = match kind.as_str() {
                "path" => GraphSpec::Path { n },
                "cycle" => GraphSpec::CycleUndirected { n },
                "directed-cycle" => GraphSpec::CycleDirected { n },
                "swiss-roll" => GraphSpec::SwissRoll(SwissRollParams::new(n, alpha, kappa, seed)),
                other => anyhow::bail!("unknown graph kind '{other}'"),
            };
            commands::cmd_gen(&spec, &out, &stem)?;
        }
        Command::Eig { graph, out } => commands::cmd_eig(&graph.graph, graph.basis, &out)?,
        Command::Gft { graph, signal, out } => {
            commands::cmd_gft(&graph.graph, &signal, graph.basis, &out)?
        }
        Command::Lgft {
            graph,
            signal,
            window,
            tau,
            width,
            use_bank,
            bank,
            mode,
            order,
            reassign,
            out,
        } => {
            let opts = LgftOptions {
                window: if use_bank { None } else { Some(window.unwrap_or_else(|| "heat".into())) },
                tau,
                width,
                bank: if use_bank { Some(bank.choice()) } else { None },
                mode,
                order,
                reassign,
            };
            commands::cmd_lgft(&graph.graph, &signal, graph.basis, &opts, &out)?;
        }
        Command::Wavelet { graph, signal, k, scale_factor, mode, order, out } => {
            commands::cmd_wavelet(
                &graph.graph,
                &signal,
                graph.basis,
                k,
                scale_factor,
                &mode,
                order,
                &out,
            )?;
        }
        Command::Energy { graph, signal, kernel, out } => {
            commands::cmd_energy(&graph.graph, &signal, graph.basis, &kernel, &out)?
        }
        Command::Rid { graph, signal, kernel, out } => {
            commands::cmd_energy(&graph.graph, &signal, graph.basis, &kernel, &out)?
        }
        Command::Smoothness { graph, signal, out } => {
            commands::cmd_smoothness(&graph.graph, &signal, graph.basis, &out)?
        }
        Command::Filter { graph, signal, bank, threshold, snr_ref, grid, out } => {
            commands::cmd_filter(
                &graph.graph,
                &signal,
                graph.basis,
                &bank.choice(),
                threshold,
                snr_ref.as_deref(),
                grid,
                &out,
            )?;
        }
        Command::OptimizeTau { graph, signal, tau0, alpha, tol, max_iter, out } => {
            commands::cmd_optimize_tau(
                &graph.graph,
                &signal,
                graph.basis,
                tau0,
                alpha,
                tol,
                max_iter,
                &out,
            )?;
        }
        Command::FrameBounds { graph, bank, grid, out } => {
            commands::cmd_frame_bounds(&graph.graph, graph.basis, &bank.choice(), grid, out.as_deref())?;
        }
        Command::Run { config, out } => {
            commands::cmd_run(&config, out.as_deref())?;
        }
        Command::Verify { report } => {
            let ok = report::verify(&report)?;
            if !ok {
                return Ok(2);
            }
        }
    }
    Ok(0)
}
