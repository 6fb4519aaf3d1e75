//! Implementations of the `vf` subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ndarray::Array1;

use vfa::graph::{Graph, GraphSpec};
use vfa::inversion::{
    denoise_with_threshold, invert_band_sum, invert_kernel_bank, invert_summation,
    tune_threshold, DenoiseReport,
};
use vfa::io;
use vfa::lgft::{
    concentration, lgft_bank, lgft_bank_polynomial, lgft_spectral_shift, lgft_window, marginals,
    optimize_tau, reassign, spectrogram, VertexFrequencyMap,
};
use vfa::signal::{add_noise_at_snr, snr_db};
use vfa::spectral::{
    decompose, gft, local_smoothness, smoothness, uncertainty_bound, BasisKind, SpectralBasis,
};
use vfa::wavelet::{frame_bounds, frame_bounds_grid, wavelet_transform, WaveletMode};
use vfa::windows::{
    adaptive_bank, binomial_bank, concentrated_breakpoints, heat_window, meyer_bank,
    meyer_wavelet_bank, raised_cosine_bank, spectral_window_shift, vertex_window, TransferBank,
    VertexWindowShape,
};

use crate::config::{ExperimentConfig, TransformSection};
use crate::report::{Check, Report};

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))
}

pub fn load_graph(stem: &Path) -> Result<Graph> {
    Ok(io::read_graph(stem)?.0)
}

pub fn load_graph_basis(stem: &Path, basis: BasisKind) -> Result<(Graph, SpectralBasis)> {
    let graph = load_graph(stem)?;
    let b = decompose(&graph, basis)?;
    Ok((graph, b))
}

/// Shared bank construction for the bank-flavored subcommands.
pub struct BankChoice {
    pub kind: String,
    pub k: usize,
    pub squared: bool,
    pub scale_factor: f64,
    pub targets: Vec<f64>,
    pub bank_file: Option<PathBuf>,
}

pub fn build_bank(choice: &BankChoice, basis: &SpectralBasis) -> Result<TransferBank> {
    if let Some(file) = &choice.bank_file {
        let desc = io::read_bank_descriptor(file)?;
        return Ok(TransferBank::from_descriptor(&desc, basis)?);
    }
    Ok(match choice.kind.as_str() {
        "binomial" => binomial_bank(choice.k, basis)?,
        "raised-cosine" => raised_cosine_bank(choice.k, basis, choice.squared)?,
        "meyer" => meyer_bank(choice.k, basis)?,
        "adaptive" => {
            if choice.targets.is_empty() {
                bail!("adaptive bank needs --target values");
            }
            let bps = concentrated_breakpoints(&choice.targets, choice.k, basis.lambda_max())?;
            adaptive_bank(&bps, basis)?
        }
        "wavelet" => meyer_wavelet_bank(choice.scale_factor, choice.k, basis)?,
        other => bail!("unknown bank kind '{other}'"),
    })
}

pub fn cmd_gen(spec: &GraphSpec, out: &Path, stem: &str) -> Result<()> {
    ensure_dir(out)?;
    let graph = vfa::graph::generate(spec)?;
    let (seed, alpha, kappa) = match spec {
        GraphSpec::SwissRoll(p) => (Some(p.seed), Some(p.alpha), Some(p.kappa)),
        _ => (None, None, None),
    };
    let meta = io::GraphMeta { n: graph.n(), kind: graph.kind(), seed, alpha, kappa };
    io::write_graph(&out.join(stem), &graph, &meta)?;
    println!("wrote {}.csv and {}.json ({} vertices)", stem, stem, graph.n());
    Ok(())
}

pub fn cmd_eig(graph_stem: &Path, basis_kind: BasisKind, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let (_, basis) = load_graph_basis(graph_stem, basis_kind)?;
    io::write_eigenvalues(&out.join("eigenvalues.csv"), &basis)?;
    if !basis.is_complex() {
        io::write_eigenvectors(&out.join("eigenvectors.csv"), &basis)?;
    }
    println!(
        "wrote eigenvalues.csv{} (lambda_max = {})",
        if basis.is_complex() { "" } else { " and eigenvectors.csv" },
        io::format_float(basis.lambda_max())
    );
    Ok(())
}

pub fn cmd_gft(graph_stem: &Path, signal: &Path, basis_kind: BasisKind, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let (_, basis) = load_graph_basis(graph_stem, basis_kind)?;
    let x = io::read_signal(signal)?;
    let spectrum = gft(&x, &basis)?;
    io::write_signal(&out.join("spectrum.csv"), &spectrum)?;
    println!("wrote spectrum.csv");
    Ok(())
}

pub struct LgftOptions {
    pub window: Option<String>,
    pub tau: f64,
    pub width: usize,
    pub bank: Option<BankChoice>,
    pub mode: String,
    pub order: usize,
    pub reassign: bool,
}

pub fn cmd_lgft(
    graph_stem: &Path,
    signal: &Path,
    basis_kind: BasisKind,
    opts: &LgftOptions,
    out: &Path,
) -> Result<()> {
    ensure_dir(out)?;
    let (graph, basis) = load_graph_basis(graph_stem, basis_kind)?;
    let x = io::read_signal(signal)?;
    let map = match (&opts.window, &opts.bank) {
        (Some(kind), None) => match kind.as_str() {
            "heat" => {
                let set = spectral_window_shift(&heat_window(opts.tau, 1.0, &basis)?, &basis)?;
                lgft_window(&x, &set, &basis)?
            }
            "hann" | "rectangular" => {
                let dm = vfa::graph::distance_matrices(&graph, opts.width)?;
                let shape = if kind == "hann" {
                    VertexWindowShape::Hann { width: opts.width }
                } else {
                    VertexWindowShape::Rectangular { width: opts.width }
                };
                lgft_window(&x, &vertex_window(&dm, &shape)?, &basis)?
            }
            "spectral-shift" => {
                let spectrum = gft(&x, &basis)?;
                lgft_spectral_shift(&spectrum, &heat_window(opts.tau, 1.0, &basis)?, &basis)?
            }
            other => bail!("unknown window '{other}'"),
        },
        (None, Some(choice)) => {
            let bank = build_bank(choice, &basis)?;
            io::write_bank(&out.join("bank"), &bank)?;
            if opts.mode == "polynomial" {
                let fits = vfa::polyops::bank_coefficients(&bank, opts.order)?;
                io::write_cheb_coefficients(&out.join("cheb_coefficients.csv"), &fits)?;
                lgft_bank_polynomial(&x, &bank, &graph, opts.order)?
            } else {
                lgft_bank(&x, &bank, &basis)?
            }
        }
        _ => bail!("choose exactly one of --window or --bank"),
    };
    let written = if opts.reassign { reassign(&map)? } else { map.clone() };
    io::write_map(&out.join("map"), &written)?;
    let (vertex, frequency) = marginals(&spectrogram(&map));
    io::write_marginals(&out.join("marginals.csv"), &vertex, &frequency)?;
    println!(
        "wrote map.csv ({}x{}), concentration = {}",
        written.rows(),
        written.bands(),
        io::format_float(concentration(&map)?)
    );
    Ok(())
}

pub fn cmd_wavelet(
    graph_stem: &Path,
    signal: &Path,
    basis_kind: BasisKind,
    k: usize,
    scale_factor: f64,
    mode: &str,
    order: usize,
    out: &Path,
) -> Result<()> {
    ensure_dir(out)?;
    let (graph, basis) = load_graph_basis(graph_stem, basis_kind)?;
    let x = io::read_signal(signal)?;
    let wmode = if mode == "polynomial" {
        WaveletMode::Polynomial { order }
    } else {
        WaveletMode::Spectral
    };
    let w = wavelet_transform(&x, &graph, &basis, scale_factor, k, wmode)?;
    io::write_map(&out.join("map"), &w.map)?;
    io::write_bank(&out.join("bank"), &w.bank)?;
    let (a, b) = frame_bounds(&w.bank);
    println!(
        "wrote map.csv and bank.json; frame bounds A = {}, B = {}",
        io::format_float(a),
        io::format_float(b)
    );
    Ok(())
}

pub fn cmd_energy(
    graph_stem: &Path,
    signal: &Path,
    basis_kind: BasisKind,
    kernel: &str,
    out: &Path,
) -> Result<()> {
    ensure_dir(out)?;
    let (graph, basis) = load_graph_basis(graph_stem, basis_kind)?;
    let x = io::read_signal(signal)?;
    let dist = match kernel {
        "rihaczek" | "delta" => vfa::energy::rid(&x, &basis, &vfa::energy::RidKernel::Delta)?,
        "sinc" => vfa::energy::rid(&x, &basis, &vfa::energy::RidKernel::Sinc)?,
        "ideal" => vfa::energy::ideal_distribution(&x, &graph, &basis)?,
        other => bail!("unknown kernel '{other}' (use delta or sinc)"),
    };
    let labels: Vec<String> = (1..=basis.n()).map(|k| format!("k{k}")).collect();
    io::write_matrix(&out.join("energy.csv"), &dist.matrix, "vertex", &labels)?;
    let (vertex, frequency) = vfa::energy::marginals(&dist);
    io::write_marginals(&out.join("marginals.csv"), &vertex, &frequency)?;
    println!(
        "wrote energy.csv; total energy = {}",
        io::format_float(dist.total_energy())
    );
    Ok(())
}

pub fn cmd_smoothness(
    graph_stem: &Path,
    signal: &Path,
    basis_kind: BasisKind,
    out: &Path,
) -> Result<()> {
    ensure_dir(out)?;
    let (graph, basis) = load_graph_basis(graph_stem, basis_kind)?;
    let x = io::read_signal(signal)?;
    let global = smoothness(&x, &graph)?;
    let local = local_smoothness(&x, &graph)?;
    let mut csv = String::from("vertex,lambda,defined\n");
    for n in 0..x.len() {
        csv.push_str(&format!(
            "{},{},{}\n",
            n + 1,
            io::format_float(local.values[n]),
            u8::from(local.mask[n])
        ));
    }
    io::atomic_write(&out.join("local_smoothness.csv"), &csv)?;
    println!(
        "global smoothness = {}, uncertainty bound = {}",
        io::format_float(global),
        io::format_float(uncertainty_bound(&basis))
    );
    Ok(())
}

pub fn cmd_filter(
    graph_stem: &Path,
    signal: &Path,
    basis_kind: BasisKind,
    choice: &BankChoice,
    threshold: Option<f64>,
    snr_ref: Option<&Path>,
    grid: usize,
    out: &Path,
) -> Result<()> {
    ensure_dir(out)?;
    let (_, basis) = load_graph_basis(graph_stem, basis_kind)?;
    let noisy = io::read_signal(signal)?;
    let bank = build_bank(choice, &basis)?;
    io::write_bank(&out.join("bank"), &bank)?;
    let (report, filtered): (DenoiseReport, Array1<f64>) = match (threshold, snr_ref) {
        (Some(t), reference) => {
            let filtered = denoise_with_threshold(&noisy, &bank, &basis, t)?;
            let (snr_in, snr_out) = match reference {
                Some(path) => {
                    let clean = io::read_signal(path)?;
                    (snr_db(&clean, &noisy), snr_db(&clean, &filtered))
                }
                None => (f64::NAN, f64::NAN),
            };
            (
                DenoiseReport {
                    snr_in_db: snr_in,
                    snr_out_db: snr_out,
                    threshold: t,
                    bands: bank.band_count(),
                },
                filtered,
            )
        }
        (None, Some(path)) => {
            let clean = io::read_signal(path)?;
            tune_threshold(&clean, &noisy, &bank, &basis, grid)?
        }
        (None, None) => bail!("give --threshold, or --snr-ref for grid tuning"),
    };
    io::write_signal(&out.join("filtered.csv"), &filtered)?;
    let json = serde_json::json!({
        "snr_in": if report.snr_in_db.is_nan() { None } else { Some(report.snr_in_db) },
        "snr_out": if report.snr_out_db.is_nan() { None } else { Some(report.snr_out_db) },
        "T": report.threshold,
        "K": report.bands,
    });
    io::atomic_write(
        &out.join("filter_report.json"),
        &(serde_json::to_string_pretty(&json)? + "\n"),
    )?;
    println!("{json}");
    Ok(())
}

pub fn cmd_optimize_tau(
    graph_stem: &Path,
    signal: &Path,
    basis_kind: BasisKind,
    tau0: f64,
    alpha: f64,
    tol: f64,
    max_iter: usize,
    out: &Path,
) -> Result<()> {
    ensure_dir(out)?;
    let (_, basis) = load_graph_basis(graph_stem, basis_kind)?;
    let x = io::read_signal(signal)?;
    let run = optimize_tau(&x, &basis, tau0, alpha, tol, max_iter)?;
    let mut csv = String::from("iteration,tau,measure\n");
    for (i, (tau, measure)) in run.trace.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{}\n",
            i,
            io::format_float(*tau),
            io::format_float(*measure)
        ));
    }
    io::atomic_write(&out.join("tau_trace.csv"), &csv)?;
    println!(
        "{}",
        serde_json::json!({
            "tau": run.tau,
            "best_tau": run.best_tau,
            "best_measure": run.best_measure,
            "converged": run.converged,
            "evaluations": run.trace.len(),
        })
    );
    Ok(())
}

pub fn cmd_frame_bounds(
    graph_stem: &Path,
    basis_kind: BasisKind,
    choice: &BankChoice,
    grid: usize,
    out: Option<&Path>,
) -> Result<()> {
    let (_, basis) = load_graph_basis(graph_stem, basis_kind)?;
    let bank = build_bank(choice, &basis)?;
    let (a, b) = frame_bounds(&bank);
    let (ga, gb) = frame_bounds_grid(&bank, grid);
    let tight = (a - 1.0).abs() < 1e-8 && (b - 1.0).abs() < 1e-8;
    let json = serde_json::json!({
        "a": a, "b": b, "grid_a": ga, "grid_b": gb,
        "parseval_frame": tight,
    });
    if let Some(dir) = out {
        ensure_dir(dir)?;
        io::write_bank(&dir.join("bank"), &bank)?;
        io::atomic_write(
            &dir.join("frame_bounds.json"),
            &(serde_json::to_string_pretty(&json)? + "\n"),
        )?;
    }
    println!("{json}");
    Ok(())
}

// ---------------------------------------------------------------------------
// full experiment pipeline
// ---------------------------------------------------------------------------

pub fn cmd_run(config_path: &Path, out_override: Option<&Path>) -> Result<PathBuf> {
    let config = ExperimentConfig::load(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let out: PathBuf = match out_override {
        Some(dir) => dir.to_path_buf(),
        None => config_dir.join(config.output.dir.clone().unwrap_or_else(|| "out".into())),
    };
    ensure_dir(&out)?;

    let graph = config.build_graph()?;
    let basis = config.build_basis(&graph)?;
    let clean = config.build_signal(&basis, &config_dir)?;

    let mut files = BTreeMap::new();
    let mut metrics = BTreeMap::new();
    let mut checks = Vec::new();

    let meta = io::GraphMeta {
        n: graph.n(),
        kind: graph.kind(),
        seed: config.graph.seed,
        alpha: if config.graph.kind == "swiss-roll" { config.graph.alpha.or(Some(100.0)) } else { None },
        kappa: if config.graph.kind == "swiss-roll" { config.graph.kappa.or(Some(7)) } else { None },
    };
    io::write_graph(&out.join("graph"), &graph, &meta)?;
    files.insert("graph".into(), "graph".into());
    io::write_signal(&out.join("signal.csv"), &clean)?;
    files.insert("signal".into(), "signal.csv".into());

    let analyzed = match &config.noise {
        Some(noise) => {
            let noisy = add_noise_at_snr(&clean, noise.snr_db, noise.seed);
            io::write_signal(&out.join("noisy.csv"), &noisy)?;
            files.insert("noisy".into(), "noisy.csv".into());
            metrics.insert("snr_in_db".into(), snr_db(&clean, &noisy));
            noisy
        }
        None => clean.clone(),
    };
    let energy_x = analyzed.dot(&analyzed);
    metrics.insert("signal_energy".into(), energy_x);

    let write_map_artifacts =
        |map: &VertexFrequencyMap, reassigned: bool, files: &mut BTreeMap<String, String>| -> Result<()> {
            io::write_map(&out.join("map"), map)?;
            files.insert("map".into(), "map".into());
            let (vertex, frequency) = marginals(&spectrogram(map));
            io::write_marginals(&out.join("marginals.csv"), &vertex, &frequency)?;
            files.insert("marginals".into(), "marginals.csv".into());
            if reassigned {
                io::write_map(&out.join("reassigned"), &reassign(map)?)?;
                files.insert("reassigned".into(), "reassigned".into());
            }
            Ok(())
        };

    match &config.transform {
        TransformSection::WindowHeat { tau, .. } => {
            let set = spectral_window_shift(&heat_window(*tau, 1.0, &basis)?, &basis)?;
            let map = lgft_window(&analyzed, &set, &basis)?;
            write_map_artifacts(&map, false, &mut files)?;
            let back = invert_summation(&map, &set, &basis)?;
            let err = back
                .iter()
                .zip(analyzed.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            checks.push(Check { name: "roundtrip-error".into(), value: err, tolerance: Some(1e-8) });
            let m = concentration(&map)?;
            metrics.insert("concentration".into(), m);
            checks.push(Check { name: "concentration".into(), value: m, tolerance: None });
        }
        TransformSection::WindowVertex { width, shape, .. } => {
            let dm = vfa::graph::distance_matrices(&graph, *width)?;
            let shape = match shape.as_str() {
                "rectangular" => VertexWindowShape::Rectangular { width: *width },
                _ => VertexWindowShape::Hann { width: *width },
            };
            // sum-one normalization keeps the summation inversion admissible
            let set = vertex_window(&dm, &shape)?.normalized_sum_one()?;
            let map = lgft_window(&analyzed, &set, &basis)?;
            write_map_artifacts(&map, false, &mut files)?;
            let back = invert_summation(&map, &set, &basis)?;
            let err = back
                .iter()
                .zip(analyzed.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            checks.push(Check { name: "roundtrip-error".into(), value: err, tolerance: Some(1e-8) });
            let m = concentration(&map)?;
            metrics.insert("concentration".into(), m);
            checks.push(Check { name: "concentration".into(), value: m, tolerance: None });
        }
        TransformSection::SpectralShift { tau } => {
            let spectrum = gft(&analyzed, &basis)?;
            let map = lgft_spectral_shift(&spectrum, &heat_window(*tau, 1.0, &basis)?, &basis)?;
            write_map_artifacts(&map, false, &mut files)?;
            let m = concentration(&map)?;
            metrics.insert("concentration".into(), m);
            checks.push(Check { name: "concentration".into(), value: m, tolerance: None });
        }
        TransformSection::Bank { bank, k, squared, scale_factor, targets, mode, order, reassign } => {
            let choice = BankChoice {
                kind: bank.clone(),
                k: *k,
                squared: *squared,
                scale_factor: scale_factor.unwrap_or(2.0),
                targets: targets.clone().unwrap_or_default(),
                bank_file: None,
            };
            let bank = build_bank(&choice, &basis)?;
            io::write_bank(&out.join("bank"), &bank)?;
            files.insert("bank".into(), "bank".into());
            let exact_mode = mode == "spectral";
            let map = if exact_mode {
                lgft_bank(&analyzed, &bank, &basis)?
            } else {
                lgft_bank_polynomial(&analyzed, &bank, &graph, order.unwrap_or(40))?
            };
            write_map_artifacts(&map, *reassign, &mut files)?;
            let m = concentration(&map)?;
            metrics.insert("concentration".into(), m);
            checks.push(Check { name: "concentration".into(), value: m, tolerance: None });
            let tight = bank.tightness_defect() <= 1e-8;
            let partition = bank.partition_defect() <= 1e-8;
            let (a, b) = frame_bounds(&bank);
            metrics.insert("frame_a".into(), a);
            metrics.insert("frame_b".into(), b);
            if tight {
                checks.push(Check { name: "frame-bound-a".into(), value: a, tolerance: None });
                checks.push(Check { name: "frame-bound-b".into(), value: b, tolerance: None });
            }
            if exact_mode && tight {
                let total: f64 = map.matrix.iter().map(|v| v * v).sum();
                metrics.insert("map_energy".into(), total);
                checks.push(Check {
                    name: "tight-frame-energy-error".into(),
                    value: (total - energy_x).abs(),
                    tolerance: Some(1e-8),
                });
            }
            if exact_mode && (tight || partition) {
                let back = if tight {
                    invert_kernel_bank(&map, &bank, &basis)?
                } else {
                    invert_band_sum(&map, &bank)?
                };
                let err = back
                    .iter()
                    .zip(analyzed.iter())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max);
                checks.push(Check {
                    name: "roundtrip-error".into(),
                    value: err,
                    tolerance: Some(1e-8),
                });
            }
            if let Some(noise) = &config.noise {
                if !tight {
                    bail!("transform.bank: filtering requires a tight bank (sum of squares = 1)");
                }
                let (dreport, filtered) = match noise.threshold {
                    Some(t) => {
                        let filtered = denoise_with_threshold(&analyzed, &bank, &basis, t)?;
                        (
                            DenoiseReport {
                                snr_in_db: snr_db(&clean, &analyzed),
                                snr_out_db: snr_db(&clean, &filtered),
                                threshold: t,
                                bands: bank.band_count(),
                            },
                            filtered,
                        )
                    }
                    None => tune_threshold(&clean, &analyzed, &bank, &basis, noise.threshold_grid)?,
                };
                io::write_signal(&out.join("filtered.csv"), &filtered)?;
                files.insert("filtered".into(), "filtered.csv".into());
                metrics.insert("snr_out_db".into(), dreport.snr_out_db);
                metrics.insert("threshold".into(), dreport.threshold);
                checks.push(Check {
                    name: "snr-out-db".into(),
                    value: dreport.snr_out_db,
                    tolerance: None,
                });
            }
        }
        TransformSection::Wavelet { k, scale_factor, mode, order } => {
            let wmode = if mode == "polynomial" {
                WaveletMode::Polynomial { order: order.unwrap_or(40) }
            } else {
                WaveletMode::Spectral
            };
            let w = wavelet_transform(&analyzed, &graph, &basis, *scale_factor, *k, wmode)?;
            io::write_bank(&out.join("bank"), &w.bank)?;
            files.insert("bank".into(), "bank".into());
            write_map_artifacts(&w.map, false, &mut files)?;
            let (a, b) = frame_bounds(&w.bank);
            metrics.insert("frame_a".into(), a);
            metrics.insert("frame_b".into(), b);
            checks.push(Check { name: "frame-bound-a".into(), value: a, tolerance: None });
            checks.push(Check { name: "frame-bound-b".into(), value: b, tolerance: None });
            if matches!(wmode, WaveletMode::Spectral) {
                let total: f64 = w.map.matrix.iter().map(|v| v * v).sum();
                checks.push(Check {
                    name: "tight-frame-energy-error".into(),
                    value: (total - energy_x).abs(),
                    tolerance: Some(1e-8),
                });
                let back = vfa::wavelet::wavelet_inverse(&w, &basis)?;
                let err = back
                    .iter()
                    .zip(analyzed.iter())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max);
                checks.push(Check {
                    name: "roundtrip-error".into(),
                    value: err,
                    tolerance: Some(1e-8),
                });
            }
            let m = concentration(&w.map)?;
            metrics.insert("concentration".into(), m);
            checks.push(Check { name: "concentration".into(), value: m, tolerance: None });
        }
        TransformSection::Rihaczek | TransformSection::RidSinc | TransformSection::Ideal => {
            let dist = match &config.transform {
                TransformSection::Rihaczek => {
                    vfa::energy::rid(&analyzed, &basis, &vfa::energy::RidKernel::Delta)?
                }
                TransformSection::RidSinc => {
                    vfa::energy::rid(&analyzed, &basis, &vfa::energy::RidKernel::Sinc)?
                }
                _ => vfa::energy::ideal_distribution(&analyzed, &graph, &basis)?,
            };
            let labels: Vec<String> = (1..=basis.n()).map(|k| format!("k{k}")).collect();
            io::write_matrix(&out.join("energy.csv"), &dist.matrix, "vertex", &labels)?;
            files.insert("energy".into(), "energy.csv".into());
            let (vertex, frequency) = vfa::energy::marginals(&dist);
            io::write_marginals(&out.join("marginals.csv"), &vertex, &frequency)?;
            files.insert("marginals".into(), "marginals.csv".into());
            metrics.insert("energy_total".into(), dist.total_energy());
            if !matches!(config.transform, TransformSection::Ideal) {
                let spectrum = gft(&analyzed, &basis)?;
                let mut worst_v = 0.0f64;
                for (n, row) in dist.matrix.rows().into_iter().enumerate() {
                    worst_v = worst_v.max((row.sum() - analyzed[n] * analyzed[n]).abs());
                }
                let mut worst_f = 0.0f64;
                for (k, col) in dist.matrix.columns().into_iter().enumerate() {
                    worst_f = worst_f.max((col.sum() - spectrum[k] * spectrum[k]).abs());
                }
                checks.push(Check {
                    name: "vertex-marginal-error".into(),
                    value: worst_v,
                    tolerance: Some(1e-8),
                });
                checks.push(Check {
                    name: "frequency-marginal-error".into(),
                    value: worst_f,
                    tolerance: Some(1e-8),
                });
                checks.push(Check {
                    name: "energy-total-error".into(),
                    value: (dist.total_energy() - energy_x).abs(),
                    tolerance: Some(1e-8),
                });
            }
        }
    }

    let report = Report { config, files, metrics, checks };
    let report_path = out.join("report.json");
    report.save(&report_path)?;
    println!("wrote {}", report_path.display());
    Ok(report_path)
}
