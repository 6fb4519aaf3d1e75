//! Run reports and their verification.
//!
//! A run records every invariant it claims as a named check with the value
//! it measured and the tolerance it must satisfy. `verify` rebuilds the
//! inputs from the written artifacts, recomputes every check from scratch
//! and prints a machine-readable pass/fail table.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ndarray::Array1;
use serde::{Deserialize, Serialize};

use vfa::inversion::{invert_band_sum, invert_kernel_bank, invert_summation};
use vfa::lgft::VertexFrequencyMap;
use vfa::signal::snr_db;
use vfa::spectral::gft;
use vfa::wavelet::frame_bounds;
use vfa::windows::TransferBank;

use crate::config::{ExperimentConfig, TransformSection};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub files: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        vfa::io::atomic_write(path, &(json + "\n"))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading report {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing report {}", path.display()))
    }
}

struct Artifacts {
    analyzed: Array1<f64>,
    clean: Array1<f64>,
    basis: vfa::spectral::SpectralBasis,
    windows: Option<vfa::windows::VertexWindowSet>,
    bank: Option<TransferBank>,
    map: Option<VertexFrequencyMap>,
    energy: Option<ndarray::Array2<f64>>,
    filtered: Option<Array1<f64>>,
}

fn rebuild(report: &Report, dir: &Path) -> Result<Artifacts> {
    let config = &report.config;
    let file = |key: &str| -> Option<std::path::PathBuf> {
        report.files.get(key).map(|f| dir.join(f))
    };
    let graph_stem =
        file("graph").ok_or_else(|| anyhow::anyhow!("report lists no graph artifact"))?;
    let (graph, _) = vfa::io::read_graph(&graph_stem)?;
    let basis = config.build_basis(&graph)?;
    let clean = vfa::io::read_signal(
        &file("signal").ok_or_else(|| anyhow::anyhow!("report lists no signal artifact"))?,
    )?;
    let analyzed = match file("noisy") {
        Some(path) => vfa::io::read_signal(&path)?,
        None => clean.clone(),
    };
    let windows = match &config.transform {
        TransformSection::WindowHeat { tau, .. } => Some(vfa::windows::spectral_window_shift(
            &vfa::windows::heat_window(*tau, 1.0, &basis)?,
            &basis,
        )?),
        TransformSection::WindowVertex { width, shape, .. } => {
            let dm = vfa::graph::distance_matrices(&graph, *width)?;
            let shape = match shape.as_str() {
                "rectangular" => vfa::windows::VertexWindowShape::Rectangular { width: *width },
                _ => vfa::windows::VertexWindowShape::Hann { width: *width },
            };
            Some(vfa::windows::vertex_window(&dm, &shape)?.normalized_sum_one()?)
        }
        _ => None,
    };
    let bank = match file("bank") {
        Some(stem) => {
            let desc = vfa::io::read_bank_descriptor(&stem.with_extension("json"))?;
            Some(TransferBank::from_descriptor(&desc, &basis)?)
        }
        None => None,
    };
    let map = match file("map") {
        Some(stem) => Some(vfa::io::read_map(&stem)?),
        None => None,
    };
    let energy = match file("energy") {
        Some(path) => Some(vfa::io::read_matrix(&path)?.1),
        None => None,
    };
    let filtered = match file("filtered") {
        Some(path) => Some(vfa::io::read_signal(&path)?),
        None => None,
    };
    Ok(Artifacts { analyzed, clean, basis, windows, bank, map, energy, filtered })
}

fn max_abs_err(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn recompute(name: &str, art: &Artifacts) -> Result<f64> {
    let map = || art.map.as_ref().ok_or_else(|| anyhow::anyhow!("no map artifact"));
    let bank = || art.bank.as_ref().ok_or_else(|| anyhow::anyhow!("no bank artifact"));
    Ok(match name {
        "concentration" => {
            let m = map()?;
            let l1: f64 = m.matrix.iter().map(|v| v.abs()).sum();
            let fro: f64 = m.matrix.iter().map(|v| v * v).sum::<f64>().sqrt();
            l1 / fro
        }
        "roundtrip-error" => {
            let m = map()?;
            let back = if let Some(w) = &art.windows {
                invert_summation(m, w, &art.basis)?
            } else {
                let b = bank()?;
                if b.tightness_defect() <= 1e-8 {
                    invert_kernel_bank(m, b, &art.basis)?
                } else {
                    invert_band_sum(m, b)?
                }
            };
            max_abs_err(&back, &art.analyzed)
        }
        "tight-frame-energy-error" => {
            let total: f64 = map()?.matrix.iter().map(|v| v * v).sum();
            (total - art.analyzed.dot(&art.analyzed)).abs()
        }
        "frame-bound-a" => frame_bounds(bank()?).0,
        "frame-bound-b" => frame_bounds(bank()?).1,
        "vertex-marginal-error" => {
            let e = art.energy.as_ref().ok_or_else(|| anyhow::anyhow!("no energy artifact"))?;
            let x = &art.analyzed;
            let mut worst = 0.0f64;
            for (n, row) in e.rows().into_iter().enumerate() {
                worst = worst.max((row.sum() - x[n] * x[n]).abs());
            }
            worst
        }
        "frequency-marginal-error" => {
            let e = art.energy.as_ref().ok_or_else(|| anyhow::anyhow!("no energy artifact"))?;
            let spectrum = gft(&art.analyzed, &art.basis)?;
            let mut worst = 0.0f64;
            for (k, col) in e.columns().into_iter().enumerate() {
                worst = worst.max((col.sum() - spectrum[k] * spectrum[k]).abs());
            }
            worst
        }
        "energy-total-error" => {
            let e = art.energy.as_ref().ok_or_else(|| anyhow::anyhow!("no energy artifact"))?;
            (e.iter().sum::<f64>() - art.analyzed.dot(&art.analyzed)).abs()
        }
        "snr-out-db" => {
            let filtered =
                art.filtered.as_ref().ok_or_else(|| anyhow::anyhow!("no filtered artifact"))?;
            snr_db(&art.clean, filtered)
        }
        other => bail!("unknown check '{other}'"),
    })
}

/// Re-derives every check in the report from the written artifacts. Returns
/// true when all of them hold.
pub fn verify(report_path: &Path) -> Result<bool> {
    let report = Report::load(report_path)?;
    let dir = report_path.parent().unwrap_or(Path::new("."));
    let art = rebuild(&report, dir)?;
    let mut all_ok = true;
    println!("{:<28} {:>14} {:>14} {:>10} result", "check", "recorded", "recomputed", "tol");
    for check in &report.checks {
        let (ok, note) = match recompute(&check.name, &art) {
            Ok(value) => {
                let agree = (value - check.value).abs() <= 1e-9 * (1.0 + check.value.abs());
                let within = check.tolerance.map_or(true, |tol| value <= tol);
                (agree && within, format!("{value:>14.6e}"))
            }
            Err(e) => (false, format!("{e:>14}")),
        };
        all_ok &= ok;
        println!(
            "{:<28} {:>14.6e} {} {:>10} {}",
            check.name,
            check.value,
            note,
            check.tolerance.map_or("-".into(), |t| format!("{t:.0e}")),
            if ok { "PASS" } else { "FAIL" }
        );
    }
    Ok(all_ok)
}
