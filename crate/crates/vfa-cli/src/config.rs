//! Experiment configuration: a flat TOML file describing the graph, the
//! signal, an optional noise/filtering stage and the transform to run.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ndarray::Array1;
use serde::{Deserialize, Serialize};

use vfa::graph::{Graph, GraphSpec, SwissRollParams};
use vfa::signal::Segment;
use vfa::spectral::{decompose, BasisKind, SpectralBasis};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSection,
    pub signal: SignalSection,
    #[serde(default)]
    pub noise: Option<NoiseSection>,
    pub transform: TransformSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSection {
    pub kind: String,
    pub n: usize,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub kappa: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Spectral basis used throughout the run.
    #[serde(default = "default_basis")]
    pub basis: BasisKind,
}

fn default_basis() -> BasisKind {
    BasisKind::Laplacian
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalSection {
    #[serde(default)]
    pub components: Vec<ComponentSpec>,
    /// Alternative to `components`: load the signal from a CSV file
    /// (path relative to the config file).
    #[serde(default)]
    pub file: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub from: usize,
    pub to: usize,
    pub eigen_index: usize,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub peak_normalize: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSection {
    pub snr_db: f64,
    pub seed: u64,
    /// Explicit threshold; when absent the threshold is grid-tuned against
    /// the clean signal.
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default = "default_grid")]
    pub threshold_grid: usize,
}

fn default_grid() -> usize {
    120
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum TransformSection {
    /// Window-form LGFT with a heat-kernel spectral window.
    WindowHeat {
        tau: f64,
        #[serde(default)]
        reassign: bool,
    },
    /// Window-form LGFT with a vertex-neighborhood window.
    WindowVertex {
        width: usize,
        #[serde(default = "default_shape")]
        shape: String,
        #[serde(default)]
        reassign: bool,
    },
    /// Spectral-shift LGFT with heat-profile offsets.
    SpectralShift { tau: f64 },
    /// Band-form LGFT.
    Bank {
        bank: String,
        k: usize,
        #[serde(default)]
        squared: bool,
        #[serde(default)]
        scale_factor: Option<f64>,
        #[serde(default)]
        targets: Option<Vec<f64>>,
        #[serde(default = "default_mode")]
        mode: String,
        #[serde(default)]
        order: Option<usize>,
        #[serde(default)]
        reassign: bool,
    },
    /// Wavelet transform (scaling column + K − 1 scales).
    Wavelet {
        k: usize,
        scale_factor: f64,
        #[serde(default = "default_mode")]
        mode: String,
        #[serde(default)]
        order: Option<usize>,
    },
    /// Rihaczek energy distribution.
    Rihaczek,
    /// Reduced-interference distribution with the sinc kernel.
    RidSinc,
    /// Ideally concentrated distribution from the local smoothness.
    Ideal,
}

fn default_shape() -> String {
    "hann".into()
}

fn default_mode() -> String {
    "spectral".into()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.n;
        match self.graph.kind.as_str() {
            "path" | "cycle" | "directed-cycle" => {}
            "swiss-roll" => {
                if self.graph.seed.is_none() {
                    bail!("graph.seed: required for kind = \"swiss-roll\"");
                }
            }
            other => bail!("graph.kind: unknown kind '{other}'"),
        }
        if self.signal.file.is_some() && !self.signal.components.is_empty() {
            bail!("signal: give either components or file, not both");
        }
        if self.signal.file.is_none() && self.signal.components.is_empty() {
            bail!("signal: needs components or file");
        }
        let mut expected = 1usize;
        for (i, c) in self.signal.components.iter().enumerate() {
            if c.from != expected || c.to < c.from {
                bail!(
                    "signal.components[{i}]: range {}..={} must start at {expected} \
                     (components partition 1..={n} in order)",
                    c.from,
                    c.to
                );
            }
            if c.eigen_index < 1 || c.eigen_index > n {
                bail!("signal.components[{i}].eigen_index: {} outside 1..={n}", c.eigen_index);
            }
            expected = c.to + 1;
        }
        if !self.signal.components.is_empty() && expected != n + 1 {
            bail!(
                "signal.components: cover 1..={} but the graph has {n} vertices",
                expected - 1
            );
        }
        if let Some(noise) = &self.noise {
            if noise.threshold_grid < 2 {
                bail!("noise.threshold_grid: need at least 2 points");
            }
            match &self.transform {
                TransformSection::Bank { .. } => {}
                _ => bail!("noise: filtering requires a bank transform"),
            }
        }
        match &self.transform {
            TransformSection::WindowHeat { tau, .. } | TransformSection::SpectralShift { tau } => {
                if *tau <= 0.0 {
                    bail!("transform.tau: must be positive");
                }
            }
            TransformSection::WindowVertex { width, shape, .. } => {
                if *width < 1 {
                    bail!("transform.width: must be at least 1");
                }
                if shape != "hann" && shape != "rectangular" {
                    bail!("transform.shape: 'hann' or 'rectangular', got '{shape}'");
                }
            }
            TransformSection::Bank { bank, k, mode, .. } => {
                if !["binomial", "raised-cosine", "meyer", "adaptive", "wavelet"]
                    .contains(&bank.as_str())
                {
                    bail!("transform.bank: unknown bank '{bank}'");
                }
                if *k < 1 {
                    bail!("transform.k: must be at least 1");
                }
                if mode != "spectral" && mode != "polynomial" {
                    bail!("transform.mode: 'spectral' or 'polynomial', got '{mode}'");
                }
            }
            TransformSection::Wavelet { k, scale_factor, mode, .. } => {
                if *k < 2 {
                    bail!("transform.k: wavelet transform needs k >= 2");
                }
                if *scale_factor <= 1.0 {
                    bail!("transform.scale_factor: must exceed 1");
                }
                if mode != "spectral" && mode != "polynomial" {
                    bail!("transform.mode: 'spectral' or 'polynomial', got '{mode}'");
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn graph_spec(&self) -> Result<GraphSpec> {
        Ok(match self.graph.kind.as_str() {
            "path" => GraphSpec::Path { n: self.graph.n },
            "cycle" => GraphSpec::CycleUndirected { n: self.graph.n },
            "directed-cycle" => GraphSpec::CycleDirected { n: self.graph.n },
            "swiss-roll" => GraphSpec::SwissRoll(SwissRollParams::new(
                self.graph.n,
                self.graph.alpha.unwrap_or(100.0),
                self.graph.kappa.unwrap_or(7),
                self.graph.seed.unwrap(),
            )),
            other => bail!("graph.kind: unknown kind '{other}'"),
        })
    }

    pub fn build_graph(&self) -> Result<Graph> {
        Ok(vfa::graph::generate(&self.graph_spec()?)?)
    }

    pub fn build_basis(&self, graph: &Graph) -> Result<SpectralBasis> {
        Ok(decompose(graph, self.graph.basis)?)
    }

    pub fn build_signal(
        &self,
        basis: &SpectralBasis,
        config_dir: &Path,
    ) -> Result<Array1<f64>> {
        if let Some(file) = &self.signal.file {
            let path = config_dir.join(file);
            return Ok(vfa::io::read_signal(&path)?);
        }
        let segments: Vec<Segment> = self
            .signal
            .components
            .iter()
            .map(|c| Segment {
                from: c.from,
                to: c.to,
                eigen_index: c.eigen_index,
                amplitude: c.amplitude,
                peak_normalize: c.peak_normalize,
            })
            .collect();
        Ok(vfa::signal::piecewise_eigenvector(basis, &segments)?)
    }
}
