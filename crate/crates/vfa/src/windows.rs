//! Localization windows and band-pass transfer banks.
//!
//! Two window constructions feed the LGFT: spectral-domain windows `H(k)`
//! shifted to every vertex through the generalized convolution
//! `h_m(n) = Σ_k H(k) u_k(m) u_k(n)`, and vertex-domain windows `g(d_mn)`
//! assembled from the distance matrices. Band-pass transfer banks
//! `H_k(λ)` realize the third LGFT form; the families here either sum to
//! one (binomial, squared raised cosine) or have squares summing to one
//! (plain raised cosine, Meyer, wavelet scales), which decides the
//! applicable inversion scheme.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::graph::DistanceMatrices;
use crate::par;
use crate::spectral::SpectralBasis;
use crate::{Error, Result};

/// Spectral-domain window profile: samples `H(k)` on the spectral index
/// axis, `k = 1..N` stored 0-based.
#[derive(Debug, Clone)]
pub struct SpectralWindow {
    pub samples: Array1<f64>,
}

impl SpectralWindow {
    pub fn new(samples: Array1<f64>) -> Self {
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Heat-kernel window `H(k) = C exp(−λ_k τ)`; larger `τ` narrows the window
/// in the vertex domain.
pub fn heat_window(tau: f64, amplitude: f64, basis: &SpectralBasis) -> Result<SpectralWindow> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    Ok(SpectralWindow::new(basis.eigenvalues().mapv(|l| amplitude * (-l * tau).exp())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowNormalization {
    None,
    /// `Σ_m h_m(n) = 1` at every vertex, for summation inversion.
    SumOne,
    /// `Σ_m h_m²(n) = 1` at every vertex, for kernel inversion and
    /// energy-unbiased spectrograms.
    SumSquaresOne,
}

/// A full set of localized windows: column `m` holds `h_m(n)`.
#[derive(Debug, Clone)]
pub struct VertexWindowSet {
    h: Array2<f64>,
    normalization: WindowNormalization,
}

impl VertexWindowSet {
    pub fn from_matrix(h: Array2<f64>) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "window matrix must be square, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        Ok(Self { h, normalization: WindowNormalization::None })
    }

    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.h
    }

    /// `h_m(n)` with 0-based indices.
    pub fn value(&self, m: usize, n: usize) -> f64 {
        self.h[(n, m)]
    }

    pub fn window(&self, m: usize) -> Array1<f64> {
        self.h.column(m).to_owned()
    }

    pub fn normalization(&self) -> WindowNormalization {
        self.normalization
    }

    /// Window sums `σ(n) = Σ_m h_m(n)`.
    pub fn vertex_sums(&self) -> Array1<f64> {
        self.h.sum_axis(ndarray::Axis(1))
    }

    /// Squared window sums `Σ_m h_m²(n)`.
    pub fn vertex_square_sums(&self) -> Array1<f64> {
        self.h.mapv(|v| v * v).sum_axis(ndarray::Axis(1))
    }

    /// Rescales so `Σ_m h_m(n) = 1` for every `n`.
    pub fn normalized_sum_one(&self) -> Result<Self> {
        let sums = self.vertex_sums();
        let mut h = self.h.clone();
        for (n, &s) in sums.iter().enumerate() {
            if s.abs() < 1e-12 {
                return Err(Error::ConditionViolation(format!(
                    "window sum vanishes at vertex {}",
                    n + 1
                )));
            }
            h.row_mut(n).iter_mut().for_each(|v| *v /= s);
        }
        Ok(Self { h, normalization: WindowNormalization::SumOne })
    }

    /// Rescales so `Σ_m h_m²(n) = 1` for every `n`.
    pub fn normalized_sum_squares_one(&self) -> Result<Self> {
        let all: Vec<usize> = (0..self.n()).collect();
        self.normalized_sum_squares_one_on(&all)
    }

    /// Rescales so `Σ_{m ∈ subset} h_m²(n) = 1` for every `n`, for
    /// reduced-vertex-set analysis.
    pub fn normalized_sum_squares_one_on(&self, subset: &[usize]) -> Result<Self> {
        let mut h = self.h.clone();
        for n in 0..self.n() {
            let s: f64 = subset.iter().map(|&m| self.h[(n, m)] * self.h[(n, m)]).sum();
            if s < 1e-24 {
                return Err(Error::ConditionViolation(format!(
                    "squared window sum over the subset vanishes at vertex {}",
                    n + 1
                )));
            }
            let inv = 1.0 / s.sqrt();
            h.row_mut(n).iter_mut().for_each(|v| *v *= inv);
        }
        Ok(Self { h, normalization: WindowNormalization::SumSquaresOne })
    }
}

/// Shifts a spectral window to every vertex: `h = U diag(H) Uᵀ`, so that
/// `h_m(n) = Σ_k H(k) u_k(m) u_k(n)`.
pub fn spectral_window_shift(w: &SpectralWindow, basis: &SpectralBasis) -> Result<VertexWindowSet> {
    if w.len() != basis.n() {
        return Err(Error::DimensionMismatch(format!(
            "window has {} samples, basis has {}",
            w.len(),
            basis.n()
        )));
    }
    let u = basis.vectors()?;
    let mut scaled = u.clone();
    for (mut col, &hv) in scaled.columns_mut().into_iter().zip(w.samples.iter()) {
        col.iter_mut().for_each(|v| *v *= hv);
    }
    let h = scaled.dot(&u.t());
    Ok(VertexWindowSet { h, normalization: WindowNormalization::None })
}

/// Complex counterpart of [`spectral_window_shift`] for the analytic DFT
/// basis: `h_m(n) = Σ_p H(p) u_p*(m) u_p(n)`, column `m` holding the window
/// shifted to vertex `m`.
pub fn spectral_window_shift_c(
    w: &SpectralWindow,
    basis: &SpectralBasis,
) -> Result<Array2<Complex64>> {
    if w.len() != basis.n() {
        return Err(Error::DimensionMismatch(format!(
            "window has {} samples, basis has {}",
            w.len(),
            basis.n()
        )));
    }
    let u = basis.vectors_complex();
    let n = basis.n();
    let mut h = Array2::zeros((n, n));
    for m in 0..n {
        for nn in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..n {
                acc += w.samples[p] * u[(m, p)].conj() * u[(nn, p)];
            }
            h[(nn, m)] = acc;
        }
    }
    Ok(h)
}

#[derive(Debug, Clone)]
pub enum VertexWindowShape {
    /// `g(d) = 1` for `d < width`.
    Rectangular { width: usize },
    /// `g(d) = (1 + cos(π d / width)) / 2` for `d < width`.
    Hann { width: usize },
    Custom { taps: Vec<f64> },
}

impl VertexWindowShape {
    fn taps(&self) -> Result<Vec<f64>> {
        match self {
            Self::Rectangular { width } => {
                if *width < 1 {
                    return Err(Error::InvalidParameter("window width must be at least 1".into()));
                }
                Ok(vec![1.0; *width])
            }
            Self::Hann { width } => {
                if *width < 1 {
                    return Err(Error::InvalidParameter("window width must be at least 1".into()));
                }
                Ok((0..*width)
                    .map(|d| 0.5 * (1.0 + (std::f64::consts::PI * d as f64 / *width as f64).cos()))
                    .collect())
            }
            Self::Custom { taps } => {
                if taps.is_empty() {
                    return Err(Error::InvalidParameter("custom taps must be nonempty".into()));
                }
                Ok(taps.clone())
            }
        }
    }
}

/// Vertex-neighborhood windows `h_m(n) = g(d_mn)` through the window matrix
/// `P_D`; zero beyond distance `D − 1`.
pub fn vertex_window(dm: &DistanceMatrices, shape: &VertexWindowShape) -> Result<VertexWindowSet> {
    let taps = shape.taps()?;
    let p = crate::graph::window_matrix(dm, &taps)?;
    Ok(VertexWindowSet { h: p, normalization: WindowNormalization::None })
}

// ---------------------------------------------------------------------------
// Transfer banks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Taper {
    /// sin² / cos²; the bank sums to one.
    Squared,
    /// sin / cos; the squared bank sums to one.
    Plain,
    /// sin(π v(x)/2) / cos(π v(x)/2) with the Meyer argument map.
    Meyer,
}

/// Meyer argument map `v(x) = x⁴(35 − 84x + 70x² − 20x³)`;
/// `v(0) = 0`, `v(1) = 1`, flat at both ends.
pub fn meyer_v(x: f64) -> f64 {
    x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
}

impl Taper {
    fn rise(self, t: f64) -> f64 {
        let arg = std::f64::consts::FRAC_PI_2
            * match self {
                Taper::Meyer => meyer_v(t),
                _ => t,
            };
        let s = arg.sin();
        if self == Taper::Squared {
            s * s
        } else {
            s
        }
    }

    fn fall(self, t: f64) -> f64 {
        let arg = std::f64::consts::FRAC_PI_2
            * match self {
                Taper::Meyer => meyer_v(t),
                _ => t,
            };
        let c = arg.cos();
        if self == Taper::Squared {
            c * c
        } else {
            c
        }
    }
}

#[derive(Debug, Clone)]
enum BankForm {
    /// Bernstein split of `((1 − L/λmax) + L/λmax)^order`; `order + 1` bands.
    Binomial { order: usize },
    /// Shifted-cosine bands over a breakpoint grid: band `k` rises on
    /// `(t_{k−1}, t_k]` and falls on `(t_k, t_{k+1}]`.
    Cosine { breakpoints: Vec<f64>, taper: Taper, adaptive: bool },
    /// Scaled band-pass kernel `H(s_i λ)` plus the low-pass `G` as band 0.
    WaveletScales { scale_factor: f64, scales: Vec<f64> },
}

/// A bank of `K` band-pass transfer functions over `[0, λ_max]`, sampled at
/// the basis eigenvalues and evaluable anywhere on the axis.
#[derive(Debug, Clone)]
pub struct TransferBank {
    form: BankForm,
    lambda_max: f64,
    eigenvalues: Array1<f64>,
    samples: Array2<f64>,
    centers: Vec<f64>,
}

impl TransferBank {
    fn assemble(form: BankForm, lambda_max: f64, eigenvalues: Array1<f64>) -> Self {
        let k = match &form {
            BankForm::Binomial { order } => order + 1,
            BankForm::Cosine { breakpoints, .. } => breakpoints.len(),
            BankForm::WaveletScales { scales, .. } => scales.len() + 1,
        };
        let n = eigenvalues.len();
        let rows = par::map_indices(k, |band| {
            eigenvalues
                .iter()
                .map(|&l| evaluate_form(&form, lambda_max, band, l))
                .collect::<Vec<f64>>()
        });
        let mut samples = Array2::zeros((k, n));
        for (band, row) in rows.into_iter().enumerate() {
            for (p, v) in row.into_iter().enumerate() {
                samples[(band, p)] = v;
            }
        }
        let centers = match &form {
            BankForm::Binomial { order } => {
                if *order == 0 {
                    vec![lambda_max / 2.0]
                } else {
                    (0..=*order).map(|b| lambda_max * b as f64 / *order as f64).collect()
                }
            }
            BankForm::Cosine { breakpoints, .. } => breakpoints.clone(),
            BankForm::WaveletScales { scale_factor, scales } => {
                let mut c = vec![0.0];
                c.extend(scales.iter().map(|s| scale_factor / s));
                c
            }
        };
        Self { form, lambda_max, eigenvalues, samples, centers }
    }

    pub fn band_count(&self) -> usize {
        self.samples.nrows()
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Samples `H_k(λ_p)`, one row per band.
    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    /// Nominal band centers on the eigenvalue axis, used by reassignment.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Analytic band value `H_k(λ)`.
    pub fn evaluate(&self, band: usize, lambda: f64) -> f64 {
        evaluate_form(&self.form, self.lambda_max, band, lambda)
    }

    /// `Σ_k H_k(λ)`.
    pub fn partition_sum(&self, lambda: f64) -> f64 {
        (0..self.band_count()).map(|b| self.evaluate(b, lambda)).sum()
    }

    /// Frame function `g(λ) = Σ_k H_k²(λ)`.
    pub fn frame_function(&self, lambda: f64) -> f64 {
        (0..self.band_count()).map(|b| self.evaluate(b, lambda).powi(2)).sum()
    }

    /// Largest deviation of `Σ_k H_k(λ_p)` from one over the sampled axis.
    pub fn partition_defect(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&l| (self.partition_sum(l) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `Σ_k H_k²(λ_p)` from one over the sampled axis.
    pub fn tightness_defect(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&l| (self.frame_function(l) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Serializable description sufficient to rebuild the bank.
    pub fn descriptor(&self) -> BankDescriptor {
        let (kind, squared, scale_factor, breakpoints, scales) = match &self.form {
            BankForm::Binomial { .. } => ("binomial", None, None, None, None),
            BankForm::Cosine { breakpoints, taper, adaptive } => {
                let kind = match (taper, adaptive) {
                    (Taper::Squared, _) => "raised-cosine",
                    (Taper::Plain, _) => "raised-cosine-plain",
                    (Taper::Meyer, false) => "meyer",
                    (Taper::Meyer, true) => "adaptive",
                };
                (kind, Some(*taper == Taper::Squared), None, Some(breakpoints.clone()), None)
            }
            BankForm::WaveletScales { scale_factor, scales } => {
                ("wavelet-scales", None, Some(*scale_factor), None, Some(scales.clone()))
            }
        };
        BankDescriptor {
            kind: kind.into(),
            k: self.band_count(),
            lambda_max: self.lambda_max,
            squared,
            scale_factor,
            breakpoints,
            scales,
        }
    }

    /// Rebuilds a bank from its descriptor, sampling at the given basis.
    pub fn from_descriptor(desc: &BankDescriptor, basis: &SpectralBasis) -> Result<Self> {
        if basis.lambda_max() > desc.lambda_max * (1.0 + 1e-9) {
            return Err(Error::InvalidParameter(format!(
                "bank was designed for lambda_max = {} but the basis reaches {}",
                desc.lambda_max,
                basis.lambda_max()
            )));
        }
        let eigs = basis.eigenvalues().clone();
        match desc.kind.as_str() {
            "binomial" => {
                if desc.k < 1 {
                    return Err(Error::InvalidParameter("binomial bank needs K >= 1".into()));
                }
                Ok(Self::assemble(BankForm::Binomial { order: desc.k - 1 }, desc.lambda_max, eigs))
            }
            "raised-cosine" | "raised-cosine-plain" => {
                let bps = desc
                    .breakpoints
                    .clone()
                    .ok_or_else(|| Error::InvalidParameter("missing breakpoints".into()))?;
                validate_breakpoints(&bps, desc.lambda_max)?;
                let taper =
                    if desc.kind == "raised-cosine" { Taper::Squared } else { Taper::Plain };
                Ok(Self::assemble(
                    BankForm::Cosine { breakpoints: bps, taper, adaptive: false },
                    desc.lambda_max,
                    eigs,
                ))
            }
            "meyer" | "adaptive" => {
                let bps = desc
                    .breakpoints
                    .clone()
                    .ok_or_else(|| Error::InvalidParameter("missing breakpoints".into()))?;
                validate_breakpoints(&bps, desc.lambda_max)?;
                Ok(Self::assemble(
                    BankForm::Cosine {
                        breakpoints: bps,
                        taper: Taper::Meyer,
                        adaptive: desc.kind == "adaptive",
                    },
                    desc.lambda_max,
                    eigs,
                ))
            }
            "wavelet-scales" => {
                let m = desc
                    .scale_factor
                    .ok_or_else(|| Error::InvalidParameter("missing scale factor".into()))?;
                let scales = desc
                    .scales
                    .clone()
                    .ok_or_else(|| Error::InvalidParameter("missing scales".into()))?;
                if !(m > 1.0) || scales.is_empty() {
                    return Err(Error::InvalidParameter("invalid wavelet descriptor".into()));
                }
                Ok(Self::assemble(
                    BankForm::WaveletScales { scale_factor: m, scales },
                    desc.lambda_max,
                    eigs,
                ))
            }
            other => Err(Error::InvalidParameter(format!("unknown bank kind '{other}'"))),
        }
    }

    /// Scales of a wavelet bank, when applicable.
    pub fn scales(&self) -> Option<&[f64]> {
        match &self.form {
            BankForm::WaveletScales { scales, .. } => Some(scales),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BankDescriptor {
    pub kind: String,
    pub k: usize,
    pub lambda_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squared: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
}

fn evaluate_form(form: &BankForm, lambda_max: f64, band: usize, lambda: f64) -> f64 {
    match form {
        BankForm::Binomial { order } => {
            let n = *order;
            let t = lambda / lambda_max;
            let mut coeff = 1.0;
            for i in 0..band {
                coeff *= (n - i) as f64 / (i + 1) as f64;
            }
            coeff * (1.0 - t).powi((n - band) as i32) * t.powi(band as i32)
        }
        BankForm::Cosine { breakpoints, taper, .. } => {
            let k = breakpoints.len();
            // a query at the top of the covered range may sit one ulp above
            // the last breakpoint (e.g. grid points built as λmax·i/n);
            // stretch only the branches that end the coverage
            let top = |edge: f64, is_last: bool| {
                if is_last {
                    edge * (1.0 + 1e-12)
                } else {
                    edge
                }
            };
            if band >= 1
                && lambda > breakpoints[band - 1]
                && lambda <= top(breakpoints[band], band + 1 == k)
            {
                let t =
                    (lambda - breakpoints[band - 1]) / (breakpoints[band] - breakpoints[band - 1]);
                return taper.rise(t.min(1.0));
            }
            if band == 0 {
                if lambda >= breakpoints[0] && lambda <= top(breakpoints[1], k == 2) {
                    let t = (lambda - breakpoints[0]) / (breakpoints[1] - breakpoints[0]);
                    return taper.fall(t.min(1.0));
                }
            } else if band + 1 < k
                && lambda > breakpoints[band]
                && lambda <= top(breakpoints[band + 1], band + 2 == k)
            {
                let t = (lambda - breakpoints[band]) / (breakpoints[band + 1] - breakpoints[band]);
                return taper.fall(t.min(1.0));
            }
            0.0
        }
        BankForm::WaveletScales { scale_factor, scales } => {
            let m = *scale_factor;
            let q = 1.0 / (m - 1.0);
            // branch boundaries sit at products like s_i · λmax = M that can
            // round one ulp past the cutoff; the guard keeps the endpoint
            // inside its branch (the taper is flat there, so complementarity
            // survives to well below 1e-10)
            let guard = 1.0 + 1e-12;
            if band == 0 {
                // low-pass scale function G: flat at one, then the cosine
                // taper matching the last scale's rising branch
                let s_last = *scales.last().unwrap();
                if lambda <= 1.0 / s_last {
                    1.0
                } else if lambda <= m / s_last * guard {
                    (std::f64::consts::FRAC_PI_2 * meyer_v(q * (s_last * lambda - 1.0))).cos()
                } else {
                    0.0
                }
            } else {
                let s = scales[band - 1];
                let t = s * lambda;
                if t > 1.0 && t <= m * guard {
                    (std::f64::consts::FRAC_PI_2 * meyer_v(q * (t - 1.0))).sin()
                } else if t > m * guard && t <= m * m * guard {
                    (std::f64::consts::FRAC_PI_2 * meyer_v(q * (t / m - 1.0))).cos()
                } else {
                    0.0
                }
            }
        }
    }
}

fn uniform_breakpoints(k: usize, lambda_max: f64) -> Vec<f64> {
    let delta = lambda_max / (k - 1) as f64;
    let mut bps: Vec<f64> = (0..k).map(|i| i as f64 * delta).collect();
    // (k−1)·(λmax/(k−1)) can land one ulp below λmax, which would push the
    // largest eigenvalue outside every band
    bps[k - 1] = lambda_max;
    bps
}

fn validate_breakpoints(bps: &[f64], lambda_max: f64) -> Result<()> {
    if bps.len() < 2 {
        return Err(Error::InvalidParameter("need at least two breakpoints".into()));
    }
    for w in bps.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(format!(
                "breakpoints must be strictly ascending; got {} after {}",
                w[1], w[0]
            )));
        }
    }
    if bps[0] < 0.0 || bps[bps.len() - 1] > lambda_max * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("breakpoints must lie in [0, {lambda_max}]")));
    }
    Ok(())
}

/// Bernstein/binomial partition-of-unity bank with `K` bands,
/// `H_k(λ) = C(K−1, k) (1 − λ/λmax)^{K−1−k} (λ/λmax)^k`.
pub fn binomial_bank(k: usize, basis: &SpectralBasis) -> Result<TransferBank> {
    if k < 1 {
        return Err(Error::InvalidParameter("binomial bank needs K >= 1".into()));
    }
    Ok(TransferBank::assemble(
        BankForm::Binomial { order: k - 1 },
        basis.lambda_max(),
        basis.eigenvalues().clone(),
    ))
}

/// Shifted raised-cosine bank on the uniform grid `Δ = λmax / (K−1)`.
/// With `squared = true` the bands are sin²/cos² pieces and `Σ_k H_k = 1`;
/// without squares `Σ_k H_k² = 1`.
pub fn raised_cosine_bank(k: usize, basis: &SpectralBasis, squared: bool) -> Result<TransferBank> {
    if k < 2 {
        return Err(Error::InvalidParameter("raised-cosine bank needs K >= 2".into()));
    }
    let taper = if squared { Taper::Squared } else { Taper::Plain };
    Ok(TransferBank::assemble(
        BankForm::Cosine {
            breakpoints: uniform_breakpoints(k, basis.lambda_max()),
            taper,
            adaptive: false,
        },
        basis.lambda_max(),
        basis.eigenvalues().clone(),
    ))
}

/// Meyer-tapered bank on the uniform grid; tight (`Σ H_k² = 1`).
pub fn meyer_bank(k: usize, basis: &SpectralBasis) -> Result<TransferBank> {
    if k < 2 {
        return Err(Error::InvalidParameter("meyer bank needs K >= 2".into()));
    }
    Ok(TransferBank::assemble(
        BankForm::Cosine {
            breakpoints: uniform_breakpoints(k, basis.lambda_max()),
            taper: Taper::Meyer,
            adaptive: false,
        },
        basis.lambda_max(),
        basis.eigenvalues().clone(),
    ))
}

/// Meyer-tapered bank over a caller-supplied breakpoint grid; tight on the
/// covered range. Uniform breakpoints reproduce [`meyer_bank`].
pub fn adaptive_bank(breakpoints: &[f64], basis: &SpectralBasis) -> Result<TransferBank> {
    validate_breakpoints(breakpoints, basis.lambda_max())?;
    Ok(TransferBank::assemble(
        BankForm::Cosine { breakpoints: breakpoints.to_vec(), taper: Taper::Meyer, adaptive: true },
        basis.lambda_max(),
        basis.eigenvalues().clone(),
    ))
}

/// Wavelet-scale bank: scales `s_i = M^i / λmax`, band-pass kernels
/// `H(s_i λ)` for `i = 1..K−1` and the low-pass `G` as band 0. Tight on
/// `[0, λmax]`.
pub fn meyer_wavelet_bank(
    scale_factor: f64,
    k: usize,
    basis: &SpectralBasis,
) -> Result<TransferBank> {
    if !(scale_factor > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "scale factor must exceed 1, got {scale_factor}"
        )));
    }
    if k < 2 {
        return Err(Error::InvalidParameter("wavelet bank needs K >= 2".into()));
    }
    let lmax = basis.lambda_max();
    let scales: Vec<f64> = (1..k).map(|i| scale_factor.powi(i as i32) / lmax).collect();
    Ok(TransferBank::assemble(
        BankForm::WaveletScales { scale_factor, scales },
        lmax,
        basis.eigenvalues().clone(),
    ))
}

/// Builds a `k`-point breakpoint grid concentrated around the target
/// eigenvalues: breakpoints are equal-mass quantiles of a density with a
/// narrow bump at every target, so band intervals shrink near the targets.
pub fn concentrated_breakpoints(targets: &[f64], k: usize, lambda_max: f64) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::InvalidParameter("need at least two breakpoints".into()));
    }
    for &t in targets {
        if !(0.0..=lambda_max).contains(&t) {
            return Err(Error::InvalidParameter(format!("target {t} outside [0, {lambda_max}]")));
        }
    }
    let grid = 4000usize;
    let sigma = lambda_max / 50.0;
    let density = |l: f64| -> f64 {
        1.0 + targets.iter().map(|&t| 6.0 / (1.0 + ((l - t) / sigma).powi(2))).sum::<f64>()
    };
    let step = lambda_max / grid as f64;
    let mut cum = Vec::with_capacity(grid + 1);
    cum.push(0.0);
    let mut prev = density(0.0);
    for i in 1..=grid {
        let cur = density(i as f64 * step);
        cum.push(cum[i - 1] + 0.5 * (prev + cur) * step);
        prev = cur;
    }
    let total = *cum.last().unwrap();
    let mut bps = Vec::with_capacity(k);
    bps.push(0.0);
    let mut idx = 0usize;
    for j in 1..k - 1 {
        let want = total * j as f64 / (k - 1) as f64;
        while idx + 1 < cum.len() && cum[idx + 1] < want {
            idx += 1;
        }
        let frac = (want - cum[idx]) / (cum[idx + 1] - cum[idx]);
        bps.push((idx as f64 + frac) * step);
    }
    bps.push(lambda_max);
    Ok(bps)
}
