//! The localized graph Fourier transform (LGFT) in its three forms —
//! vertex-window, spectral-shift and band-pass — plus spectrograms,
//! reassignment, the concentration measure and window-width optimization.
//!
//! Window form: `S(m, k) = Σ_n x(n) h_m(n) u_k(n)`, a projection of the
//! signal onto the vertex-frequency kernel `𝓗_{m,k}(n) = h_m(n) u_k(n)`.
//! Spectral-shift form: `S(m, k) = Σ_p X(p) H(k−p) u_p(m)`. Band form:
//! `s_k = H_k(L) x`, where the number of bands `K` is decoupled from `N`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::par;
use crate::polyops;
use crate::spectral::{gft, SpectralBasis};
use crate::windows::{SpectralWindow, TransferBank, VertexWindowSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencyAxis {
    /// Columns follow the spectral index `k = 1..N`.
    SpectralIndex,
    /// Columns follow the band index `k = 0..K−1`.
    BandIndex,
    /// Columns reassigned to band centers on the eigenvalue axis.
    EigenvalueAssigned,
}

/// Vertex-frequency representation: one row per analyzed vertex, one column
/// per spectral index or band.
#[derive(Debug, Clone)]
pub struct VertexFrequencyMap {
    pub matrix: Array2<f64>,
    pub axis: FrequencyAxis,
    /// Band centers on the eigenvalue axis (band-form maps).
    pub band_centers: Option<Vec<f64>>,
    /// 0-based vertex ids when the map was computed on a reduced vertex set.
    pub vertex_subset: Option<Vec<usize>>,
}

impl VertexFrequencyMap {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn bands(&self) -> usize {
        self.matrix.ncols()
    }
}

fn windowed_columns(x: &Array1<f64>, windows: &VertexWindowSet, ms: &[usize]) -> Array2<f64> {
    let n = x.len();
    let mut w = Array2::zeros((n, ms.len()));
    for (col, &m) in ms.iter().enumerate() {
        for row in 0..n {
            w[(row, col)] = x[row] * windows.value(m, row);
        }
    }
    w
}

/// Window-form LGFT over all vertices.
pub fn lgft_window(
    x: &Array1<f64>,
    windows: &VertexWindowSet,
    basis: &SpectralBasis,
) -> Result<VertexFrequencyMap> {
    let all: Vec<usize> = (0..basis.n()).collect();
    let mut map = lgft_window_subset(x, windows, basis, &all)?;
    map.vertex_subset = None;
    Ok(map)
}

/// Window-form LGFT on a reduced vertex set `m ∈ M ⊂ V`; rows follow
/// `subset` order.
pub fn lgft_window_subset(
    x: &Array1<f64>,
    windows: &VertexWindowSet,
    basis: &SpectralBasis,
    subset: &[usize],
) -> Result<VertexFrequencyMap> {
    let n = basis.n();
    if x.len() != n || windows.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "signal {} / windows {} / basis {}",
            x.len(),
            windows.n(),
            n
        )));
    }
    if subset.is_empty() || subset.iter().any(|&m| m >= n) {
        return Err(Error::InvalidParameter("vertex subset empty or out of range".into()));
    }
    let u = basis.vectors()?;
    let w = windowed_columns(x, windows, subset);
    let s = u.t().dot(&w); // (k, m)
    Ok(VertexFrequencyMap {
        matrix: s.t().to_owned(),
        axis: FrequencyAxis::SpectralIndex,
        band_centers: None,
        vertex_subset: Some(subset.to_vec()),
    })
}

/// Window-form LGFT for complex bases (directed cycle): uses the conjugate
/// expansion `S(m, k) = Σ_n x(n) h_m(n) u_k*(n)`.
pub fn lgft_window_c(
    x: &Array1<Complex64>,
    windows: &Array2<Complex64>,
    basis: &SpectralBasis,
) -> Result<Array2<Complex64>> {
    let n = basis.n();
    if x.len() != n || windows.nrows() != n || windows.ncols() != n {
        return Err(Error::DimensionMismatch("complex LGFT inputs disagree".into()));
    }
    let u = basis.vectors_complex();
    let mut s = Array2::zeros((n, n));
    for m in 0..n {
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for nn in 0..n {
                acc += x[nn] * windows[(nn, m)] * u[(nn, k)].conj();
            }
            s[(m, k)] = acc;
        }
    }
    Ok(s)
}

/// Spectral-shift LGFT `S(m, k) = Σ_p X(p) H(k−p) u_p(m)`, with the window
/// profile indexed by offset: `H(d) = samples[|d|]`, zero outside the
/// sampled range (no wraparound — graph spectra are not periodic).
pub fn lgft_spectral_shift(
    spectrum: &Array1<f64>,
    window: &SpectralWindow,
    basis: &SpectralBasis,
) -> Result<VertexFrequencyMap> {
    let n = basis.n();
    if spectrum.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "spectrum length {} vs basis {}",
            spectrum.len(),
            n
        )));
    }
    let u = basis.vectors()?;
    let offset = |d: isize| -> f64 {
        let idx = d.unsigned_abs();
        if idx < window.samples.len() {
            window.samples[idx]
        } else {
            0.0
        }
    };
    let columns = par::map_indices(n, |k| {
        let mut weighted = Array1::zeros(n);
        for p in 0..n {
            weighted[p] = spectrum[p] * offset(k as isize - p as isize);
        }
        u.dot(&weighted)
    });
    let mut s = Array2::zeros((n, n));
    for (k, col) in columns.into_iter().enumerate() {
        for m in 0..n {
            s[(m, k)] = col[m];
        }
    }
    Ok(VertexFrequencyMap {
        matrix: s,
        axis: FrequencyAxis::SpectralIndex,
        band_centers: None,
        vertex_subset: None,
    })
}

/// Band-form LGFT through the spectral basis: column `k` is
/// `s_k = U H_k(Λ) Uᵀ x`.
pub fn lgft_bank(
    x: &Array1<f64>,
    bank: &TransferBank,
    basis: &SpectralBasis,
) -> Result<VertexFrequencyMap> {
    let n = basis.n();
    if x.len() != n || bank.eigenvalues().len() != n {
        return Err(Error::DimensionMismatch("bank/basis/signal sizes disagree".into()));
    }
    let u = basis.vectors()?;
    let spectrum = gft(x, basis)?;
    let k = bank.band_count();
    let columns = par::map_indices(k, |band| {
        let mut weighted = spectrum.clone();
        for (p, w) in weighted.iter_mut().enumerate() {
            *w *= bank.samples()[(band, p)];
        }
        u.dot(&weighted)
    });
    let mut s = Array2::zeros((n, k));
    for (band, col) in columns.into_iter().enumerate() {
        for m in 0..n {
            s[(m, band)] = col[m];
        }
    }
    Ok(VertexFrequencyMap {
        matrix: s,
        axis: FrequencyAxis::BandIndex,
        band_centers: Some(bank.centers().to_vec()),
        vertex_subset: None,
    })
}

/// Band-form LGFT realized in the vertex domain: every band is fitted with
/// an `order`-coefficient Chebyshev expansion and applied through the
/// Laplacian recurrence. No eigendecomposition is used.
pub fn lgft_bank_polynomial(
    x: &Array1<f64>,
    bank: &TransferBank,
    g: &Graph,
    order: usize,
) -> Result<VertexFrequencyMap> {
    let n = g.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch("signal/graph sizes disagree".into()));
    }
    let lap = g.sparse_laplacian()?;
    let k = bank.band_count();
    let columns: Vec<Result<Array1<f64>>> = par::map_indices(k, |band| {
        let fit = polyops::cheb_fit(|l| bank.evaluate(band, l), order, bank.lambda_max())?;
        fit.apply(&lap, x)
    });
    let mut s = Array2::zeros((n, k));
    for (band, col) in columns.into_iter().enumerate() {
        let col = col?;
        for m in 0..n {
            s[(m, band)] = col[m];
        }
    }
    Ok(VertexFrequencyMap {
        matrix: s,
        axis: FrequencyAxis::BandIndex,
        band_centers: Some(bank.centers().to_vec()),
        vertex_subset: None,
    })
}

/// Window-form vertex-frequency kernel `𝓗_{m,k}(n) = h_m(n) u_k(n)`.
pub fn kernel_window(
    windows: &VertexWindowSet,
    basis: &SpectralBasis,
    m: usize,
    k: usize,
) -> Result<Array1<f64>> {
    let u = basis.vectors()?;
    let n = basis.n();
    if m >= n || k >= n || windows.n() != n {
        return Err(Error::DimensionMismatch("kernel indices out of range".into()));
    }
    Ok(Array1::from_iter((0..n).map(|nn| windows.value(m, nn) * u[(nn, k)])))
}

/// Band-form kernel `𝓗_{m,k}(n) = Σ_p H_k(λ_p) u_p(m) u_p(n)`.
pub fn kernel_band(
    bank: &TransferBank,
    basis: &SpectralBasis,
    m: usize,
    band: usize,
) -> Result<Array1<f64>> {
    let u = basis.vectors()?;
    let n = basis.n();
    if m >= n || band >= bank.band_count() {
        return Err(Error::DimensionMismatch("kernel indices out of range".into()));
    }
    let mut weighted = Array1::zeros(n);
    for p in 0..n {
        weighted[p] = bank.samples()[(band, p)] * u[(m, p)];
    }
    Ok(u.dot(&weighted))
}

/// Reassigns every row to its maximum-magnitude band: `k*(m) = argmax_k
/// |S(m, k)|` (ties to the lowest band), keeping only that value. With band
/// centers available the axis is relabeled to the eigenvalue assignment.
pub fn reassign(map: &VertexFrequencyMap) -> Result<VertexFrequencyMap> {
    if map.axis != FrequencyAxis::BandIndex {
        return Err(Error::InvalidParameter(
            "reassignment expects a band-index map".into(),
        ));
    }
    let (rows, bands) = (map.rows(), map.bands());
    let mut out = Array2::zeros((rows, bands));
    for m in 0..rows {
        let mut best = 0usize;
        for k in 1..bands {
            if map.matrix[(m, k)].abs() > map.matrix[(m, best)].abs() {
                best = k;
            }
        }
        out[(m, best)] = map.matrix[(m, best)];
    }
    Ok(VertexFrequencyMap {
        matrix: out,
        axis: if map.band_centers.is_some() {
            FrequencyAxis::EigenvalueAssigned
        } else {
            FrequencyAxis::BandIndex
        },
        band_centers: map.band_centers.clone(),
        vertex_subset: map.vertex_subset.clone(),
    })
}

/// Entrywise squared magnitude `|S(m,k)|²`.
pub fn spectrogram(map: &VertexFrequencyMap) -> Array2<f64> {
    map.matrix.mapv(|v| v * v)
}

/// Row sums (vertex marginal) and column sums (frequency marginal).
pub fn marginals(power: &Array2<f64>) -> (Array1<f64>, Array1<f64>) {
    (power.sum_axis(ndarray::Axis(1)), power.sum_axis(ndarray::Axis(0)))
}

/// Concentration measure `𝓜 = ‖S‖₁ / ‖S‖_F ∈ [1, √(N·K)]`; smaller means
/// sharper localization.
pub fn concentration(map: &VertexFrequencyMap) -> Result<f64> {
    let l1: f64 = map.matrix.iter().map(|v| v.abs()).sum();
    let fro = map.matrix.iter().map(|v| v * v).sum::<f64>().sqrt();
    if fro == 0.0 {
        return Err(Error::InvalidParameter("concentration of an all-zero map".into()));
    }
    Ok(l1 / fro)
}

/// Result of the window-width search.
#[derive(Debug, Clone)]
pub struct TauOptimization {
    /// Last iterate (equals `best_tau` when the search did not converge).
    pub tau: f64,
    pub best_tau: f64,
    pub best_measure: f64,
    /// `(τ, 𝓜(τ))` in evaluation order.
    pub trace: Vec<(f64, f64)>,
    pub converged: bool,
}

const TAU_FLOOR: f64 = 1e-6;
const TAU_CEIL: f64 = 1e6;

/// Drives the finite-difference iteration
/// `τ_j = τ_{j−1} − α (𝓜(τ_{j−1}) − 𝓜(τ_{j−2}))` on an arbitrary
/// objective. Stops when the step drops below `tol`.
pub fn optimize_tau_with(
    mut measure: impl FnMut(f64) -> Result<f64>,
    tau0: f64,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TauOptimization> {
    if !(tau0 > 0.0) || !(alpha > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParameter("tau0, alpha and tol must be positive".into()));
    }
    let clamp = |t: f64| t.clamp(TAU_FLOOR, TAU_CEIL);
    let mut trace = Vec::new();
    let mut eval = |t: f64, trace: &mut Vec<(f64, f64)>| -> Result<f64> {
        let m = measure(t)?;
        trace.push((t, m));
        Ok(m)
    };
    let mut t_prev = clamp(tau0);
    let mut t_cur = clamp(tau0 * 1.02);
    let mut m_prev = eval(t_prev, &mut trace)?;
    let mut m_cur = eval(t_cur, &mut trace)?;
    let (mut best_tau, mut best_measure) =
        if m_prev <= m_cur { (t_prev, m_prev) } else { (t_cur, m_cur) };
    let mut converged = false;
    for _ in 0..max_iter {
        let t_next = clamp(t_cur - alpha * (m_cur - m_prev));
        let m_next = eval(t_next, &mut trace)?;
        if m_next < best_measure {
            best_measure = m_next;
            best_tau = t_next;
        }
        let step = (t_next - t_cur).abs();
        t_prev = t_cur;
        t_cur = t_next;
        m_prev = m_cur;
        m_cur = m_next;
        let _ = t_prev;
        if step < tol {
            converged = true;
            break;
        }
    }
    Ok(TauOptimization {
        tau: if converged { t_cur } else { best_tau },
        best_tau,
        best_measure,
        trace,
        converged,
    })
}

/// Concentration of the heat-window LGFT at a given width.
pub fn concentration_for_tau(x: &Array1<f64>, basis: &SpectralBasis, tau: f64) -> Result<f64> {
    let w = crate::windows::heat_window(tau, 1.0, basis)?;
    let set = crate::windows::spectral_window_shift(&w, basis)?;
    concentration(&lgft_window(x, &set, basis)?)
}

/// Minimizes the concentration measure of the heat-window LGFT over the
/// window width `τ` with the finite-difference descent.
pub fn optimize_tau(
    x: &Array1<f64>,
    basis: &SpectralBasis,
    tau0: f64,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TauOptimization> {
    optimize_tau_with(|t| concentration_for_tau(x, basis, t), tau0, alpha, tol, max_iter)
}
