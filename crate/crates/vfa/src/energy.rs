//! Windowless vertex-frequency energy distributions.
//!
//! The base distribution is `E(n, k) = x(n) X(k) u_k(n)` — the graph form
//! of the Rihaczek distribution. It satisfies both marginals exactly
//! (`Σ_k E = x²(n)`, `Σ_n E = |X(k)|²`) and the local-smoothness property:
//! the spectral center of mass of row `n` is `λ(n) = (Lx)(n)/x(n)`.
//! Kernel-smoothed reduced-interference distributions
//! `G(n,k) = Σ_p Σ_q X(p) X(q) u_p(n) u_q(n) φ(p,k,q)` trade sharpness for
//! suppressed cross terms while keeping the marginals when the kernel
//! satisfies `Σ_k φ(p,k,q) = 1` and `φ(p,k,p) = δ(p−k)`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::graph::Graph;
use crate::par;
use crate::spectral::{gft, gft_c, local_smoothness, LocalSmoothness, SpectralBasis};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Rihaczek,
    ReducedInterference,
    Ideal,
}

/// A vertex-frequency energy distribution; rows follow vertices, columns the
/// spectral index.
#[derive(Debug, Clone)]
pub struct EnergyDistribution {
    pub matrix: Array2<f64>,
    pub kind: DistributionKind,
}

impl EnergyDistribution {
    pub fn total_energy(&self) -> f64 {
        self.matrix.iter().sum()
    }
}

/// Rihaczek-type distribution `E(n, k) = x(n) X(k) u_k(n)`; real bases keep
/// everything in real arithmetic.
pub fn energy_distribution(x: &Array1<f64>, basis: &SpectralBasis) -> Result<EnergyDistribution> {
    let n = basis.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch("signal/basis sizes disagree".into()));
    }
    let u = basis.vectors()?;
    let spectrum = gft(x, basis)?;
    let mut e = Array2::zeros((n, n));
    for nn in 0..n {
        for k in 0..n {
            e[(nn, k)] = x[nn] * spectrum[k] * u[(nn, k)];
        }
    }
    Ok(EnergyDistribution { matrix: e, kind: DistributionKind::Rihaczek })
}

/// Complex Rihaczek distribution `E(n, k) = x(n) X*(k) u_k*(n)` for the
/// analytic DFT basis; reduces to the classical Rihaczek distribution on a
/// directed cycle.
pub fn energy_distribution_c(
    x: &Array1<Complex64>,
    basis: &SpectralBasis,
) -> Result<Array2<Complex64>> {
    let n = basis.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch("signal/basis sizes disagree".into()));
    }
    let u = basis.vectors_complex();
    let spectrum = gft_c(x, basis)?;
    let mut e = Array2::zeros((n, n));
    for nn in 0..n {
        for k in 0..n {
            e[(nn, k)] = x[nn] * spectrum[k].conj() * u[(nn, k)].conj();
        }
    }
    Ok(e)
}

/// Row sums (vertex marginal, should match `x²(n)`) and column sums
/// (frequency marginal, should match `|X(k)|²`).
pub fn marginals(e: &EnergyDistribution) -> (Array1<f64>, Array1<f64>) {
    (e.matrix.sum_axis(ndarray::Axis(1)), e.matrix.sum_axis(ndarray::Axis(0)))
}

/// Reduced-interference kernel `φ(p, k, q)` over spectral index triples.
#[derive(Clone)]
pub enum RidKernel {
    /// `φ(p,k,q) = δ(q−k)`: reproduces the Rihaczek distribution.
    Delta,
    /// Rectangular sinc-type kernel `φ = 1/|{k: |k−p| ≤ |p−q|}|` on
    /// `|k−p| ≤ |p−q|`. The count is taken over in-range bins, which keeps
    /// `Σ_k φ = 1` exact at the spectrum edges; the diagonal is untouched,
    /// so `φ(p,k,p) = δ(p−k)` and both marginals survive.
    Sinc,
    /// Arbitrary kernel as a function of `(p, k, q)`, all 0-based.
    Custom(std::sync::Arc<dyn Fn(usize, usize, usize) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for RidKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RidKernel::Delta => write!(f, "RidKernel::Delta"),
            RidKernel::Sinc => write!(f, "RidKernel::Sinc"),
            RidKernel::Custom(_) => write!(f, "RidKernel::Custom(..)"),
        }
    }
}

/// In-range bin count for the sinc kernel: `|{k ∈ [0, n): |k − p| ≤ r}|`.
fn sinc_count(p: usize, r: usize, n: usize) -> usize {
    let lo = p.saturating_sub(r);
    let hi = (p + r).min(n - 1);
    hi - lo + 1
}

/// General reduced-interference distribution. The sinc kernel runs in
/// `O(N³)` by accumulating each `(p, q)` pair over its contiguous range of
/// output bins; the custom path is the direct `O(N⁴)` quadruple loop.
pub fn rid(x: &Array1<f64>, basis: &SpectralBasis, kernel: &RidKernel) -> Result<EnergyDistribution> {
    let n = basis.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch("signal/basis sizes disagree".into()));
    }
    match kernel {
        // algebraic identity: the delta kernel collapses to the Rihaczek form
        RidKernel::Delta => {
            let mut e = energy_distribution(x, basis)?;
            e.kind = DistributionKind::ReducedInterference;
            Ok(e)
        }
        RidKernel::Sinc => {
            let u = basis.vectors()?;
            let spectrum = gft(x, basis)?;
            let rows = par::map_indices(n, |nn| {
                // v_p = X(p) u_p(n); difference array over the k axis
                let v: Vec<f64> = (0..n).map(|p| spectrum[p] * u[(nn, p)]).collect();
                let mut diff = vec![0.0f64; n + 1];
                for p in 0..n {
                    for q in 0..n {
                        let r = p.abs_diff(q);
                        let w = v[p] * v[q] / sinc_count(p, r, n) as f64;
                        let lo = p.saturating_sub(r);
                        let hi = (p + r).min(n - 1);
                        diff[lo] += w;
                        diff[hi + 1] -= w;
                    }
                }
                let mut row = vec![0.0f64; n];
                let mut acc = 0.0;
                for k in 0..n {
                    acc += diff[k];
                    row[k] = acc;
                }
                row
            });
            let mut e = Array2::zeros((n, n));
            for (nn, row) in rows.into_iter().enumerate() {
                for (k, v) in row.into_iter().enumerate() {
                    e[(nn, k)] = v;
                }
            }
            Ok(EnergyDistribution { matrix: e, kind: DistributionKind::ReducedInterference })
        }
        RidKernel::Custom(phi) => {
            let u = basis.vectors()?;
            let spectrum = gft(x, basis)?;
            let rows = par::map_indices(n, |nn| {
                let v: Vec<f64> = (0..n).map(|p| spectrum[p] * u[(nn, p)]).collect();
                let mut row = vec![0.0f64; n];
                for (k, out) in row.iter_mut().enumerate() {
                    for p in 0..n {
                        for q in 0..n {
                            let w = phi(p, k, q);
                            if w != 0.0 {
                                *out += v[p] * v[q] * w;
                            }
                        }
                    }
                }
                row
            });
            let mut e = Array2::zeros((n, n));
            for (nn, row) in rows.into_iter().enumerate() {
                for (k, v) in row.into_iter().enumerate() {
                    e[(nn, k)] = v;
                }
            }
            Ok(EnergyDistribution { matrix: e, kind: DistributionKind::ReducedInterference })
        }
    }
}

/// Ideally concentrated distribution: row `n` carries `|x(n)|²` in the
/// column of the eigenvalue closest to the local smoothness `λ(n)`
/// (ties to the lower index); masked rows stay zero.
pub fn ideal_distribution(
    x: &Array1<f64>,
    g: &Graph,
    basis: &SpectralBasis,
) -> Result<EnergyDistribution> {
    let n = basis.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch("signal/basis sizes disagree".into()));
    }
    let ls = local_smoothness(x, g)?;
    let lam = basis.eigenvalues();
    let mut e = Array2::zeros((n, n));
    for nn in 0..n {
        if !ls.mask[nn] {
            continue;
        }
        let mut best = 0usize;
        for k in 1..n {
            if (lam[k] - ls.values[nn]).abs() < (lam[best] - ls.values[nn]).abs() {
                best = k;
            }
        }
        e[(nn, best)] = x[nn] * x[nn];
    }
    Ok(EnergyDistribution { matrix: e, kind: DistributionKind::Ideal })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothnessEstimator {
    /// `λ̂(n) = λ_{argmax_k D(n,k)}`.
    Argmax,
    /// Spectral center of mass `Σ_k λ_k D(n,k) / Σ_k D(n,k)`; reproduces
    /// `λ(n)` exactly on the Rihaczek distribution.
    CenterOfMass,
}

/// Estimates the local smoothness profile from an energy distribution.
/// Rows whose total mass is negligible are masked.
pub fn estimate_local_smoothness(
    e: &EnergyDistribution,
    basis: &SpectralBasis,
    method: SmoothnessEstimator,
) -> Result<LocalSmoothness> {
    let n = basis.n();
    if e.matrix.nrows() != n || e.matrix.ncols() != n {
        return Err(Error::DimensionMismatch("distribution/basis sizes disagree".into()));
    }
    let lam = basis.eigenvalues();
    let scale = e.matrix.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let eps = 1e-12 * scale.max(1e-300);
    let mut values = Array1::zeros(n);
    let mut mask = vec![false; n];
    for nn in 0..n {
        let row = e.matrix.row(nn);
        match method {
            SmoothnessEstimator::Argmax => {
                let mut best = 0usize;
                for k in 1..n {
                    if row[k] > row[best] {
                        best = k;
                    }
                }
                if row[best] > eps {
                    values[nn] = lam[best];
                    mask[nn] = true;
                }
            }
            SmoothnessEstimator::CenterOfMass => {
                let total: f64 = row.sum();
                if total.abs() > eps {
                    let weighted: f64 = row.iter().zip(lam.iter()).map(|(&v, &l)| v * l).sum();
                    values[nn] = weighted / total;
                    mask[nn] = true;
                }
            }
        }
    }
    Ok(LocalSmoothness { values, mask })
}
