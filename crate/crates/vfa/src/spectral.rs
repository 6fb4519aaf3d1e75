//! Spectral bases of graph operators, the graph Fourier transform and its
//! inverse, smoothness indices and the uncertainty bound.
//!
//! The default basis diagonalizes the graph Laplacian, `L u_k = λ_k u_k`,
//! with eigenvalues in ascending order; the eigenvalue axis plays the role
//! of (squared) frequency. The directed cycle gets the analytic DFT basis
//! `u_k(n) = exp(j 2π (n−1)(k−1) / N) / √N`, which reduces every transform
//! in this crate to its classical counterpart.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Laplacian,
    NormalizedLaplacian,
    GeneralizedLaplacian,
    Adjacency,
    NormalizedAdjacency,
    AnalyticDft,
}

#[derive(Debug, Clone)]
enum Vectors {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

/// Orthonormal spectral basis: eigenvalues `λ_1 ≤ … ≤ λ_N` and eigenvectors
/// `u_k(n)` stored as matrix columns.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    kind: BasisKind,
    eigenvalues: Array1<f64>,
    vectors: Vectors,
    /// Complex eigenvalues of the cyclic shift, analytic-DFT basis only.
    shift_eigenvalues: Option<Vec<Complex64>>,
}

impl SpectralBasis {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues on the real spectral axis. Ascending for the symmetric
    /// kinds; in DFT index order for the analytic basis (where the axis
    /// value is the smoothness `2 − 2cos(2π(k−1)/N)` of the harmonic pair).
    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.vectors, Vectors::Complex(_))
    }

    /// Eigenvector matrix for real bases.
    pub fn vectors(&self) -> Result<&Array2<f64>> {
        match &self.vectors {
            Vectors::Real(u) => Ok(u),
            Vectors::Complex(_) => Err(Error::UnsupportedKind(
                "basis is complex; use the complex accessors".into(),
            )),
        }
    }

    /// Eigenvector matrix promoted to complex storage.
    pub fn vectors_complex(&self) -> Array2<Complex64> {
        match &self.vectors {
            Vectors::Real(u) => u.mapv(|v| Complex64::new(v, 0.0)),
            Vectors::Complex(u) => u.clone(),
        }
    }

    /// Complex eigenvalues of the adjacency shift (analytic-DFT basis only).
    pub fn shift_eigenvalues(&self) -> Option<&[Complex64]> {
        self.shift_eigenvalues.as_deref()
    }

    /// Largest squared eigenvector magnitude, `max_{k,m} |u_k(m)|²`.
    pub fn max_vector_power(&self) -> f64 {
        match &self.vectors {
            Vectors::Real(u) => u.iter().map(|v| v * v).fold(0.0, f64::max),
            Vectors::Complex(u) => u.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max),
        }
    }
}

/// Flips each column so its largest-magnitude entry is positive; magnitude
/// ties resolve to the lowest vertex index. Keeps eigenvectors reproducible
/// across runs and platforms.
fn fix_signs(u: &mut Array2<f64>) {
    for mut col in u.columns_mut() {
        let mut peak = 0usize;
        for i in 1..col.len() {
            if col[i].abs() > col[peak].abs() {
                peak = i;
            }
        }
        if col[peak] < 0.0 {
            col.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

fn eigh_sorted(m: &Array2<f64>, what: &str) -> Result<(Array1<f64>, Array2<f64>)> {
    let (vals, mut vecs) = m
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Eigen(format!("{what}: {e}")))?;
    fix_signs(&mut vecs);
    Ok((vals, vecs))
}

/// Rounds the numerically negative eigenvalues of a PSD operator up to zero
/// so the spectral axis starts exactly at `λ_1 = 0`.
fn clamp_psd(vals: Array1<f64>) -> Array1<f64> {
    vals.mapv(|v| if v < 0.0 && v > -1e-9 { 0.0 } else { v })
}

fn inv_sqrt_degrees(g: &Graph) -> Result<Array1<f64>> {
    let deg = g.degrees();
    for (i, &d) in deg.iter().enumerate() {
        if d <= 0.0 {
            return Err(Error::ZeroDegree(i + 1));
        }
    }
    Ok(deg.mapv(|d| 1.0 / d.sqrt()))
}

/// Eigendecomposition of the requested graph operator.
///
/// The generalized problem `L u = λ D u` is reduced to the normalized
/// Laplacian by the substitution `y = D^{1/2} u`; the returned vectors are
/// the Euclidean-orthonormal `y`, and [`generalized_vectors`] maps them back.
pub fn decompose(g: &Graph, kind: BasisKind) -> Result<SpectralBasis> {
    match (kind, g.kind()) {
        (BasisKind::AnalyticDft, GraphKind::DirectedCycle) => Ok(analytic_dft_basis(g.n())),
        (BasisKind::AnalyticDft, _) => Err(Error::UnsupportedKind(
            "analytic DFT basis requires a directed cycle".into(),
        )),
        (_, GraphKind::DirectedCycle) => Err(Error::UnsupportedKind(
            "symmetric eigendecomposition requires an undirected graph".into(),
        )),
        (BasisKind::Laplacian, _) => {
            let (vals, vecs) = eigh_sorted(&g.laplacian()?, "laplacian")?;
            Ok(SpectralBasis {
                kind,
                eigenvalues: clamp_psd(vals),
                vectors: Vectors::Real(vecs),
                shift_eigenvalues: None,
            })
        }
        (BasisKind::NormalizedLaplacian | BasisKind::GeneralizedLaplacian, _) => {
            let dis = inv_sqrt_degrees(g)?;
            let l = g.laplacian()?;
            let n = g.n();
            let mut m = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = dis[i] * l[(i, j)] * dis[j];
                }
            }
            let (vals, vecs) = eigh_sorted(&m, "normalized laplacian")?;
            Ok(SpectralBasis {
                kind,
                eigenvalues: clamp_psd(vals),
                vectors: Vectors::Real(vecs),
                shift_eigenvalues: None,
            })
        }
        (BasisKind::Adjacency, _) => {
            let (vals, vecs) = eigh_sorted(&g.adjacency(), "adjacency")?;
            Ok(SpectralBasis {
                kind,
                eigenvalues: vals,
                vectors: Vectors::Real(vecs),
                shift_eigenvalues: None,
            })
        }
        (BasisKind::NormalizedAdjacency, _) => {
            let (vals, vecs) = eigh_sorted(&g.adjacency(), "adjacency")?;
            let top = vals[vals.len() - 1];
            if top <= 0.0 {
                return Err(Error::InvalidParameter("graph has no edges".into()));
            }
            Ok(SpectralBasis {
                kind,
                eigenvalues: vals.mapv(|v| v / top),
                vectors: Vectors::Real(vecs),
                shift_eigenvalues: None,
            })
        }
    }
}

fn analytic_dft_basis(n: usize) -> SpectralBasis {
    let mut u = Array2::zeros((n, n));
    for k in 0..n {
        for m in 0..n {
            let phase = 2.0 * std::f64::consts::PI * (m as f64) * (k as f64) / n as f64;
            u[(m, k)] = Complex64::from_polar(1.0 / (n as f64).sqrt(), phase);
        }
    }
    let eigenvalues = Array1::from_iter(
        (0..n).map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos()),
    );
    let shift = (0..n)
        .map(|k| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    SpectralBasis {
        kind: BasisKind::AnalyticDft,
        eigenvalues,
        vectors: Vectors::Complex(u),
        shift_eigenvalues: Some(shift),
    }
}

/// Maps the vectors of a generalized-Laplacian basis back to the original
/// problem: columns `u_k = D^{−1/2} y_k` satisfying `L u_k = λ_k D u_k`.
/// These are D-orthonormal, not Euclidean-orthonormal.
pub fn generalized_vectors(basis: &SpectralBasis, g: &Graph) -> Result<Array2<f64>> {
    if basis.kind() != BasisKind::GeneralizedLaplacian {
        return Err(Error::InvalidParameter(
            "generalized_vectors expects a generalized-laplacian basis".into(),
        ));
    }
    let dis = inv_sqrt_degrees(g)?;
    let mut u = basis.vectors()?.clone();
    for (mut row, &d) in u.rows_mut().into_iter().zip(dis.iter()) {
        row.iter_mut().for_each(|v| *v *= d);
    }
    Ok(u)
}

fn check_len(x: usize, basis: &SpectralBasis) -> Result<()> {
    if x != basis.n() {
        return Err(Error::DimensionMismatch(format!(
            "signal length {} vs basis size {}",
            x,
            basis.n()
        )));
    }
    Ok(())
}

/// Forward GFT `X(k) = Σ_n x(n) u_k(n)` for real bases.
pub fn gft(x: &Array1<f64>, basis: &SpectralBasis) -> Result<Array1<f64>> {
    check_len(x.len(), basis)?;
    Ok(basis.vectors()?.t().dot(x))
}

/// Inverse GFT `x(n) = Σ_k X(k) u_k(n)` for real bases.
pub fn igft(spectrum: &Array1<f64>, basis: &SpectralBasis) -> Result<Array1<f64>> {
    check_len(spectrum.len(), basis)?;
    Ok(basis.vectors()?.dot(spectrum))
}

/// Forward GFT with the complex-conjugate convention, `X = Uᴴ x`.
pub fn gft_c(x: &Array1<Complex64>, basis: &SpectralBasis) -> Result<Array1<Complex64>> {
    check_len(x.len(), basis)?;
    let u = basis.vectors_complex();
    let n = basis.n();
    let mut out = Array1::zeros(n);
    for k in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            acc += u[(m, k)].conj() * x[m];
        }
        out[k] = acc;
    }
    Ok(out)
}

/// Inverse of [`gft_c`], `x = U X`.
pub fn igft_c(spectrum: &Array1<Complex64>, basis: &SpectralBasis) -> Result<Array1<Complex64>> {
    check_len(spectrum.len(), basis)?;
    let u = basis.vectors_complex();
    let n = basis.n();
    let mut out = Array1::zeros(n);
    for m in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            acc += u[(m, k)] * spectrum[k];
        }
        out[m] = acc;
    }
    Ok(out)
}

/// Global smoothness index, the Rayleigh quotient `xᵀ L x / xᵀ x`.
pub fn smoothness(x: &Array1<f64>, g: &Graph) -> Result<f64> {
    let energy = x.dot(x);
    if energy == 0.0 {
        return Err(Error::InvalidParameter("smoothness of the zero signal is undefined".into()));
    }
    let l = g.laplacian()?;
    Ok(x.dot(&l.dot(x)) / energy)
}

/// Local smoothness `λ(n) = (L x)(n) / x(n)` with a validity mask at the
/// vertices where `|x(n)|` is above `1e−8 · ‖x‖_∞`.
#[derive(Debug, Clone)]
pub struct LocalSmoothness {
    pub values: Array1<f64>,
    pub mask: Vec<bool>,
}

pub fn local_smoothness(x: &Array1<f64>, g: &Graph) -> Result<LocalSmoothness> {
    let l = g.laplacian()?;
    if x.len() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "signal length {} vs graph size {}",
            x.len(),
            g.n()
        )));
    }
    let lx = l.dot(x);
    let eps = 1e-8 * x.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let mut values = Array1::zeros(x.len());
    let mut mask = vec![false; x.len()];
    for n in 0..x.len() {
        if x[n].abs() > eps && eps > 0.0 {
            values[n] = lx[n] / x[n];
            mask[n] = true;
        }
    }
    Ok(LocalSmoothness { values, mask })
}

/// Support uncertainty bound `‖x‖₀ ‖X‖₀ ≥ 1 / max_{k,m} |u_k(m)|²`.
pub fn uncertainty_bound(basis: &SpectralBasis) -> f64 {
    1.0 / basis.max_vector_power()
}
