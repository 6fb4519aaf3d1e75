//! Vertex-frequency analysis of signals on graphs.
//!
//! A graph signal `x(n)` lives on the vertices of a weighted graph. Its
//! spectrum is obtained by expanding it onto the eigenvectors of the graph
//! Laplacian (or another graph operator), and *vertex-frequency* analysis
//! localizes that spectrum jointly in vertex and spectral index — the graph
//! counterpart of time-frequency analysis.
//!
//! The crate covers:
//!
//! - graph construction and derived matrices ([`graph`]),
//! - spectral bases, GFT/IGFT, smoothness indices, uncertainty ([`spectral`]),
//! - localization windows and band-pass transfer banks ([`windows`]),
//! - Chebyshev polynomial realization of spectral filters ([`polyops`]),
//! - the localized graph Fourier transform in its window, spectral-shift and
//!   band-pass forms, plus spectrograms and concentration measures ([`lgft`]),
//! - spectral graph wavelets and frame bounds ([`wavelet`]),
//! - inversion schemes and vertex-varying filtering ([`inversion`]),
//! - windowless energy distributions and local-smoothness estimation
//!   ([`energy`]),
//! - CSV/JSON import and export of every artifact ([`io`]).
//!
//! Dense `f64` matrices (`ndarray`) are the working currency; everything is
//! sized for desk-scale graphs (N in the hundreds). Inner loops that are
//! data-parallel run on rayon when the default `parallel` feature is enabled
//! and fall back to plain iterators otherwise.

pub mod energy;
pub mod graph;
pub mod inversion;
pub mod io;
pub mod lgft;
pub mod polyops;
pub mod signal;
pub mod spectral;
pub mod wavelet;
pub mod windows;

mod par;

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported graph kind: {0}")]
    UnsupportedKind(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("admissibility condition violated: {0}")]
    ConditionViolation(String),
    #[error("vertex {0} has zero degree; normalized operators are undefined")]
    ZeroDegree(usize),
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed file {path}: {reason}")]
    Parse { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Caps the rayon thread pool used by the `parallel` feature.
///
/// Must be called before any parallel work is dispatched; later calls are
/// ignored by rayon. A no-op in sequential builds.
pub fn cap_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}
