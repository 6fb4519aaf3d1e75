//! Graph-signal construction helpers: piecewise eigenvector compositions,
//! seeded random signals, and SNR bookkeeping for the filtering experiments.

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::spectral::SpectralBasis;
use crate::{Error, Result};

/// One segment of a piecewise eigenvector signal: vertices `from..=to`
/// (1-based) carry `amplitude · u_k`, optionally rescaled so the segment
/// peak is `amplitude`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Segment {
    pub from: usize,
    pub to: usize,
    /// 1-based spectral index.
    pub eigen_index: usize,
    pub amplitude: f64,
    /// Divide by the largest eigenvector magnitude inside the segment.
    #[serde(default)]
    pub peak_normalize: bool,
}

/// Builds `x(n) = α_i u_{k_i}(n)` for `n ∈ V_i`. The segments must partition
/// `1..=N` in order.
pub fn piecewise_eigenvector(basis: &SpectralBasis, segments: &[Segment]) -> Result<Array1<f64>> {
    let n = basis.n();
    let u = basis.vectors()?;
    if segments.is_empty() {
        return Err(Error::InvalidParameter("no segments given".into()));
    }
    let mut expected_start = 1usize;
    for (i, s) in segments.iter().enumerate() {
        if s.from != expected_start || s.to < s.from {
            return Err(Error::InvalidParameter(format!(
                "segment {} covers {}..={} but should start at {}; segments must partition 1..={}",
                i + 1,
                s.from,
                s.to,
                expected_start,
                n
            )));
        }
        if s.eigen_index < 1 || s.eigen_index > n {
            return Err(Error::InvalidParameter(format!(
                "segment {}: eigen index {} outside 1..={}",
                i + 1,
                s.eigen_index,
                n
            )));
        }
        expected_start = s.to + 1;
    }
    if expected_start != n + 1 {
        return Err(Error::InvalidParameter(format!(
            "segments stop at {} but the graph has {} vertices",
            expected_start - 1,
            n
        )));
    }

    let mut x = Array1::zeros(n);
    for s in segments {
        let col = u.column(s.eigen_index - 1);
        let mut amp = s.amplitude;
        if s.peak_normalize {
            let peak = (s.from - 1..s.to).fold(0.0f64, |a, m| a.max(col[m].abs()));
            if peak == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "eigenvector {} vanishes on {}..={}; cannot peak-normalize",
                    s.eigen_index, s.from, s.to
                )));
            }
            amp /= peak;
        }
        for m in s.from - 1..s.to {
            x[m] = amp * col[m];
        }
    }
    Ok(x)
}

/// Seeded standard-normal signal.
pub fn random_signal(n: usize, seed: u64) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array1::from_iter((0..n).map(|_| StandardNormal.sample(&mut rng)))
}

/// Adds seeded white Gaussian noise scaled so the result sits exactly at
/// `snr_db` relative to `x`.
pub fn add_noise_at_snr(x: &Array1<f64>, snr_db: f64, seed: u64) -> Array1<f64> {
    let noise = random_signal(x.len(), seed);
    let scale = x.dot(x).sqrt() * 10f64.powf(-snr_db / 20.0) / noise.dot(&noise).sqrt();
    x + &(noise * scale)
}

/// `10 log10(‖ref‖² / ‖ref − estimate‖²)`.
pub fn snr_db(reference: &Array1<f64>, estimate: &Array1<f64>) -> f64 {
    let err = reference - estimate;
    10.0 * (reference.dot(reference) / err.dot(&err)).log10()
}
