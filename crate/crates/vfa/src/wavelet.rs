//! Spectral graph wavelet transform: projections onto scaled band-pass
//! kernels `ψ_{m,s_i}(n) = Σ_p H(s_i λ_p) u_p(m) u_p(n)`, the scaling
//! (low-pass) column, frame bounds, and inversion.
//!
//! The transform is the band-form LGFT with a scale-indexed bank, so the
//! wavelet bank is a [`TransferBank`] whose band 0 is the scaling function
//! `G` and whose band `i` applies `H(s_i λ)` with `s_i = M^i / λmax`. The
//! set is a Parseval frame when `G²(λ_p) + Σ_i H²(s_i λ_p) = 1`.

use ndarray::{Array1, Array2};

use crate::graph::Graph;
use crate::lgft::{lgft_bank_polynomial, FrequencyAxis, VertexFrequencyMap};
use crate::par;
use crate::spectral::{gft, SpectralBasis};
use crate::windows::{meyer_wavelet_bank, TransferBank};
use crate::{Error, Result};

/// Wavelet coefficients `W(m, s_i)`: column 0 is the scaling (low-pass)
/// output, column `i` the band-pass output at scale `s_i`.
#[derive(Debug, Clone)]
pub struct WaveletCoefficients {
    pub map: VertexFrequencyMap,
    pub bank: TransferBank,
    pub scale_factor: f64,
}

impl WaveletCoefficients {
    pub fn scales(&self) -> &[f64] {
        self.bank.scales().unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy)]
pub enum WaveletMode {
    /// Through the eigendecomposition, coefficient by coefficient.
    Spectral,
    /// Chebyshev polynomial of the given order per scale; no
    /// eigendecomposition on the application path.
    Polynomial { order: usize },
}

/// Wavelet transform of `x` with `k` columns (scaling + `k − 1` scales) and
/// dyadic-like scale progression `s_i = M^i / λmax`.
pub fn wavelet_transform(
    x: &Array1<f64>,
    g: &Graph,
    basis: &SpectralBasis,
    scale_factor: f64,
    k: usize,
    mode: WaveletMode,
) -> Result<WaveletCoefficients> {
    let bank = meyer_wavelet_bank(scale_factor, k, basis)?;
    let map = match mode {
        WaveletMode::Spectral => {
            // coefficient route: W(m, i) = Σ_p H_i(λ_p) X(p) u_p(m)
            let n = basis.n();
            if x.len() != n {
                return Err(Error::DimensionMismatch("signal/basis sizes disagree".into()));
            }
            let u = basis.vectors()?;
            let spectrum = gft(x, basis)?;
            let cols = par::map_indices(k, |band| {
                let mut col = vec![0.0; n];
                for p in 0..n {
                    let w = bank.samples()[(band, p)] * spectrum[p];
                    if w != 0.0 {
                        for (m, c) in col.iter_mut().enumerate() {
                            *c += w * u[(m, p)];
                        }
                    }
                }
                col
            });
            let mut matrix = Array2::zeros((n, k));
            for (band, col) in cols.into_iter().enumerate() {
                for (m, v) in col.into_iter().enumerate() {
                    matrix[(m, band)] = v;
                }
            }
            VertexFrequencyMap {
                matrix,
                axis: FrequencyAxis::BandIndex,
                band_centers: Some(bank.centers().to_vec()),
                vertex_subset: None,
            }
        }
        WaveletMode::Polynomial { order } => lgft_bank_polynomial(x, &bank, g, order)?,
    };
    Ok(WaveletCoefficients { map, bank, scale_factor })
}

/// Frame bounds from the sampled resolvent `g(λ_p) = Σ_k H_k²(λ_p)`:
/// returns `(A, B) = (min, max)`.
pub fn frame_bounds(bank: &TransferBank) -> (f64, f64) {
    bank.eigenvalues()
        .iter()
        .map(|&l| bank.frame_function(l))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

/// Frame bounds of the continuous frame function over a dense uniform grid
/// on `[0, λmax]`, for banks given analytically or by polynomial
/// approximation.
pub fn frame_bounds_grid(bank: &TransferBank, points: usize) -> (f64, f64) {
    let lmax = bank.lambda_max();
    (0..=points)
        .map(|i| bank.frame_function(lmax * i as f64 / points as f64))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

const TIGHT_TOL: f64 = 1e-8;

/// Inverse wavelet transform `x(n) = Σ_m Σ_i W(m, s_i) ψ_{m,s_i}(n)`,
/// valid for Parseval-tight kernel sets; refuses otherwise and reports the
/// measured frame bounds.
pub fn wavelet_inverse(w: &WaveletCoefficients, basis: &SpectralBasis) -> Result<Array1<f64>> {
    let defect = w.bank.tightness_defect();
    if defect > TIGHT_TOL {
        let (a, b) = frame_bounds(&w.bank);
        return Err(Error::ConditionViolation(format!(
            "kernel set is not tight (defect {defect:.2e}, frame bounds A = {a:.6}, B = {b:.6}); \
             use the corrected inversion for near-tight sets"
        )));
    }
    synthesis(w, basis, false)
}

/// Inversion with the `1/g(λ_p)` spectral correction, usable for non-tight
/// (e.g. polynomial-approximated) kernel sets. Goes beyond the plain frame
/// synthesis; results carry the correction implicitly.
pub fn wavelet_inverse_corrected(
    w: &WaveletCoefficients,
    basis: &SpectralBasis,
) -> Result<Array1<f64>> {
    synthesis(w, basis, true)
}

fn synthesis(
    w: &WaveletCoefficients,
    basis: &SpectralBasis,
    correct: bool,
) -> Result<Array1<f64>> {
    let n = basis.n();
    if w.map.rows() != n {
        return Err(Error::DimensionMismatch("coefficients/basis sizes disagree".into()));
    }
    let u = basis.vectors()?;
    let k = w.bank.band_count();
    // x̂ = Σ_i H_i(L) w_i, then optionally U diag(1/g) Uᵀ
    let mut acc = Array1::zeros(n);
    for band in 0..k {
        let col = w.map.matrix.column(band).to_owned();
        let mut spec = u.t().dot(&col);
        for (p, s) in spec.iter_mut().enumerate() {
            *s *= w.bank.samples()[(band, p)];
        }
        acc = acc + u.dot(&spec);
    }
    if correct {
        let mut spec = u.t().dot(&acc);
        for (p, s) in spec.iter_mut().enumerate() {
            let g = w.bank.frame_function(w.bank.eigenvalues()[p]);
            if g < 1e-12 {
                return Err(Error::ConditionViolation(format!(
                    "frame function vanishes at λ_{} = {}; inversion impossible",
                    p + 1,
                    w.bank.eigenvalues()[p]
                )));
            }
            *s /= g;
        }
        acc = u.dot(&spec);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SwissRollParams;
    use crate::lgft::lgft_bank;
    use crate::signal::random_signal;
    use crate::spectral::{decompose, BasisKind};
    use approx::assert_abs_diff_eq;

    fn setup(n: usize, seed: u64) -> (Graph, SpectralBasis) {
        let g = Graph::swiss_roll(&SwissRollParams::new(n, 100.0, 5, seed)).unwrap();
        let b = decompose(&g, BasisKind::Laplacian).unwrap();
        (g, b)
    }

    #[test]
    fn single_spectral_line_response() {
        let (g, b) = setup(20, 31);
        let p = 14usize;
        let u_p = b.vectors().unwrap().column(p).to_owned();
        let w = wavelet_transform(&u_p, &g, &b, 2.0, 7, WaveletMode::Spectral).unwrap();
        let lam_p = b.eigenvalues()[p];
        for band in 0..7 {
            let gain = w.bank.evaluate(band, lam_p);
            for m in 0..20 {
                assert_abs_diff_eq!(w.map.matrix[(m, band)], gain * u_p[m], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn wavelet_equals_bank_lgft() {
        let (g, b) = setup(24, 32);
        let x = random_signal(24, 33);
        let w = wavelet_transform(&x, &g, &b, 2.0, 9, WaveletMode::Spectral).unwrap();
        let via_bank = lgft_bank(&x, &w.bank, &b).unwrap();
        for m in 0..24 {
            for band in 0..9 {
                assert_abs_diff_eq!(
                    w.map.matrix[(m, band)],
                    via_bank.matrix[(m, band)],
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn polynomial_mode_tracks_the_spectral_mode() {
        let (g, b) = setup(24, 34);
        let x = random_signal(24, 35);
        let spectral = wavelet_transform(&x, &g, &b, 2.0, 7, WaveletMode::Spectral).unwrap();
        let poly =
            wavelet_transform(&x, &g, &b, 2.0, 7, WaveletMode::Polynomial { order: 40 }).unwrap();
        // per-scale fit error bound
        let lmax = spectral.bank.lambda_max();
        let mut fit_err = 0.0f64;
        for band in 0..7 {
            let fit =
                crate::polyops::cheb_fit(|l| spectral.bank.evaluate(band, l), 40, lmax).unwrap();
            for i in 0..=600 {
                let l = lmax * i as f64 / 600.0;
                fit_err = fit_err.max((fit.evaluate(l) - spectral.bank.evaluate(band, l)).abs());
            }
        }
        let spectrum_scale = x.dot(&x).sqrt();
        let mut diff = 0.0f64;
        for (a, b_) in poly.map.matrix.iter().zip(spectral.map.matrix.iter()) {
            diff = diff.max((a - b_).abs());
        }
        assert!(
            diff < 10.0 * fit_err * spectrum_scale.max(1.0),
            "poly/spectral gap {diff} vs fit error {fit_err}"
        );
    }

    #[test]
    fn frame_bounds_reference_cases() {
        let (_, b) = setup(22, 36);
        // tight Meyer wavelet set
        let w_bank = meyer_wavelet_bank(2.0, 9, &b).unwrap();
        let (a, bb) = frame_bounds(&w_bank);
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(bb, 1.0, epsilon = 1e-8);
        let (ga, gb) = frame_bounds_grid(&w_bank, 1500);
        assert_abs_diff_eq!(ga, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(gb, 1.0, epsilon = 1e-8);
        // squared raised cosine evaluated through g = Σ H_k²: sin⁴ + cos⁴
        let squared = crate::windows::raised_cosine_bank(9, &b, true).unwrap();
        let (ga, gb) = frame_bounds_grid(&squared, 2000);
        assert!((0.49..=0.51).contains(&ga), "A = {ga}");
        assert!((0.99..=1.0 + 1e-12).contains(&gb), "B = {gb}");
        // a single all-pass band is trivially tight
        let allpass = crate::windows::binomial_bank(1, &b).unwrap();
        let (a1, b1) = frame_bounds(&allpass);
        assert_abs_diff_eq!(a1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn frame_inequality_on_random_signals() {
        let (g, b) = setup(20, 37);
        let bank = meyer_wavelet_bank(2.0, 7, &b).unwrap();
        let (a, bb) = frame_bounds(&bank);
        for seed in 40..45 {
            let x = random_signal(20, seed);
            let w = wavelet_transform(&x, &g, &b, 2.0, 7, WaveletMode::Spectral).unwrap();
            let total: f64 = w.map.matrix.iter().map(|v| v * v).sum();
            let energy = x.dot(&x);
            assert!(total >= a * energy - 1e-8);
            assert!(total <= bb * energy + 1e-8);
        }
        // non-tight bank: the energy sandwich still holds with A < B
        let squared = crate::windows::raised_cosine_bank(9, &b, true).unwrap();
        let (a, bb) = frame_bounds(&squared);
        assert!(a < bb);
        for seed in 46..50 {
            let x = random_signal(20, seed);
            let map = lgft_bank(&x, &squared, &b).unwrap();
            let total: f64 = map.matrix.iter().map(|v| v * v).sum();
            let energy = x.dot(&x);
            assert!(total >= a * energy - 1e-8, "A E_x = {} vs {total}", a * energy);
            assert!(total <= bb * energy + 1e-8, "B E_x = {} vs {total}", bb * energy);
        }
    }

    #[test]
    fn tight_roundtrip_and_dc_reconstruction() {
        let (g, b) = setup(24, 38);
        let x = random_signal(24, 39);
        let w = wavelet_transform(&x, &g, &b, 2.0, 9, WaveletMode::Spectral).unwrap();
        let back = wavelet_inverse(&w, &b).unwrap();
        for i in 0..24 {
            assert!((back[i] - x[i]).abs() < 1e-8);
        }
        // DC input passes only through the scaling column
        let dc = b.vectors().unwrap().column(0).to_owned();
        let w = wavelet_transform(&dc, &g, &b, 2.0, 9, WaveletMode::Spectral).unwrap();
        for band in 1..9 {
            for m in 0..24 {
                assert_abs_diff_eq!(w.map.matrix[(m, band)], 0.0, epsilon = 1e-10);
            }
        }
        let back = wavelet_inverse(&w, &b).unwrap();
        for i in 0..24 {
            assert!((back[i] - dc[i]).abs() < 1e-8);
        }
        // zero coefficients reconstruct the zero signal
        let mut zero = w.clone();
        zero.map.matrix.fill(0.0);
        let back = wavelet_inverse(&zero, &b).unwrap();
        assert!(back.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn non_tight_sets_refuse_plain_inversion_but_allow_correction() {
        let (g, b) = setup(20, 41);
        let x = random_signal(20, 42);
        // squared raised-cosine bank is a partition of unity, not tight
        let bank = crate::windows::raised_cosine_bank(7, &b, true).unwrap();
        let map = lgft_bank(&x, &bank, &b).unwrap();
        let w = WaveletCoefficients { map, bank, scale_factor: f64::NAN };
        let err = wavelet_inverse(&w, &b).unwrap_err();
        assert!(matches!(err, Error::ConditionViolation(_)));
        let corrected = wavelet_inverse_corrected(&w, &b).unwrap();
        for i in 0..20 {
            assert!((corrected[i] - x[i]).abs() < 1e-8, "corrected inversion must be exact");
        }
        let _ = g;
    }
}
