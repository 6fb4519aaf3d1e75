//! Inversion of the LGFT and vertex-varying filtering.
//!
//! Three schemes, each tied to an admissibility condition that is checked
//! before any synthesis:
//!
//! - summation inversion, `x(n) = Σ_{m,k} S(m,k) u_k(n) / Σ_m h_m(n)`;
//! - band summation, `x = Σ_k s_k` when the bank is a partition of unity;
//! - kernel inversion, projecting `S` back onto the vertex-frequency
//!   kernels, exact when `Σ_m h_m²(n) = 1` (window form) or
//!   `Σ_k H_k²(λ_p) = 1` (band form).
//!
//! Vertex-varying filtering multiplies the map by a support mask `B(m,k)`
//! before inversion; thresholding the noisy map gives the denoising
//! experiment.

use ndarray::{Array1, Array2};

use crate::lgft::{lgft_bank, FrequencyAxis, VertexFrequencyMap};
use crate::par;
use crate::signal::snr_db;
use crate::spectral::SpectralBasis;
use crate::windows::{TransferBank, VertexWindowSet};
use crate::{Error, Result};

const CONDITION_TOL: f64 = 1e-8;

fn subset_of(map: &VertexFrequencyMap, n: usize) -> Vec<usize> {
    map.vertex_subset.clone().unwrap_or_else(|| (0..n).collect())
}

/// Summation inversion of a window-form map. Exact whenever the window sums
/// `σ(n) = Σ_m h_m(n)` stay away from zero; with `σ ≡ 1` the reconstruction
/// is vertex independent and the division is skipped entirely.
pub fn invert_summation(
    map: &VertexFrequencyMap,
    windows: &VertexWindowSet,
    basis: &SpectralBasis,
) -> Result<Array1<f64>> {
    let n = basis.n();
    if map.bands() != n || windows.n() != n {
        return Err(Error::DimensionMismatch("map/windows/basis sizes disagree".into()));
    }
    let subset = subset_of(map, n);
    if subset.len() != map.rows() {
        return Err(Error::DimensionMismatch("subset does not match map rows".into()));
    }
    let u = basis.vectors()?;
    let mut sums: Array1<f64> = Array1::zeros(n);
    for nn in 0..n {
        sums[nn] = subset.iter().map(|&m| windows.value(m, nn)).sum::<f64>();
    }
    for (nn, &s) in sums.iter().enumerate() {
        if s.abs() < 1e-12 {
            return Err(Error::ConditionViolation(format!(
                "window sum vanishes at vertex {}; summation inversion undefined",
                nn + 1
            )));
        }
    }
    // column sums over m, then one inverse GFT
    let stacked = map.matrix.sum_axis(ndarray::Axis(0));
    let mut x = u.dot(&stacked);
    let vertex_independent = sums.iter().all(|&s| (s - 1.0).abs() < 1e-10);
    if !vertex_independent {
        for nn in 0..n {
            x[nn] /= sums[nn];
        }
    }
    Ok(x)
}

/// Band-sum inversion `x = Σ_k s_k`, admissible when `Σ_k H_k(λ_p) = 1`.
pub fn invert_band_sum(map: &VertexFrequencyMap, bank: &TransferBank) -> Result<Array1<f64>> {
    if map.axis != FrequencyAxis::BandIndex || map.bands() != bank.band_count() {
        return Err(Error::DimensionMismatch("map does not match the bank".into()));
    }
    let defect = bank.partition_defect();
    if defect > CONDITION_TOL {
        return Err(Error::ConditionViolation(format!(
            "bank is not a partition of unity (max |Σ_k H_k − 1| = {defect:.2e})"
        )));
    }
    Ok(map.matrix.sum_axis(ndarray::Axis(1)))
}

/// Kernel inversion of a window-form map,
/// `x(n) = Σ_{m,k} S(m,k) h_m(n) u_k(n) / Σ_m h_m²(n)`.
pub fn invert_kernel_window(
    map: &VertexFrequencyMap,
    windows: &VertexWindowSet,
    basis: &SpectralBasis,
) -> Result<Array1<f64>> {
    let n = basis.n();
    if map.bands() != n || windows.n() != n {
        return Err(Error::DimensionMismatch("map/windows/basis sizes disagree".into()));
    }
    let subset = subset_of(map, n);
    if subset.len() != map.rows() {
        return Err(Error::DimensionMismatch("subset does not match map rows".into()));
    }
    let u = basis.vectors()?;
    let mut denom: Array1<f64> = Array1::zeros(n);
    for nn in 0..n {
        denom[nn] = subset.iter().map(|&m| windows.value(m, nn).powi(2)).sum::<f64>();
    }
    for (nn, &s) in denom.iter().enumerate() {
        if s < 1e-24 {
            return Err(Error::ConditionViolation(format!(
                "squared window sum vanishes at vertex {}; kernel inversion undefined",
                nn + 1
            )));
        }
    }
    // y_m = IGFT of row m, then weight by h_m and accumulate
    let igft_rows = u.dot(&map.matrix.t()); // (n, |subset|)
    let mut x = Array1::zeros(n);
    for (col, &m) in subset.iter().enumerate() {
        for nn in 0..n {
            x[nn] += igft_rows[(nn, col)] * windows.value(m, nn);
        }
    }
    for nn in 0..n {
        x[nn] /= denom[nn];
    }
    Ok(x)
}

/// Kernel inversion of a band-form map,
/// `x(n) = Σ_{m,k} S(m,k) 𝓗_{m,k}(n) = Σ_k H_k(L) s_k`, admissible for
/// tight banks (`Σ_k H_k²(λ_p) = 1`).
pub fn invert_kernel_bank(
    map: &VertexFrequencyMap,
    bank: &TransferBank,
    basis: &SpectralBasis,
) -> Result<Array1<f64>> {
    let defect = bank.tightness_defect();
    if defect > CONDITION_TOL {
        return Err(Error::ConditionViolation(format!(
            "bank is not tight (max |Σ_k H_k² − 1| = {defect:.2e})"
        )));
    }
    synthesize_bank(map, bank, basis)
}

/// Frame synthesis `Σ_k H_k(L) s_k` without any admissibility check; the
/// building block behind the kernel inversion.
pub fn synthesize_bank(
    map: &VertexFrequencyMap,
    bank: &TransferBank,
    basis: &SpectralBasis,
) -> Result<Array1<f64>> {
    let n = basis.n();
    if map.axis != FrequencyAxis::BandIndex && map.axis != FrequencyAxis::EigenvalueAssigned {
        return Err(Error::InvalidParameter("band-form map expected".into()));
    }
    if map.bands() != bank.band_count() || map.rows() != n {
        return Err(Error::DimensionMismatch("map does not match bank/basis".into()));
    }
    let u = basis.vectors()?;
    let k = bank.band_count();
    let parts = par::map_indices(k, |band| {
        let col = map.matrix.column(band).to_owned();
        let mut spec = u.t().dot(&col);
        for (p, s) in spec.iter_mut().enumerate() {
            *s *= bank.samples()[(band, p)];
        }
        u.dot(&spec)
    });
    let mut x = Array1::zeros(n);
    for part in parts {
        x = x + part;
    }
    Ok(x)
}

/// Vertex-frequency support mask with entries in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct FilterMask {
    values: Array2<f64>,
}

impl FilterMask {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidParameter("mask entries must lie in [0, 1]".into()));
        }
        Ok(Self { values })
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self { values: Array2::from_elem((rows, cols), 1.0) }
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
}

/// Hard-threshold mask: `B(m,k) = 1` iff `|S(m,k)| ≥ t`.
pub fn threshold_mask(map: &VertexFrequencyMap, t: f64) -> FilterMask {
    FilterMask { values: map.matrix.mapv(|v| if v.abs() >= t { 1.0 } else { 0.0 }) }
}

/// Applies a support mask entrywise, `S_f(m,k) = S(m,k) B(m,k)`.
pub fn apply_mask(map: &VertexFrequencyMap, mask: &FilterMask) -> Result<VertexFrequencyMap> {
    if mask.values.dim() != map.matrix.dim() {
        return Err(Error::DimensionMismatch("mask does not match the map".into()));
    }
    Ok(VertexFrequencyMap {
        matrix: &map.matrix * &mask.values,
        axis: map.axis,
        band_centers: map.band_centers.clone(),
        vertex_subset: map.vertex_subset.clone(),
    })
}

/// Masks the map and inverts it with the supplied inverter — the masked and
/// unmasked paths share the code exactly.
pub fn vertex_varying_filter(
    map: &VertexFrequencyMap,
    mask: &FilterMask,
    invert: impl FnOnce(&VertexFrequencyMap) -> Result<Array1<f64>>,
) -> Result<Array1<f64>> {
    invert(&apply_mask(map, mask)?)
}

/// Outcome of a threshold-denoising run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DenoiseReport {
    pub snr_in_db: f64,
    pub snr_out_db: f64,
    pub threshold: f64,
    pub bands: usize,
}

/// Denoises `noisy` by hard-thresholding its band-form LGFT at `t` and
/// inverting through the kernels (tight bank required).
pub fn denoise_with_threshold(
    noisy: &Array1<f64>,
    bank: &TransferBank,
    basis: &SpectralBasis,
    t: f64,
) -> Result<Array1<f64>> {
    let map = lgft_bank(noisy, bank, basis)?;
    let mask = threshold_mask(&map, t);
    vertex_varying_filter(&map, &mask, |m| invert_kernel_bank(m, bank, basis))
}

/// Grid-searches the threshold that maximizes output SNR against a clean
/// reference; the grid spans `[0, max |S|]`, so doing nothing (t = 0) is
/// always a candidate.
pub fn tune_threshold(
    clean: &Array1<f64>,
    noisy: &Array1<f64>,
    bank: &TransferBank,
    basis: &SpectralBasis,
    grid: usize,
) -> Result<(DenoiseReport, Array1<f64>)> {
    if grid < 2 {
        return Err(Error::InvalidParameter("threshold grid needs at least two points".into()));
    }
    let map = lgft_bank(noisy, bank, basis)?;
    let peak = map.matrix.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let candidates: Vec<Result<(f64, f64, Array1<f64>)>> = par::map_indices(grid, |i| {
        let t = peak * i as f64 / (grid - 1) as f64;
        let mask = threshold_mask(&map, t);
        let filtered = vertex_varying_filter(&map, &mask, |m| invert_kernel_bank(m, bank, basis))?;
        Ok((t, snr_db(clean, &filtered), filtered))
    });
    let mut best: Option<(f64, f64, Array1<f64>)> = None;
    for cand in candidates {
        let cand = cand?;
        if best.as_ref().map_or(true, |b| cand.1 > b.1) {
            best = Some(cand);
        }
    }
    let (threshold, snr_out_db, filtered) = best.unwrap();
    Ok((
        DenoiseReport {
            snr_in_db: snr_db(clean, noisy),
            snr_out_db,
            threshold,
            bands: bank.band_count(),
        },
        filtered,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{distance_matrices, Graph, SwissRollParams};
    use crate::lgft::{lgft_window, lgft_window_subset};
    use crate::signal::{add_noise_at_snr, random_signal};
    use crate::spectral::{decompose, BasisKind};
    use crate::windows::{
        heat_window, meyer_bank, raised_cosine_bank, spectral_window_shift, vertex_window,
        VertexWindowShape,
    };

    fn setup(n: usize, seed: u64) -> (Graph, SpectralBasis) {
        let g = Graph::swiss_roll(&SwissRollParams::new(n, 100.0, 5, seed)).unwrap();
        let b = decompose(&g, BasisKind::Laplacian).unwrap();
        (g, b)
    }

    fn max_err(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn summation_inversion_with_delta_windows() {
        let (_, b) = setup(16, 51);
        let x = random_signal(16, 52);
        let delta = VertexWindowSet::from_matrix(Array2::eye(16)).unwrap();
        let map = lgft_window(&x, &delta, &b).unwrap();
        let back = invert_summation(&map, &delta, &b).unwrap();
        assert!(max_err(&back, &x) < 1e-10);
    }

    #[test]
    fn summation_inversion_with_normalized_neighborhood_windows() {
        let (g, b) = setup(20, 53);
        let dm = distance_matrices(&g, 3).unwrap();
        let set = vertex_window(&dm, &VertexWindowShape::Hann { width: 3 })
            .unwrap()
            .normalized_sum_one()
            .unwrap();
        let x = random_signal(20, 54);
        let map = lgft_window(&x, &set, &b).unwrap();
        let back = invert_summation(&map, &set, &b).unwrap();
        assert!(max_err(&back, &x) < 1e-8);
    }

    #[test]
    fn summation_inversion_with_unit_dc_heat_window() {
        // H(1) = C = 1 makes Σ_m h_m(n) = 1 through symmetry, no explicit
        // normalization needed
        let (_, b) = setup(22, 55);
        let set = spectral_window_shift(&heat_window(2.0, 1.0, &b).unwrap(), &b).unwrap();
        let sums = set.vertex_sums();
        for &s in sums.iter() {
            assert!((s - 1.0).abs() < 1e-8, "window sums should already be one, got {s}");
        }
        let x = random_signal(22, 56);
        let map = lgft_window(&x, &set, &b).unwrap();
        let back = invert_summation(&map, &set, &b).unwrap();
        assert!(max_err(&back, &x) < 1e-8);
    }

    #[test]
    fn summation_inversion_detects_vanishing_sums() {
        let (_, b) = setup(6, 57);
        let mut h = Array2::zeros((6, 6));
        h[(0, 0)] = 1.0; // every other vertex sees no window at all
        let set = VertexWindowSet::from_matrix(h).unwrap();
        let x = random_signal(6, 58);
        let map = lgft_window(&x, &set, &b).unwrap();
        assert!(matches!(
            invert_summation(&map, &set, &b),
            Err(Error::ConditionViolation(_))
        ));
    }

    #[test]
    fn band_sum_inversion_for_partition_banks() {
        let (_, b) = setup(24, 59);
        let x = random_signal(24, 60);
        // binomial K = 2: the split recombines exactly
        let bank = crate::windows::binomial_bank(2, &b).unwrap();
        let map = lgft_bank(&x, &bank, &b).unwrap();
        let back = invert_band_sum(&map, &bank).unwrap();
        assert!(max_err(&back, &x) < 1e-9);
        // squared raised cosine K = 15
        let bank = raised_cosine_bank(15, &b, true).unwrap();
        let map = lgft_bank(&x, &bank, &b).unwrap();
        let back = invert_band_sum(&map, &bank).unwrap();
        assert!(max_err(&back, &x) < 1e-8);
        // the plain variant is not a partition of unity: refused
        let plain = raised_cosine_bank(15, &b, false).unwrap();
        let map = lgft_bank(&x, &plain, &b).unwrap();
        assert!(matches!(invert_band_sum(&map, &plain), Err(Error::ConditionViolation(_))));
    }

    #[test]
    fn kernel_inversion_for_tight_banks() {
        let (_, b) = setup(24, 61);
        let x = random_signal(24, 62);
        for bank in [
            raised_cosine_bank(15, &b, false).unwrap(),
            meyer_bank(11, &b).unwrap(),
        ] {
            let map = lgft_bank(&x, &bank, &b).unwrap();
            let back = invert_kernel_bank(&map, &bank, &b).unwrap();
            assert!(max_err(&back, &x) < 1e-8);
        }
        // partition bank is not tight: refused
        let squared = raised_cosine_bank(15, &b, true).unwrap();
        let map = lgft_bank(&x, &squared, &b).unwrap();
        assert!(matches!(
            invert_kernel_bank(&map, &squared, &b),
            Err(Error::ConditionViolation(_))
        ));
    }

    #[test]
    fn kernel_inversion_window_form() {
        let (_, b) = setup(20, 63);
        let x = random_signal(20, 64);
        // delta windows: denominator is identically one
        let delta = VertexWindowSet::from_matrix(Array2::eye(20)).unwrap();
        let map = lgft_window(&x, &delta, &b).unwrap();
        let back = invert_kernel_window(&map, &delta, &b).unwrap();
        assert!(max_err(&back, &x) < 1e-10);
        // heat windows without any normalization: general denominator
        let set = spectral_window_shift(&heat_window(1.5, 1.0, &b).unwrap(), &b).unwrap();
        let map = lgft_window(&x, &set, &b).unwrap();
        let back = invert_kernel_window(&map, &set, &b).unwrap();
        assert!(max_err(&back, &x) < 1e-8);
    }

    #[test]
    fn kernel_inversion_on_a_reduced_vertex_set() {
        let (_, b) = setup(20, 65);
        let x = random_signal(20, 66);
        let subset: Vec<usize> = (0..20).step_by(2).collect();
        let set = spectral_window_shift(&heat_window(1.0, 1.0, &b).unwrap(), &b)
            .unwrap()
            .normalized_sum_squares_one_on(&subset)
            .unwrap();
        // the subset windows now satisfy Σ_{m∈M} h_m²(n) = 1
        for n in 0..20 {
            let s: f64 = subset.iter().map(|&m| set.value(m, n).powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
        let map = lgft_window_subset(&x, &set, &b, &subset).unwrap();
        let back = invert_kernel_window(&map, &set, &b).unwrap();
        assert!(max_err(&back, &x) < 1e-8);
    }

    #[test]
    fn masked_inversion_reference_behavior() {
        let (_, b) = setup(18, 67);
        let x = random_signal(18, 68);
        let bank = meyer_bank(9, &b).unwrap();
        let map = lgft_bank(&x, &bank, &b).unwrap();
        let plain = invert_kernel_bank(&map, &bank, &b).unwrap();
        // all-ones mask is bitwise identical to the plain inversion
        let ones = FilterMask::ones(18, 9);
        let masked =
            vertex_varying_filter(&map, &ones, |m| invert_kernel_bank(m, &bank, &b)).unwrap();
        assert_eq!(plain, masked);
        // all-zeros mask reconstructs the zero signal
        let zeros = FilterMask::new(Array2::zeros((18, 9))).unwrap();
        let silent =
            vertex_varying_filter(&map, &zeros, |m| invert_kernel_bank(m, &bank, &b)).unwrap();
        assert!(silent.iter().all(|&v| v == 0.0));
        // masks outside [0, 1] are rejected
        assert!(FilterMask::new(Array2::from_elem((2, 2), 1.5)).is_err());
    }

    #[test]
    fn tuned_threshold_never_loses_to_doing_nothing() {
        let (_, b) = setup(24, 69);
        let x = b.vectors().unwrap().column(5).mapv(|v| 3.0 * v);
        let noisy = add_noise_at_snr(&x, 5.5, 70);
        let bank = raised_cosine_bank(9, &b, false).unwrap();
        let (report, filtered) = tune_threshold(&x, &noisy, &bank, &b, 60).unwrap();
        assert!((report.snr_in_db - 5.5).abs() < 1e-9);
        assert!(report.snr_out_db >= report.snr_in_db - 1e-12);
        assert_eq!(filtered.len(), 24);
        // single-band content: thresholding should actually help here
        assert!(report.snr_out_db > report.snr_in_db + 1.0, "gain {}", report.snr_out_db - 5.5);
    }
}
