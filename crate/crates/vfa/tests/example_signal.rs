//! Qualitative behavior of the pinned three-component experiment beyond the
//! acceptance criteria: where the energy distributions and wavelet bands
//! place the components.

mod common;

use common::{INSTANCE, SEGMENTS};
use vfa::energy::{ideal_distribution, marginals};
use vfa::spectral::local_smoothness;
use vfa::wavelet::{wavelet_transform, WaveletMode};

#[test]
fn ideal_distribution_places_mass_on_the_segment_eigenvalues() {
    let inst = &*INSTANCE;
    let e = ideal_distribution(&inst.signal, &inst.graph, &inst.basis).unwrap();
    let ls = local_smoothness(&inst.signal, &inst.graph).unwrap();
    for &(from, to, k) in &SEGMENTS {
        for m in common::interior_vertices(&inst.graph, from, to) {
            if !ls.mask[m] {
                continue;
            }
            // the row's single entry sits exactly at the segment's column
            for j in 0..inst.basis.n() {
                if j == k - 1 {
                    let expect = inst.signal[m] * inst.signal[m];
                    assert!((e.matrix[(m, j)] - expect).abs() < 1e-12);
                } else {
                    assert_eq!(e.matrix[(m, j)], 0.0, "stray mass at ({m}, {j})");
                }
            }
        }
    }
    // masked rows stay empty, so the total energy is at most the signal energy
    let (vertex, _) = marginals(&e);
    let energy = inst.signal.dot(&inst.signal);
    assert!(vertex.sum() <= energy + 1e-10);
}

#[test]
fn coarse_wavelet_bands_carry_the_low_frequency_segment() {
    let inst = &*INSTANCE;
    let w =
        wavelet_transform(&inst.signal, &inst.graph, &inst.basis, 2.0, 11, WaveletMode::Spectral)
            .unwrap();
    // energy of each wavelet column restricted to the interior of V3, the
    // segment carrying the k = 6 (low-frequency) component
    let (from, to, k) = SEGMENTS[2];
    let interior = common::interior_vertices(&inst.graph, from, to);
    let lam_low = inst.basis.eigenvalues()[k - 1];
    let lam_mid = inst.basis.eigenvalues()[SEGMENTS[1].2 - 1];
    let mut best = (0usize, 0.0f64);
    let mut coarse = 0.0f64;
    let mut fine = 0.0f64;
    let cutoff = 4.0 * lam_low; // M² times the component eigenvalue
    for band in 0..w.bank.band_count() {
        let energy: f64 = interior.iter().map(|&m| w.map.matrix[(m, band)].powi(2)).sum();
        if energy > best.1 {
            best = (band, energy);
        }
        if w.bank.centers()[band] <= cutoff {
            coarse += energy;
        } else {
            fine += energy;
        }
    }
    let center = w.bank.centers()[best.0];
    assert!(
        center < lam_mid,
        "V3 response should peak in a coarse band: center {center:.3} vs mid-component {lam_mid:.3}"
    );
    // the truncated low-frequency chunk smears over the coarse scales, but
    // stays out of the fine ones
    assert!(
        coarse > 5.0 * fine,
        "coarse-band energy {coarse:.4} should dominate fine-band energy {fine:.4}"
    );
}
