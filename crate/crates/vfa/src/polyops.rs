//! Chebyshev polynomial machinery: fitting spectral transfer functions and
//! applying the fitted polynomials to signals through the Laplacian, with no
//! eigendecomposition on the application path.
//!
//! A function `H(λ)` on `[0, λmax]` is expanded as
//! `P(λ) = c_0/2 + Σ_{m≥1} c_m T_m(2λ/λmax − 1)` with coefficients from
//! Gauss–Chebyshev quadrature, which makes the `1/√(1−z²)` weight of the
//! inner product exact. Application uses the vector three-term recurrence
//! `y_m = 2 L̄ y_{m−1} − y_{m−2}`, `L̄ = 2L/λmax − I`, at `O(M · nnz(L))`
//! cost; dense powers of `L` are never formed.
//!
//! When only an estimated spectral radius is available, fit with
//! [`cheb_fit_margin`] and a small inflation (1.01 is plenty): the
//! approximation is worthless outside its fitted interval, and
//! [`cheb_apply`] guards against that with a certified Rayleigh lower bound.

use ndarray::Array1;

use crate::graph::{CsrMatrix, Graph};
use crate::{Error, Result};

/// Truncated Chebyshev expansion of a transfer function on `[0, λmax]`.
///
/// `coefficients[0]` is `c_0` (entering the sum as `c_0/2`), so an expansion
/// with `M` coefficients has polynomial order `M − 1`.
#[derive(Debug, Clone)]
pub struct ChebyshevApprox {
    coefficients: Vec<f64>,
    lambda_max: f64,
}

/// Fits `M` Chebyshev coefficients to `h` over `[0, λmax]` using
/// Gauss–Chebyshev quadrature with `max(4M, 256)` nodes.
pub fn cheb_fit(h: impl Fn(f64) -> f64, m: usize, lambda_max: f64) -> Result<ChebyshevApprox> {
    cheb_fit_margin(h, m, lambda_max, 1.0)
}

/// [`cheb_fit`] with the interval inflated by `margin` (use ~1.01 when
/// `λmax` is an estimate rather than the exact spectral radius).
pub fn cheb_fit_margin(
    h: impl Fn(f64) -> f64,
    m: usize,
    lambda_max: f64,
    margin: f64,
) -> Result<ChebyshevApprox> {
    if m < 1 {
        return Err(Error::InvalidParameter("need at least one coefficient".into()));
    }
    if !(lambda_max > 0.0) || !(margin >= 1.0) {
        return Err(Error::InvalidParameter("lambda_max must be positive, margin >= 1".into()));
    }
    let lambda_max = lambda_max * margin;
    let q = (4 * m).max(256);
    let mut samples = Vec::with_capacity(q);
    let mut nodes = Vec::with_capacity(q);
    for j in 1..=q {
        let theta = std::f64::consts::PI * (j as f64 - 0.5) / q as f64;
        let z = theta.cos();
        let value = h((z + 1.0) * lambda_max / 2.0);
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "transfer function not finite at lambda = {}",
                (z + 1.0) * lambda_max / 2.0
            )));
        }
        nodes.push(theta);
        samples.push(value);
    }
    let coefficients = (0..m)
        .map(|order| {
            2.0 / q as f64
                * nodes
                    .iter()
                    .zip(&samples)
                    .map(|(&theta, &f)| f * (order as f64 * theta).cos())
                    .sum::<f64>()
        })
        .collect();
    Ok(ChebyshevApprox { coefficients, lambda_max })
}

impl ChebyshevApprox {
    pub fn from_coefficients(coefficients: Vec<f64>, lambda_max: f64) -> Result<Self> {
        if coefficients.is_empty() || !(lambda_max > 0.0) {
            return Err(Error::InvalidParameter("empty expansion or bad interval".into()));
        }
        Ok(Self { coefficients, lambda_max })
    }

    /// Number of coefficients `M`; the polynomial order is `M − 1`.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Scalar evaluation through the three-term recurrence.
    pub fn evaluate(&self, lambda: f64) -> f64 {
        let z = 2.0 * lambda / self.lambda_max - 1.0;
        let mut acc = self.coefficients[0] / 2.0;
        let mut t_prev = 1.0;
        let mut t_cur = z;
        for (m, &c) in self.coefficients.iter().enumerate().skip(1) {
            if m > 1 {
                let t_next = 2.0 * z * t_cur - t_prev;
                t_prev = t_cur;
                t_cur = t_next;
            }
            acc += c * t_cur;
        }
        acc
    }

    /// Applies `P(L) x` with the vector recurrence on a sparse Laplacian.
    pub fn apply(&self, lap: &CsrMatrix, x: &Array1<f64>) -> Result<Array1<f64>> {
        if lap.n() != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{} but signal has {} entries",
                lap.n(),
                lap.n(),
                x.len()
            )));
        }
        let radius = rayleigh_radius_bound(lap);
        if radius > self.lambda_max * (1.0 + 1e-9) {
            return Err(Error::ConditionViolation(format!(
                "spectral radius is at least {radius:.6} but the fit covers [0, {:.6}]",
                self.lambda_max
            )));
        }
        // y_m = 2 Lbar y_{m-1} - y_{m-2}, Lbar = 2 L / lambda_max - I
        let scale = 2.0 / self.lambda_max;
        let lbar = |v: &Array1<f64>| -> Array1<f64> { lap.matvec(v) * scale - v };
        let mut acc = x * (self.coefficients[0] / 2.0);
        if self.coefficients.len() == 1 {
            return Ok(acc);
        }
        let mut y_prev = x.clone();
        let mut y_cur = lbar(x);
        acc = acc + &y_cur * self.coefficients[1];
        for &c in self.coefficients.iter().skip(2) {
            let y_next = lbar(&y_cur) * 2.0 - &y_prev;
            acc = acc + &y_next * c;
            y_prev = y_cur;
            y_cur = y_next;
        }
        Ok(acc)
    }

    /// Expands the approximation into monomial coefficients `h_p` of
    /// `P(λ) = Σ_p h_p λ^p`. Ill-conditioned past order ~30, hence the cap.
    pub fn to_monomial(&self) -> Result<Vec<f64>> {
        let m = self.coefficients.len();
        if m > 30 {
            return Err(Error::InvalidParameter(format!(
                "monomial conversion is unstable for order {} (cap is 29)",
                m - 1
            )));
        }
        // T_m as monomials in z, then z = 2λ/λmax − 1 folded in.
        let mut t_polys: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
        for order in 2..m.max(2) {
            let mut next = vec![0.0; order + 1];
            for (i, &v) in t_polys[order - 1].iter().enumerate() {
                next[i + 1] += 2.0 * v;
            }
            for (i, &v) in t_polys[order - 2].iter().enumerate() {
                next[i] -= v;
            }
            t_polys.push(next);
        }
        let base = [-1.0, 2.0 / self.lambda_max];
        let mut z_powers: Vec<Vec<f64>> = vec![vec![1.0]];
        for _ in 1..m {
            let prev = z_powers.last().unwrap();
            let mut next = vec![0.0; prev.len() + 1];
            for (i, &v) in prev.iter().enumerate() {
                next[i] += v * base[0];
                next[i + 1] += v * base[1];
            }
            z_powers.push(next);
        }
        let mut out = vec![0.0; m];
        for (order, &c) in self.coefficients.iter().enumerate() {
            let weight = if order == 0 { c / 2.0 } else { c };
            for (zp, &tv) in t_polys[order].iter().enumerate() {
                for (i, &zv) in z_powers[zp].iter().enumerate() {
                    out[i] += weight * tv * zv;
                }
            }
        }
        Ok(out)
    }

    /// Inverse of [`Self::to_monomial`]: exact change of basis from monomial
    /// coefficients on the same interval.
    pub fn from_monomial(h: &[f64], lambda_max: f64) -> Result<Self> {
        if h.is_empty() || h.len() > 30 {
            return Err(Error::InvalidParameter("monomial order out of range".into()));
        }
        if !(lambda_max > 0.0) {
            return Err(Error::InvalidParameter("lambda_max must be positive".into()));
        }
        let m = h.len();
        // λ^p as a Chebyshev series in z with λ = (z + 1) λmax / 2, built by
        // repeated multiplication with λ. In the Chebyshev basis
        // z T_m = (T_{m+1} + T_{|m−1|}) / 2.
        let mul_z = |c: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; c.len() + 1];
            for (mi, &v) in c.iter().enumerate() {
                if mi == 0 {
                    out[1] += v;
                } else {
                    out[mi + 1] += 0.5 * v;
                    out[mi - 1] += 0.5 * v;
                }
            }
            out
        };
        // represent coefficients with c_0 stored *unhalved* here; convert at the end
        let mut lam_pow: Vec<Vec<f64>> = vec![vec![1.0]];
        for _ in 1..m {
            let prev = lam_pow.last().unwrap();
            // λ · series = λmax/2 · (z · series + series)
            let zs = mul_z(prev);
            let mut next = vec![0.0; zs.len()];
            for (i, &v) in zs.iter().enumerate() {
                next[i] += v * lambda_max / 2.0;
            }
            for (i, &v) in prev.iter().enumerate() {
                next[i] += v * lambda_max / 2.0;
            }
            lam_pow.push(next);
        }
        let mut coeff = vec![0.0; m];
        for (p, &hv) in h.iter().enumerate() {
            for (mi, &cv) in lam_pow[p].iter().enumerate() {
                coeff[mi] += hv * cv;
            }
        }
        coeff[0] *= 2.0; // adopt the c_0/2 convention
        Ok(Self { coefficients: coeff, lambda_max })
    }
}

/// Convenience wrapper: `P(L) x` on a graph's Laplacian.
pub fn cheb_apply(approx: &ChebyshevApprox, g: &Graph, x: &Array1<f64>) -> Result<Array1<f64>> {
    approx.apply(&g.sparse_laplacian()?, x)
}

/// Applies monomial coefficients directly: `Σ_p h_p L^p x` by iterated
/// matvecs (reference route for cross-checking the recurrence).
pub fn monomial_apply(h: &[f64], lap: &CsrMatrix, x: &Array1<f64>) -> Result<Array1<f64>> {
    if lap.n() != x.len() {
        return Err(Error::DimensionMismatch("operator/signal size mismatch".into()));
    }
    let mut acc = x * h[0];
    let mut power = x.clone();
    for &c in h.iter().skip(1) {
        power = lap.matvec(&power);
        acc = acc + &power * c;
    }
    Ok(acc)
}

/// Certified lower bound on the spectral radius of a symmetric PSD operator:
/// the Rayleigh quotient of the power-iteration vector never exceeds the
/// largest eigenvalue.
pub fn rayleigh_radius_bound(lap: &CsrMatrix) -> f64 {
    let n = lap.n();
    let mut v = Array1::from_iter((0..n).map(|i| 1.0 + 0.37 * ((i as f64 * 1.7).sin())));
    let mut rayleigh = 0.0;
    for _ in 0..40 {
        let w = lap.matvec(&v);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        rayleigh = v.dot(&w) / v.dot(&v);
        v = w / norm;
    }
    rayleigh.max(0.0)
}

/// Directly evaluates `P(L) x` through a spectral basis, `U P(Λ) Uᵀ x`.
/// Test-side counterpart of the recurrence route.
pub fn apply_via_spectrum(
    approx: &ChebyshevApprox,
    basis: &crate::spectral::SpectralBasis,
    x: &Array1<f64>,
) -> Result<Array1<f64>> {
    let u = basis.vectors()?;
    let mut spec = u.t().dot(x);
    for (s, &l) in spec.iter_mut().zip(basis.eigenvalues()) {
        *s *= approx.evaluate(l);
    }
    Ok(u.dot(&spec))
}

/// Chebyshev coefficient table exported per band: rows `(k, m, c_{k,m})`.
pub fn bank_coefficients(
    bank: &crate::windows::TransferBank,
    m: usize,
) -> Result<Vec<ChebyshevApprox>> {
    let lmax = bank.lambda_max();
    (0..bank.band_count())
        .map(|band| cheb_fit(|l| bank.evaluate(band, l), m, lmax))
        .collect()
}

/// Published 6-coefficient monomial table for a K = 10 raised-cosine bank
/// (`s_k = Σ_p h_{p,k} L^p x`); kept as a fixture for the dual-route
/// equivalence checks. Probing λmax by refit puts the source interval near
/// 7.5 but no candidate reproduces the coefficients within 5%, so the rows
/// are not used as a golden reference.
pub const PUBLISHED_BANK_TABLE: [[f64; 6]; 10] = [
    [1.079, -1.867, 1.101, -0.2885, 0.03458, -0.001548],
    [-0.053, 1.983, -1.798, 0.5744, -0.07722, 0.003723],
    [-0.134, 0.763, -0.310, 0.0222, 0.00422, -0.000460],
    [0.050, -0.608, 0.900, -0.3551, 0.05348, -0.002762],
    [0.096, -0.726, 0.768, -0.2475, 0.03172, -0.001424],
    [0.016, -0.013, -0.128, 0.1047, -0.02231, 0.001424],
    [-0.073, 0.616, -0.779, 0.3228, -0.05135, 0.002762],
    [-0.051, 0.351, -0.356, 0.1146, -0.01323, 0.000460],
    [0.084, -0.687, 0.871, -0.3751, 0.06409, -0.003723],
    [-0.021, 0.183, -0.251, 0.1172, -0.02196, 0.001419],
];

/// The interval deduced for [`PUBLISHED_BANK_TABLE`] from the band layout.
pub const PUBLISHED_BANK_LAMBDA_MAX: f64 = 7.5;
