//! Batch evaluation of polynomials on the unit circle.
//!
//! Two fast paths are provided. Equispaced angle grids go through a
//! Bluestein chirp-z transform, which reduces the evaluation to one FFT
//! convolution. Arbitrary angles go through a gridding NFFT: the
//! deconvolved coefficients are pushed onto a 2x-oversampled uniform grid
//! with one FFT and each target is then gathered through a truncated
//! Gaussian window of half-width 8. A direct per-point Horner fallback is
//! kept as the slow exact reference.

use super::fft::fft_in_place;
use super::{horner, pow2, PolyError, ScaledPolynomial};
use num_complex::Complex64;
use std::f64::consts::PI;

const CZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Gaussian gridding parameters: oversampling 2, kernel half-width 8.
const GRID_HALF_WIDTH: usize = 8;
/// Sharpness multiplier on the truncation/aliasing balance point, tuned on
/// random polynomials against the Horner reference.
const TAU_FACTOR: f64 = 1.0;

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Evaluate `p` at `e^{i(theta0 + j*dtheta)}`, `j = 0..m-1`, via Bluestein's
/// chirp-z factorization in `O((m + deg) log(m + deg))`.
pub fn eval_unit_circle_equispaced(
    p: &ScaledPolynomial,
    theta0: f64,
    dtheta: f64,
    m: usize,
) -> Vec<Complex64> {
    if m == 0 {
        return Vec::new();
    }
    let Some(deg) = p.degree() else {
        return vec![CZERO; m];
    };
    let scale = pow2(p.scale_exp());
    if deg == 0 {
        return vec![p.coeff(0) * scale; m];
    }
    let coeffs = &p.coeffs()[..=deg];

    // f_j = sum_k c_k e^{ik theta0} e^{ijk dtheta}; with
    // jk = (j^2 + k^2 - (j-k)^2)/2 this is a chirp-modulated convolution.
    let half = 0.5 * dtheta;
    let chirp = |n: usize| {
        let x = n as f64;
        cis(half * x * x)
    };

    let len = (m + 2 * deg + 1).next_power_of_two();
    let mut a = vec![CZERO; len];
    for (k, &ck) in coeffs.iter().enumerate() {
        a[k] = ck * cis(theta0 * k as f64) * chirp(k);
    }
    let mut b = vec![CZERO; len];
    #[allow(clippy::needless_range_loop)]
    for j in 0..m {
        b[j] = chirp(j).conj();
    }
    for k in 1..=deg {
        b[len - k] = chirp(k).conj();
    }
    fft_in_place(&mut a, false);
    fft_in_place(&mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft_in_place(&mut a, true);

    (0..m).map(|j| a[j] * chirp(j) * scale).collect()
}

/// Per-point Horner reference for unit-circle evaluation (slow, exact path).
pub fn eval_unit_circle_direct(p: &ScaledPolynomial, angles: &[f64]) -> Vec<Complex64> {
    let scale = pow2(p.scale_exp());
    let Some(deg) = p.degree() else {
        return vec![CZERO; angles.len()];
    };
    let coeffs = &p.coeffs()[..=deg];
    angles
        .iter()
        .map(|&t| horner(coeffs, cis(t)) * scale)
        .collect()
}

/// Cached gridding-NFFT plan for one polynomial; evaluation at a batch of
/// arbitrary unit-circle angles costs `O(batch)` after the one-time
/// `O(deg log deg)` setup.
#[derive(Clone, Debug)]
pub struct UnitCircleEvaluator {
    fine: Vec<Complex64>,
    grid_len: usize,
    tau: f64,
    center: f64,
    scale: f64,
    constant: Option<Complex64>,
}

impl UnitCircleEvaluator {
    pub fn new(p: &ScaledPolynomial) -> Self {
        let scale = pow2(p.scale_exp());
        let deg = match p.degree() {
            None => {
                return Self {
                    fine: Vec::new(),
                    grid_len: 0,
                    tau: 1.0,
                    center: 0.0,
                    scale,
                    constant: Some(CZERO),
                }
            }
            Some(0) => {
                return Self {
                    fine: Vec::new(),
                    grid_len: 0,
                    tau: 1.0,
                    center: 0.0,
                    scale,
                    constant: Some(p.coeff(0) * scale),
                }
            }
            Some(d) => d,
        };
        let coeffs = &p.coeffs()[..=deg];
        let n = deg + 1;
        // Nominal oversampling 2, rounded up to a power of two; when the
        // rounding leaves less than 3x headroom the Gaussian window of
        // half-width 8 cannot reach the 1e-9 accuracy target, so the grid is
        // doubled once more.
        let mut grid_len = (2 * n).next_power_of_two().max(32);
        if (grid_len as f64) < 3.0 * n as f64 {
            grid_len *= 2;
        }
        let sigma = grid_len as f64 / n as f64;
        let m_r = grid_len as f64;
        // Balance window truncation e^{-(hw*cell)^2/4tau} against spectral
        // aliasing e^{-tau*m_r^2*(1-1/sigma)}.
        let tau =
            TAU_FACTOR * PI * GRID_HALF_WIDTH as f64 / (m_r * m_r * (1.0 - 1.0 / sigma).sqrt());

        // Spectrum is centered so the shifted frequencies fit in
        // [-grid_len/2, grid_len/2); the removed phase e^{i c theta} is
        // reapplied at gather time.
        let center = (deg / 2) as f64;
        let mut buf = vec![CZERO; grid_len];
        for (k, &ck) in coeffs.iter().enumerate() {
            let shifted = k as f64 - center;
            // Deconvolve by the Gaussian transfer function e^{-m^2 tau}.
            let g = ck * (shifted * shifted * tau).exp();
            let idx = (k as i64 - center as i64).rem_euclid(grid_len as i64) as usize;
            buf[idx] = g;
        }
        // u_l = (1/grid_len) sum_m G_m e^{2 pi i m l / grid_len}.
        fft_in_place(&mut buf, true);

        Self {
            fine: buf,
            grid_len,
            tau,
            center,
            scale,
            constant: None,
        }
    }

    /// Evaluate at `e^{i theta}` for every angle in the batch.
    pub fn eval(&self, angles: &[f64]) -> Vec<Complex64> {
        if let Some(c0) = self.constant {
            return vec![c0; angles.len()];
        }
        let m_r = self.grid_len as f64;
        let cell = 2.0 * PI / m_r;
        // The spread coefficients were deconvolved by e^{-m^2 tau} alone; the
        // matching gather kernel is sqrt(pi/tau) * e^{-x^2/4tau}.
        let kernel_norm = (PI / self.tau).sqrt();
        angles
            .iter()
            .map(|&theta| {
                let x = theta / cell;
                let l0 = x.round() as i64;
                let mut acc = CZERO;
                for dl in -(GRID_HALF_WIDTH as i64)..=(GRID_HALF_WIDTH as i64) {
                    let l = l0 + dl;
                    let dist = (x - l as f64) * cell;
                    let w = (-dist * dist / (4.0 * self.tau)).exp();
                    let idx = l.rem_euclid(self.grid_len as i64) as usize;
                    acc += self.fine[idx] * w;
                }
                acc * kernel_norm * cis(self.center * theta) * self.scale
            })
            .collect()
    }
}

/// Evaluate `p(e^{i theta_j})` for a batch of angles.
///
/// Equispaced grids (detected up to a `1e-12` deviation) are routed through
/// the chirp-z path; everything else goes through the gridding NFFT. Both
/// paths target a relative max-norm error of at most `1e-9` against the
/// direct Horner reference.
pub fn eval_unit_circle_batch(p: &ScaledPolynomial, angles: &[f64]) -> Vec<Complex64> {
    match angles.len() {
        0 => return Vec::new(),
        1 => return eval_unit_circle_direct(p, angles),
        _ => {}
    }
    let m = angles.len();
    let theta0 = angles[0];
    let dtheta = (angles[m - 1] - theta0) / (m - 1) as f64;
    let equispaced = angles
        .iter()
        .enumerate()
        .all(|(j, &t)| (t - (theta0 + j as f64 * dtheta)).abs() <= 1e-12 * (1.0 + t.abs()));
    if equispaced {
        eval_unit_circle_equispaced(p, theta0, dtheta, m)
    } else {
        UnitCircleEvaluator::new(p).eval(angles)
    }
}

/// Point-based wrapper around [`eval_unit_circle_batch`]: rejects points
/// farther than `1e-12` from the unit circle.
pub fn eval_unit_circle_points(
    p: &ScaledPolynomial,
    points: &[Complex64],
) -> Result<Vec<Complex64>, PolyError> {
    let mut angles = Vec::with_capacity(points.len());
    for (index, w) in points.iter().enumerate() {
        let deviation = (w.norm() - 1.0).abs();
        if deviation > 1e-12 {
            return Err(PolyError::PointOffUnitCircle { index, deviation });
        }
        angles.push(w.arg());
    }
    Ok(eval_unit_circle_batch(p, &angles))
}
