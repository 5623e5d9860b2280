//! Analytic test signals with known spectra, used as ground truth by the
//! test suites and the benchmark harness.

use crate::discretize::{Kappa, Signal};
use crate::spectra::Rect;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error(
        "one-band signal is not ell-periodic: (ell/2pi)(lambda1+lambda2) = {0} is not an integer"
    )]
    NotPeriodic(f64),
    #[error("one-band signal requires lambda1 != lambda2")]
    DegenerateBand,
}

/// A main-spectrum point with its multiplicity (1 = simple, 2 = degenerate
/// double point).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub z: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
enum CaseKind {
    /// `q(x) = q0 e^{i mu x}`, focusing.
    PlaneWave { q0: f64, mu: f64 },
    /// `q(x) = |l1 - l2|/2 * e^{-i (l1 + l2) x}`, defocusing one-band.
    OneBand { lam1: f64, lam2: f64 },
    /// `q(x) = q0 e^{i mu x} e^{-x^2 / sigma}`, defocusing.
    Gaussian { q0: f64, mu: f64, sigma: f64 },
}

/// An analytic signal generator together with whatever exact spectral data
/// the closed form provides.
#[derive(Clone, Debug)]
pub struct AnalyticCase {
    kind: CaseKind,
    ell: f64,
    kappa: Kappa,
}

impl AnalyticCase {
    /// Focusing plane wave `q0 e^{i mu x}` with period `ell`. The main
    /// spectrum is the family
    /// `zeta_n = -mu/2 +- i sqrt(q0^2 - n^2 pi^2 / ell^2)`, `n >= 0`; only
    /// the `n = 0` pair is simple.
    pub fn plane_wave_focusing(q0: f64, mu: f64, ell: f64) -> Self {
        assert!(q0 >= 0.0 && ell > 0.0);
        Self { kind: CaseKind::PlaneWave { q0, mu }, ell, kappa: Kappa::Focusing }
    }

    /// Defocusing one-band signal with simple main spectrum `{lam1, lam2}`.
    /// Periodicity requires `(ell/2pi)(lam1 + lam2)` to be an integer.
    pub fn one_band_defocusing(lam1: f64, lam2: f64, ell: f64) -> Result<Self, OracleError> {
        if lam1 == lam2 {
            return Err(OracleError::DegenerateBand);
        }
        let windings = ell / (2.0 * PI) * (lam1 + lam2);
        if (windings - windings.round()).abs() > 1e-9 {
            return Err(OracleError::NotPeriodic(windings));
        }
        Ok(Self { kind: CaseKind::OneBand { lam1, lam2 }, ell, kappa: Kappa::Defocusing })
    }

    /// Defocusing Gaussian wavepacket `q0 e^{i mu x} e^{-x^2/sigma}` sampled
    /// over `[-ell/2, ell/2)` so the packet sits mid-period; no exact
    /// spectrum is known, validation is cross-method.
    pub fn gaussian_wavepacket(q0: f64, mu: f64, sigma: f64, ell: f64) -> Self {
        assert!(sigma > 0.0 && ell > 0.0);
        Self { kind: CaseKind::Gaussian { q0, mu, sigma }, ell, kappa: Kappa::Defocusing }
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn period(&self) -> f64 {
        self.ell
    }

    pub fn x0(&self) -> f64 {
        match self.kind {
            CaseKind::Gaussian { .. } => -self.ell / 2.0,
            _ => 0.0,
        }
    }

    pub fn description(&self) -> String {
        match self.kind {
            CaseKind::PlaneWave { q0, mu } => {
                format!("focusing plane wave q0={q0}, mu={mu}, ell={}", self.ell)
            }
            CaseKind::OneBand { lam1, lam2 } => {
                format!("defocusing one-band signal, bands {lam1} and {lam2}, ell={}", self.ell)
            }
            CaseKind::Gaussian { q0, mu, sigma } => {
                format!("defocusing Gaussian wavepacket q0={q0}, mu={mu}, sigma={sigma}, ell={}", self.ell)
            }
        }
    }

    /// Closed-form sample value at position `x`.
    pub fn sample(&self, x: f64) -> Complex64 {
        match self.kind {
            CaseKind::PlaneWave { q0, mu } => Complex64::from_polar(q0, mu * x),
            CaseKind::OneBand { lam1, lam2 } => {
                Complex64::from_polar((lam1 - lam2).abs() / 2.0, -(lam1 + lam2) * x)
            }
            CaseKind::Gaussian { q0, mu, sigma } => {
                Complex64::from_polar(q0, mu * x) * (-x * x / sigma).exp()
            }
        }
    }

    /// `D` equidistant samples starting at `x0`.
    pub fn signal(&self, d: usize) -> Signal {
        let eps = self.ell / d as f64;
        let q = (0..d).map(|n| self.sample(self.x0() + n as f64 * eps)).collect();
        Signal::new(q, self.ell, self.x0(), self.kappa).unwrap()
    }

    /// The simple (non-degenerate) main spectrum, when known.
    pub fn exact_simple_main(&self) -> Option<Vec<Complex64>> {
        match self.kind {
            CaseKind::PlaneWave { q0, mu } => Some(vec![
                Complex64::new(-mu / 2.0, q0),
                Complex64::new(-mu / 2.0, -q0),
            ]),
            CaseKind::OneBand { lam1, lam2 } => Some(vec![
                Complex64::new(lam1.min(lam2), 0.0),
                Complex64::new(lam1.max(lam2), 0.0),
            ]),
            CaseKind::Gaussian { .. } => None,
        }
    }

    /// Every known main-spectrum point (simple and degenerate) inside the
    /// rectangle, enumerated with one index of margin beyond the first
    /// family member that leaves it. `None` when the case has no closed-form
    /// spectrum.
    pub fn exact_main_in(&self, rect: &Rect) -> Option<Vec<SpectralPoint>> {
        match self.kind {
            CaseKind::Gaussian { .. } => None,
            CaseKind::OneBand { lam1, lam2 } => {
                let mut out: Vec<SpectralPoint> = [lam1, lam2]
                    .iter()
                    .map(|&l| SpectralPoint { z: Complex64::new(l, 0.0), multiplicity: 1 })
                    .filter(|p| rect.contains(p.z))
                    .collect();
                // The degenerate family: (z - (l1+l2)/2)^2 = A^2 + k^2 pi^2/ell^2
                // with A = |l1 - l2| / 2, k >= 1, doubles on the real axis.
                let center = (lam1 + lam2) / 2.0;
                let amp2 = (lam1 - lam2) * (lam1 - lam2) / 4.0;
                let mut misses = 0usize;
                let mut k = 1usize;
                while misses < 2 && k < 100_000 {
                    let off = (amp2 + (k as f64 * PI / self.ell).powi(2)).sqrt();
                    let pair = [center - off, center + off];
                    let mut hit = false;
                    for z in pair {
                        let p = Complex64::new(z, 0.0);
                        if rect.contains(p) {
                            out.push(SpectralPoint { z: p, multiplicity: 2 });
                            hit = true;
                        }
                    }
                    if hit {
                        misses = 0;
                    } else {
                        misses += 1;
                    }
                    k += 1;
                }
                Some(out)
            }
            CaseKind::PlaneWave { q0, mu } => {
                let mut out = Vec::new();
                let mut misses = 0usize;
                let mut n = 0usize;
                while misses < 2 && n < 100_000 {
                    // zeta_n = -mu/2 +- i sqrt(q0^2 - n^2 pi^2 / ell^2);
                    // negative radicand turns the pair real.
                    let rad = q0 * q0 - (n as f64 * PI / self.ell).powi(2);
                    let pair = if rad >= 0.0 {
                        [
                            Complex64::new(-mu / 2.0, rad.sqrt()),
                            Complex64::new(-mu / 2.0, -rad.sqrt()),
                        ]
                    } else {
                        [
                            Complex64::new(-mu / 2.0 + (-rad).sqrt(), 0.0),
                            Complex64::new(-mu / 2.0 - (-rad).sqrt(), 0.0),
                        ]
                    };
                    let multiplicity = if n == 0 { 1 } else { 2 };
                    let mut hit = false;
                    for z in pair {
                        if rect.contains(z) {
                            out.push(SpectralPoint { z, multiplicity });
                            hit = true;
                        }
                    }
                    if hit {
                        misses = 0;
                    } else {
                        misses += 1;
                    }
                    n += 1;
                }
                Some(out)
            }
        }
    }

    /// Closed-form Floquet discriminant, where one exists (plane wave with
    /// `mu = 0`: `Delta(z) = cos(ell sqrt(z^2 + q0^2))`).
    pub fn discriminant(&self, z: Complex64) -> Option<Complex64> {
        match self.kind {
            CaseKind::PlaneWave { q0, mu: 0.0 } => {
                Some(((z * z + q0 * q0).sqrt() * self.ell).cos())
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{build_monodromy, default_transform, Scheme};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plane_wave_simple_points() {
        let case = AnalyticCase::plane_wave_focusing(3.0, 3.0, 2.0 * PI);
        let simple = case.exact_simple_main().unwrap();
        assert_eq!(simple, vec![c(-1.5, 3.0), c(-1.5, -3.0)]);
    }

    #[test]
    fn plane_wave_family_in_rectangle() {
        // q0 = 3, ell = 2pi: zeta_n = -1.5 + i sqrt(9 - n^2/4); Im >= 1
        // keeps n = 0..5.
        let case = AnalyticCase::plane_wave_focusing(3.0, 3.0, 2.0 * PI);
        let rect = Rect::new(c(-5.0, 1.0), c(5.0, 5.0));
        let family = case.exact_main_in(&rect).unwrap();
        assert_eq!(family.len(), 6);
        assert_eq!(family.iter().filter(|p| p.multiplicity == 1).count(), 1);
        for p in &family {
            assert!((p.z.re + 1.5).abs() < 1e-12);
            assert!(p.z.im >= 1.0);
        }
    }

    #[test]
    fn plane_wave_zero_amplitude_reduces_to_free_case() {
        let case = AnalyticCase::plane_wave_focusing(0.0, 0.0, 2.0 * PI);
        let sig = case.signal(8);
        assert!(sig.q().iter().all(|v| v.norm() == 0.0));
        // Delta(z) = cos(ell z): the (anti-)periodic points are the
        // half-integer grid, all degenerate except none (q0 = 0 makes the
        // zeta_0 pair collapse onto the real grid too).
        let delta = case.discriminant(c(0.5, 0.0)).unwrap();
        assert!((delta - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn plane_wave_discriminant_value() {
        let case = AnalyticCase::plane_wave_focusing(3.0, 0.0, 2.0);
        let delta = case.discriminant(c(0.0, 0.0)).unwrap();
        assert!((delta - (3.0f64 * 2.0).cos()).norm() < 1e-12);
    }

    #[test]
    fn plane_wave_family_is_conjugation_closed() {
        let case = AnalyticCase::plane_wave_focusing(2.0, 1.0, PI);
        let rect = Rect::new(c(-8.0, -8.0), c(8.0, 8.0));
        let family = case.exact_main_in(&rect).unwrap();
        for p in &family {
            assert!(
                family.iter().any(|q| (q.z - p.z.conj()).norm() < 1e-12),
                "no conjugate of {}",
                p.z
            );
        }
    }

    #[test]
    fn one_band_matches_reference_signal() {
        // lambda_1 = -3, lambda_2 = 0, ell = 2pi is q(x) = 1.5 e^{3ix}.
        let case = AnalyticCase::one_band_defocusing(-3.0, 0.0, 2.0 * PI).unwrap();
        let sig = case.signal(16);
        for n in 0..16 {
            let x = sig.sample_point(n);
            let want = Complex64::from_polar(1.5, 3.0 * x);
            assert!((sig.q_at(n) - want).norm() < 1e-12);
        }
        assert_eq!(
            case.exact_simple_main().unwrap(),
            vec![c(-3.0, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn one_band_amplitude_constraint() {
        // ((l1 - l2)/2)^2 = -kappa |q|^2 holds exactly for kappa = -1.
        let case = AnalyticCase::one_band_defocusing(-1.0, 1.0, PI).unwrap();
        let q0 = case.sample(0.3);
        assert!((q0.norm() - 1.0).abs() < 1e-12);
        // lam1 + lam2 = 0: constant phase.
        assert!((case.sample(0.7) - case.sample(0.0)).norm() < 1e-12);
    }

    #[test]
    fn one_band_periodicity_precondition() {
        assert_eq!(
            AnalyticCase::one_band_defocusing(-3.0, 0.0, 1.0).unwrap_err(),
            OracleError::NotPeriodic(-3.0 / (2.0 * PI))
        );
        assert_eq!(
            AnalyticCase::one_band_defocusing(1.0, 1.0, PI).unwrap_err(),
            OracleError::DegenerateBand
        );
    }

    #[test]
    fn gaussian_wavepacket_samples() {
        // The reference parameters: q0 = 1.9, mu = 1, sigma = 2, ell = 10.
        let case = AnalyticCase::gaussian_wavepacket(1.9, 1.0, 2.0, 10.0);
        assert!((case.sample(0.0).norm() - 1.9).abs() < 1e-12);
        // At the period boundary the packet has decayed to ~7.05e-6.
        let edge = case.sample(5.0).norm();
        assert!((edge - 1.9 * (-12.5f64).exp()).abs() < 1e-15);
        assert!(edge < 1e-5);
        // Even magnitude profile: |q(x_n)| = |q(x_{D-n})| for x0 = -ell/2.
        let sig = case.signal(64);
        for n in 1..64 {
            let a = sig.q_at(n).norm();
            let b = sig.q_at(64 - n).norm();
            assert!((a - b).abs() <= 1e-12 * a.max(b).max(1e-300));
        }
    }

    #[test]
    fn discretized_discriminant_converges_to_closed_form() {
        // |D_hat - D| <= C / D with C bounded across D. Measured, the
        // normalized AL scheme on a constant-amplitude signal is actually
        // second order (C itself halves per doubling), so the first-order
        // bound holds with margin; assert at-least-linear decay and a
        // non-increasing constant.
        let case = AnalyticCase::plane_wave_focusing(1.0, 0.0, 2.0 * PI);
        let probes: Vec<Complex64> = (0..20).map(|k| c(-2.0 + 0.21 * k as f64, 0.0)).collect();
        let err = |d: usize| -> f64 {
            let sig = case.signal(d);
            let scheme = Scheme::ablowitz_ladik();
            let rm = build_monodromy(&sig, scheme, default_transform(scheme, sig.step())).unwrap();
            probes
                .iter()
                .map(|&z| (rm.delta_at_z(z) - case.discriminant(z).unwrap()).norm())
                .fold(0.0, f64::max)
        };
        let (e256, e512, e1024) = (err(256), err(512), err(1024));
        assert!(e512 <= 0.55 * e256, "sub-linear decay: {e256} -> {e512}");
        assert!(e1024 <= 0.55 * e512, "sub-linear decay: {e512} -> {e1024}");
        let c = e256 * 256.0;
        assert!(e512 * 512.0 <= c && e1024 * 1024.0 <= c, "constant grows beyond C(256) = {c}");
    }
}
