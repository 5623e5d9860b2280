//! Discretizations of the Zakharov-Shabat / AKNS scattering problem.
//!
//! A sampled periodic signal is turned into a rational approximation
//! `M(z) = 2^(W_S - W_d) * S(w) / d(w)`, `w = phi^{-1}(z)`, of the monodromy
//! matrix by one of three one-step schemes (forward Euler, Crank-Nicolson,
//! Ablowitz-Ladik). Each scheme emits `D` low-degree matrix factors and `D`
//! scalar denominator factors whose normalized product trees give the
//! monomial expansions. Direct `O(D)` pointwise evaluation of the same
//! recursions is provided as the reference path, together with the joint
//! value/derivative recursion used by Newton refinement.

use crate::poly::{pow2, product_tree, scalar_product_tree, MatrixPolynomial, ScaledPolynomial};
use num_complex::Complex64;
use thiserror::Error;

const CZERO: Complex64 = Complex64::new(0.0, 0.0);
const CONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, PartialEq)]
pub enum DiscretizeError {
    #[error("signal needs at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("signal period must be positive, got {0}")]
    NonPositivePeriod(f64),
    #[error("companion signal has {r_len} samples but q has {q_len}")]
    AknsLengthMismatch { q_len: usize, r_len: usize },
    #[error("Moebius transform requires ad - bc != 0")]
    DegenerateMoebius,
    #[error("scheme {scheme:?} cannot be combined with the {transform} transform")]
    SchemeTransformMismatch { scheme: Scheme, transform: &'static str },
    #[error(
        "Ablowitz-Ladik normalization is infeasible at sample {index}: \
         eps^2 |q|^2 = {value} >= 1 in the defocusing case"
    )]
    AmplitudeBound { index: usize, value: f64 },
    #[error("Ablowitz-Ladik normalization is singular at sample {index} (1 + eps^2 q r = 0)")]
    SingularNormalization { index: usize },
    #[error("Crank-Nicolson step is singular at sample {index} for z = {z}")]
    SingularStep { index: usize, z: Complex64 },
}

/// Sign of the cubic nonlinearity in the NSE.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kappa {
    Focusing,
    Defocusing,
}

impl Kappa {
    pub fn sign(self) -> f64 {
        match self {
            Kappa::Focusing => 1.0,
            Kappa::Defocusing => -1.0,
        }
    }
}

/// `D` equidistant samples of a periodic signal over one period,
/// `x_n = x0 + n * ell / D`.
///
/// In NSE mode the second AKNS potential is implied, `r = kappa * conj(q)`;
/// AKNS mode carries independent `r` samples and ignores `kappa`.
#[derive(Clone, Debug)]
pub struct Signal {
    q: Vec<Complex64>,
    r: Option<Vec<Complex64>>,
    ell: f64,
    x0: f64,
    kappa: Kappa,
}

impl Signal {
    pub fn new(q: Vec<Complex64>, ell: f64, x0: f64, kappa: Kappa) -> Result<Self, DiscretizeError> {
        if q.len() < 2 {
            return Err(DiscretizeError::TooFewSamples(q.len()));
        }
        if ell.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(DiscretizeError::NonPositivePeriod(ell));
        }
        Ok(Self { q, r: None, ell, x0, kappa })
    }

    /// General AKNS signal with an independent second potential.
    pub fn new_akns(
        q: Vec<Complex64>,
        r: Vec<Complex64>,
        ell: f64,
        x0: f64,
    ) -> Result<Self, DiscretizeError> {
        if r.len() != q.len() {
            return Err(DiscretizeError::AknsLengthMismatch { q_len: q.len(), r_len: r.len() });
        }
        let mut s = Self::new(q, ell, x0, Kappa::Focusing)?;
        s.r = Some(r);
        Ok(s)
    }

    pub fn sample_count(&self) -> usize {
        self.q.len()
    }

    /// Step size `eps = ell / D`.
    pub fn step(&self) -> f64 {
        self.ell / self.q.len() as f64
    }

    pub fn period(&self) -> f64 {
        self.ell
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn is_akns(&self) -> bool {
        self.r.is_some()
    }

    pub fn q(&self) -> &[Complex64] {
        &self.q
    }

    pub fn q_at(&self, n: usize) -> Complex64 {
        self.q[n]
    }

    /// Effective second potential at sample `n`.
    pub fn r_at(&self, n: usize) -> Complex64 {
        match &self.r {
            Some(r) => r[n],
            None => self.kappa.sign() * self.q[n].conj(),
        }
    }

    pub fn sample_point(&self, n: usize) -> f64 {
        self.x0 + n as f64 * self.step()
    }

    /// Scale all samples by a constant (AKNS `r` included).
    pub fn scaled(&self, factor: f64) -> Self {
        let mut s = self.clone();
        for v in &mut s.q {
            *v *= factor;
        }
        if let Some(r) = &mut s.r {
            for v in r {
                *v *= factor;
            }
        }
        s
    }
}

/// Spectral coordinate transform `z = phi(w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoordinateTransform {
    /// `phi(w) = (a w + b) / (c w + d)`.
    Moebius { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
    /// `w = e^{-i eps z}`, the Ablowitz-Ladik transform.
    Exponential { eps: f64 },
    Identity,
}

impl CoordinateTransform {
    pub fn moebius(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, DiscretizeError> {
        if (a * d - b * c).norm() == 0.0 {
            return Err(DiscretizeError::DegenerateMoebius);
        }
        Ok(Self::Moebius { a, b, c, d })
    }

    /// `z = phi(w)`. The exponential branch uses the principal logarithm, so
    /// real spectra land in the fundamental zone `(-pi/eps, pi/eps]`.
    pub fn forward(&self, w: Complex64) -> Complex64 {
        match *self {
            Self::Moebius { a, b, c, d } => (a * w + b) / (c * w + d),
            Self::Exponential { eps } => I * w.ln() / eps,
            Self::Identity => w,
        }
    }

    /// `w = phi^{-1}(z)`.
    pub fn inverse(&self, z: Complex64) -> Complex64 {
        match *self {
            Self::Moebius { a, b, c, d } => (d * z - b) / (a - c * z),
            Self::Exponential { eps } => (-I * eps * z).exp(),
            Self::Identity => z,
        }
    }

    /// Linear parts `(a, b, c, d)` with `phi_1(w) = a w + b`,
    /// `phi_2(w) = c w + d`; `None` for the exponential transform.
    fn phi_parts(&self) -> Option<(Complex64, Complex64, Complex64, Complex64)> {
        match *self {
            Self::Moebius { a, b, c, d } => Some((a, b, c, d)),
            Self::Identity => Some((CONE, CZERO, CZERO, CONE)),
            Self::Exponential { .. } => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::Moebius { .. } => "Moebius",
            Self::Exponential { .. } => "exponential",
            Self::Identity => "identity",
        }
    }
}

/// One-step discretization scheme of the scattering problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    ForwardEuler,
    CrankNicolson,
    AblowitzLadik { normalized: bool },
}

impl Scheme {
    /// Ablowitz-Ladik with the per-sample normalization enabled.
    pub fn ablowitz_ladik() -> Self {
        Scheme::AblowitzLadik { normalized: true }
    }
}

/// The circle-mapping transform recommended for each scheme: a Möbius map
/// with `a = -M/eps`, `b = -a`, `c = d = i` (`M = 1` for Euler, `M = 2` for
/// Crank-Nicolson), or the exponential map for Ablowitz-Ladik. All three map
/// the real axis onto the unit circle.
pub fn default_transform(scheme: Scheme, eps: f64) -> CoordinateTransform {
    assert!(eps > 0.0, "step size must be positive");
    match scheme {
        Scheme::ForwardEuler | Scheme::CrankNicolson => {
            let m = if scheme == Scheme::ForwardEuler { 1.0 } else { 2.0 };
            let a = Complex64::new(-m / eps, 0.0);
            CoordinateTransform::Moebius { a, b: -a, c: I, d: I }
        }
        Scheme::AblowitzLadik { .. } => CoordinateTransform::Exponential { eps },
    }
}

fn check_compat(scheme: Scheme, transform: &CoordinateTransform) -> Result<(), DiscretizeError> {
    let ok = match scheme {
        Scheme::AblowitzLadik { .. } => {
            matches!(transform, CoordinateTransform::Exponential { .. })
        }
        Scheme::ForwardEuler | Scheme::CrankNicolson => matches!(
            transform,
            CoordinateTransform::Moebius { .. } | CoordinateTransform::Identity
        ),
    };
    if ok {
        Ok(())
    } else {
        Err(DiscretizeError::SchemeTransformMismatch { scheme, transform: transform.name() })
    }
}

/// Ablowitz-Ladik per-sample normalization `alpha_n`; `1` when the
/// `normalized` flag is off.
fn al_alpha(signal: &Signal, n: usize, normalized: bool) -> Result<Complex64, DiscretizeError> {
    if !normalized {
        return Ok(CONE);
    }
    let eps = signal.step();
    if signal.is_akns() {
        let beta = CONE + eps * eps * signal.q_at(n) * signal.r_at(n);
        if beta.norm() < 1e-15 {
            return Err(DiscretizeError::SingularNormalization { index: n });
        }
        Ok(beta.sqrt())
    } else {
        let amp2 = eps * eps * signal.q_at(n).norm_sqr();
        let t = 1.0 + signal.kappa().sign() * amp2;
        if t <= 0.0 {
            return Err(DiscretizeError::AmplitudeBound { index: n, value: amp2 });
        }
        Ok(Complex64::new(t.sqrt(), 0.0))
    }
}

/// Per-sample polynomial factors of the rational monodromy approximation.
///
/// Factor `n` uses sample `x_n`, `n = 0..D-1` (Crank-Nicolson pairs `x_n`
/// with `x_{n+1 mod D}`); the matrix product is taken right-to-left, so the
/// factor of `x_0` acts first. Returns the matrix factors together with the
/// scalar denominator factors.
pub fn factor_sequence(
    signal: &Signal,
    scheme: Scheme,
    transform: &CoordinateTransform,
) -> Result<(Vec<MatrixPolynomial>, Vec<ScaledPolynomial>), DiscretizeError> {
    check_compat(scheme, transform)?;
    let d = signal.sample_count();
    let eps = signal.step();
    let mut mats = Vec::with_capacity(d);
    let mut dens = Vec::with_capacity(d);

    match scheme {
        Scheme::ForwardEuler => {
            let (a, b, c, dd) = transform.phi_parts().unwrap();
            for n in 0..d {
                let q = signal.q_at(n);
                let r = signal.r_at(n);
                // phi2 * (I + eps * P_z(x_n)) with z = phi1/phi2.
                mats.push(MatrixPolynomial::from_coeffs([
                    vec![dd - I * eps * b, c - I * eps * a],
                    vec![-eps * q * dd, -eps * q * c],
                    vec![eps * r * dd, eps * r * c],
                    vec![dd + I * eps * b, c + I * eps * a],
                ]));
                dens.push(ScaledPolynomial::new(vec![dd, c]));
            }
        }
        Scheme::CrankNicolson => {
            let (a, b, c, dd) = transform.phi_parts().unwrap();
            let h = eps / 2.0;
            let g = |gq: Complex64, gr: Complex64| {
                MatrixPolynomial::from_coeffs([
                    vec![dd - I * h * b, c - I * h * a],
                    vec![-h * gq * dd, -h * gq * c],
                    vec![h * gr * dd, h * gr * c],
                    vec![dd + I * h * b, c + I * h * a],
                ])
            };
            for n in 0..d {
                let next = (n + 1) % d;
                mats.push(
                    g(signal.q_at(next), signal.r_at(next))
                        .mul(&g(signal.q_at(n), signal.r_at(n))),
                );
                // d_n(w) = phi2^2 + h^2 (phi1^2 + q r phi2^2) at sample n+1:
                // the determinant of phi2 * (I - h P(x_{n+1})).
                let qr = signal.q_at(next) * signal.r_at(next);
                let phi2_sq = [dd * dd, 2.0 * c * dd, c * c];
                let phi1_sq = [b * b, 2.0 * a * b, a * a];
                let coeffs: Vec<Complex64> = (0..3)
                    .map(|k| phi2_sq[k] * (CONE + h * h * qr) + h * h * phi1_sq[k])
                    .collect();
                dens.push(ScaledPolynomial::new(coeffs));
            }
        }
        Scheme::AblowitzLadik { normalized } => {
            for n in 0..d {
                let alpha_inv = al_alpha(signal, n, normalized)?.inv();
                let q = signal.q_at(n);
                let r = signal.r_at(n);
                // alpha_n^{-1} [w^2, -eps w q; eps w r, 1], the w-multiplied
                // form of the lattice step.
                mats.push(MatrixPolynomial::from_coeffs([
                    vec![CZERO, CZERO, alpha_inv],
                    vec![CZERO, -eps * q * alpha_inv],
                    vec![CZERO, eps * r * alpha_inv],
                    vec![alpha_inv],
                ]));
                dens.push(ScaledPolynomial::monomial(1));
            }
        }
    }
    Ok((mats, dens))
}

/// Roots (flattened with multiplicity) of a polynomial of degree <= 2.
fn low_degree_roots(p: &ScaledPolynomial) -> Vec<Complex64> {
    let Some(deg) = p.degree() else { return Vec::new() };
    match deg {
        0 => Vec::new(),
        1 => vec![-p.coeff(0) / p.coeff(1)],
        2 => {
            let (a, b, c) = (p.coeff(2), p.coeff(1), p.coeff(0));
            let disc = (b * b - 4.0 * a * c).sqrt();
            let s = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
            if s.norm() == 0.0 {
                return vec![CZERO, CZERO];
            }
            let q = -0.5 * s;
            vec![q / a, c / q]
        }
        _ => unreachable!("denominator factors have degree <= 2"),
    }
}

/// Monomial-basis rational approximation of the monodromy matrix:
/// `M(z) = 2^(W_S - W_d) * S(w) / d(w)` with `w = transform.inverse(z)`.
#[derive(Clone, Debug)]
pub struct RationalMonodromy {
    s: MatrixPolynomial,
    den: ScaledPolynomial,
    transform: CoordinateTransform,
    scheme: Scheme,
    denom_roots: Vec<Complex64>,
    kappa: Option<Kappa>,
    sample_count: usize,
}

impl RationalMonodromy {
    pub fn s(&self) -> &MatrixPolynomial {
        &self.s
    }

    pub fn denominator(&self) -> &ScaledPolynomial {
        &self.den
    }

    pub fn transform(&self) -> &CoordinateTransform {
        &self.transform
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Denominator roots, flattened with multiplicity, assembled in closed
    /// form from the degree <= 2 scalar factors (Ablowitz-Ladik: `w = 0`
    /// with multiplicity `D`; Euler with its recommended Möbius transform:
    /// `w = -1` with multiplicity `D`).
    pub fn denom_roots(&self) -> &[Complex64] {
        &self.denom_roots
    }

    /// `kappa` of the underlying NSE signal; `None` in AKNS mode.
    pub fn kappa(&self) -> Option<Kappa> {
        self.kappa
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// `S_11 + S_22` as a scaled polynomial (exponent `W_S`).
    pub fn trace_numerator(&self) -> ScaledPolynomial {
        self.s.entry(0, 0).add(self.s.entry(1, 1))
    }

    /// Floquet discriminant approximation
    /// `2^(W_S - W_d - 1) * (S_11 + S_22)(w) / d(w)`.
    pub fn delta_at_w(&self, w: Complex64) -> Complex64 {
        let tr = self.s.entry(0, 0).eval_normalized(w) + self.s.entry(1, 1).eval_normalized(w);
        let den = self.den.eval_normalized(w);
        0.5 * pow2(self.s.scale_exp() - self.den.scale_exp()) * tr / den
    }

    pub fn delta_at_z(&self, z: Complex64) -> Complex64 {
        self.delta_at_w(self.transform.inverse(z))
    }

    /// Full matrix value `M(z)`.
    pub fn matrix_at_z(&self, z: Complex64) -> Mat2 {
        let w = self.transform.inverse(z);
        let f = pow2(self.s.scale_exp() - self.den.scale_exp()) / self.den.eval_normalized(w);
        let m = self.s.eval_normalized(w);
        Mat2([[m[0][0] * f, m[0][1] * f], [m[1][0] * f, m[1][1] * f]])
    }
}

/// Build the monomial expansion of the rational monodromy approximation with
/// normalized product trees over the per-sample factors.
pub fn build_monodromy(
    signal: &Signal,
    scheme: Scheme,
    transform: CoordinateTransform,
) -> Result<RationalMonodromy, DiscretizeError> {
    let (mats, dens) = factor_sequence(signal, scheme, &transform)?;
    let s = product_tree(&mats);
    let den = scalar_product_tree(&dens);
    let mut denom_roots = Vec::with_capacity(signal.sample_count());
    for f in &dens {
        denom_roots.extend(low_degree_roots(f));
    }
    Ok(RationalMonodromy {
        s,
        den,
        transform,
        scheme,
        denom_roots,
        kappa: if signal.is_akns() { None } else { Some(signal.kappa()) },
        sample_count: signal.sample_count(),
    })
}

/// A 2x2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[CONE, CZERO], [CZERO, CONE]])
    }

    pub fn zero() -> Self {
        Mat2([[CZERO, CZERO], [CZERO, CZERO]])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn scaled(&self, f: Complex64) -> Mat2 {
        let a = &self.0;
        Mat2([[a[0][0] * f, a[0][1] * f], [a[1][0] * f, a[1][1] * f]])
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

/// `P_z(x_n)` of the AKNS scattering problem.
fn p_matrix(signal: &Signal, n: usize, z: Complex64) -> Mat2 {
    Mat2([[-I * z, -signal.q_at(n)], [signal.r_at(n), I * z]])
}

/// Evaluate the discretized monodromy matrix at one spectral point by
/// iterating the scheme's recursion from the identity; `O(D)` per point.
pub fn eval_monodromy_direct(
    signal: &Signal,
    scheme: Scheme,
    z: Complex64,
) -> Result<Mat2, DiscretizeError> {
    let d = signal.sample_count();
    let eps = signal.step();
    let mut v = Mat2::identity();
    match scheme {
        Scheme::ForwardEuler => {
            for n in 0..d {
                let step = Mat2::identity().add(&p_matrix(signal, n, z).scaled(eps.into()));
                v = step.mul(&v);
            }
        }
        Scheme::CrankNicolson => {
            let h = eps / 2.0;
            for n in 0..d {
                let next = (n + 1) % d;
                let plus = Mat2::identity().add(&p_matrix(signal, n, z).scaled(h.into()));
                let plus_next =
                    Mat2::identity().add(&p_matrix(signal, next, z).scaled(h.into()));
                // (I - h P)^{-1} = (I + h P)/det because tr P = 0.
                let det = CONE + h * h * (z * z + signal.q_at(next) * signal.r_at(next));
                if det.norm() < 1e-300 {
                    return Err(DiscretizeError::SingularStep { index: next, z });
                }
                v = plus_next.mul(&plus.mul(&v)).scaled(det.inv());
            }
        }
        Scheme::AblowitzLadik { normalized } => {
            let w = (-I * eps * z).exp();
            let winv = w.inv();
            for n in 0..d {
                let alpha_inv = al_alpha(signal, n, normalized)?.inv();
                let step = Mat2([
                    [w * alpha_inv, -eps * signal.q_at(n) * alpha_inv],
                    [eps * signal.r_at(n) * alpha_inv, winv * alpha_inv],
                ]);
                v = step.mul(&v);
            }
        }
    }
    Ok(v)
}

/// Joint forward-Euler recursion for the monodromy matrix and its
/// `z`-derivative (`dP/dz = diag(-i, i)`, `dV[0] = 0`); returns
/// `(M(z), dM/dz)`.
pub fn eval_monodromy_with_derivative(signal: &Signal, z: Complex64) -> (Mat2, Mat2) {
    let d = signal.sample_count();
    let eps = signal.step();
    let dp = Mat2([[-I, CZERO], [CZERO, I]]).scaled(eps.into());
    let mut v = Mat2::identity();
    let mut dv = Mat2::zero();
    for n in 0..d {
        let step = Mat2::identity().add(&p_matrix(signal, n, z).scaled(eps.into()));
        dv = step.mul(&dv).add(&dp.mul(&v));
        v = step.mul(&v);
    }
    (v, dv)
}
