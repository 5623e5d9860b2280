//! Scaled complex polynomial arithmetic.
//!
//! Polynomials carry their coefficients together with a power-of-two exponent
//! `W`, so the represented value is `2^W * sum_k c_k w^k`. Keeping the scale
//! in a separate integer lets long products of many factors renormalize after
//! every pairwise multiplication without losing precision (multiplication by
//! a power of two is exact in IEEE 754) and without over- or underflowing the
//! coefficients themselves.

mod circle;
mod fft;

pub use circle::{
    eval_unit_circle_batch, eval_unit_circle_direct, eval_unit_circle_equispaced,
    eval_unit_circle_points, UnitCircleEvaluator,
};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

const CZERO: Complex64 = Complex64::new(0.0, 0.0);
const CONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("matrix polynomial entries must share one scale exponent")]
    MismatchedScale,
    #[error("evaluation point {index} is off the unit circle (| |w|-1 | = {deviation:e})")]
    PointOffUnitCircle { index: usize, deviation: f64 },
}

/// `2^k` as an `f64`, exact until it clamps at the representable range.
pub fn pow2(k: i64) -> f64 {
    if k > 1024 {
        f64::INFINITY
    } else if k < -1100 {
        0.0
    } else {
        2.0f64.powi(k as i32)
    }
}

/// Multiply a coefficient slice by `2^k` in place, stepping through the
/// exponent range so intermediate factors stay representable.
fn scale_coeffs_pow2(coeffs: &mut [Complex64], mut k: i64) {
    while k != 0 {
        let step = k.clamp(-1000, 1000);
        let s = pow2(step);
        for c in coeffs.iter_mut() {
            *c *= s;
        }
        k -= step;
    }
}

/// A complex polynomial `2^W * sum_k c_k w^k`, coefficients in ascending
/// degree order.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledPolynomial {
    coeffs: Vec<Complex64>,
    scale_exp: i64,
}

impl ScaledPolynomial {
    /// Wrap raw coefficients with scale exponent zero. No normalization is
    /// applied; see [`ScaledPolynomial::normalize`].
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs, scale_exp: 0 }
    }

    pub fn with_scale(coeffs: Vec<Complex64>, scale_exp: i64) -> Self {
        let p = Self { coeffs, scale_exp };
        if p.is_zero() {
            Self::zero()
        } else {
            p
        }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new(), scale_exp: 0 }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `w^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![CZERO; k + 1];
        coeffs[k] = CONE;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(CZERO)
    }

    pub fn scale_exp(&self) -> i64 {
        self.scale_exp
    }

    /// Largest index with a nonzero coefficient; `None` for the zero
    /// polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != CZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Magnitude of the largest coefficient (ignoring the `2^W` scale).
    pub fn largest_coeff_mag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Renormalize so the largest coefficient magnitude lies in `[1, 2)`,
    /// folding the removed factor into the scale exponent. A zero polynomial
    /// is left untouched.
    pub fn normalize(&mut self) {
        let mag = self.largest_coeff_mag();
        if mag > 0.0 && mag.is_finite() {
            let a = mag.log2().floor() as i64;
            if a != 0 {
                scale_coeffs_pow2(&mut self.coeffs, -a);
                self.scale_exp += a;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// Multiply the represented value by `2^k` (exact).
    pub fn mul_pow2(mut self, k: i64) -> Self {
        if !self.is_zero() {
            self.scale_exp += k;
        }
        self
    }

    /// Coefficient-wise scale by a complex constant.
    pub fn scaled_by(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            scale_exp: self.scale_exp,
        }
    }

    /// Sum with exponent alignment: both operands are brought to the larger
    /// scale exponent before the coefficients are added.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let w = self.scale_exp.max(other.scale_exp);
        let mut coeffs = self.coeffs.clone();
        scale_coeffs_pow2(&mut coeffs, self.scale_exp - w);
        let mut rhs = other.coeffs.clone();
        scale_coeffs_pow2(&mut rhs, other.scale_exp - w);
        fft::add_assign(&mut coeffs, &rhs);
        Self { coeffs, scale_exp: w }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled_by(-CONE))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        Self { coeffs, scale_exp: self.scale_exp }
    }

    /// Evaluate at `w`, including the `2^W` factor.
    ///
    /// Horner's rule is used for `|w| >= 1`; for `|w| < 1` the reversed
    /// polynomial is evaluated at `1/w` and multiplied by `w^deg`, which
    /// keeps the intermediate powers bounded.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.eval_normalized(w) * pow2(self.scale_exp)
    }

    /// Evaluate without the `2^W` factor.
    pub fn eval_normalized(&self, w: Complex64) -> Complex64 {
        let Some(deg) = self.degree() else {
            return CZERO;
        };
        let c = &self.coeffs[..=deg];
        if w == CZERO {
            return c[0];
        }
        if w.norm_sqr() >= 1.0 {
            horner(c, w)
        } else {
            // p(w) = w^deg * q(1/w) with q the reversed polynomial.
            let u = w.inv();
            let mut acc = CZERO;
            for &ck in c.iter() {
                acc = acc * u + ck;
            }
            acc * w.powu(deg as u32)
        }
    }
}

pub(crate) fn horner(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    let mut acc = CZERO;
    for &c in coeffs.iter().rev() {
        acc = acc * w + c;
    }
    acc
}

/// Coefficient-wise product `a * b`; the result scale exponent is the sum of
/// the operand exponents. Zero inputs yield the zero polynomial.
pub fn fft_convolve(a: &ScaledPolynomial, b: &ScaledPolynomial) -> ScaledPolynomial {
    if a.is_zero() || b.is_zero() {
        return ScaledPolynomial::zero();
    }
    ScaledPolynomial {
        coeffs: fft::convolve(&a.coeffs, &b.coeffs),
        scale_exp: a.scale_exp + b.scale_exp,
    }
}

/// A 2x2 matrix of polynomials sharing one scale exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial {
    // Row-major [11, 12, 21, 22]; all four carry the same scale_exp.
    entries: [ScaledPolynomial; 4],
}

impl MatrixPolynomial {
    pub fn from_entries(entries: [ScaledPolynomial; 4]) -> Result<Self, PolyError> {
        let w = entries
            .iter()
            .find(|e| !e.is_zero())
            .map(|e| e.scale_exp)
            .unwrap_or(0);
        if entries.iter().any(|e| !e.is_zero() && e.scale_exp != w) {
            return Err(PolyError::MismatchedScale);
        }
        let entries = entries.map(|mut e| {
            e.scale_exp = w;
            e
        });
        Ok(Self { entries })
    }

    /// Build from raw coefficient vectors (row-major) with scale exponent 0.
    pub fn from_coeffs(coeffs: [Vec<Complex64>; 4]) -> Self {
        Self {
            entries: coeffs.map(ScaledPolynomial::new),
        }
    }

    pub fn identity() -> Self {
        Self::from_coeffs([vec![CONE], Vec::new(), Vec::new(), vec![CONE]])
    }

    pub fn entry(&self, row: usize, col: usize) -> &ScaledPolynomial {
        &self.entries[row * 2 + col]
    }

    pub fn scale_exp(&self) -> i64 {
        self.entries[0].scale_exp
    }

    pub fn degree(&self) -> Option<usize> {
        self.entries.iter().filter_map(|e| e.degree()).max()
    }

    pub fn largest_coeff_mag(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.largest_coeff_mag())
            .fold(0.0, f64::max)
    }

    /// Joint renormalization over all four entries, preserving the shared
    /// scale exponent invariant.
    pub fn normalize(&mut self) {
        let mag = self.largest_coeff_mag();
        if mag > 0.0 && mag.is_finite() {
            let a = mag.log2().floor() as i64;
            if a != 0 {
                for e in &mut self.entries {
                    scale_coeffs_pow2(&mut e.coeffs, -a);
                    e.scale_exp += a;
                }
            }
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let a: [Vec<Complex64>; 4] = [
            self.entries[0].coeffs.clone(),
            self.entries[1].coeffs.clone(),
            self.entries[2].coeffs.clone(),
            self.entries[3].coeffs.clone(),
        ];
        let b: [Vec<Complex64>; 4] = [
            rhs.entries[0].coeffs.clone(),
            rhs.entries[1].coeffs.clone(),
            rhs.entries[2].coeffs.clone(),
            rhs.entries[3].coeffs.clone(),
        ];
        let w = self.scale_exp() + rhs.scale_exp();
        let c = fft::mat_convolve(&a, &b);
        Self {
            entries: c.map(|coeffs| ScaledPolynomial { coeffs, scale_exp: w }),
        }
    }

    /// Evaluate all entries at `w`, including the shared `2^W` factor.
    pub fn eval(&self, w: Complex64) -> [[Complex64; 2]; 2] {
        let s = pow2(self.scale_exp());
        let m = self.eval_normalized(w);
        [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
    }

    pub fn eval_normalized(&self, w: Complex64) -> [[Complex64; 2]; 2] {
        [
            [
                self.entries[0].eval_normalized(w),
                self.entries[1].eval_normalized(w),
            ],
            [
                self.entries[2].eval_normalized(w),
                self.entries[3].eval_normalized(w),
            ],
        ]
    }
}

/// Normalized product of a factor sequence in right-to-left order:
/// `product_tree(&[f_1, ..., f_n])` returns `2^W * f_n * ... * f_1`, the
/// convention in which the first factor of the sequence is applied first.
///
/// Products are formed pairwise in a tree. After every pairwise product the
/// node is rescaled by the power of two `floor(log2 |largest coefficient|)`
/// and the removed exponent is accumulated into `W`; an all-zero product
/// skips the rescale. Odd level counts pass the trailing factor up unchanged.
/// Independent pairs of one level may be multiplied in parallel; the result
/// is bit-identical to the sequential tree order.
pub fn product_tree(factors: &[MatrixPolynomial]) -> MatrixPolynomial {
    assert!(!factors.is_empty(), "product_tree requires at least one factor");
    tree_reduce(factors, |earlier, later| {
        let mut p = later.mul(earlier);
        p.normalize();
        p
    })
}

/// Scalar counterpart of [`product_tree`] with the identical normalization
/// cadence.
pub fn scalar_product_tree(factors: &[ScaledPolynomial]) -> ScaledPolynomial {
    assert!(!factors.is_empty(), "product_tree requires at least one factor");
    tree_reduce(factors, |earlier, later| {
        let mut p = fft_convolve(later, earlier);
        p.normalize();
        p
    })
}

fn tree_reduce<T, F>(items: &[T], node: F) -> T
where
    T: Clone + Send + Sync,
    F: Fn(&T, &T) -> T + Send + Sync,
{
    let mut level: Vec<T> = items.to_vec();
    while level.len() >= 2 {
        let pairs = level.len() / 2;
        let odd = level.len() % 2 == 1;
        let mut next: Vec<T> = if pairs >= 4 {
            (0..pairs)
                .into_par_iter()
                .map(|n| node(&level[2 * n], &level[2 * n + 1]))
                .collect()
        } else {
            (0..pairs).map(|n| node(&level[2 * n], &level[2 * n + 1])).collect()
        };
        if odd {
            next.push(level.last().unwrap().clone());
        }
        level = next;
    }
    level.pop().unwrap()
}
