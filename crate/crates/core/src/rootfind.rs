//! Polynomial root finding and root location utilities.
//!
//! [`poly_roots`] is an Aberth-Ehrlich simultaneous iteration: all roots are
//! refined together, one Gauss-Seidel sweep costing `O(deg^2)` operations, so
//! the whole solve stays within the quadratic budget of the eigenmethod
//! without structured companion eigensolvers. [`cancel_roots`] matches
//! numerator roots against denominator roots, [`sign_change_bisect`] is the
//! batched scan-and-bisect kernel of the sampling method, and
//! [`newton_refine`] is the search-based baseline on the forward-Euler
//! monodromy recursion.

use crate::discretize::{eval_monodromy_with_derivative, Signal};
use crate::poly::ScaledPolynomial;
use num_complex::Complex64;

const CZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Roots of one polynomial with per-root backward-error estimates.
///
/// Multiple roots appear as repeated entries. `residuals[k]` is the
/// magnitude of the normalized polynomial (largest coefficient in `[1, 2)`)
/// at `roots[k]`; the represented polynomial's residual is that value times
/// `2^scale_exp`.
#[derive(Clone, Debug, Default)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// False when the Aberth iteration hit its sweep limit; residuals then
    /// flag which roots are suspect.
    pub converged: bool,
}

impl RootSet {
    pub fn from_roots(roots: Vec<Complex64>) -> Self {
        let residuals = vec![0.0; roots.len()];
        Self { roots, residuals, converged: true }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

const MAX_SWEEPS: usize = 200;
/// Relative magnitude below which leading/trailing coefficients are treated
/// as structural zeros (FFT products leave ~1e-16 junk in exact-zero slots).
const TRIM_REL: f64 = 1e-13;

/// All roots of `p` via Aberth-Ehrlich simultaneous iteration, `O(deg^2)`
/// per sweep, at most 200 sweeps.
///
/// Initial guesses sit on the circle of radius `(|c_0/c_deg|)^(1/deg)` at
/// golden-angle phases. Near-zero leading coefficients reduce the degree
/// first; near-zero trailing coefficients are deflated into exact roots at
/// the origin. Clusters closer than `10 * tol` are merged into repeated
/// copies of their centroid. On sweep exhaustion the partial root set is
/// returned with `converged = false`.
pub fn poly_roots(p: &ScaledPolynomial, tol: f64) -> RootSet {
    let Some(deg) = p.degree() else {
        return RootSet::from_roots(Vec::new());
    };
    if deg == 0 {
        return RootSet::from_roots(Vec::new());
    }

    // Work on the normalized copy; residuals are reported in these units.
    let normalized = p.clone().normalized();
    let mag = normalized.largest_coeff_mag();
    let cut = (TRIM_REL * mag).max(1e-300);

    let mut coeffs: Vec<Complex64> = normalized.coeffs()[..=deg].to_vec();
    while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= cut {
        coeffs.pop();
    }
    let mut zero_roots = 0usize;
    while coeffs.len() > 1 && coeffs[0].norm() <= cut {
        coeffs.remove(0);
        zero_roots += 1;
    }

    let mut roots = vec![CZERO; zero_roots];
    let mut converged = true;
    let reduced_deg = coeffs.len() - 1;
    match reduced_deg {
        0 => {}
        1 => roots.push(-coeffs[0] / coeffs[1]),
        2 => {
            let (a, b, c) = (coeffs[2], coeffs[1], coeffs[0]);
            let disc = (b * b - 4.0 * a * c).sqrt();
            let s = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
            if s.norm() == 0.0 {
                roots.extend([CZERO, CZERO]);
            } else {
                let q = -0.5 * s;
                roots.extend([q / a, c / q]);
            }
        }
        _ => {
            let (found, ok) = aberth(&coeffs, tol);
            roots.extend(found);
            converged = ok;
        }
    }

    let roots = cluster_roots(roots, 10.0 * tol);
    let residuals = roots.iter().map(|&r| normalized.eval_normalized(r).norm()).collect();
    RootSet { roots, residuals, converged }
}

/// Fused evaluation of `p`, `p'`, and the magnitude sum `sum |c_k| |z|^k`
/// bounding the Horner roundoff; switches to the reversed form for `|z| > 1`
/// so high-degree powers never overflow.
fn eval_pair(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let deg = coeffs.len() - 1;
    if z.norm_sqr() <= 1.0 {
        let az = z.norm();
        let mut p = CZERO;
        let mut dp = CZERO;
        let mut s = 0.0f64;
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            s = s * az + c.norm();
        }
        (p, dp, s)
    } else {
        // p(z) = z^d q(u), u = 1/z, q the reversed polynomial;
        // p'(z) = z^{d-1} (d q(u) - u q'(u)).
        let u = z.inv();
        let au = u.norm();
        let mut q = CZERO;
        let mut dq = CZERO;
        let mut s = 0.0f64;
        for &c in coeffs.iter() {
            dq = dq * u + q;
            q = q * u + c;
            s = s * au + c.norm();
        }
        let zd1 = z.powu((deg - 1) as u32);
        let p = zd1 * z * q;
        let dp = zd1 * (deg as f64 * q - u * dq);
        (p, dp, s * (zd1 * z).norm())
    }
}

fn aberth(coeffs: &[Complex64], tol: f64) -> (Vec<Complex64>, bool) {
    let deg = coeffs.len() - 1;
    let radius = (coeffs[0].norm() / coeffs[deg].norm()).powf(1.0 / deg as f64);
    // Golden-angle phases give a low-discrepancy, symmetry-free start.
    let golden = 2.0 * std::f64::consts::PI * 0.618_033_988_749_894_9;
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, golden * (k as f64 + 0.25)))
        .collect();
    let mut frozen = vec![false; deg];

    let mut kicks = 0usize;
    for _ in 0..MAX_SWEEPS {
        let mut all_done = true;
        for i in 0..deg {
            if frozen[i] {
                continue;
            }
            let (p, dp, noise_scale) = eval_pair(coeffs, z[i]);
            let noise_floor = 4.0 * deg as f64 * f64::EPSILON * noise_scale;
            // Below the Horner roundoff bound the root cannot be located any
            // better; treat it as converged.
            if p == CZERO || p.norm() <= noise_floor {
                frozen[i] = true;
                continue;
            }
            let newton = if dp == CZERO {
                // Nudge off a stationary point.
                Complex64::new(tol.max(1e-12), tol.max(1e-12))
            } else {
                p / dp
            };
            let mut repulsion = CZERO;
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let diff = z[i] - zj;
                    if diff.norm_sqr() > 1e-300 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let correction = if denom.norm_sqr() > 1e-300 { newton / denom } else { newton };
            if correction.norm() <= tol * z[i].norm().max(1.0) {
                if p.norm() <= 1e6 * noise_floor {
                    z[i] -= correction;
                    frozen[i] = true;
                } else {
                    // Stalled far from any root: a pair of estimates has
                    // collided and the repulsion singularity pins both. Kick
                    // the estimate apart and keep iterating.
                    kicks += 1;
                    let phase = golden * (kicks as f64 + 0.5);
                    let kick = Complex64::from_polar(0.05 * z[i].norm().max(1.0), phase);
                    z[i] += kick;
                    all_done = false;
                }
            } else {
                z[i] -= correction;
                all_done = false;
            }
            if !z[i].is_finite() {
                // Overflowed estimate: restart it near the initial circle.
                kicks += 1;
                z[i] = Complex64::from_polar(
                    radius * (1.0 + 0.03 * (kicks % 7) as f64),
                    golden * (kicks as f64 + 0.75),
                );
                frozen[i] = false;
                all_done = false;
            }
        }
        if all_done {
            return (z, true);
        }
    }
    (z, false)
}

/// Greedy single-linkage clustering; each cluster collapses to its centroid,
/// repeated once per member so multiplicities stay visible.
fn cluster_roots(mut roots: Vec<Complex64>, radius: f64) -> Vec<Complex64> {
    if radius <= 0.0 || roots.len() < 2 {
        return roots;
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out = Vec::with_capacity(roots.len());
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![roots[i]];
        used[i] = true;
        let mut grew = true;
        while grew {
            grew = false;
            for j in 0..roots.len() {
                if !used[j] && members.iter().any(|m| (m - roots[j]).norm() <= radius) {
                    members.push(roots[j]);
                    used[j] = true;
                    grew = true;
                }
            }
        }
        let centroid = members.iter().sum::<Complex64>() / members.len() as f64;
        out.extend(std::iter::repeat_n(centroid, members.len()));
    }
    out
}

/// Remove from `numer` every root that is matched by an unconsumed
/// denominator root; each denominator root cancels at most once, so
/// multiplicities are respected. The matching threshold for a denominator
/// root `d` is `match_tol * (1 + |d|)`.
pub fn cancel_roots(numer: &RootSet, denom: &RootSet, match_tol: f64) -> RootSet {
    let mut consumed = vec![false; denom.roots.len()];
    let mut roots = Vec::with_capacity(numer.roots.len());
    let mut residuals = Vec::with_capacity(numer.roots.len());
    for (k, &r) in numer.roots.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (j, &d) in denom.roots.iter().enumerate() {
            if consumed[j] {
                continue;
            }
            let dist = (r - d).norm();
            if dist <= match_tol * (1.0 + d.norm()) && best.is_none_or(|(_, b)| dist < b) {
                best = Some((j, dist));
            }
        }
        match best {
            Some((j, _)) => consumed[j] = true,
            None => {
                roots.push(r);
                residuals.push(numer.residuals.get(k).copied().unwrap_or(0.0));
            }
        }
    }
    RootSet { roots, residuals, converged: numer.converged }
}

/// Scan `values[j] = f(grid[j])` for adjacent sign changes and refine each
/// bracket with exactly `rounds` bisection steps, evaluating all bracket
/// midpoints of a round in one call to `refine` so it can be batched.
///
/// A sample that is exactly zero counts as its own sign and registers one
/// bracket with its left neighbor. Returns the final bracket midpoints.
pub fn sign_change_bisect<F>(values: &[f64], grid: &[f64], mut refine: F, rounds: usize) -> Vec<f64>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    assert_eq!(values.len(), grid.len());
    let sgn = |x: f64| -> i8 {
        if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    };

    struct Bracket {
        a: f64,
        b: f64,
        fa: f64,
    }
    let mut brackets: Vec<Bracket> = Vec::new();
    for j in 0..values.len().saturating_sub(1) {
        // A zero sample pairs with its left neighbor only.
        if sgn(values[j + 1]) != sgn(values[j]) && sgn(values[j]) != 0 {
            brackets.push(Bracket { a: grid[j], b: grid[j + 1], fa: values[j] });
        }
    }
    if brackets.is_empty() {
        return Vec::new();
    }

    for _ in 0..rounds {
        let mids: Vec<f64> = brackets.iter().map(|br| 0.5 * (br.a + br.b)).collect();
        let fm = refine(&mids);
        for (br, (&mid, &f)) in brackets.iter_mut().zip(mids.iter().zip(&fm)) {
            if sgn(f) == sgn(br.fa) {
                br.a = mid;
                br.fa = f;
            } else {
                br.b = mid;
            }
        }
    }
    brackets.iter().map(|br| 0.5 * (br.a + br.b)).collect()
}

/// Outcome of a Newton search for a root of `Delta(z) - target`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NewtonOutcome {
    Converged { z: Complex64, iterations: usize },
    Diverged { last: Complex64 },
}

/// Newton refinement of a (anti-)periodic eigenvalue estimate against the
/// forward-Euler monodromy: the iteration contracts
/// `z <- z - (tr M(z) - 2 target) / tr M'(z)` and stops once the update
/// magnitude falls below `beta`.
///
/// `target` is `+1` for periodic and `-1` for antiperiodic points. A
/// vanishing derivative trace or an exhausted iteration budget reports
/// divergence.
pub fn newton_refine(
    z0: Complex64,
    target: f64,
    signal: &Signal,
    beta: f64,
    max_iter: usize,
) -> NewtonOutcome {
    let mut z = z0;
    for it in 1..=max_iter {
        let (m, dm) = eval_monodromy_with_derivative(signal, z);
        let dtrace = dm.trace();
        if dtrace.norm() < 1e-300 {
            return NewtonOutcome::Diverged { last: z };
        }
        let step = (m.trace() - 2.0 * target) / dtrace;
        z -= step;
        if !z.is_finite() {
            return NewtonOutcome::Diverged { last: z };
        }
        if step.norm() <= beta {
            return NewtonOutcome::Converged { z, iterations: it };
        }
    }
    NewtonOutcome::Diverged { last: z }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::Kappa;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Expand prod (w - r_j) through the balanced product tree. The factor
    /// order must not be angularly sorted: sector-restricted partial
    /// products have exponentially large coefficients that would wreck the
    /// final small ones through cancellation.
    fn poly_from_roots(roots: &[Complex64]) -> ScaledPolynomial {
        let factors: Vec<ScaledPolynomial> = roots
            .iter()
            .map(|&r| ScaledPolynomial::new(vec![-r, Complex64::new(1.0, 0.0)]))
            .collect();
        crate::poly::scalar_product_tree(&factors)
    }

    /// Distance between two root multisets under greedy nearest matching.
    fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
        assert_eq!(a.len(), b.len());
        let mut used = vec![false; b.len()];
        let mut worst: f64 = 0.0;
        for &x in a {
            let mut best = (usize::MAX, f64::INFINITY);
            for (j, &y) in b.iter().enumerate() {
                if !used[j] && (x - y).norm() < best.1 {
                    best = (j, (x - y).norm());
                }
            }
            used[best.0] = true;
            worst = worst.max(best.1);
        }
        worst
    }

    #[test]
    fn quadratic_roots() {
        let p = ScaledPolynomial::new(vec![c(-1.0, 0.0), CZERO, c(1.0, 0.0)]);
        let rs = poly_roots(&p, 1e-12);
        let mut re: Vec<f64> = rs.roots.iter().map(|r| r.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
        assert!(rs.converged);
    }

    #[test]
    fn roots_of_unity() {
        let d = 64;
        let mut coeffs = vec![CZERO; d + 1];
        coeffs[0] = c(-1.0, 0.0);
        coeffs[d] = c(1.0, 0.0);
        let rs = poly_roots(&ScaledPolynomial::new(coeffs), 1e-12);
        assert_eq!(rs.len(), d);
        let expect: Vec<Complex64> = (0..d)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64))
            .collect();
        assert!(matching_distance(&rs.roots, &expect) <= 1e-10);
        assert!(rs.max_residual() <= 1e-9);
    }

    #[test]
    fn planted_roots_recovered() {
        // Random near-circle roots with a minimum pairwise separation, the
        // regime the coordinate transforms put the spectra in. (Colliding
        // pairs or roots spread over a wide annulus make the monomial
        // representation itself ill-conditioned at this degree, independent
        // of the solver.)
        let mut rng = StdRng::seed_from_u64(4);
        let mut planted: Vec<Complex64> = Vec::new();
        while planted.len() < 100 {
            let cand = Complex64::from_polar(
                0.88 + 0.24 * rng.random::<f64>(),
                2.0 * PI * rng.random::<f64>(),
            );
            if planted.iter().all(|p| (p - cand).norm() >= 0.07) {
                planted.push(cand);
            }
        }
        let p = poly_from_roots(&planted);
        let rs = poly_roots(&p, 1e-12);
        assert_eq!(rs.len(), 100);
        assert!(rs.converged);
        assert!(
            matching_distance(&rs.roots, &planted) <= 1e-7,
            "matching distance {}",
            matching_distance(&rs.roots, &planted)
        );
    }

    #[test]
    fn trailing_zeros_deflate_to_origin_roots() {
        // w^3 (w - 2): roots {0, 0, 0, 2}.
        let p = ScaledPolynomial::new(vec![CZERO, CZERO, CZERO, c(-2.0, 0.0), c(1.0, 0.0)]);
        let rs = poly_roots(&p, 1e-12);
        let zeros = rs.roots.iter().filter(|r| r.norm() == 0.0).count();
        assert_eq!(zeros, 3);
        assert!(rs.roots.iter().any(|r| (r - c(2.0, 0.0)).norm() < 1e-10));
    }

    #[test]
    fn cancel_basic() {
        let numer = RootSet::from_roots(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let denom = RootSet::from_roots(vec![c(2.0, 0.0)]);
        let left = cancel_roots(&numer, &denom, 1e-8);
        assert_eq!(left.roots, vec![c(1.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn cancel_respects_multiplicity() {
        // Two origin roots against a d = w^D style denominator: all cancel.
        let numer = RootSet::from_roots(vec![CZERO, CZERO]);
        let denom = RootSet::from_roots(vec![CZERO; 16]);
        assert!(cancel_roots(&numer, &denom, 1e-8).is_empty());
        // But each denominator root cancels at most once.
        let numer = RootSet::from_roots(vec![CZERO, CZERO]);
        let denom = RootSet::from_roots(vec![CZERO]);
        assert_eq!(cancel_roots(&numer, &denom, 1e-8).len(), 1);
    }

    #[test]
    fn cancel_clustered_root_near_minus_one() {
        let numer = RootSet::from_roots(vec![c(-1.0 + 1e-12, 0.0)]);
        let denom = RootSet::from_roots(vec![c(-1.0, 0.0)]);
        assert!(cancel_roots(&numer, &denom, 1e-9).is_empty());
    }

    #[test]
    fn cancel_is_idempotent() {
        let numer = RootSet::from_roots(vec![c(0.5, 0.1), c(-1.0, 0.0), c(2.0, -0.3)]);
        let denom = RootSet::from_roots(vec![c(-1.0, 0.0), c(9.0, 9.0)]);
        let once = cancel_roots(&numer, &denom, 1e-6);
        let twice = cancel_roots(&once, &denom, 1e-6);
        assert_eq!(once.roots, twice.roots);
    }

    #[test]
    fn product_roots_are_union_of_factor_roots() {
        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..4 {
            let ra: Vec<Complex64> = (0..{ rng.random_range(2..16) })
                .map(|_| Complex64::from_polar(0.5 + rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()))
                .collect();
            let rb: Vec<Complex64> = (0..{ rng.random_range(2..16) })
                .map(|_| Complex64::from_polar(0.5 + rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()))
                .collect();
            let product = crate::poly::fft_convolve(&poly_from_roots(&ra), &poly_from_roots(&rb));
            let rs = poly_roots(&product, 1e-12);
            let mut expect = ra.clone();
            expect.extend(&rb);
            assert!(matching_distance(&rs.roots, &expect) <= 1e-6);
        }
    }

    #[test]
    fn bisect_linear_function() {
        let grid = [-1.0, 1.0];
        let values = [-1.0, 1.0];
        let roots = sign_change_bisect(&values, &grid, |mids| mids.to_vec(), 30);
        assert_eq!(roots.len(), 1);
        assert!(roots[0].abs() <= 2.0 * 2f64.powi(-30));
    }

    #[test]
    fn bisect_finds_cosine_zero() {
        let f = |x: f64| x.cos();
        let grid: Vec<f64> = (0..64).map(|j| 4.0 * j as f64 / 63.0).collect();
        let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let roots = sign_change_bisect(&values, &grid, |mids| mids.iter().map(|&x| f(x)).collect(), 40);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - PI / 2.0).abs() <= 1e-9);
    }

    #[test]
    fn bisect_misses_tangential_roots() {
        // x^2 has no sign change across its double root.
        let grid = [-1.0, 0.5];
        let values = [1.0, 0.25];
        let roots = sign_change_bisect(&values, &grid, |mids| mids.iter().map(|x| x * x).collect(), 20);
        assert!(roots.is_empty());
    }

    #[test]
    fn bisect_zero_sample_registers_one_bracket() {
        let grid = [0.0, 1.0, 2.0];
        let values = [1.0, 0.0, 1.0];
        let roots = sign_change_bisect(&values, &grid, |mids| mids.iter().map(|&x| x - 1.0).collect(), 10);
        assert_eq!(roots.len(), 1);
    }

    #[test]
    fn bisect_halves_bracket_width_exactly() {
        // Dyadic endpoints keep every halving exact; the final bracket width
        // is (initial width) * 2^-L.
        let f = |x: f64| x - 0.1;
        let grid = [0.0, 1.0];
        let values = [f(0.0), f(1.0)];
        for rounds in [1usize, 5, 20] {
            let roots = sign_change_bisect(&values, &grid, |m| m.iter().map(|&x| f(x)).collect(), rounds);
            let expect_width = 2f64.powi(-(rounds as i32));
            assert!((roots[0] - 0.1).abs() <= expect_width);
        }
    }

    #[test]
    fn newton_free_signal_antiperiodic_point() {
        // Delta(z) ~ cos(2 pi z): target -1 has a root at z = 1/2. The Euler
        // amplitude growth splits the degenerate point into a pair at
        // 0.5 -+ 0.015 for D = 1024; the seed 0.48 lands on the left one.
        let sig = Signal::new(vec![CZERO; 1024], 2.0 * PI, 0.0, Kappa::Focusing).unwrap();
        let beta = 1e-12;
        match newton_refine(c(0.48, 0.0), -1.0, &sig, beta, 100) {
            NewtonOutcome::Converged { z, .. } => {
                assert!((z - c(0.5, 0.0)).norm() <= 0.02, "converged to {z}");
                // First-order backward bound: |Delta(z*) + 1| <= 10 |Delta'(z*)| beta.
                let (m, dm) = eval_monodromy_with_derivative(&sig, z);
                let defect = (0.5 * m.trace() + c(1.0, 0.0)).norm();
                assert!(defect <= 10.0 * (0.5 * dm.trace()).norm() * beta, "defect {defect:e}");
            }
            NewtonOutcome::Diverged { last } => panic!("diverged at {last}"),
        }
    }

    #[test]
    fn newton_fixed_point_returns_in_one_step() {
        let sig = Signal::new(vec![CZERO; 1024], 2.0 * PI, 0.0, Kappa::Focusing).unwrap();
        let root = match newton_refine(c(0.48, 0.0), -1.0, &sig, 1e-12, 100) {
            NewtonOutcome::Converged { z, .. } => z,
            _ => panic!(),
        };
        match newton_refine(root, -1.0, &sig, 1e-9, 100) {
            NewtonOutcome::Converged { z, iterations } => {
                assert_eq!(iterations, 1);
                assert!((z - root).norm() <= 1e-9);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn newton_reaches_plane_wave_eigenvalue() {
        // Focusing plane wave q0 = mu = 3: the simple antiperiodic
        // eigenvalue zeta_0+ = -1.5 + 3i. Seeds at Im >= 3.0 converge to its
        // forward-Euler counterpart (distance ~1.5e-3 at D = 1024).
        let d = 1024;
        let ell = 2.0 * PI;
        let q: Vec<Complex64> = (0..d)
            .map(|n| Complex64::from_polar(3.0, 3.0 * (n as f64 * ell / d as f64)))
            .collect();
        let sig = Signal::new(q, ell, 0.0, Kappa::Focusing).unwrap();
        match newton_refine(c(-1.5, 3.05), -1.0, &sig, 1e-10, 200) {
            NewtonOutcome::Converged { z, .. } => {
                assert!((z - c(-1.5, 3.0)).norm() <= 0.05, "converged to {z}");
            }
            NewtonOutcome::Diverged { last } => panic!("diverged at {last}"),
        }
        // A seed below the midpoint between zeta_0+ and the degenerate
        // zeta_2+ = -1.5 + sqrt(8) i lies in the basin of the latter; the
        // iteration then converges to one of the two simple roots the
        // discretization splits the double root into.
        match newton_refine(c(-1.5, 2.9), -1.0, &sig, 1e-10, 200) {
            NewtonOutcome::Converged { z, .. } => {
                assert!((z - c(-1.5, 8f64.sqrt())).norm() <= 0.06, "converged to {z}");
                let (m, _) = eval_monodromy_with_derivative(&sig, z);
                assert!((0.5 * m.trace() + c(1.0, 0.0)).norm() <= 1e-7);
            }
            NewtonOutcome::Diverged { last } => panic!("diverged at {last}"),
        }
    }

    #[test]
    fn newton_flags_zero_derivative() {
        // At z = 0 the free-signal discriminant is stationary.
        let sig = Signal::new(vec![CZERO; 64], 2.0 * PI, 0.0, Kappa::Focusing).unwrap();
        assert!(matches!(
            newton_refine(CZERO, 1.0, &sig, 1e-12, 5),
            NewtonOutcome::Diverged { .. }
        ));
    }
}
