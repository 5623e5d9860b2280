//! Fast nonlinear Fourier transforms (NFTs) for periodic signals.
//!
//! The crate computes the main spectrum and both kinds of auxiliary spectra
//! of a periodic signal governed by the nonlinear Schrödinger equation (or a
//! general AKNS system) from `D` equidistant samples. Two pipelines are
//! provided:
//!
//! * an `O(D^2)` eigenmethod that expands a rational approximation of the
//!   monodromy matrix into monomial form with a normalized product tree and
//!   roots the resulting polynomials ([`spectra::eigen_spectra`]), and
//! * an `O(D log^2 D)` sampling method for the defocusing case that scans the
//!   Floquet discriminant on a real grid with batched unit-circle polynomial
//!   evaluation and refines sign changes by bisection
//!   ([`spectra::defocusing_spectra_sampling`]).
//!
//! Supporting modules: [`poly`] (scaled polynomial arithmetic, FFT products,
//! unit-circle batch evaluation), [`discretize`] (signal discretizations and
//! monodromy evaluation), [`rootfind`] (Aberth–Ehrlich roots, cancellation,
//! bisection, Newton), and [`oracles`] (analytic test signals).

pub mod discretize;
pub mod oracles;
pub mod poly;
pub mod rootfind;
pub mod spectra;

pub use num_complex::Complex64;
