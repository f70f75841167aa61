//! Spiked isotropic non-Hermitian random matrices.
//!
//! This crate builds matrices `A + P` where `A = U·diag(s)` (or `U·diag(s)·V`)
//! is isotropic with Haar unitary factors and `P` is a fixed-rank perturbation
//! given by its Jordan data. It predicts where the outlier eigenvalues of
//! `A + P` go, measures them, samples the limiting fluctuation laws, and
//! evaluates Haar moments exactly through the Weingarten function.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and parallel campaigns live in the `ringspike` crate.
//!
//! Module map:
//!
//! | module | content |
//! |--------|---------|
//! | [`profiles`] | singular-value laws, ring radii `a`, `b`, finite-n quantiles |
//! | [`randmat`] | seeded streams, Haar unitaries, Ginibre, isotropic assembly |
//! | [`jordan`] | Jordan data, index sets, `P = BC` with `CB = J` |
//! | [`spectra`] | eigensolvers, the determinant ratio `f(z)`, outlier matching |
//! | [`limitlaw`] | covariance of the limit Gaussian field, Schur complements, constellations |
//! | [`weingarten`] | exact Weingarten values and Haar moments |
//! | [`mc`] | trials, summaries, rate regressions, polygon statistics |

#![no_std]
// `!(x > y)` deliberately rejects NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod error;
pub mod jordan;
pub mod limitlaw;
pub mod math;
pub mod matrix;
pub mod mc;
pub mod profiles;
pub mod randmat;
pub mod spectra;
pub mod weingarten;

pub use error::{Error, Result};
pub use matrix::CMatrix;
pub use num_complex::Complex64;
pub use randmat::SeededStream;
