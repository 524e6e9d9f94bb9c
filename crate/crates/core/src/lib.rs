//! L2-optimal finite-support interpolation kernels and the tooling around them.
//!
//! The crate is organized bottom-up:
//!
//! * [`kernels`]: the [`Kernel`] contract, classical analytic kernels and blends.
//! * [`l2opt`]: the least-squares optimal kernels `H_L`, their closed forms for
//!   small supports, and a discretized least-squares solver used as an
//!   independent check.
//! * [`spectral`]: quadrature, frequency approximation error and Fourier samples.
//! * [`ilut`]: Q-rational interpolation look-up tables.
//! * [`resample`]: grayscale image buffers, separable zoom, lossless
//!   orthogonal transforms and rational rotation.
//! * [`pgm`], [`compare`], [`cli`]: file I/O, image metrics and the command line.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compare;
mod error;
pub mod format;
pub mod ilut;
pub mod kernels;
pub mod l2opt;
pub mod pgm;
pub mod resample;
pub mod spectral;

pub use error::{Error, Result};
pub use ilut::Ilut;
pub use kernels::{Kernel, KernelId};
pub use resample::{Boundary, ImageBuffer, ZoomSpec};
