//! Kantorovich-type exponential sampling operators.
//!
//! The operator reconstructs a function on the positive half-line from local
//! averages of `f(e^u)` over the cells `[k/w, (k+1)/w]`:
//!
//! ```text
//! (I_w f)(x) = sum_k chi(e^{-k} x^w) * w * integral_{k/w}^{(k+1)/w} f(e^u) du
//! ```
//!
//! Crate layout:
//!
//! * [`kernels`]: the [`Kernel`](kernels::Kernel) trait, Mellin B-splines and
//!   two-translate combinations, with closed-form Mellin transforms.
//! * [`moments`]: algebraic/absolute discrete moments, by direct summation and
//!   by Mellin–Poisson summation.
//! * [`operator`]: operator evaluation from analytic functions or stored
//!   sample means.
//! * [`combinations`]: exact-rational coefficients for `sum c_i I_{iw}`.
//! * [`analysis`]: asymptotic constants, order fits, error bounds, tables.
//! * [`cli`]: the `expsamp` command-line front end.

pub mod analysis;
pub mod cli;
pub mod combinations;
mod error;
pub mod format;
pub mod functions;
pub mod kernels;
pub mod moments;
pub mod operator;
pub mod quadrature;

pub use error::{Error, Result};
