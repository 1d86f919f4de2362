//! Kernels `chi: R+ -> R` with compact support in `log u`.
//!
//! Every kernel is described as a function of `t = log u`; the operator and
//! the moment sums only ever need `chi(e^{t})`, so evaluation in log space is
//! the primary entry point and [`Kernel::eval`] is a thin wrapper.

mod bspline;
mod mellin;
mod spec;
mod translated;

use std::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

pub use bspline::MellinBSpline;
pub use mellin::{sinc_derivatives, sinc_power_jet};
pub use spec::{KernelSpec, LogParam};
pub use translated::TranslatedCombo;

/// Closed interval `[lo, hi]` in `log u` outside of which the kernel vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSupport {
    pub lo: f64,
    pub hi: f64,
}

impl LogSupport {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        LogSupport { lo, hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    /// Largest `|t|` with `t` in the interval.
    pub fn radius(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Integers `k` with `center - k` possibly inside the support, widened by
    /// one on each side so rounding in `center` never drops a term.
    pub fn window(&self, center: f64) -> std::ops::RangeInclusive<i64> {
        let first = (center - self.hi).ceil() as i64 - 1;
        let last = (center - self.lo).floor() as i64 + 1;
        first..=last
    }
}

/// Point at which the Mellin transform `t -> M[chi](i t)` is differentiated.
///
/// `Harmonic(m)` stands for `t = 2 pi m` and lets implementations use exact
/// values of `sin(pi m)` and `cos(pi m)`, which keeps the zeros of the
/// B-spline transforms exact for Poisson summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    Real(f64),
    Harmonic(i64),
}

impl Frequency {
    pub fn value(self) -> f64 {
        match self {
            Frequency::Real(t) => t,
            Frequency::Harmonic(m) => 2.0 * std::f64::consts::PI * m as f64,
        }
    }
}

pub trait Kernel: Send + Sync + fmt::Debug {
    fn label(&self) -> String;

    /// `chi(e^t)`.
    fn eval_log(&self, t: f64) -> f64;

    fn log_support(&self) -> LogSupport;

    /// `j`-th derivative of `t -> M[chi](i t)`, if the kernel has a closed form.
    fn mellin_transform_derivative(&self, _j: usize, _at: Frequency) -> Option<Complex64> {
        None
    }

    /// `M[chi](i t)`.
    fn mellin_transform(&self, t: f64) -> Option<Complex64> {
        self.mellin_transform_derivative(0, Frequency::Real(t))
    }

    /// `chi(u)` for `u > 0`.
    fn eval(&self, u: f64) -> Result<f64> {
        if u > 0.0 && u.is_finite() {
            Ok(self.eval_log(u.ln()))
        } else {
            Err(Error::Domain(format!(
                "kernel argument must be positive, got {u}"
            )))
        }
    }
}

impl<K: Kernel + ?Sized> Kernel for Box<K> {
    fn label(&self) -> String {
        (**self).label()
    }
    fn eval_log(&self, t: f64) -> f64 {
        (**self).eval_log(t)
    }
    fn log_support(&self) -> LogSupport {
        (**self).log_support()
    }
    fn mellin_transform_derivative(&self, j: usize, at: Frequency) -> Option<Complex64> {
        (**self).mellin_transform_derivative(j, at)
    }
}

/// `sum_k chi(e^{-k} x^w)` evaluated from `w log x`. Equals 1 for any valid
/// kernel.
pub fn partition_of_unity_sum(kernel: &dyn Kernel, w_log_x: f64) -> f64 {
    let support = kernel.log_support();
    support
        .window(w_log_x)
        .map(|k| kernel.eval_log(w_log_x - k as f64))
        .sum()
}
