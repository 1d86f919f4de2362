//! Discrete moments of a kernel.
//!
//! For `s = log u`:
//!
//! ```text
//! m_nu(chi, u) = sum_k chi(e^{-k} u) (k - s)^nu
//! M_nu(chi, u) = sum_k |chi(e^{-k} u)| |k - s|^nu
//! M_nu(chi)    = sup_u M_nu(chi, u)
//! ```
//!
//! Both maps are 1-periodic in `s`, so suprema are taken over `s in [0, 1)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::kernels::{Frequency, Kernel};
use crate::{Error, Result};

pub const MAX_MOMENT_ORDER: usize = 8;
pub const MAX_BRACKET_ORDER: usize = 6;
pub const DEFAULT_SUP_GRID: usize = 4096;

/// Tolerance under which a moment map counts as constant in `u`.
pub const U_INDEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub order: usize,
    pub at_u: Option<f64>,
    pub algebraic: f64,
    pub absolute_sup: f64,
    pub u_independent: bool,
}

fn check_order(nu: usize, max: usize) -> Result<()> {
    if nu > max {
        Err(Error::InvalidArgument(format!(
            "moment order {nu} exceeds {max}"
        )))
    } else {
        Ok(())
    }
}

fn log_of(u: f64) -> Result<f64> {
    if u > 0.0 && u.is_finite() {
        Ok(u.ln())
    } else {
        Err(Error::Domain(format!(
            "moment location must be positive, got {u}"
        )))
    }
}

/// `m_nu(chi, e^s)`.
pub fn algebraic_moment_log(kernel: &dyn Kernel, nu: usize, s: f64) -> f64 {
    let support = kernel.log_support();
    support
        .window(s)
        .map(|k| {
            let d = k as f64 - s;
            kernel.eval_log(s - k as f64) * d.powi(nu as i32)
        })
        .sum()
}

/// `M_nu(chi, e^s)`.
pub fn absolute_moment_log(kernel: &dyn Kernel, nu: usize, s: f64) -> f64 {
    let support = kernel.log_support();
    support
        .window(s)
        .map(|k| {
            let d = (k as f64 - s).abs();
            kernel.eval_log(s - k as f64).abs() * d.powi(nu as i32)
        })
        .sum()
}

pub fn algebraic_moment(kernel: &dyn Kernel, nu: usize, u: f64) -> Result<f64> {
    check_order(nu, MAX_MOMENT_ORDER)?;
    Ok(algebraic_moment_log(kernel, nu, log_of(u)?))
}

pub fn absolute_moment(kernel: &dyn Kernel, nu: usize, u: f64) -> Result<f64> {
    check_order(nu, MAX_MOMENT_ORDER)?;
    Ok(absolute_moment_log(kernel, nu, log_of(u)?))
}

/// `M_nu(chi)`: dense grid over one period of `log u`, then a zoom around the
/// best grid point.
pub fn absolute_moment_sup(kernel: &dyn Kernel, nu: usize, grid_size: usize) -> Result<f64> {
    check_order(nu, MAX_MOMENT_ORDER)?;
    if grid_size < 16 {
        return Err(Error::InvalidArgument(format!(
            "sup grid needs at least 16 points, got {grid_size}"
        )));
    }
    let f = |s: f64| absolute_moment_log(kernel, nu, s);
    Ok(periodic_max(f, grid_size))
}

/// Maximum of a 1-periodic function: grid search then repeated local zooms
/// down to a bracket width of about 1e-12.
pub(crate) fn periodic_max<F: Fn(f64) -> f64>(f: F, grid_size: usize) -> f64 {
    let h = 1.0 / grid_size as f64;
    let (mut best_s, mut best) = (0.0, f(0.0));
    for i in 1..grid_size {
        let s = i as f64 * h;
        let v = f(s);
        if v > best {
            best = v;
            best_s = s;
        }
    }
    let mut width = h;
    while width > 1e-12 {
        let center = best_s;
        for j in -16i32..=16 {
            let s = center + width * j as f64 / 16.0;
            let v = f(s);
            if v > best {
                best = v;
                best_s = s;
            }
        }
        width /= 8.0;
    }
    best
}

/// True when `m_nu(chi, .)` varies by less than [`U_INDEPENDENCE_TOL`] over
/// a grid of one period.
pub fn is_u_independent(kernel: &dyn Kernel, nu: usize, grid_size: usize) -> bool {
    let first = algebraic_moment_log(kernel, nu, 0.0);
    (1..grid_size).all(|i| {
        let s = i as f64 / grid_size as f64;
        (algebraic_moment_log(kernel, nu, s) - first).abs() < U_INDEPENDENCE_TOL
    })
}

/// `m_nu(chi, u)` through Mellin–Poisson summation:
///
/// ```text
/// m_nu(chi, e^s) = sum_m i^nu (d/dt)^nu M[chi](i t)|_{t = 2 pi m} e^{-2 pi i m s}
/// ```
///
/// truncated to `|m| <= k_max`.
pub fn poisson_moment(kernel: &dyn Kernel, nu: usize, u: f64, k_max: usize) -> Result<f64> {
    check_order(nu, MAX_MOMENT_ORDER)?;
    let s = log_of(u)?;
    let i_pow = Complex64::new(0.0, 1.0).powu(nu as u32);
    let mut total = Complex64::new(0.0, 0.0);
    let k_max = k_max as i64;
    for m in -k_max..=k_max {
        let d = kernel
            .mellin_transform_derivative(nu, Frequency::Harmonic(m))
            .ok_or_else(|| Error::MissingTransform(kernel.label()))?;
        if d == Complex64::new(0.0, 0.0) {
            continue;
        }
        // reduce m s mod 1 before scaling by 2 pi
        let phase = -2.0 * std::f64::consts::PI * (m as f64 * s).rem_euclid(1.0);
        total += i_pow * d * Complex64::from_polar(1.0, phase);
    }
    Ok(total.re)
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * (n - i) as u64 / (i + 1) as u64;
    }
    c
}

/// `sum_{j=1}^{i+1} C(i+1, j) m_{i-j+1}(chi, e^s)`: the cell-averaged moment
/// multiplying `theta^i f(x) / ((i+1)! w^i)` when `s = w log x`.
pub fn kantorovich_bracket_log(kernel: &dyn Kernel, i: usize, s: f64) -> f64 {
    (1..=i + 1)
        .map(|j| binomial(i + 1, j) as f64 * algebraic_moment_log(kernel, i + 1 - j, s))
        .sum()
}

pub fn kantorovich_bracket(kernel: &dyn Kernel, i: usize, u: f64) -> Result<f64> {
    check_order(i, MAX_BRACKET_ORDER)?;
    Ok(kantorovich_bracket_log(kernel, i, log_of(u)?))
}

/// `sum_{|k - s| > gamma} |chi(e^{s-k})| |k - s|^r`.
pub fn moment_tail(kernel: &dyn Kernel, r: usize, s: f64, gamma: f64) -> f64 {
    kernel
        .log_support()
        .window(s)
        .filter(|&k| (k as f64 - s).abs() > gamma)
        .map(|k| kernel.eval_log(s - k as f64).abs() * (k as f64 - s).abs().powi(r as i32))
        .sum()
}

pub fn moment_report(
    kernel: &dyn Kernel,
    nu: usize,
    at_u: Option<f64>,
    grid_size: usize,
) -> Result<MomentReport> {
    let algebraic = algebraic_moment(kernel, nu, at_u.unwrap_or(1.0))?;
    let absolute_sup = absolute_moment_sup(kernel, nu, grid_size)?;
    Ok(MomentReport {
        order: nu,
        at_u,
        algebraic,
        absolute_sup,
        u_independent: is_u_independent(kernel, nu, grid_size.min(1024)),
    })
}
