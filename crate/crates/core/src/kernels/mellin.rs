//! Taylor jets of `S_n(t) = (sin(t/2) / (t/2))^n`, the Mellin transform of
//! the order-`n` B-spline along the imaginary axis.
//!
//! Derivatives at the Poisson frequencies `t = 2 pi m` are needed up to order
//! 8. Numerical differentiation at those zeros is hopeless, so the jets are
//! built from exact series: `sin` around `pi m` uses `sin(pi m) = 0` and
//! `cos(pi m) = (-1)^m` exactly, and powers are taken by truncated series
//! multiplication.

use super::Frequency;

/// Taylor coefficients `a_0..=a_degree` of `sinc(x) = sin(x)/x` around `x0`,
/// where `x0 = at.value() / 2`.
pub fn sinc_derivatives(at: Frequency, degree: usize) -> Vec<f64> {
    match at {
        Frequency::Harmonic(0) => sinc_series_at(0.0, degree),
        Frequency::Harmonic(m) => {
            let x0 = std::f64::consts::PI * m as f64;
            let cos0 = if m % 2 == 0 { 1.0 } else { -1.0 };
            sinc_from_trig(x0, 0.0, cos0, degree)
        }
        Frequency::Real(t) => {
            let x0 = 0.5 * t;
            if x0.abs() < 2.0 {
                sinc_series_at(x0, degree)
            } else {
                sinc_from_trig(x0, x0.sin(), x0.cos(), degree)
            }
        }
    }
}

/// Taylor coefficients of `h -> S_n(t0 + h)` with `t0 = at.value()`.
pub fn sinc_power_jet(order: usize, at: Frequency, degree: usize) -> Vec<f64> {
    let mut base = sinc_derivatives(at, degree);
    // x = t/2, so the coefficient of h^l picks up 2^{-l}
    let mut scale = 1.0;
    for c in base.iter_mut() {
        *c *= scale;
        scale *= 0.5;
    }
    let mut out = vec![0.0; degree + 1];
    out[0] = 1.0;
    for _ in 0..order {
        out = series_mul(&out, &base);
    }
    out
}

pub(crate) fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    let mut out = vec![0.0; n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Power series of sinc recentred at a small `x0`:
/// `a_j = sum_k (-1)^k C(2k, j) x0^{2k-j} / (2k+1)!`.
fn sinc_series_at(x0: f64, degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; degree + 1];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut sum = 0.0;
        let k0 = j.div_ceil(2);
        for k in k0..k0 + 40 {
            let p = 2 * k;
            // C(p, j) x0^{p-j} / (p+1)!
            let mut term = 1.0;
            for i in 0..j {
                term *= (p - i) as f64 / (i + 1) as f64;
            }
            let pow = (p - j) as i32;
            if pow > 0 {
                if x0 == 0.0 {
                    continue;
                }
                term *= x0.powi(pow);
            }
            let fact: f64 = (2..=p + 1).map(|i| i as f64).product();
            term /= fact;
            if k % 2 == 1 {
                term = -term;
            }
            sum += term;
            if term.abs() < 1e-300 {
                break;
            }
        }
        *slot = sum;
    }
    out
}

/// Product of the series of `sin(x0 + h)` and `1/(x0 + h)`; valid for
/// `|x0|` away from zero.
fn sinc_from_trig(x0: f64, sin0: f64, cos0: f64, degree: usize) -> Vec<f64> {
    let mut sin_series = Vec::with_capacity(degree + 1);
    let mut fact = 1.0;
    for l in 0..=degree {
        if l > 0 {
            fact *= l as f64;
        }
        let d = match l % 4 {
            0 => sin0,
            1 => cos0,
            2 => -sin0,
            _ => -cos0,
        };
        sin_series.push(d / fact);
    }
    let inv: Vec<f64> = (0..=degree)
        .map(|l| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            sign / x0.powi(l as i32 + 1)
        })
        .collect();
    series_mul(&sin_series, &inv)
}
