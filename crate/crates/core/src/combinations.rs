//! Linear combinations `I_{w,p} f = sum_{i=1}^p c_i I_{iw} f`.
//!
//! The coefficients solve
//!
//! ```text
//! sum_i c_i = 1,   sum_i c_i / i^k = 0   (k = 1, ..., p-1)
//! ```
//!
//! which cancels the `w^{-1}, ..., w^{-(p-1)}` terms of the asymptotic
//! expansion whenever the kernel brackets are constant in `u`.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::functions::TestFunction;
use crate::kernels::Kernel;
use crate::moments::{kantorovich_bracket, kantorovich_bracket_log, MAX_BRACKET_ORDER};
use crate::operator::{apply_log, OperatorConfig};
use crate::{Error, Result};

pub type Rational = Ratio<i128>;

pub const MAX_SCHEME_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinationScheme {
    coeffs: Vec<Rational>,
}

impl CombinationScheme {
    /// The plain operator, `p = 1`.
    pub fn single() -> Self {
        CombinationScheme {
            coeffs: vec![Rational::one()],
        }
    }

    /// Exact Gaussian elimination on the `p x p` system in the nodes `1/i`.
    pub fn solve(p: usize) -> Result<Self> {
        if !(1..=MAX_SCHEME_SIZE).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "combination size p must be in 1..={MAX_SCHEME_SIZE}, got {p}"
            )));
        }
        // row k: sum_i c_i / i^k = [k == 0]
        let mut rows: Vec<Vec<Rational>> = (0..p)
            .map(|k| {
                let mut row: Vec<Rational> = (1..=p)
                    .map(|i| Rational::new(1, (i as i128).pow(k as u32)))
                    .collect();
                row.push(if k == 0 {
                    Rational::one()
                } else {
                    Rational::zero()
                });
                row
            })
            .collect();

        for col in 0..p {
            let pivot = (col..p)
                .find(|&r| !rows[r][col].is_zero())
                .ok_or_else(|| Error::InvalidArgument("singular coefficient system".into()))?;
            rows.swap(col, pivot);
            let inv = rows[col][col].recip();
            for v in rows[col].iter_mut() {
                *v *= inv;
            }
            let pivot = rows[col].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let factor = row[col];
                    for (v, pv) in row.iter_mut().zip(&pivot).skip(col) {
                        *v -= factor * *pv;
                    }
                }
            }
        }
        Ok(CombinationScheme {
            coeffs: rows.into_iter().map(|row| row[p]).collect(),
        })
    }

    pub fn from_coefficients(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("empty combination".into()));
        }
        Ok(CombinationScheme { coeffs })
    }

    pub fn p(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|&c| rational_to_f64(c)).collect()
    }

    /// `sum_i c_i / i^k`, exactly.
    pub fn power_sum(&self, k: u32) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c / ((i as i128 + 1).pow(k)))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn power_sum_f64(&self, k: u32) -> f64 {
        rational_to_f64(self.power_sum(k))
    }

    /// True when all order conditions hold exactly.
    pub fn satisfies_system(&self) -> bool {
        self.power_sum(0).is_one() && (1..self.p() as u32).all(|k| self.power_sum(k).is_zero())
    }

    /// Largest `|c_i|`; drives round-off amplification in evaluation.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| rational_to_f64(c.abs()))
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for CombinationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(*c))?;
        }
        write!(f, ")")
    }
}

/// `-1/6` style; integers without a denominator.
pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn solve_coefficients(p: usize) -> Result<CombinationScheme> {
    CombinationScheme::solve(p)
}

/// `sum_i c_i (I_{iw} f)(x)`.
pub fn apply_combo(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    scheme: &CombinationScheme,
    w: f64,
    x: f64,
    quad_nodes: usize,
) -> Result<f64> {
    let cfg = OperatorConfig::new(w, quad_nodes)?;
    apply_combo_with(f, kernel, scheme, &cfg, x)
}

pub fn apply_combo_with(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    scheme: &CombinationScheme,
    cfg: &OperatorConfig,
    x: f64,
) -> Result<f64> {
    Ok(combo_terms(f, kernel, scheme, cfg, x)?
        .iter()
        .zip(scheme.coefficients_f64())
        .map(|(v, c)| c * v)
        .sum())
}

/// `(I_{iw} f)(x)` for `i = 1..=p`.
pub fn combo_terms(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    scheme: &CombinationScheme,
    cfg: &OperatorConfig,
    x: f64,
) -> Result<Vec<f64>> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "evaluation point must be positive, got {x}"
        )));
    }
    let log_x = x.ln();
    (1..=scheme.p())
        .into_par_iter()
        .map(|i| {
            let sub = cfg.with_rate(cfg.w() * i as f64)?;
            Ok(apply_log(f, kernel, &sub, log_x))
        })
        .collect()
}

/// `sum_i c_i / i^k * bracket_k(chi, u)` with a single `u` for every rate.
pub fn combo_moment_bracket(
    kernel: &dyn Kernel,
    scheme: &CombinationScheme,
    k: usize,
    u: f64,
) -> Result<f64> {
    Ok(scheme.power_sum_f64(k as u32) * kantorovich_bracket(kernel, k, u)?)
}

/// Same sum with each rate's own node base: `u_i = x^{iw}`.
pub fn combo_moment_bracket_at(
    kernel: &dyn Kernel,
    scheme: &CombinationScheme,
    k: usize,
    log_x: f64,
    w: f64,
) -> Result<f64> {
    if k > MAX_BRACKET_ORDER {
        return Err(Error::InvalidArgument(format!(
            "bracket order {k} exceeds {MAX_BRACKET_ORDER}"
        )));
    }
    Ok(scheme
        .coefficients_f64()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let i = idx as f64 + 1.0;
            c / i.powi(k as i32) * kantorovich_bracket_log(kernel, k, i * w * log_x)
        })
        .sum())
}
