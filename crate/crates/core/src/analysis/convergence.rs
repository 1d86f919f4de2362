use serde::{Serialize, Serializer};

use crate::combinations::{apply_combo_with, combo_moment_bracket_at, CombinationScheme};
use crate::functions::TestFunction;
use crate::kernels::Kernel;
use crate::moments::{algebraic_moment_log, kantorovich_bracket_log, MAX_BRACKET_ORDER};
use crate::operator::OperatorConfig;
use crate::{Error, Result};

/// Sup errors at or below this count as exact reproduction.
pub const ZERO_ERROR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FittedOrder {
    Finite(f64),
    /// The error vanished to round-off: the function is reproduced exactly.
    Infinite,
}

impl FittedOrder {
    pub fn value(self) -> f64 {
        match self {
            FittedOrder::Finite(v) => v,
            FittedOrder::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for FittedOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FittedOrder::Finite(v) => s.serialize_f64(*v),
            FittedOrder::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub w_list: Vec<f64>,
    /// Signed pointwise errors for asymptotic checks, sup errors for order
    /// studies.
    pub errors: Vec<f64>,
    /// `w^q * error` (asymptotic checks only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub scaled_errors: Vec<f64>,
    pub fitted_order: FittedOrder,
    pub fitted_constant: f64,
    pub predicted_limit: Option<f64>,
    /// `|scaled - predicted|` per rate for asymptotic checks; log-log fit
    /// residuals for order studies.
    pub deviations: Vec<f64>,
}

impl ConvergenceStudy {
    /// `|scaled - predicted| / |predicted|` at the largest rate.
    pub fn relative_deviation(&self) -> Option<f64> {
        let predicted = self.predicted_limit?;
        let last = *self.scaled_errors.last()?;
        Some((last - predicted).abs() / predicted.abs())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn check_w_list(w_list: &[f64], min_len: usize) -> Result<()> {
    if w_list.len() < min_len {
        return Err(Error::InvalidArgument(format!(
            "need at least {min_len} rates, got {}",
            w_list.len()
        )));
    }
    if w_list.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument("rates must be positive".into()));
    }
    if w_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument(
            "rates must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Least-squares fit of `log err = log C - order * log w` over the upper half
/// of the list. Returns `(order, C, residuals)`.
pub fn fit_order(w_list: &[f64], errors: &[f64]) -> (FittedOrder, f64, Vec<f64>) {
    let start = w_list.len() / 2;
    let ws = &w_list[start..];
    let es = &errors[start..];
    if es.iter().any(|e| e.abs() <= ZERO_ERROR) {
        return (FittedOrder::Infinite, 0.0, Vec::new());
    }
    let xs: Vec<f64> = ws.iter().map(|w| w.ln()).collect();
    let ys: Vec<f64> = es.iter().map(|e| e.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    (FittedOrder::Finite(-slope), intercept.exp(), residuals)
}

/// Scaled pointwise errors `w^q [(I f)(x) - f(x)]` against their predicted
/// limit. Without a scheme `q = 1` and the limit is
/// `theta f(x) / 2 * (1 + 2 m_1(chi, x^w))`; with a `p`-term scheme `q = p`
/// and the limit is `theta^p f(x) * Mbar_p / (p+1)!`, where `Mbar_p` sums
/// `c_i / i^p` times the order-`p` bracket at `x^{iw}`. Brackets are taken
/// at the largest rate.
pub fn voronovskaya_check(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    x: f64,
    w_list: &[f64],
    scheme: Option<&CombinationScheme>,
    quad_nodes: usize,
) -> Result<ConvergenceStudy> {
    check_w_list(w_list, 4)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "evaluation point must be positive, got {x}"
        )));
    }
    let single = CombinationScheme::single();
    let scheme = scheme.unwrap_or(&single);
    let q = scheme.p();
    if q > MAX_BRACKET_ORDER {
        return Err(Error::InvalidArgument(format!("scheme size {q} too large")));
    }
    let theta_q = f.theta_checked(q, x)?;
    let w_top = *w_list.last().expect("checked length");
    let log_x = x.ln();
    let factorial: f64 = (1..=q + 1).map(|k| k as f64).product();
    let predicted = if q == 1 {
        theta_q / 2.0 * (1.0 + 2.0 * algebraic_moment_log(kernel, 1, w_top * log_x))
    } else {
        theta_q * combo_moment_bracket_at(kernel, scheme, q, log_x, w_top)? / factorial
    };

    let base = OperatorConfig::new(w_list[0], quad_nodes)?;
    let fx = f.value(x);
    let mut errors = Vec::with_capacity(w_list.len());
    let mut scaled = Vec::with_capacity(w_list.len());
    for &w in w_list {
        let cfg = base.with_rate(w)?;
        let e = apply_combo_with(f, kernel, scheme, &cfg, x)? - fx;
        errors.push(e);
        scaled.push(w.powi(q as i32) * e);
    }
    let (fitted_order, fitted_constant, _) = fit_order(w_list, &errors);
    let deviations = scaled.iter().map(|s| (s - predicted).abs()).collect();
    Ok(ConvergenceStudy {
        w_list: w_list.to_vec(),
        errors,
        scaled_errors: scaled,
        fitted_order,
        fitted_constant,
        predicted_limit: Some(predicted),
        deviations,
    })
}

/// Sup error over `probe_grid` for each rate and a log-log fit of the order.
pub fn estimate_order(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    scheme: Option<&CombinationScheme>,
    w_list: &[f64],
    probe_grid: &[f64],
    quad_nodes: usize,
) -> Result<ConvergenceStudy> {
    check_w_list(w_list, 5)?;
    if probe_grid.is_empty() {
        return Err(Error::InvalidArgument("empty probe grid".into()));
    }
    let single = CombinationScheme::single();
    let scheme = scheme.unwrap_or(&single);
    let base = OperatorConfig::new(w_list[0], quad_nodes)?;
    let mut errors = Vec::with_capacity(w_list.len());
    for &w in w_list {
        let cfg = base.with_rate(w)?;
        let mut sup: f64 = 0.0;
        for &x in probe_grid {
            let e = (apply_combo_with(f, kernel, scheme, &cfg, x)? - f.value(x)).abs();
            sup = sup.max(e);
        }
        errors.push(sup);
    }
    let (fitted_order, fitted_constant, deviations) = fit_order(w_list, &errors);
    Ok(ConvergenceStudy {
        w_list: w_list.to_vec(),
        errors,
        scaled_errors: Vec::new(),
        fitted_order,
        fitted_constant,
        predicted_limit: None,
        deviations,
    })
}

/// Truncated expansion of `(I_w f)(x) - f(x)`:
/// `sum_{i=1}^r theta^i f(x) / ((i+1)! w^i) * bracket_i(chi, x^w)`.
pub fn expansion_prediction(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    x: f64,
    w: f64,
    r: usize,
) -> Result<f64> {
    if r == 0 || r > MAX_BRACKET_ORDER || r > f.max_theta_order() {
        return Err(Error::InvalidArgument(format!(
            "expansion order {r} not available for `{}`",
            f.label()
        )));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "evaluation point must be positive, got {x}"
        )));
    }
    let s = w * x.ln();
    let mut total = 0.0;
    let mut factorial = 1.0;
    for i in 1..=r {
        factorial *= (i + 1) as f64;
        let theta = f.theta_checked(i, x)?;
        total += theta / (factorial * w.powi(i as i32)) * kantorovich_bracket_log(kernel, i, s);
    }
    Ok(total)
}
