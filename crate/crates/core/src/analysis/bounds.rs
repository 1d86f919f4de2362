use std::collections::BTreeMap;

use serde::Serialize;

use super::sup_abs;
use crate::combinations::CombinationScheme;
use crate::functions::TestFunction;
use crate::kernels::Kernel;
use crate::moments::{absolute_moment_sup, algebraic_moment_log, periodic_max, DEFAULT_SUP_GRID};
use crate::operator::{apply_log, OperatorConfig};
use crate::{Error, Result};

/// Absolute slack in `lhs <= rhs + slack`.
pub const BOUND_SLACK: f64 = 1e-12;

/// Vanishing-moment tolerance for the higher-order estimate.
const MOMENT_ZERO_TOL: f64 = 1e-10;

/// Periodic grid used to check that lower moments vanish for every `u`.
const MOMENT_CHECK_GRID: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Satisfied,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub estimate: String,
    pub x: f64,
    pub w: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub status: BoundStatus,
    pub surrogate_desc: String,
    /// Moment sups and the derived constants entering the right side.
    pub constants: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn satisfied(&self) -> bool {
        self.status == BoundStatus::Satisfied
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn status_of(lhs: f64, rhs: f64) -> BoundStatus {
    if lhs <= rhs + BOUND_SLACK {
        BoundStatus::Satisfied
    } else {
        BoundStatus::Violated
    }
}

/// Sup-norm interval: the function's evaluation interval, extended to
/// contain `x`, widened by the kernel reach at rate `w` in log space.
fn norm_interval(f: &dyn TestFunction, kernel: &dyn Kernel, x: f64, w: f64) -> (f64, f64) {
    let (lo, hi) = f.eval_interval();
    let delta = (kernel.log_support().radius() + 1.0) / w;
    (lo.min(x) * (-delta).exp(), hi.max(x) * delta.exp())
}

struct Surrogate {
    value: f64,
    desc: String,
    notes: Vec<String>,
}

/// Upper bound of `inf_g ||theta^r (f - g)|| + eps ||theta^{r+1} g||` by a
/// minimum over `f` itself and the supplied candidates.
fn k_functional(
    f: &dyn TestFunction,
    candidates: &[&dyn TestFunction],
    r: usize,
    eps: f64,
    (lo, hi): (f64, f64),
) -> Result<Surrogate> {
    f.theta_checked(r, lo)?;
    let mut notes = Vec::new();
    let mut tried = Vec::new();
    let mut best: Option<(f64, String)> = None;
    let mut consider = |value: f64, label: String| {
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, label));
        }
    };
    if f.max_theta_order() > r {
        let value = eps * sup_abs(|z| f.theta(r + 1, z).unwrap_or(f64::NAN), lo, hi);
        tried.push("f".to_string());
        consider(value, "f".to_string());
    }
    for g in candidates {
        if g.max_theta_order() <= r {
            notes.push(format!(
                "candidate `{}` skipped: no derivative of order {}",
                g.label(),
                r + 1
            ));
            continue;
        }
        let diff = sup_abs(
            |z| f.theta(r, z).unwrap_or(f64::NAN) - g.theta(r, z).unwrap_or(f64::NAN),
            lo,
            hi,
        );
        let smooth = sup_abs(|z| g.theta(r + 1, z).unwrap_or(f64::NAN), lo, hi);
        let value = diff + eps * smooth;
        tried.push(g.label());
        consider(value, g.label());
    }
    let (value, label) = best.ok_or_else(|| {
        Error::Precondition(format!(
            "no smooth candidate available: `{}` lacks a derivative of order {} and no usable candidate was given",
            f.label(),
            r + 1
        ))
    })?;
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "K-functional surrogate is not finite on [{lo}, {hi}]"
        )));
    }
    let desc = format!(
        "min over g in {{{}}} of sup|theta^{r}(f-g)| + eps*sup|theta^{}g| on [{}, {}]; best g = {}",
        tried.join(", "),
        r + 1,
        crate::format::sig(lo, 6),
        crate::format::sig(hi, 6),
        label
    );
    Ok(Surrogate { value, desc, notes })
}

/// `|(I_w f)(x) - f(x) - theta f(x)/(2w) (1 + 2 m_1(chi, x^w))|` against
/// `(1 + 2 M_1)/w * K(eps)` with `eps = (1 + 3 M_1 + 3 M_2) / (6 w (1 + 2 M_1))`.
pub fn first_order_bound(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    cfg: &OperatorConfig,
    x: f64,
    candidates: &[&dyn TestFunction],
) -> Result<BoundReport> {
    let mut report =
        combination_bound(f, kernel, &CombinationScheme::single(), cfg, x, candidates)?;
    report.estimate = "first-order".into();
    report
        .constants
        .retain(|k, _| k == "M1" || k == "M2" || k == "eps");
    Ok(report)
}

/// Higher-order estimate for kernels whose moments `m_1 .. m_{r-1}` vanish:
/// `|(I_w f)(x) - f(x) - sum_{i<=r} theta^i f(x)/((i+1)! w^i)
///  - theta^r f(x) m_r(chi, x^w)/(r! w^r)|`
/// against `2A/(w^r (r+1)!) * K(B/(2A(r+1)w))` with
/// `A = 1 + (r+1) M_r` and `B = 1 + (r+2) M_{r+1}`.
pub fn higher_order_bound(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    cfg: &OperatorConfig,
    x: f64,
    r: usize,
    candidates: &[&dyn TestFunction],
) -> Result<BoundReport> {
    if !(1..=3).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "order r must be 1, 2 or 3, got {r}"
        )));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "evaluation point must be positive, got {x}"
        )));
    }
    let w = cfg.w();
    let s = w * x.ln();
    for j in 1..r {
        let uniform = periodic_max(
            |t| algebraic_moment_log(kernel, j, t).abs(),
            MOMENT_CHECK_GRID,
        );
        let local = algebraic_moment_log(kernel, j, s).abs();
        let worst = uniform.max(local);
        if worst > MOMENT_ZERO_TOL {
            return Err(Error::Precondition(format!(
                "moment m_{j} of `{}` does not vanish (max |m_{j}| = {}), so order r = {r} is not admissible",
                kernel.label(),
                crate::format::sig(worst, 6)
            )));
        }
    }

    let mut expansion = 0.0;
    let mut factorial = 1.0;
    for i in 1..=r {
        factorial *= (i + 1) as f64;
        expansion += f.theta_checked(i, x)? / (factorial * w.powi(i as i32));
    }
    let r_factorial = factorial / (r + 1) as f64;
    let theta_r = f.theta_checked(r, x)?;
    let m_r = algebraic_moment_log(kernel, r, s);
    expansion += theta_r * m_r / (r_factorial * w.powi(r as i32));
    let lhs = (apply_log(f, kernel, cfg, x.ln()) - f.value(x) - expansion).abs();

    let big_m_r = absolute_moment_sup(kernel, r, DEFAULT_SUP_GRID)?;
    let big_m_r1 = absolute_moment_sup(kernel, r + 1, DEFAULT_SUP_GRID)?;
    let a = 1.0 + (r + 1) as f64 * big_m_r;
    let b = 1.0 + (r + 2) as f64 * big_m_r1;
    let eps = b / (2.0 * a * (r + 1) as f64 * w);
    let interval = norm_interval(f, kernel, x, w);
    let k = k_functional(f, candidates, r, eps, interval)?;
    let rhs = 2.0 * a / (w.powi(r as i32) * factorial) * k.value;

    let mut constants = BTreeMap::new();
    constants.insert(format!("M{r}"), big_m_r);
    constants.insert(format!("M{}", r + 1), big_m_r1);
    constants.insert("A".into(), a);
    constants.insert("B".into(), b);
    constants.insert("eps".into(), eps);
    constants.insert(format!("m{r}(x^w)"), m_r);
    Ok(BoundReport {
        estimate: format!("higher-order(r={r})"),
        x,
        w,
        lhs,
        rhs,
        status: status_of(lhs, rhs),
        surrogate_desc: k.desc,
        constants,
        notes: k.notes,
    })
}

/// Estimate for `I_{w,p} = sum_i c_i I_{iw}`:
/// `|I_{w,p} f(x) - f(x) - sum_i c_i/i * theta f(x)/(2w) (1 + 2 m_1(chi, x^{iw}))|`
/// against `(1 + 2 M_1)/w * S_1 * K(A/B / (6w))` with `S_1 = sum c_i/i`,
/// `A = sum c_i/i^2 (1 + 3 M_1 + 3 M_2)` and `B = S_1 (1 + 2 M_1)`.
/// Marked not applicable when `S_1 <= 0`, `B <= 0` or the right side is
/// negative.
pub fn combination_bound(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    scheme: &CombinationScheme,
    cfg: &OperatorConfig,
    x: f64,
    candidates: &[&dyn TestFunction],
) -> Result<BoundReport> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "evaluation point must be positive, got {x}"
        )));
    }
    let w = cfg.w();
    let log_x = x.ln();
    let theta = f.theta_checked(1, x)?;
    let coeffs = scheme.coefficients_f64();
    let mut approx = 0.0;
    let mut first_term = 0.0;
    for (idx, c) in coeffs.iter().enumerate() {
        let i = (idx + 1) as f64;
        let sub = cfg.with_rate(w * i)?;
        approx += c * apply_log(f, kernel, &sub, log_x);
        let m1 = algebraic_moment_log(kernel, 1, i * w * log_x);
        first_term += c / i * (theta / (2.0 * w) * (1.0 + 2.0 * m1));
    }
    let lhs = (approx - f.value(x) - first_term).abs();

    let m1 = absolute_moment_sup(kernel, 1, DEFAULT_SUP_GRID)?;
    let m2 = absolute_moment_sup(kernel, 2, DEFAULT_SUP_GRID)?;
    let s1 = scheme.power_sum_f64(1);
    let s2 = scheme.power_sum_f64(2);
    let a = s2 * (1.0 + 3.0 * m1 + 3.0 * m2);
    let b = s1 * (1.0 + 2.0 * m1);

    let mut constants = BTreeMap::new();
    constants.insert("M1".into(), m1);
    constants.insert("M2".into(), m2);
    constants.insert("S1".into(), s1);
    constants.insert("A".into(), a);
    constants.insert("B".into(), b);
    let mut notes = vec![
        "the right side bounds the K-functional of theta f (sup|theta(f-g)| + eps*sup|theta^2 g|), as the derivation requires".to_string(),
    ];

    if s1 <= 0.0 || b <= 0.0 {
        notes.push(format!(
            "sum c_i/i = {} is not positive, so the right side degenerates",
            crate::format::sig(s1, 6)
        ));
        return Ok(BoundReport {
            estimate: "combination".into(),
            x,
            w,
            lhs,
            rhs: 0.0,
            status: BoundStatus::NotApplicable,
            surrogate_desc: "not evaluated".into(),
            constants,
            notes,
        });
    }
    let eps = a / (b * 6.0 * w);
    constants.insert("eps".into(), eps);
    let interval = norm_interval(f, kernel, x, w);
    let k = k_functional(f, candidates, 1, eps, interval)?;
    notes.extend(k.notes);
    let rhs = (1.0 + 2.0 * m1) / w * s1 * k.value;
    let status = if rhs < 0.0 {
        notes.push("right side is negative".into());
        BoundStatus::NotApplicable
    } else {
        status_of(lhs, rhs)
    };
    Ok(BoundReport {
        estimate: "combination".into(),
        x,
        w,
        lhs,
        rhs,
        status,
        surrogate_desc: k.desc,
        constants,
        notes,
    })
}
