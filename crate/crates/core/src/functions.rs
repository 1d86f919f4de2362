//! Test functions bundled with closed-form Mellin derivatives
//! `theta f(x) = x f'(x)` and its iterates.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::{Error, Result};

/// Highest Mellin derivative the built-ins provide.
pub const MAX_THETA_ORDER: usize = 4;

pub trait TestFunction: Send + Sync {
    fn label(&self) -> String;

    fn value(&self, x: f64) -> f64;

    /// `(theta^order f)(x)`; `order = 0` is the value itself. `None` when the
    /// derivative is not available in closed form.
    fn theta(&self, order: usize, x: f64) -> Option<f64>;

    fn max_theta_order(&self) -> usize;

    /// Interval on which sup-norms and errors are measured.
    fn eval_interval(&self) -> (f64, f64);

    fn theta_checked(&self, order: usize, x: f64) -> Result<f64> {
        self.theta(order, x)
            .ok_or_else(|| Error::MissingDerivative {
                label: self.label(),
                order,
            })
    }
}

/// `theta^r = sum_j S(r, j) x^j D^j` with Stirling numbers of the second kind.
const STIRLING2: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 3.0, 1.0, 0.0],
    [0.0, 1.0, 7.0, 6.0, 1.0],
];

fn theta_from_derivatives(order: usize, x: f64, d: &[f64; 5]) -> f64 {
    let mut xp = 1.0;
    let mut sum = 0.0;
    for (j, &s) in STIRLING2[order].iter().enumerate().take(order + 1) {
        if j > 0 {
            xp *= x;
        }
        sum += s * xp * d[j];
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// `f(x) = c`
    Const(f64),
    /// `f(x) = (log x)^k`, `k >= 1`
    LogPow(u32),
    /// `f(x) = x^a`; `theta^r f = a^r x^a`
    Power(f64),
    /// `f(x) = 1 - cos(4 e^x)` on `[0.5, 1]`
    Cos4Exp,
    /// `f(x) = sin(2 pi x) + 2 sin(pi x / 2)` on `[pi/2, 4]`
    SinMix,
}

impl Builtin {
    /// `D^0..D^4` of `1 - cos(y)`, `y = 4 e^x`; note `dy/dx = y`.
    fn cos4exp_derivatives(x: f64) -> [f64; 5] {
        let y = 4.0 * x.exp();
        let (s, c) = y.sin_cos();
        let (y2, y3, y4) = (y * y, y * y * y, y * y * y * y);
        [
            1.0 - c,
            y * s,
            y * s + y2 * c,
            y * s + 3.0 * y2 * c - y3 * s,
            y * s + 7.0 * y2 * c - 6.0 * y3 * s - y4 * c,
        ]
    }

    fn sinmix_derivatives(x: f64) -> [f64; 5] {
        let mut d = [0.0; 5];
        for (j, slot) in d.iter_mut().enumerate() {
            let shift = j as f64 * PI / 2.0;
            let a = 2.0 * PI;
            let b = PI / 2.0;
            *slot = a.powi(j as i32) * (a * x + shift).sin()
                + 2.0 * b.powi(j as i32) * (b * x + shift).sin();
        }
        d
    }
}

impl TestFunction for Builtin {
    fn label(&self) -> String {
        self.to_string()
    }

    fn value(&self, x: f64) -> f64 {
        match *self {
            Builtin::Const(c) => c,
            Builtin::LogPow(k) => x.ln().powi(k as i32),
            Builtin::Power(a) => x.powf(a),
            Builtin::Cos4Exp => 1.0 - (4.0 * x.exp()).cos(),
            Builtin::SinMix => (2.0 * PI * x).sin() + 2.0 * (PI * x / 2.0).sin(),
        }
    }

    fn theta(&self, order: usize, x: f64) -> Option<f64> {
        if order == 0 {
            return Some(self.value(x));
        }
        match *self {
            Builtin::Const(_) => Some(0.0),
            Builtin::LogPow(k) => {
                // theta^r (log x)^k = k!/(k-r)! (log x)^{k-r}
                let k = k as usize;
                if order > k {
                    return Some(0.0);
                }
                let falling: f64 = ((k - order + 1)..=k).map(|i| i as f64).product();
                Some(falling * x.ln().powi((k - order) as i32))
            }
            Builtin::Power(a) => Some(a.powi(order as i32) * x.powf(a)),
            Builtin::Cos4Exp if order <= MAX_THETA_ORDER => Some(theta_from_derivatives(
                order,
                x,
                &Self::cos4exp_derivatives(x),
            )),
            Builtin::SinMix if order <= MAX_THETA_ORDER => Some(theta_from_derivatives(
                order,
                x,
                &Self::sinmix_derivatives(x),
            )),
            _ => None,
        }
    }

    fn max_theta_order(&self) -> usize {
        match self {
            Builtin::Cos4Exp | Builtin::SinMix => MAX_THETA_ORDER,
            _ => usize::MAX,
        }
    }

    fn eval_interval(&self) -> (f64, f64) {
        match self {
            Builtin::Cos4Exp => (0.5, 1.0),
            Builtin::SinMix => (PI / 2.0, 4.0),
            _ => (0.5, 3.0),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Const(c) => write!(f, "const:{c}"),
            Builtin::LogPow(1) => write!(f, "log"),
            Builtin::LogPow(k) => write!(f, "logpow:{k}"),
            Builtin::Power(a) => write!(f, "pow:{a}"),
            Builtin::Cos4Exp => write!(f, "cos4exp"),
            Builtin::SinMix => write!(f, "sinmix"),
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let arg_pos = head.len() + 1;
        let number = |a: &str| -> Result<f64> {
            a.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(a, arg_pos, "expected a number"))
        };
        match (head, arg) {
            ("const", Some(a)) => Ok(Builtin::Const(number(a)?)),
            ("log", None) => Ok(Builtin::LogPow(1)),
            ("log2", None) => Ok(Builtin::LogPow(2)),
            ("log3", None) => Ok(Builtin::LogPow(3)),
            ("logpow", Some(a)) => match a.parse::<u32>() {
                Ok(k) if (1..=12).contains(&k) => Ok(Builtin::LogPow(k)),
                _ => Err(Error::parse(a, arg_pos, "expected a power in 1..=12")),
            },
            ("pow", Some(a)) => Ok(Builtin::Power(number(a)?)),
            ("cos4exp", None) => Ok(Builtin::Cos4Exp),
            ("sinmix", None) => Ok(Builtin::SinMix),
            _ => Err(Error::parse(s, 0, "unknown function")),
        }
    }
}

/// A test function assembled from closures.
#[derive(Clone)]
pub struct FnTestFunction {
    label: String,
    interval: (f64, f64),
    thetas: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl FnTestFunction {
    /// `thetas[0]` is `f`, `thetas[r]` is `theta^r f`.
    pub fn new(
        label: impl Into<String>,
        interval: (f64, f64),
        thetas: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> Self {
        assert!(!thetas.is_empty());
        FnTestFunction {
            label: label.into(),
            interval,
            thetas,
        }
    }
}

impl fmt::Debug for FnTestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnTestFunction")
            .field("label", &self.label)
            .field("orders", &(self.thetas.len() - 1))
            .finish()
    }
}

impl TestFunction for FnTestFunction {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn value(&self, x: f64) -> f64 {
        (self.thetas[0])(x)
    }
    fn theta(&self, order: usize, x: f64) -> Option<f64> {
        self.thetas.get(order).map(|g| g(x))
    }
    fn max_theta_order(&self) -> usize {
        self.thetas.len() - 1
    }
    fn eval_interval(&self) -> (f64, f64) {
        self.interval
    }
}
