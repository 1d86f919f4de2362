use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use super::{Kernel, MellinBSpline, TranslatedCombo};
use crate::{Error, Result};

/// A positive translate parameter held through its logarithm.
///
/// `e^<rational>` literals keep the exponent exactly; decimal literals keep
/// the value and its natural log.
#[derive(Debug, Clone, PartialEq)]
pub enum LogParam {
    Exp(Ratio<i64>),
    Decimal { value: f64, log: f64 },
}

impl LogParam {
    pub fn exp_of(numer: i64, denom: i64) -> Self {
        LogParam::Exp(Ratio::new(numer, denom))
    }

    pub fn from_value(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(LogParam::Decimal {
                value,
                log: value.ln(),
            })
        } else {
            Err(Error::Domain(format!(
                "translate parameter must be positive, got {value}"
            )))
        }
    }

    pub fn log_value(&self) -> f64 {
        match self {
            LogParam::Exp(r) => *r.numer() as f64 / *r.denom() as f64,
            LogParam::Decimal { log, .. } => *log,
        }
    }

    pub fn exact_log(&self) -> Option<Ratio<i64>> {
        match self {
            LogParam::Exp(r) => Some(*r),
            LogParam::Decimal { .. } => None,
        }
    }
}

impl fmt::Display for LogParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogParam::Exp(r) if *r.denom() == 1 => write!(f, "e^{}", r.numer()),
            LogParam::Exp(r) => write!(f, "e^{}/{}", r.numer(), r.denom()),
            LogParam::Decimal { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Parses an exact rational: `3`, `-1/2`, `0.25`.
pub(crate) fn parse_rational(s: &str) -> Option<Ratio<i64>> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let scale = 10i64.checked_pow(frac.len() as u32)?;
        let whole: i64 = if int_digits.is_empty() {
            0
        } else {
            int_digits.parse().ok()?
        };
        let f: i64 = frac.parse().ok()?;
        let mag = whole.checked_mul(scale)?.checked_add(f)?;
        return Some(Ratio::new(if negative { -mag } else { mag }, scale));
    }
    s.parse::<i64>().ok().map(Ratio::from_integer)
}

impl FromStr for LogParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if let Some(exp) = s.strip_prefix("e^") {
            parse_rational(exp)
                .map(LogParam::Exp)
                .ok_or_else(|| format!("exponent `{exp}` is not a rational literal"))
        } else {
            let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
            LogParam::from_value(v).map_err(|e| e.to_string())
        }
    }
}

/// Kernel specifier: `bspline:<n>` or `combo:<n>:<alpha>:<beta>`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    BSpline {
        order: usize,
    },
    Combo {
        order: usize,
        alpha: LogParam,
        beta: LogParam,
    },
}

impl KernelSpec {
    pub fn build(&self) -> Result<Box<dyn Kernel>> {
        Ok(match self {
            KernelSpec::BSpline { order } => Box::new(MellinBSpline::new(*order)?),
            KernelSpec::Combo { order, alpha, beta } => Box::new(TranslatedCombo::new(
                MellinBSpline::new(*order)?,
                alpha.clone(),
                beta.clone(),
            )?),
        })
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = Vec::new();
        let mut offset = 0;
        for part in s.split(':') {
            fields.push((offset, part));
            offset += part.len() + 1;
        }
        let order_at = |i: usize| -> Result<usize> {
            let (pos, tok) = fields[i];
            let n: usize = tok
                .parse()
                .map_err(|_| Error::parse(tok, pos, "expected a spline order"))?;
            if !(1..=10).contains(&n) {
                return Err(Error::parse(tok, pos, "spline order must be in 1..=10"));
            }
            Ok(n)
        };
        let param_at = |i: usize| -> Result<LogParam> {
            let (pos, tok) = fields[i];
            tok.parse().map_err(|m: String| Error::parse(tok, pos, m))
        };
        match fields[0].1 {
            "bspline" if fields.len() == 2 => Ok(KernelSpec::BSpline {
                order: order_at(1)?,
            }),
            "combo" if fields.len() == 4 => Ok(KernelSpec::Combo {
                order: order_at(1)?,
                alpha: param_at(2)?,
                beta: param_at(3)?,
            }),
            "bspline" | "combo" => Err(Error::parse(
                s,
                0,
                "expected `bspline:<n>` or `combo:<n>:<alpha>:<beta>`",
            )),
            other => Err(Error::parse(other, 0, "unknown kernel family")),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::BSpline { order } => write!(f, "bspline:{order}"),
            KernelSpec::Combo { order, alpha, beta } => write!(f, "combo:{order}:{alpha}:{beta}"),
        }
    }
}
