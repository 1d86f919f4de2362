use num_complex::Complex64;
use num_rational::Ratio;

use super::{mellin, Frequency, Kernel, LogParam, LogSupport, MellinBSpline};
use crate::{Error, Result};

/// `chi(u) = c1 B_n(alpha u) + c2 B_n(beta u)` with `c1 + c2 = 1` and
/// `c1 log alpha + c2 log beta = 0`, i.e.
/// `c1 = log beta / (log beta - log alpha)`,
/// `c2 = -log alpha / (log beta - log alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslatedCombo {
    base: MellinBSpline,
    alpha: LogParam,
    beta: LogParam,
    c1: f64,
    c2: f64,
}

impl TranslatedCombo {
    pub fn new(base: MellinBSpline, alpha: LogParam, beta: LogParam) -> Result<Self> {
        let (a, b) = (alpha.log_value(), beta.log_value());
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(
                "translate parameters must be positive".into(),
            ));
        }
        if a == b {
            return Err(Error::DegenerateTranslates(a));
        }
        let (c1, c2) = match (alpha.exact_log(), beta.exact_log()) {
            (Some(ra), Some(rb)) => {
                let d = rb - ra;
                let c1 = rb / d;
                let c2 = -ra / d;
                (ratio_to_f64(c1), ratio_to_f64(c2))
            }
            _ => {
                let d = b - a;
                (b / d, -a / d)
            }
        };
        Ok(TranslatedCombo {
            base,
            alpha,
            beta,
            c1,
            c2,
        })
    }

    pub fn base(&self) -> &MellinBSpline {
        &self.base
    }

    pub fn coefficients(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }

    pub fn translates(&self) -> (&LogParam, &LogParam) {
        (&self.alpha, &self.beta)
    }
}

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Kernel for TranslatedCombo {
    fn label(&self) -> String {
        format!("combo:{}:{}:{}", self.base.order(), self.alpha, self.beta)
    }

    fn eval_log(&self, t: f64) -> f64 {
        self.c1 * self.base.eval_log(t + self.alpha.log_value())
            + self.c2 * self.base.eval_log(t + self.beta.log_value())
    }

    fn log_support(&self) -> LogSupport {
        let h = self.base.half_width();
        let (a, b) = (self.alpha.log_value(), self.beta.log_value());
        LogSupport::new(-h - a.max(b), h - a.min(b))
    }

    /// `M[chi](i t) = (c1 e^{-i t log alpha} + c2 e^{-i t log beta}) S_n(t)`,
    /// differentiated by Leibniz' rule on the two Taylor jets.
    fn mellin_transform_derivative(&self, j: usize, at: Frequency) -> Option<Complex64> {
        let s_jet = mellin::sinc_power_jet(self.base.order(), at, j);
        let t0 = at.value();
        let mut total = Complex64::new(0.0, 0.0);
        for (c, shift) in [
            (self.c1, self.alpha.log_value()),
            (self.c2, self.beta.log_value()),
        ] {
            // jet of e^{-i (t0 + h) a} = e^{-i t0 a} sum (-i a h)^l / l!
            let phase = Complex64::from_polar(1.0, -t0 * shift);
            let mut coeff = Complex64::new(0.0, 0.0);
            let mut e_l = phase;
            for l in 0..=j {
                if l > 0 {
                    e_l *= Complex64::new(0.0, -shift) / l as f64;
                }
                coeff += e_l * s_jet[j - l];
            }
            total += coeff * c;
        }
        let factorial: f64 = (1..=j).map(|k| k as f64).product();
        Some(total * factorial)
    }
}
