use num_complex::Complex64;

use super::{mellin, Frequency, Kernel, LogSupport};
use crate::{Error, Result};

pub const MAX_ORDER: usize = 10;

/// Centered cardinal B-spline of order `n` read in `t = log u`:
///
/// ```text
/// B_n(u) = 1/(n-1)! * sum_{j=0}^{n} (-1)^j C(n, j) (n/2 + log u - j)_+^{n-1}
/// ```
///
/// Supported on `|log u| <= n/2`, symmetric under `u -> 1/u`, with Mellin
/// transform `(sin(t/2) / (t/2))^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MellinBSpline {
    order: usize,
    signed_binomials: Vec<f64>,
    inv_factorial: f64,
}

impl MellinBSpline {
    pub fn new(order: usize) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(Error::SplineOrder(order));
        }
        let mut signed_binomials = Vec::with_capacity(order + 1);
        let mut c = 1.0;
        for j in 0..=order {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            signed_binomials.push(sign * c);
            c = c * (order - j) as f64 / (j + 1) as f64;
        }
        let factorial: f64 = (1..order).map(|k| k as f64).product();
        Ok(MellinBSpline {
            order,
            signed_binomials,
            inv_factorial: 1.0 / factorial,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn half_width(&self) -> f64 {
        self.order as f64 / 2.0
    }

    /// `B_n(e^t)`.
    pub fn eval_log(&self, t: f64) -> f64 {
        let half = self.half_width();
        if self.order == 1 {
            // left-closed unit interval
            return if (-half..half).contains(&t) { 1.0 } else { 0.0 };
        }
        if t.is_nan() || t.abs() >= half {
            return 0.0;
        }
        // Use the left half: fewer active truncated powers, less cancellation.
        let x = half - t.abs();
        let degree = (self.order - 1) as i32;
        let mut sum = 0.0;
        let mut compensation = 0.0;
        for (j, &c) in self.signed_binomials.iter().enumerate() {
            let arg = x - j as f64;
            if arg <= 0.0 {
                break;
            }
            let term = c * arg.powi(degree);
            // Neumaier summation
            let next = sum + term;
            if sum.abs() >= term.abs() {
                compensation += (sum - next) + term;
            } else {
                compensation += (term - next) + sum;
            }
            sum = next;
        }
        ((sum + compensation) * self.inv_factorial).max(0.0)
    }

    /// `(sin(t/2) / (t/2))^n`, equal to 1 at `t = 0`.
    pub fn mellin_transform_real(&self, t: f64) -> f64 {
        let x = 0.5 * t;
        let s = if x == 0.0 { 1.0 } else { x.sin() / x };
        s.powi(self.order as i32)
    }

    /// Taylor coefficients of `t -> M[B_n](i t)` around `at`, up to degree
    /// `degree`.
    pub fn transform_jet(&self, at: Frequency, degree: usize) -> Vec<f64> {
        mellin::sinc_power_jet(self.order, at, degree)
    }
}

impl Kernel for MellinBSpline {
    fn label(&self) -> String {
        format!("bspline:{}", self.order)
    }

    fn eval_log(&self, t: f64) -> f64 {
        MellinBSpline::eval_log(self, t)
    }

    fn log_support(&self) -> LogSupport {
        let h = self.half_width();
        LogSupport::new(-h, h)
    }

    fn mellin_transform_derivative(&self, j: usize, at: Frequency) -> Option<Complex64> {
        let jet = self.transform_jet(at, j);
        let factorial: f64 = (1..=j).map(|k| k as f64).product();
        Some(Complex64::new(jet[j] * factorial, 0.0))
    }

    fn mellin_transform(&self, t: f64) -> Option<Complex64> {
        Some(Complex64::new(self.mellin_transform_real(t), 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::partition_of_unity_sum;
    use crate::quadrature::GaussLegendre;
    use proptest::prelude::*;
    use std::f64::consts::{E, PI};

    /// Cox–de Boor recursion for the (uncentered) cardinal B-spline on
    /// `[0, n]`; independent of the truncated-power sum.
    fn cardinal_recursive(n: usize, x: f64) -> f64 {
        if n == 1 {
            return if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
        }
        let m = (n - 1) as f64;
        (x * cardinal_recursive(n - 1, x) + (n as f64 - x) * cardinal_recursive(n - 1, x - 1.0)) / m
    }

    #[test]
    fn order_two_values() {
        let b = MellinBSpline::new(2).unwrap();
        assert_eq!(b.eval(1.0).unwrap(), 1.0);
        assert!((b.eval(0.5f64.exp()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(b.eval(E * E).unwrap(), 0.0);
        // 1 - log x on (1, e), 1 + log x on (1/e, 1)
        assert!((b.eval(2.0).unwrap() - (1.0 - 2f64.ln())).abs() < 1e-15);
        assert!((b.eval(0.5).unwrap() - (1.0 + 0.5f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn order_four_center_value() {
        // frozen from the recursion oracle: M_4(2) = 2/3
        assert!((cardinal_recursive(4, 2.0) - 2.0 / 3.0).abs() < 1e-15);
        let b = MellinBSpline::new(4).unwrap();
        assert!((b.eval(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn matches_recursion_oracle() {
        for n in 1..=MAX_ORDER {
            let b = MellinBSpline::new(n).unwrap();
            let h = n as f64 / 2.0;
            for i in 0..=400 {
                let t = -h - 0.5 + (n as f64 + 1.0) * i as f64 / 400.0;
                let want = cardinal_recursive(n, t + h);
                let got = b.eval_log(t);
                assert!(
                    (got - want).abs() < 1e-12,
                    "n = {n}, t = {t}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn order_one_is_left_closed() {
        let b = MellinBSpline::new(1).unwrap();
        assert_eq!(b.eval_log(-0.5), 1.0);
        assert_eq!(b.eval_log(0.5), 0.0);
    }

    #[test]
    fn order_out_of_range() {
        assert!(matches!(MellinBSpline::new(0), Err(Error::SplineOrder(0))));
        assert!(matches!(
            MellinBSpline::new(11),
            Err(Error::SplineOrder(11))
        ));
    }

    #[test]
    fn transform_values() {
        let b2 = MellinBSpline::new(2).unwrap();
        assert_eq!(b2.mellin_transform_real(0.0), 1.0);
        assert!(b2.mellin_transform_real(2.0 * PI).abs() < 1e-30);
        let b4 = MellinBSpline::new(4).unwrap();
        let want = (2.0 / PI).powi(4);
        assert!((b4.mellin_transform_real(PI) - want).abs() < 1e-15);
        assert!((want - 0.164255).abs() < 1e-6);
    }

    #[test]
    fn transform_matches_quadrature() {
        let rule = GaussLegendre::new(32);
        for n in [2usize, 3, 4] {
            let b = MellinBSpline::new(n).unwrap();
            let h = n as f64 / 2.0;
            for t in [0.5, 1.0, PI, 5.0] {
                // integrate e^{i t s} B_n(e^s) ds knot interval by knot interval
                let (mut re, mut im) = (0.0, 0.0);
                for cell in 0..n {
                    let a = -h + cell as f64;
                    re += rule.integrate(a, a + 1.0, |s| (t * s).cos() * b.eval_log(s));
                    im += rule.integrate(a, a + 1.0, |s| (t * s).sin() * b.eval_log(s));
                }
                let want = b.mellin_transform(t).unwrap();
                assert!((re - want.re).abs() < 1e-8, "n = {n}, t = {t}");
                assert!((im - want.im).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn log_support_is_symmetric() {
        let b = MellinBSpline::new(4).unwrap();
        assert_eq!(b.log_support(), LogSupport::new(-2.0, 2.0));
        let b = MellinBSpline::new(2).unwrap();
        assert_eq!(b.log_support(), LogSupport::new(-1.0, 1.0));
    }

    #[test]
    fn partition_of_unity_example() {
        let b = MellinBSpline::new(2).unwrap();
        let r = partition_of_unity_sum(&b, 13.0 * 1.7f64.ln()) - 1.0;
        assert!(r.abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn symmetric_non_negative_and_supported(n in 1usize..=10, t in -7.0f64..7.0) {
            let b = MellinBSpline::new(n).unwrap();
            let v = b.eval_log(t);
            prop_assert!(v >= 0.0);
            if n >= 2 {
                prop_assert!((v - b.eval_log(-t)).abs() < 1e-14);
            }
            if t.abs() > n as f64 / 2.0 {
                prop_assert_eq!(v, 0.0);
            }
        }

        #[test]
        fn partition_of_unity(n in 1usize..=10, x in 0.1f64..10.0, w in 1.0f64..100.0) {
            let b = MellinBSpline::new(n).unwrap();
            let s = partition_of_unity_sum(&b, w * x.ln());
            prop_assert!((s - 1.0).abs() < 1e-12, "sum = {}", s);
        }
    }
}
