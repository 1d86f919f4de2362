//! The Kantorovich exponential sampling operator
//!
//! ```text
//! (I_w f)(x) = sum_k chi(e^{-k} x^w) * w * integral_{k/w}^{(k+1)/w} f(e^u) du
//! ```
//!
//! evaluated in log space: the kernel argument is `w log x - k`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::format::sig12;
use crate::functions::TestFunction;
use crate::kernels::Kernel;
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

pub const DEFAULT_QUAD_NODES: usize = 5;
pub const MAX_QUAD_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorConfig {
    w: f64,
    rule: GaussLegendre,
}

impl OperatorConfig {
    pub fn new(w: f64, quad_nodes: usize) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sampling rate must be positive, got {w}"
            )));
        }
        if !(1..=MAX_QUAD_NODES).contains(&quad_nodes) {
            return Err(Error::InvalidArgument(format!(
                "quadrature nodes must be in 1..={MAX_QUAD_NODES}, got {quad_nodes}"
            )));
        }
        Ok(OperatorConfig {
            w,
            rule: GaussLegendre::new(quad_nodes),
        })
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn quad_nodes(&self) -> usize {
        self.rule.len()
    }

    /// Same quadrature, different rate.
    pub fn with_rate(&self, w: f64) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sampling rate must be positive, got {w}"
            )));
        }
        Ok(OperatorConfig {
            w,
            rule: self.rule.clone(),
        })
    }

    pub(crate) fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Cell indices `k` with a possibly nonzero kernel weight at `x`.
    pub fn window(&self, kernel: &dyn Kernel, x: f64) -> Result<RangeInclusive<i64>> {
        Ok(kernel.log_support().window(self.w * log_positive(x)?))
    }
}

fn log_positive(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(Error::Domain(format!(
            "evaluation point must be positive, got {x}"
        )))
    }
}

fn cell_mean_with(f: &dyn TestFunction, w: f64, k: i64, rule: &GaussLegendre) -> f64 {
    let a = k as f64 / w;
    let b = (k + 1) as f64 / w;
    rule.mean(a, b, |u| f.value(u.exp()))
}

/// `w * integral_{k/w}^{(k+1)/w} f(e^u) du` by `quad_nodes`-point
/// Gauss–Legendre.
pub fn cell_mean(f: &dyn TestFunction, w: f64, k: i64, quad_nodes: usize) -> Result<f64> {
    let cfg = OperatorConfig::new(w, quad_nodes)?;
    Ok(cell_mean_with(f, w, k, cfg.rule()))
}

/// `(I_w f)(x)`.
pub fn apply(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    cfg: &OperatorConfig,
    x: f64,
) -> Result<f64> {
    Ok(apply_log(f, kernel, cfg, log_positive(x)?))
}

/// `(I_w f)(e^{log_x})`.
pub fn apply_log(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    cfg: &OperatorConfig,
    log_x: f64,
) -> f64 {
    let s = cfg.w * log_x;
    let mut sum = 0.0;
    for k in kernel.log_support().window(s) {
        let weight = kernel.eval_log(s - k as f64);
        if weight != 0.0 {
            sum += weight * cell_mean_with(f, cfg.w, k, cfg.rule());
        }
    }
    sum
}

/// Local means `w * integral_{k/w}^{(k+1)/w} f(e^u) du` for a dense range of
/// `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeries {
    w: f64,
    k_min: i64,
    means: Vec<f64>,
}

impl SampleSeries {
    pub fn new(w: f64, k_min: i64, means: Vec<f64>) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sampling rate must be positive, got {w}"
            )));
        }
        if means.is_empty() {
            return Err(Error::InvalidArgument("sample series is empty".into()));
        }
        Ok(SampleSeries { w, k_min, means })
    }

    /// Samples `f` on every cell in `ks`.
    pub fn from_function(
        f: &dyn TestFunction,
        cfg: &OperatorConfig,
        ks: RangeInclusive<i64>,
    ) -> Result<Self> {
        let k_min = *ks.start();
        let means = ks
            .map(|k| cell_mean_with(f, cfg.w, k, cfg.rule()))
            .collect();
        SampleSeries::new(cfg.w, k_min, means)
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn k_range(&self) -> RangeInclusive<i64> {
        self.k_min..=self.k_min + self.means.len() as i64 - 1
    }

    pub fn mean(&self, k: i64) -> Option<f64> {
        if k < self.k_min {
            return None;
        }
        self.means.get((k - self.k_min) as usize).copied()
    }

    /// Reads `# w=<value>`, then a `k,mean` CSV body.
    pub fn read_csv<R: BufRead>(mut reader: R) -> Result<Self> {
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let first = first.trim_end_matches(['\n', '\r']);
        let w_text = first
            .strip_prefix("# w=")
            .ok_or_else(|| Error::parse(first, 0, "first line must be `# w=<value>`"))?;
        let w: f64 = w_text
            .trim()
            .parse()
            .map_err(|_| Error::parse(w_text, 4, "sampling rate is not a number"))?;

        let mut csv = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = csv.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "k" || &headers[1] != "mean" {
            return Err(Error::parse(
                &headers.iter().collect::<Vec<_>>().join(","),
                0,
                "header must be `k,mean`",
            ));
        }
        let mut rows = BTreeMap::new();
        for (line, record) in csv.records().enumerate() {
            let record = record?;
            let row = line + 3;
            if record.len() != 2 {
                return Err(Error::parse(
                    &record.iter().collect::<Vec<_>>().join(","),
                    row,
                    "expected two fields",
                ));
            }
            let k: i64 = record[0]
                .parse()
                .map_err(|_| Error::parse(&record[0], row, "k must be an integer"))?;
            let mean: f64 = record[1]
                .parse()
                .map_err(|_| Error::parse(&record[1], row, "mean is not a number"))?;
            if rows.insert(k, mean).is_some() {
                return Err(Error::parse(&record[0], row, "duplicate k"));
            }
        }
        let k_min = *rows
            .keys()
            .next()
            .ok_or_else(|| Error::InvalidArgument("sample file has no rows".into()))?;
        let mut means = Vec::with_capacity(rows.len());
        for (i, (&k, &m)) in rows.iter().enumerate() {
            if k != k_min + i as i64 {
                return Err(Error::MissingSample(k_min + i as i64));
            }
            means.push(m);
        }
        SampleSeries::new(w, k_min, means)
    }

    /// Writes the format read by [`SampleSeries::read_csv`]. Values use the
    /// shortest round-trip representation so a reload is bit-exact.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# w={}", self.w)?;
        writeln!(out, "k,mean")?;
        for (i, m) in self.means.iter().enumerate() {
            writeln!(out, "{},{:?}", self.k_min + i as i64, m)?;
        }
        Ok(())
    }
}

/// `(I_w f)(x)` from stored means.
pub fn apply_from_samples(series: &SampleSeries, kernel: &dyn Kernel, x: f64) -> Result<f64> {
    let s = series.w * log_positive(x)?;
    let mut sum = 0.0;
    for k in kernel.log_support().window(s) {
        let weight = kernel.eval_log(s - k as f64);
        if weight != 0.0 {
            let mean = series.mean(k).ok_or(Error::MissingSample(k))?;
            sum += weight * mean;
        }
    }
    Ok(sum)
}

/// Union of the cell windows of all `xs`.
pub fn sample_window(kernel: &dyn Kernel, w: f64, xs: &[f64]) -> Result<RangeInclusive<i64>> {
    let support = kernel.log_support();
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for &x in xs {
        let r = support.window(w * log_positive(x)?);
        lo = lo.min(*r.start());
        hi = hi.max(*r.end());
    }
    if lo > hi {
        return Err(Error::InvalidArgument("no evaluation points".into()));
    }
    Ok(lo..=hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub x: f64,
    pub approx: f64,
    pub exact: f64,
    pub abs_error: f64,
}

pub fn apply_grid(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    cfg: &OperatorConfig,
    xs: &[f64],
) -> Result<Vec<GridPoint>> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("no evaluation points".into()));
    }
    xs.par_iter()
        .map(|&x| {
            let approx = apply(f, kernel, cfg, x)?;
            let exact = f.value(x);
            Ok(GridPoint {
                x,
                approx,
                exact,
                abs_error: (approx - exact).abs(),
            })
        })
        .collect()
}

/// `x,approx,exact,abs_error` with 12 significant digits.
pub fn write_grid_csv<W: Write>(mut out: W, points: &[GridPoint]) -> Result<()> {
    writeln!(out, "x,approx,exact,abs_error")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            sig12(p.x),
            sig12(p.approx),
            sig12(p.exact),
            sig12(p.abs_error)
        )?;
    }
    Ok(())
}
