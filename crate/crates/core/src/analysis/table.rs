use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::combinations::{combo_terms, CombinationScheme};
use crate::format::{fixed4, sig12};
use crate::functions::TestFunction;
use crate::kernels::Kernel;
use crate::operator::OperatorConfig;
use crate::{Error, Result};

/// Per-cell tolerance when comparing against four-decimal reference values.
pub const TABLE_TOLERANCE: f64 = 2e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub x: f64,
    /// `|f - I_{iw} f|` for `i = 1..=p`, then `|f - I_{w,p} f|`.
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    pub function: String,
    pub kernel: String,
    pub w: f64,
    pub p: usize,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

/// Errors of the individual operators `I_{iw}` and of their combination at
/// each `x`.
pub fn make_table(
    f: &dyn TestFunction,
    kernel: &dyn Kernel,
    scheme: &CombinationScheme,
    cfg: &OperatorConfig,
    xs: &[f64],
) -> Result<ErrorTable> {
    let coeffs = scheme.coefficients_f64();
    let rows = xs
        .par_iter()
        .map(|&x| {
            let terms = combo_terms(f, kernel, scheme, cfg, x)?;
            let fx = f.value(x);
            let combo: f64 = terms.iter().zip(&coeffs).map(|(t, c)| c * t).sum();
            let mut errors: Vec<f64> = terms.iter().map(|t| (fx - t).abs()).collect();
            errors.push((fx - combo).abs());
            Ok(TableRow { x, errors })
        })
        .collect::<Result<Vec<_>>>()?;
    let w = cfg.w();
    let mut columns: Vec<String> = (1..=scheme.p())
        .map(|i| format!("I_{}", crate::format::sig(w * i as f64, 12)))
        .collect();
    columns.push(format!("I_{},{}", crate::format::sig(w, 12), scheme.p()));
    Ok(ErrorTable {
        function: f.label(),
        kernel: kernel.label(),
        w,
        p: scheme.p(),
        columns,
        rows,
    })
}

impl ErrorTable {
    /// CSV with `x` followed by one error column per operator, rounded to
    /// four decimals.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = vec!["x".to_string()];
        header.extend(self.columns.iter().map(|c| format!("\"{c}\"")));
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let mut cells = vec![sig12(row.x)];
            cells.extend(row.errors.iter().map(|e| fixed4(*e)));
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn write_latex<W: Write>(&self, mut out: W) -> Result<()> {
        let cols = "c".repeat(self.columns.len() + 1);
        writeln!(
            out,
            "\\begin{{tabular}}{{|{}|}}",
            cols.chars().map(String::from).collect::<Vec<_>>().join("|")
        )?;
        writeln!(out, "\\hline")?;
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("$|f - {}|$", latex_operator(c)))
            .collect();
        writeln!(out, "$x$ & {} \\\\", header.join(" & "))?;
        writeln!(out, "\\hline")?;
        for row in &self.rows {
            let cells: Vec<String> = row.errors.iter().map(|e| fixed4(*e)).collect();
            writeln!(out, "{} & {} \\\\", sig12(row.x), cells.join(" & "))?;
        }
        writeln!(out, "\\hline")?;
        writeln!(out, "\\end{{tabular}}")?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn latex_operator(column: &str) -> String {
    let sub = column.trim_start_matches("I_");
    format!("I_{{{sub}}}f")
}

/// Four-decimal reference error values for a fixed experimental setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceTable {
    pub name: &'static str,
    pub function: &'static str,
    pub kernel: &'static str,
    pub w: f64,
    pub p: usize,
    pub xs: &'static [f64],
    pub rows: &'static [&'static [f64]],
}

const COS4EXP_REFERENCE: ReferenceTable = ReferenceTable {
    name: "cos4exp-bspline2-w15-p3",
    function: "cos4exp",
    kernel: "bspline:2",
    w: 15.0,
    p: 3,
    xs: &[0.60, 0.75, 0.80, 0.90, 0.95],
    rows: &[
        &[0.1422, 0.0664, 0.0424, 0.0039],
        &[0.1474, 0.0807, 0.0561, 0.0033],
        &[0.0613, 0.0462, 0.0359, 0.0070],
        &[0.2182, 0.0800, 0.0499, 0.0136],
        &[0.3230, 0.1520, 0.0963, 0.0129],
    ],
};

const SINMIX_REFERENCE: ReferenceTable = ReferenceTable {
    name: "sinmix-bspline4-w30-p2",
    function: "sinmix",
    kernel: "bspline:4",
    w: 30.0,
    p: 2,
    xs: &[1.9, 2.6, 3.1, 3.8],
    rows: &[
        &[0.0880, 0.0385, 0.0110],
        &[0.2217, 0.1325, 0.0434],
        &[0.2037, 0.1258, 0.0479],
        &[0.4948, 0.2071, 0.0806],
    ],
};

pub fn reference_tables() -> &'static [ReferenceTable] {
    &[COS4EXP_REFERENCE, SINMIX_REFERENCE]
}

impl ReferenceTable {
    pub fn by_name(name: &str) -> Option<&'static ReferenceTable> {
        reference_tables().iter().find(|t| t.name == name)
    }

    /// Reference whose setup matches the given table, if any.
    pub fn for_table(table: &ErrorTable) -> Option<&'static ReferenceTable> {
        reference_tables().iter().find(|t| {
            t.function == table.function
                && t.kernel == table.kernel
                && t.w == table.w
                && t.p == table.p
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellDeviation {
    pub x: f64,
    pub column: String,
    pub computed: f64,
    pub reference: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub reference: String,
    pub tolerance: f64,
    pub cells_checked: usize,
    pub max_deviation: f64,
    /// Cells whose deviation exceeds the tolerance.
    pub outliers: Vec<CellDeviation>,
}

impl DeviationReport {
    pub fn passed(&self) -> bool {
        self.outliers.is_empty()
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "reference {}: {} cells, max deviation {}, tolerance {}",
            self.reference,
            self.cells_checked,
            sig12(self.max_deviation),
            sig12(self.tolerance)
        )?;
        for c in &self.outliers {
            writeln!(
                out,
                "  x={} {}: computed {} reference {} deviation {}",
                sig12(c.x),
                c.column,
                fixed4(c.computed),
                fixed4(c.reference),
                sig12(c.deviation)
            )?;
        }
        Ok(())
    }
}

/// Cell-by-cell comparison. Every reference row must be present in the
/// table.
pub fn compare_table(
    table: &ErrorTable,
    reference: &ReferenceTable,
    tolerance: f64,
) -> Result<DeviationReport> {
    if table.columns.len() != reference.p + 1 {
        return Err(Error::InvalidArgument(format!(
            "table has {} columns, reference `{}` has {}",
            table.columns.len(),
            reference.name,
            reference.p + 1
        )));
    }
    let mut outliers = Vec::new();
    let mut max_deviation: f64 = 0.0;
    let mut cells = 0;
    for (&x, expected) in reference.xs.iter().zip(reference.rows) {
        let row = table
            .rows
            .iter()
            .find(|r| (r.x - x).abs() < 1e-9)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "table has no row at x = {x} required by `{}`",
                    reference.name
                ))
            })?;
        for ((computed, reference_value), column) in
            row.errors.iter().zip(expected.iter()).zip(&table.columns)
        {
            let deviation = (computed - reference_value).abs();
            cells += 1;
            max_deviation = max_deviation.max(deviation);
            if deviation > tolerance {
                outliers.push(CellDeviation {
                    x,
                    column: column.clone(),
                    computed: *computed,
                    reference: *reference_value,
                    deviation,
                });
            }
        }
    }
    Ok(DeviationReport {
        reference: reference.name.to_string(),
        tolerance,
        cells_checked: cells,
        max_deviation,
        outliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinations::solve_coefficients;
    use crate::functions::Builtin;
    use crate::kernels::MellinBSpline;

    #[test]
    fn constant_rows_vanish() {
        let k = MellinBSpline::new(2).unwrap();
        let scheme = solve_coefficients(3).unwrap();
        let cfg = OperatorConfig::new(15.0, 5).unwrap();
        let t = make_table(&Builtin::Const(2.5), &k, &scheme, &cfg, &[0.6, 0.9]).unwrap();
        assert_eq!(t.columns, ["I_15", "I_30", "I_45", "I_15,3"]);
        for row in &t.rows {
            assert!(row.errors.iter().all(|e| *e < 1e-12));
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,\"I_15\""));
        assert!(text.contains("0.6,0.0000,0.0000,0.0000,0.0000"));
    }

    #[test]
    fn reference_lookup_and_comparison() {
        let k = MellinBSpline::new(4).unwrap();
        let scheme = solve_coefficients(2).unwrap();
        let cfg = OperatorConfig::new(30.0, 5).unwrap();
        let reference = ReferenceTable::by_name("sinmix-bspline4-w30-p2").unwrap();
        let t = make_table(&Builtin::SinMix, &k, &scheme, &cfg, reference.xs).unwrap();
        assert_eq!(ReferenceTable::for_table(&t), Some(reference));
        let report = compare_table(&t, reference, TABLE_TOLERANCE).unwrap();
        assert_eq!(report.cells_checked, 12);
        let mut latex = Vec::new();
        t.write_latex(&mut latex).unwrap();
        assert!(String::from_utf8(latex)
            .unwrap()
            .contains("\\begin{tabular}"));
    }

    #[test]
    fn comparison_needs_matching_rows() {
        let k = MellinBSpline::new(4).unwrap();
        let scheme = solve_coefficients(2).unwrap();
        let cfg = OperatorConfig::new(30.0, 5).unwrap();
        let t = make_table(&Builtin::SinMix, &k, &scheme, &cfg, &[2.0]).unwrap();
        let reference = ReferenceTable::by_name("sinmix-bspline4-w30-p2").unwrap();
        assert!(compare_table(&t, reference, TABLE_TOLERANCE).is_err());
    }
}
