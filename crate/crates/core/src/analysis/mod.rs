//! Numerical verification of the operator's asymptotic behaviour: scaled
//! error limits, fitted convergence orders, K-functional style error bounds
//! and error tables.

mod bounds;
mod convergence;
mod table;

pub use bounds::{
    combination_bound, first_order_bound, higher_order_bound, BoundReport, BoundStatus, BOUND_SLACK,
};
pub use convergence::{
    estimate_order, expansion_prediction, fit_order, voronovskaya_check, ConvergenceStudy,
    FittedOrder, ZERO_ERROR,
};
pub use table::{
    compare_table, make_table, reference_tables, DeviationReport, ErrorTable, ReferenceTable,
    TableRow, TABLE_TOLERANCE,
};

/// Points of the uniform grid used for sup-norms.
pub const SUP_GRID_POINTS: usize = 2001;

/// `sup |g|` over `[lo, hi]`: uniform grid plus one refinement pass around
/// the largest sample.
pub fn sup_abs<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> f64 {
    let n = SUP_GRID_POINTS;
    let h = (hi - lo) / (n - 1) as f64;
    let (mut best_i, mut best) = (0, g(lo).abs());
    for i in 1..n {
        let v = g(lo + h * i as f64).abs();
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let center = lo + h * best_i as f64;
    for j in -20i32..=20 {
        let z = (center + h * j as f64 / 20.0).clamp(lo, hi);
        best = best.max(g(z).abs());
    }
    best
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}
