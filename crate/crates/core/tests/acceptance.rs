//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are evaluated at their stated
//! tolerance and reported as FAIL when they fail; they do not abort the
//! run. Any other failing criterion makes the process exit non-zero.

use std::f64::consts::E;
use std::io::BufReader;
use std::process::Command;
use std::time::{Duration, Instant};

use expsamp::analysis::{
    compare_table, estimate_order, first_order_bound, higher_order_bound, make_table, uniform_grid,
    voronovskaya_check, BoundStatus, FittedOrder, ReferenceTable, TABLE_TOLERANCE,
};
use expsamp::combinations::{apply_combo, solve_coefficients, Rational};
use expsamp::functions::{Builtin, TestFunction};
use expsamp::kernels::{Kernel, KernelSpec};
use expsamp::moments::{algebraic_moment, poisson_moment};
use expsamp::operator::{apply, apply_from_samples, sample_window, OperatorConfig, SampleSeries};
use expsamp::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose failure is explained in the decision ledger.
const KNOWN_UNATTAINABLE: &[u32] = &[6];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    details: Vec<String>,
}

fn kernel(spec: &str) -> Box<dyn Kernel> {
    spec.parse::<KernelSpec>().unwrap().build().unwrap()
}

fn table_criterion(id: u32, name: &'static str, reference: &str) -> Outcome {
    let reference = ReferenceTable::by_name(reference).unwrap();
    let k = kernel(reference.kernel);
    let f: Builtin = reference.function.parse().unwrap();
    let scheme = solve_coefficients(reference.p).unwrap();
    let cfg = OperatorConfig::new(reference.w, 5).unwrap();
    let start = Instant::now();
    let table = make_table(&f, k.as_ref(), &scheme, &cfg, reference.xs).unwrap();
    let elapsed = start.elapsed();
    let report = compare_table(&table, reference, TABLE_TOLERANCE).unwrap();
    let mut details = vec![format!(
        "{} cells, max deviation {:.2e} (tolerance {:.0e}), runtime {:.3} s",
        report.cells_checked,
        report.max_deviation,
        TABLE_TOLERANCE,
        elapsed.as_secs_f64()
    )];
    for c in &report.outliers {
        details.push(format!(
            "deviation at x={} {}: computed {:.4} reference {:.4}",
            c.x, c.column, c.computed, c.reference
        ));
    }
    Outcome {
        id,
        name,
        pass: report.passed() && elapsed < Duration::from_secs(1),
        details,
    }
}

fn criterion_3() -> Outcome {
    let b4 = kernel("bspline:4");
    let combo = kernel("combo:4:e^1:e^2");
    let expected_b4 = [1.0, 0.0, 1.0 / 3.0, 0.0];
    let us = [1.0, 0.37, E.sqrt(), 2.0, 5.3];
    let mut worst_direct: f64 = 0.0;
    let mut worst_poisson: f64 = 0.0;
    for &u in &us {
        for (nu, want) in expected_b4.iter().enumerate() {
            let direct = algebraic_moment(b4.as_ref(), nu, u).unwrap();
            let dual = poisson_moment(b4.as_ref(), nu, u, 50).unwrap();
            worst_direct = worst_direct.max((direct - want).abs());
            worst_poisson = worst_poisson.max((dual - want).abs());
        }
        let direct = algebraic_moment(combo.as_ref(), 2, u).unwrap();
        let dual = poisson_moment(combo.as_ref(), 2, u, 50).unwrap();
        worst_direct = worst_direct.max((direct + 5.0 / 3.0).abs());
        worst_poisson = worst_poisson.max((dual + 5.0 / 3.0).abs());
    }
    Outcome {
        id: 3,
        name: "moment constants",
        pass: worst_direct < 1e-10 && worst_poisson < 1e-10,
        details: vec![format!(
            "max |m - expected|: direct {worst_direct:.2e}, Poisson {worst_poisson:.2e}"
        )],
    }
}

fn criterion_4() -> Outcome {
    let r = |n: i128, d: i128| Rational::new(n, d);
    let p2 = solve_coefficients(2).unwrap();
    let p3 = solve_coefficients(3).unwrap();
    let ok2 = p2.coefficients() == [r(-1, 1), r(2, 1)];
    let ok3 = p3.coefficients() == [r(1, 2), r(-4, 1), r(9, 2)];
    Outcome {
        id: 4,
        name: "combination coefficients",
        pass: ok2 && ok3,
        details: vec![format!("p=2 {p2}, p=3 {p3}")],
    }
}

fn criterion_5() -> Outcome {
    let ws = [10.0, 20.0, 40.0, 80.0, 160.0];
    let xs = [0.75, 2.0, E];
    // (label, kernel, p, theta order, limit factor applied to theta^q f)
    let cases: [(&str, &str, usize, usize, f64); 4] = [
        ("theta f/2, bspline:4", "bspline:4", 1, 1, 0.5),
        ("-theta^2 f/6, bspline:4 p=2", "bspline:4", 2, 2, -1.0 / 6.0),
        ("theta^3 f/48, bspline:4 p=3", "bspline:4", 3, 3, 1.0 / 48.0),
        (
            "theta^2 f/3, combo:4:e^1:e^2 p=2",
            "combo:4:e^1:e^2",
            2,
            2,
            1.0 / 3.0,
        ),
    ];
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for (label, spec, p, q, factor) in cases {
        let k = kernel(spec);
        let scheme = solve_coefficients(p).unwrap();
        let scheme = (p > 1).then_some(&scheme);
        let log_power = Builtin::LogPow(q as u32);
        let functions = [Builtin::Power(1.0), log_power];
        let mut worst: f64 = 0.0;
        for f in &functions {
            for &x in &xs {
                let study = voronovskaya_check(f, k.as_ref(), x, &ws, scheme, 5).unwrap();
                // closed forms: theta^q x = x, theta^q (log x)^q = q!
                let theta_q = match f {
                    Builtin::Power(_) => x,
                    _ => (1..=q).product::<usize>() as f64,
                };
                let limit = factor * theta_q;
                let scaled = *study.scaled_errors.last().unwrap();
                worst = worst.max((scaled - limit).abs() / limit.abs());
            }
        }
        pass &= worst < 0.02;
        details.push(format!(
            "{label}: max relative deviation at w=160 over pow:1 and {log_power}: {:.3}%",
            100.0 * worst
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    details.push(format!("runtime {:.2} s", elapsed.as_secs_f64()));

    // The oscillatory functions are listed for information only.
    let info: [(&str, &str, usize, Builtin, f64, usize, f64); 3] = [
        ("bspline:4", "p=1", 1, Builtin::Cos4Exp, 0.75, 1, 0.5),
        ("bspline:4", "p=2", 2, Builtin::SinMix, 2.0, 2, -1.0 / 6.0),
        (
            "combo:4:e^1:e^2",
            "p=2",
            2,
            Builtin::SinMix,
            E,
            2,
            1.0 / 3.0,
        ),
    ];
    for (spec, plabel, p, f, x, q, factor) in info {
        let k = kernel(spec);
        let scheme = solve_coefficients(p).unwrap();
        let study =
            voronovskaya_check(&f, k.as_ref(), x, &ws, (p > 1).then_some(&scheme), 5).unwrap();
        let limit = factor * f.theta(q, x).unwrap();
        let scaled = *study.scaled_errors.last().unwrap();
        details.push(format!(
            "info: {f} x={x:.4} {spec} {plabel}: scaled {scaled:.5} vs limit {limit:.5} ({:.1}%)",
            100.0 * (scaled - limit).abs() / limit.abs()
        ));
    }
    Outcome {
        id: 5,
        name: "Voronovskaya constants",
        pass,
        details,
    }
}

fn criterion_6() -> Outcome {
    let ws = [10.0, 20.0, 40.0, 80.0, 160.0];
    let f = Builtin::Cos4Exp;
    let (lo, hi) = f.eval_interval();
    let grid = uniform_grid(lo, hi, 51);
    let k = kernel("bspline:2");
    let single = estimate_order(&f, k.as_ref(), None, &ws, &grid, 5).unwrap();
    let p3 = solve_coefficients(3).unwrap();
    let triple = estimate_order(&f, k.as_ref(), Some(&p3), &ws, &grid, 5).unwrap();
    let order = |o: FittedOrder| o.value();
    let ok1 = (order(single.fitted_order) - 1.0).abs() <= 0.15;
    let ok3 = (order(triple.fitted_order) - 3.0).abs() <= 0.2;
    Outcome {
        id: 6,
        name: "order regression",
        pass: ok1 && ok3,
        details: vec![
            format!(
                "single operator: fitted order {:.3} (target 1.0 +- 0.15) {}",
                order(single.fitted_order),
                if ok1 { "ok" } else { "out of range" }
            ),
            format!(
                "p=3 combination: fitted order {:.3} (target 3.0 +- 0.2) {}",
                order(triple.fitted_order),
                if ok3 { "ok" } else { "out of range" }
            ),
            format!(
                "p=3 sup errors: {}",
                triple
                    .errors
                    .iter()
                    .map(|e| format!("{e:.3e}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ],
    }
}

fn criterion_7() -> Outcome {
    let xs = [0.3, 0.75, 1.0, 2.0, E, 7.5];
    let mut worst_const: f64 = 0.0;
    for spec in [
        "bspline:1",
        "bspline:2",
        "bspline:3",
        "bspline:4",
        "combo:4:e^1:e^2",
    ] {
        let k = kernel(spec);
        for w in [3.7, 15.0, 64.0] {
            let cfg = OperatorConfig::new(w, 5).unwrap();
            for c in [3.0, -1.25] {
                for &x in &xs {
                    let v = apply(&Builtin::Const(c), k.as_ref(), &cfg, x).unwrap();
                    worst_const = worst_const.max((v - c).abs());
                }
            }
        }
    }
    let mut worst_log: f64 = 0.0;
    let mut worst_combo: f64 = 0.0;
    let p2 = solve_coefficients(2).unwrap();
    for spec in ["bspline:2", "bspline:3", "bspline:4"] {
        let k = kernel(spec);
        for w in [5.0, 20.0, 160.0] {
            let cfg = OperatorConfig::new(w, 5).unwrap();
            for &x in &xs {
                let e = apply(&Builtin::LogPow(1), k.as_ref(), &cfg, x).unwrap() - x.ln();
                worst_log = worst_log.max((e - 0.5 / w).abs());
                let c = apply_combo(&Builtin::LogPow(1), k.as_ref(), &p2, w, x, 5).unwrap();
                worst_combo = worst_combo.max((c - x.ln()).abs());
            }
        }
    }
    Outcome {
        id: 7,
        name: "exactness properties",
        pass: worst_const <= 1e-12 && worst_log <= 1e-12 && worst_combo <= 1e-12,
        details: vec![format!(
            "constants {worst_const:.1e}, log minus 1/(2w) {worst_log:.1e}, p=2 on log {worst_combo:.1e}"
        )],
    }
}

fn criterion_8() -> Outcome {
    let functions = [
        Builtin::Cos4Exp,
        Builtin::SinMix,
        Builtin::LogPow(1),
        Builtin::LogPow(2),
        Builtin::LogPow(3),
        Builtin::Power(2.0),
        Builtin::Power(-1.5),
    ];
    let kernels = ["bspline:2", "bspline:3", "bspline:4"];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut valid = 0;
    let mut preconditions = 0;
    let mut violations = Vec::new();
    for _ in 0..50 {
        let f = functions[rng.gen_range(0..functions.len())];
        let (lo, hi) = f.eval_interval();
        let x = rng.gen_range(lo..=hi);
        let w = rng.gen_range(5.0..100.0);
        let spec = kernels[rng.gen_range(0..kernels.len())];
        let r = rng.gen_range(1..=3);
        let k = kernel(spec);
        let cfg = OperatorConfig::new(w, 5).unwrap();
        let first = first_order_bound(&f, k.as_ref(), &cfg, x, &[]).unwrap();
        valid += 1;
        if first.status != BoundStatus::Satisfied {
            violations.push(format!(
                "first-order {f} {spec} w={w:.2} x={x:.4}: lhs {:.3e} > rhs {:.3e}",
                first.lhs, first.rhs
            ));
        }
        match higher_order_bound(&f, k.as_ref(), &cfg, x, r, &[]) {
            Ok(rep) => {
                valid += 1;
                if rep.status != BoundStatus::Satisfied {
                    violations.push(format!(
                        "higher-order r={r} {f} {spec} w={w:.2} x={x:.4}: lhs {:.3e} > rhs {:.3e} (ratio {:.3})",
                        rep.lhs,
                        rep.rhs,
                        rep.lhs / rep.rhs
                    ));
                }
            }
            Err(Error::Precondition(_)) => preconditions += 1,
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
    let b2 = kernel("bspline:2");
    let cfg = OperatorConfig::new(20.0, 5).unwrap();
    let raised = matches!(
        higher_order_bound(&Builtin::Cos4Exp, b2.as_ref(), &cfg, 0.8, 3, &[]),
        Err(Error::Precondition(_))
    );
    let mut details = vec![format!(
        "{valid} valid reports, {} violations, {preconditions} precondition failures; bspline:2 r=3 raises precondition error: {raised}",
        violations.len()
    )];
    details.extend(violations.iter().cloned());
    Outcome {
        id: 8,
        name: "bound dominance",
        pass: violations.is_empty() && raised,
        details,
    }
}

fn criterion_9() -> Outcome {
    let k = kernel("bspline:2");
    let f = Builtin::SinMix;
    let cfg = OperatorConfig::new(15.0, 5).unwrap();
    let xs: Vec<f64> = (0..=100).map(|i| 1.0 + 0.01 * i as f64).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");

    let window = sample_window(k.as_ref(), cfg.w(), &xs).unwrap();
    let series = SampleSeries::from_function(&f, &cfg, window).unwrap();
    series
        .write_csv(std::fs::File::create(&path).unwrap())
        .unwrap();
    let loaded =
        SampleSeries::read_csv(BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    let mut worst_lib: f64 = 0.0;
    for &x in &xs {
        let direct = apply(&f, k.as_ref(), &cfg, x).unwrap();
        let rebuilt = apply_from_samples(&loaded, k.as_ref(), x).unwrap();
        worst_lib = worst_lib.max((direct - rebuilt).abs());
    }

    // the same pipeline through the command-line tool
    let bin = env!("CARGO_BIN_EXE_expsamp");
    let cli_samples = dir.path().join("cli_samples.csv");
    let common = [
        "--kernel",
        "bspline:2",
        "--fn",
        "sinmix",
        "--x",
        "1.0:2.0:0.01",
    ];
    let eval = Command::new(bin)
        .arg("eval")
        .args(common)
        .args(["--w", "15", "--emit-samples"])
        .arg(&cli_samples)
        .output()
        .unwrap();
    let rec = Command::new(bin)
        .arg("reconstruct")
        .args(common)
        .arg("--samples")
        .arg(&cli_samples)
        .output()
        .unwrap();
    let column = |bytes: &[u8]| -> Vec<f64> {
        String::from_utf8_lossy(bytes)
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let a = column(&eval.stdout);
    let b = column(&rec.stdout);
    let worst_cli = a
        .iter()
        .zip(&b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max);
    let cli_ok = eval.status.success() && rec.status.success() && a.len() == 101 && b.len() == 101;
    Outcome {
        id: 9,
        name: "sample-pipeline equivalence",
        pass: worst_lib <= 1e-14 && cli_ok && worst_cli <= 1e-14,
        details: vec![format!(
            "101 points: library max difference {worst_lib:.1e}, command line max difference {worst_cli:.1e}"
        )],
    }
}

fn main() {
    let outcomes = vec![
        table_criterion(1, "cos4exp error table", "cos4exp-bspline2-w15-p3"),
        table_criterion(2, "sinmix error table", "sinmix-bspline4-w30-p2"),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    let mut unexpected = Vec::new();
    for o in &outcomes {
        println!(
            "criterion {} ({}): {}",
            o.id,
            o.name,
            if o.pass { "PASS" } else { "FAIL" }
        );
        for d in &o.details {
            println!("    {d}");
        }
        if !o.pass && !KNOWN_UNATTAINABLE.contains(&o.id) {
            unexpected.push(o.id);
        }
        if o.pass && KNOWN_UNATTAINABLE.contains(&o.id) {
            println!("    note: listed as unattainable but passed");
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!(
        "acceptance: {passed}/{} criteria passed; failing: {:?}; unexpected failures: {:?}",
        outcomes.len(),
        outcomes
            .iter()
            .filter(|o| !o.pass)
            .map(|o| o.id)
            .collect::<Vec<_>>(),
        unexpected
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
