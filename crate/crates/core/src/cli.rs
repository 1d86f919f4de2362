//! Command-line front end for the `expsamp` binary.
//!
//! Every subcommand accepts the same flag set; flags a command does not use
//! are ignored. A `--config <file>` of `key=value` lines supplies defaults
//! under the same names as the flags, and flags given on the command line
//! take precedence.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    combination_bound, compare_table, estimate_order, first_order_bound, higher_order_bound,
    make_table, uniform_grid, voronovskaya_check, BoundReport, BoundStatus, ConvergenceStudy,
    ReferenceTable, TABLE_TOLERANCE,
};
use crate::combinations::{apply_combo_with, format_rational, CombinationScheme};
use crate::format::sig12;
use crate::functions::{Builtin, TestFunction};
use crate::kernels::{Kernel, KernelSpec};
use crate::moments::{moment_report, poisson_moment, MomentReport, DEFAULT_SUP_GRID};
use crate::operator::{
    apply_from_samples, apply_grid, sample_window, write_grid_csv, GridPoint, OperatorConfig,
    SampleSeries, DEFAULT_QUAD_NODES,
};
use crate::{Error, Result};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for malformed input or unusable arguments.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when a mathematical precondition of the request fails.
pub const EXIT_PRECONDITION: i32 = 2;

/// Environment variable capping the worker pool (0 = automatic).
pub const THREADS_ENV: &str = "EXPSAMP_THREADS";

const SUBCOMMANDS: &[&str] = &[
    "kernel-info",
    "moments",
    "eval",
    "reconstruct",
    "table",
    "converge",
    "voronovskaya",
    "bounds",
    "coeffs",
];

const BOOL_FLAGS: &[&str] = &["reference", "latex"];

/// Dual terms used by the Poisson-side moment column.
const POISSON_TERMS: usize = 200;

#[derive(Parser, Debug)]
#[command(
    name = "expsamp",
    version,
    about = "Kantorovich exponential sampling: kernels, moments, reconstruction and convergence studies"
)]
struct Cli {
    /// key=value file of defaults; command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Support, moments and absolute moments of a kernel
    KernelInfo(Opts),
    /// Algebraic, absolute and Poisson-side moments at the given u values
    Moments(Opts),
    /// Evaluate the operator (or a combination with --p > 1) on a grid
    Eval(Opts),
    /// Reconstruct from a sample file written by `eval --emit-samples`
    Reconstruct(Opts),
    /// Error table of I_{iw} for i = 1..p and of their combination
    Table(Opts),
    /// Fit the convergence order over a list of rates
    Converge(Opts),
    /// Scaled pointwise errors against their predicted limit
    Voronovskaya(Opts),
    /// Evaluate a quantitative error estimate at each x
    Bounds(Opts),
    /// Exact coefficients of the order-raising combination
    Coeffs(Opts),
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Kernel spec: bspline:<n> or combo:<n>:<alpha>:<beta>
    #[arg(long, default_value = "bspline:2")]
    kernel: String,

    /// Built-in function: const:<c>, log, log2, log3, logpow:<k>, pow:<a>, cos4exp, sinmix
    #[arg(long = "fn", value_name = "NAME")]
    function: Option<String>,

    /// Sampling rate
    #[arg(long, default_value_t = 10.0)]
    w: f64,

    /// Comma-separated increasing rates
    #[arg(long = "w-list", default_value = "10,20,40,80,160")]
    w_list: String,

    /// Number of operators in the combination (1 = plain operator)
    #[arg(long, default_value_t = 1)]
    p: usize,

    /// Points as lo:hi:step or a comma-separated list
    #[arg(long)]
    x: Option<String>,

    /// Gauss-Legendre nodes per sampling cell
    #[arg(long = "quad-nodes", default_value_t = DEFAULT_QUAD_NODES)]
    quad_nodes: usize,

    /// Write the main output to this file instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Also write the cell means used by `eval` to this file
    #[arg(long = "emit-samples", value_name = "FILE")]
    emit_samples: Option<PathBuf>,

    /// Sample file for `reconstruct`
    #[arg(long, value_name = "FILE")]
    samples: Option<PathBuf>,

    /// Compare the table against stored reference values
    #[arg(long)]
    reference: bool,

    /// Emit the table as a LaTeX tabular block
    #[arg(long)]
    latex: bool,

    /// Which estimate `bounds` evaluates
    #[arg(long, value_enum, default_value = "first-order")]
    estimate: Estimate,

    /// Expansion order for the higher-order estimate
    #[arg(long, default_value_t = 2)]
    r: usize,

    /// Comma-separated smooth candidates for the K-functional ("none" for no extra)
    #[arg(long, default_value = "const:0")]
    candidates: String,

    /// Highest moment order reported
    #[arg(long = "max-order", default_value_t = 3)]
    max_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Latex,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Estimate {
    FirstOrder,
    HigherOrder,
    Combination,
}

/// Parses and executes a command line, writing results to `stdout` (or the
/// `--output` file) and diagnostics to `stderr`. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "expsamp: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let informational =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let sink: &mut dyn Write = if informational { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return if informational { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let outcome = configure_threads().and_then(|()| execute(&cli.command, stdout, stderr));
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "expsamp: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Precondition(_) | Error::MissingDerivative { .. } => EXIT_PRECONDITION,
        _ => EXIT_USAGE,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Error::InvalidArgument(format!(
            "{THREADS_ENV} must be a non-negative integer, got `{raw}`"
        ))
    })?;
    if n > 0 {
        // a pool configured earlier in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Splices `--config` entries into the argument list right after the
/// subcommand, skipping keys already given explicitly.
fn merge_config(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--config" {
            let value = args
                .get(i + 1)
                .ok_or_else(|| Error::InvalidArgument("--config needs a file argument".into()))?;
            path = Some(PathBuf::from(value));
            args.drain(i..i + 2);
        } else if let Some(v) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(v));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let entries = read_config(&path)?;

    let given: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .filter(|a| a.starts_with('-'))
        .map(|a| {
            let name = a.split('=').next().unwrap_or_default().to_string();
            if name == "-o" {
                "--output".to_string()
            } else {
                name
            }
        })
        .collect();

    let mut command = None;
    let mut extra = Vec::new();
    for (key, value) in entries {
        if key == "command" {
            command = Some(value);
            continue;
        }
        let flag = format!("--{key}");
        if given.contains(&flag) {
            continue;
        }
        if BOOL_FLAGS.contains(&key.as_str()) {
            match value.as_str() {
                "true" | "1" | "yes" => extra.push(OsString::from(flag)),
                "false" | "0" | "no" => {}
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "config key `{key}` expects true or false, got `{other}`"
                    )))
                }
            }
        } else {
            extra.push(OsString::from(flag));
            extra.push(OsString::from(value));
        }
    }

    let position = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let insert_at = match (position, command) {
        (Some(p), _) => p + 1,
        (None, Some(c)) => {
            args.insert(1, OsString::from(c));
            2
        }
        (None, None) => args.len(),
    };
    args.splice(insert_at..insert_at, extra);
    Ok(args)
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::parse(line, n + 1, "config lines must have the form key=value")
        })?;
        let key = key.trim().replace('_', "-");
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

/// Parses `lo:hi:step` or a comma-separated list of numbers.
pub fn parse_points(spec: &str) -> Result<Vec<f64>> {
    let number = |token: &str, pos: usize| -> Result<f64> {
        let t = token.trim();
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::parse(t, pos, "expected a finite number"))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let offsets = [0, parts[0].len() + 1, parts[0].len() + parts[1].len() + 2];
        let lo = number(parts[0], offsets[0])?;
        let hi = number(parts[1], offsets[1])?;
        let step = number(parts[2], offsets[2])?;
        if step <= 0.0 {
            return Err(Error::parse(parts[2], offsets[2], "step must be positive"));
        }
        if lo >= hi {
            return Err(Error::parse(
                parts[1],
                offsets[1],
                "upper end must exceed lower end",
            ));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| lo + step * i as f64).collect());
    }
    if parts.len() != 1 {
        return Err(Error::parse(
            spec,
            0,
            "expected lo:hi:step or a comma-separated list",
        ));
    }
    let mut out = Vec::new();
    let mut offset = 0;
    for token in spec.split(',') {
        out.push(number(token, offset)?);
        offset += token.len() + 1;
    }
    Ok(out)
}

/// Parses a comma-separated strictly increasing list of positive rates.
pub fn parse_w_list(spec: &str) -> Result<Vec<f64>> {
    let ws = parse_points(spec)?;
    let mut offset = 0;
    for (i, token) in spec.split(',').enumerate() {
        if ws.get(i).is_some_and(|w| *w <= 0.0) {
            return Err(Error::parse(token, offset, "rates must be positive"));
        }
        if i > 0 && ws.get(i).is_some_and(|w| *w <= ws[i - 1]) {
            return Err(Error::parse(
                token,
                offset,
                "rates must be strictly increasing",
            ));
        }
        offset += token.len() + 1;
    }
    Ok(ws)
}

impl Opts {
    fn kernel(&self) -> Result<Box<dyn Kernel>> {
        self.kernel.parse::<KernelSpec>()?.build()
    }

    fn function(&self) -> Result<Builtin> {
        self.function
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("--fn is required".into()))?
            .parse()
    }

    fn points(&self) -> Result<Vec<f64>> {
        let spec = self
            .x
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("--x is required".into()))?;
        let xs = parse_points(spec)?;
        if let Some(bad) = xs.iter().find(|x| **x <= 0.0) {
            return Err(Error::Domain(format!(
                "evaluation points must be positive, got {bad}"
            )));
        }
        Ok(xs)
    }

    fn config(&self) -> Result<OperatorConfig> {
        OperatorConfig::new(self.w, self.quad_nodes)
    }

    fn scheme(&self) -> Result<CombinationScheme> {
        CombinationScheme::solve(self.p)
    }

    fn candidates(&self) -> Result<Vec<Builtin>> {
        let spec = self.candidates.trim();
        if spec.is_empty() || spec == "none" {
            return Ok(Vec::new());
        }
        spec.split(',').map(|s| s.trim().parse()).collect()
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let chosen = if self.latex {
            Format::Latex
        } else {
            self.format.unwrap_or(default)
        };
        if allowed.contains(&chosen) {
            Ok(chosen)
        } else {
            Err(Error::InvalidArgument(format!(
                "format {} is not available for this command",
                chosen
                    .to_possible_value()
                    .map(|v| v.get_name().to_string())
                    .unwrap_or_default()
            )))
        }
    }

    fn with_sink<F>(&self, stdout: &mut dyn Write, body: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        match &self.output {
            Some(path) => {
                let mut file = BufWriter::new(File::create(path)?);
                body(&mut file)?;
                file.flush()?;
                Ok(())
            }
            None => body(stdout),
        }
    }
}

fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::KernelInfo(o) => kernel_info(o, stdout),
        Command::Moments(o) => moments(o, stdout),
        Command::Eval(o) => eval(o, stdout),
        Command::Reconstruct(o) => reconstruct(o, stdout),
        Command::Table(o) => table(o, stdout, stderr),
        Command::Converge(o) => converge(o, stdout),
        Command::Voronovskaya(o) => voronovskaya(o, stdout),
        Command::Bounds(o) => bounds(o, stdout),
        Command::Coeffs(o) => coeffs(o, stdout),
    }
}

#[derive(Serialize)]
struct KernelInfo {
    kernel: String,
    log_support: [f64; 2],
    at_u: f64,
    moments: Vec<MomentReport>,
}

fn kernel_info(o: &Opts, stdout: &mut dyn Write) -> Result<()> {
    let kernel = o.kernel()?;
    let format = o.format(Format::Text, &[Format::Text, Format::Json])?;
    let at_u = match &o.x {
        Some(_) => *o
            .points()?
            .first()
            .expect("parse_points returns at least one value"),
        None => 1.0,
    };
    let moments = (0..=o.max_order)
        .map(|nu| moment_report(kernel.as_ref(), nu, Some(at_u), DEFAULT_SUP_GRID))
        .collect::<Result<Vec<_>>>()?;
    let support = kernel.log_support();
    let info = KernelInfo {
        kernel: kernel.label(),
        log_support: [support.lo, support.hi],
        at_u,
        moments,
    };
    o.with_sink(stdout, |out| {
        match format {
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&info)?)?,
            _ => {
                writeln!(out, "kernel {}", info.kernel)?;
                writeln!(
                    out,
                    "log-support [{}, {}]",
                    sig12(support.lo),
                    sig12(support.hi)
                )?;
                writeln!(out, "moments at u = {}", sig12(at_u))?;
                for m in &info.moments {
                    writeln!(
                        out,
                        "m{nu} = {}  M{nu} = {}  u_independent = {}",
                        sig12(clean(m.algebraic)),
                        sig12(clean(m.absolute_sup)),
                        m.u_independent,
                        nu = m.order
                    )?;
                }
            }
        }
        Ok(())
    })
}

/// Rounds values within round-off of zero to zero for display.
fn clean(v: f64) -> f64 {
    if v.abs() < 1e-13 {
        0.0
    } else {
        v
    }
}

#[derive(Serialize)]
struct MomentRow {
    u: f64,
    order: usize,
    algebraic: f64,
    absolute: f64,
    poisson: f64,
}

fn moments(o: &Opts, stdout: &mut dyn Write) -> Result<()> {
    let kernel = o.kernel()?;
    let format = o.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let us = match &o.x {
        Some(_) => o.points()?,
        None => vec![1.0],
    };
    let mut rows = Vec::new();
    for &u in &us {
        for nu in 0..=o.max_order {
            rows.push(MomentRow {
                u,
                order: nu,
                algebraic: crate::moments::algebraic_moment(kernel.as_ref(), nu, u)?,
                absolute: crate::moments::absolute_moment(kernel.as_ref(), nu, u)?,
                poisson: poisson_moment(kernel.as_ref(), nu, u, POISSON_TERMS)?,
            });
        }
    }
    o.with_sink(stdout, |out| {
        match format {
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?,
            _ => {
                writeln!(out, "u,order,algebraic,absolute,poisson")?;
                for r in &rows {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        sig12(r.u),
                        r.order,
                        sig12(r.algebraic),
                        sig12(r.absolute),
                        sig12(r.poisson)
                    )?;
                }
            }
        }
        Ok(())
    })
}

fn write_points(out: &mut dyn Write, format: Format, points: &[GridPoint]) -> Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(points)?)?,
        _ => write_grid_csv(out, points)?,
    }
    Ok(())
}

fn eval(o: &Opts, stdout: &mut dyn Write) -> Result<()> {
    let kernel = o.kernel()?;
    let f = o.function()?;
    let cfg = o.config()?;
    let xs = o.points()?;
    let format = o.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let points = if o.p == 1 {
        apply_grid(&f, kernel.as_ref(), &cfg, &xs)?
    } else {
        let scheme = o.scheme()?;
        xs.iter()
            .map(|&x| {
                let approx = apply_combo_with(&f, kernel.as_ref(), &scheme, &cfg, x)?;
                let exact = f.value(x);
                Ok(GridPoint {
                    x,
                    approx,
                    exact,
                    abs_error: (approx - exact).abs(),
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(path) = &o.emit_samples {
        if o.p != 1 {
            return Err(Error::InvalidArgument(
                "--emit-samples needs a single rate (--p 1)".into(),
            ));
        }
        let window = sample_window(kernel.as_ref(), cfg.w(), &xs)?;
        let series = SampleSeries::from_function(&f, &cfg, window)?;
        let mut file = BufWriter::new(File::create(path)?);
        series.write_csv(&mut file)?;
        file.flush()?;
    }
    o.with_sink(stdout, |out| write_points(out, format, &points))
}

fn reconstruct(o: &Opts, stdout: &mut dyn Write) -> Result<()> {
    let kernel = o.kernel()?;
    let path = o
        .samples
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--samples is required".into()))?;
    let file = File::open(path).map_err(|e| {
        Error::InvalidArgument(format!("cannot open sample file {}: {e}", path.display()))
    })?;
    let series = SampleSeries::read_csv(BufReader::new(file))?;
    let xs = o.points()?;
    let format = o.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let approx = xs
        .iter()
        .map(|&x| apply_from_samples(&series, kernel.as_ref(), x))
        .collect::<Result<Vec<_>>>()?;
    match &o.function {
        Some(_) => {
            let f = o.function()?;
            let points: Vec<GridPoint> = xs
                .iter()
                .zip(&approx)
                .map(|(&x, &a)| {
                    let exact = f.value(x);
                    GridPoint {
                        x,
                        approx: a,
                        exact,
                        abs_error: (a - exact).abs(),
                    }
                })
                .collect();
            o.with_sink(stdout, |out| write_points(out, format, &points))
        }
        None => o.with_sink(stdout, |out| {
            match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Row {
                        x: f64,
                        approx: f64,
                    }
                    let rows: Vec<Row> = xs
                        .iter()
                        .zip(&approx)
                        .map(|(&x, &approx)| Row { x, approx })
                        .collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
                }
                _ => {
                    writeln!(out, "x,approx")?;
                    for (x, a) in xs.iter().zip(&approx) {
                        writeln!(out, "{},{}", sig12(*x), sig12(*a))?;
                    }
                }
            }
            Ok(())
        }),
    }
}

fn table(o: &Opts, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let kernel = o.kernel()?;
    let f = o.function()?;
    let scheme = o.scheme()?;
    let cfg = o.config()?;
    let xs = o.points()?;
    let format = o.format(Format::Csv, &[Format::Csv, Format::Json, Format::Latex])?;
    let table = make_table(&f, kernel.as_ref(), &scheme, &cfg, &xs)?;
    let report = if o.reference {
        let reference = ReferenceTable::for_table(&table).ok_or_else(|| {
            Error::InvalidArgument("no reference values stored for this setup".into())
        })?;
        Some(compare_table(&table, reference, TABLE_TOLERANCE)?)
    } else {
        None
    };
    o.with_sink(stdout, |out| match format {
        Format::Json => {
            writeln!(out, "{}", table.to_json()?)?;
            Ok(())
        }
        Format::Latex => table.write_latex(out),
        _ => table.write_csv(out),
    })?;
    if let Some(report) = report {
        report.write_text(stderr)?;
    }
    Ok(())
}

fn converge(o: &Opts, stdout: &mut dyn Write) -> Result<()> {
    let kernel = o.kernel()?;
    let f = o.function()?;
    let ws = parse_w_list(&o.w_list)?;
    let probe = match &o.x {
        Some(_) => o.points()?,
        None => {
            let (lo, hi) = f.eval_interval();
            uniform_grid(lo, hi, 51)
        }
    };
    o.format(Format::Json, &[Format::Json])?;
    let scheme = (o.p > 1).then(|| o.scheme()).transpose()?;
    let study = estimate_order(
        &f,
        kernel.as_ref(),
        scheme.as_ref(),
        &ws,
        &probe,
        o.quad_nodes,
    )?;
    o.with_sink(stdout, |out| {
        writeln!(out, "{}", study.to_json()?)?;
        Ok(())
    })
}

#[derive(Serialize)]
struct PointStudy {
    x: f64,
    #[serde(flatten)]
    study: ConvergenceStudy,
}

fn voronovskaya(o: &Opts, stdout: &mut dyn Write) -> Result<()> {
    let kernel = o.kernel()?;
    let f = o.function()?;
    let ws = parse_w_list(&o.w_list)?;
    let xs = o.points()?;
    o.format(Format::Json, &[Format::Json])?;
    let scheme = (o.p > 1).then(|| o.scheme()).transpose()?;
    let studies = xs
        .iter()
        .map(|&x| {
            let study =
                voronovskaya_check(&f, kernel.as_ref(), x, &ws, scheme.as_ref(), o.quad_nodes)?;
            Ok(PointStudy { x, study })
        })
        .collect::<Result<Vec<_>>>()?;
    o.with_sink(stdout, |out| {
        let text = if studies.len() == 1 {
            serde_json::to_string_pretty(&studies[0])?
        } else {
            serde_json::to_string_pretty(&studies)?
        };
        writeln!(out, "{text}")?;
        Ok(())
    })
}

fn bounds(o: &Opts, stdout: &mut dyn Write) -> Result<()> {
    let kernel = o.kernel()?;
    let f = o.function()?;
    let cfg = o.config()?;
    let xs = o.points()?;
    let format = o.format(Format::Text, &[Format::Text, Format::Json])?;
    let candidates = o.candidates()?;
    let refs: Vec<&dyn TestFunction> = candidates.iter().map(|c| c as &dyn TestFunction).collect();
    let scheme = o.scheme()?;
    let reports = xs
        .iter()
        .map(|&x| match o.estimate {
            Estimate::FirstOrder => first_order_bound(&f, kernel.as_ref(), &cfg, x, &refs),
            Estimate::HigherOrder => higher_order_bound(&f, kernel.as_ref(), &cfg, x, o.r, &refs),
            Estimate::Combination => {
                combination_bound(&f, kernel.as_ref(), &scheme, &cfg, x, &refs)
            }
        })
        .collect::<Result<Vec<BoundReport>>>()?;
    o.with_sink(stdout, |out| {
        match format {
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?,
            _ => {
                for r in &reports {
                    let status = match r.status {
                        BoundStatus::Satisfied => "satisfied",
                        BoundStatus::Violated => "violated",
                        BoundStatus::NotApplicable => "not-applicable",
                    };
                    writeln!(
                        out,
                        "{} x={} w={}: lhs={} rhs={} {}",
                        r.estimate,
                        sig12(r.x),
                        sig12(r.w),
                        sig12(r.lhs),
                        sig12(r.rhs),
                        status
                    )?;
                    writeln!(out, "  surrogate: {}", r.surrogate_desc)?;
                    for note in &r.notes {
                        writeln!(out, "  note: {note}")?;
                    }
                }
            }
        }
        Ok(())
    })
}

fn coeffs(o: &Opts, stdout: &mut dyn Write) -> Result<()> {
    let scheme = o.scheme()?;
    let format = o.format(Format::Text, &[Format::Text, Format::Json])?;
    #[derive(Serialize)]
    struct Coeffs {
        p: usize,
        exact: Vec<String>,
        values: Vec<f64>,
    }
    let doc = Coeffs {
        p: scheme.p(),
        exact: scheme
            .coefficients()
            .iter()
            .map(|c| format_rational(*c))
            .collect(),
        values: scheme.coefficients_f64(),
    };
    o.with_sink(stdout, |out| {
        match format {
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?,
            _ => {
                writeln!(out, "p = {}", doc.p)?;
                for (i, (c, v)) in doc.exact.iter().zip(&doc.values).enumerate() {
                    writeln!(out, "c_{} = {c} ({})", i + 1, sig12(*v))?;
                }
            }
        }
        Ok(())
    })
}
