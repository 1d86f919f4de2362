use std::process::{Command, Output};

fn expsamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expsamp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_then_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("s.csv");
    let samples = samples.to_str().unwrap();
    let eval = expsamp(&[
        "eval",
        "--kernel",
        "bspline:3",
        "--fn",
        "cos4exp",
        "--w",
        "12",
        "--x",
        "0.5:1.0:0.005",
        "--emit-samples",
        samples,
    ]);
    assert!(eval.status.success());
    let rec = expsamp(&[
        "reconstruct",
        "--kernel",
        "bspline:3",
        "--fn",
        "cos4exp",
        "--samples",
        samples,
        "--x",
        "0.5:1.0:0.005",
    ]);
    assert!(rec.status.success());
    assert_eq!(stdout(&eval), stdout(&rec));
    assert_eq!(stdout(&eval).lines().count(), 102);
}

#[test]
fn reconstruct_outside_sampled_window_fails() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("s.csv");
    let samples = samples.to_str().unwrap();
    assert!(
        expsamp(&["eval", "--fn", "log", "--x", "1", "--emit-samples", samples])
            .status
            .success()
    );
    let rec = expsamp(&["reconstruct", "--samples", samples, "--x", "3"]);
    assert_eq!(rec.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&rec.stderr).contains("no mean for k"));
    let missing = expsamp(&[
        "reconstruct",
        "--samples",
        "/nonexistent/file.csv",
        "--x",
        "1",
    ]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "table",
        "--kernel",
        "bspline:4",
        "--fn",
        "sinmix",
        "--w",
        "30",
        "--p",
        "2",
        "--x",
        "1.9,2.6,3.1,3.8",
        "--format",
        "json",
    ];
    let a = expsamp(&args);
    let b = expsamp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let conv = ["converge", "--fn", "cos4exp", "--p", "2"];
    let a = Command::new(env!("CARGO_BIN_EXE_expsamp"))
        .args(conv)
        .env("EXPSAMP_THREADS", "1")
        .output()
        .unwrap();
    let b = expsamp(&conv);
    assert_eq!(a.stdout, b.stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    for key in [
        "w_list",
        "errors",
        "fitted_order",
        "predicted_limit",
        "deviations",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn table_formats_and_reference() {
    let base = [
        "table",
        "--kernel",
        "bspline:2",
        "--fn",
        "cos4exp",
        "--w",
        "15",
        "--p",
        "3",
        "--x",
        "0.60,0.75,0.80,0.90,0.95",
    ];
    let csv = expsamp(&[&base[..], &["--reference"]].concat());
    assert!(csv.status.success());
    let text = stdout(&csv);
    assert!(text.contains("0.6,0.1422,0.0664,0.0424,0.0039"));
    assert!(String::from_utf8_lossy(&csv.stderr).contains("20 cells"));
    let latex = expsamp(&[&base[..], &["--latex"]].concat());
    assert!(stdout(&latex).contains("\\end{tabular}"));
    let bad = expsamp(&[&base[..], &["--format", "text"]].concat());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn exit_status_classes() {
    let pre = expsamp(&[
        "bounds",
        "--kernel",
        "bspline:2",
        "--estimate",
        "higher-order",
        "--r",
        "3",
        "--fn",
        "cos4exp",
        "--x",
        "0.8",
    ]);
    assert_eq!(pre.status.code(), Some(2));
    let usage = expsamp(&["eval", "--fn", "log", "--x", "1:0:0.1"]);
    assert_eq!(usage.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("position"));
    let ok = expsamp(&[
        "bounds", "--fn", "cos4exp", "--w", "15", "--x", "0.75", "--format", "json",
    ]);
    assert!(ok.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(reports[0]["status"], "satisfied");
}

#[test]
fn voronovskaya_on_log_is_one_half() {
    let out = expsamp(&[
        "voronovskaya",
        "--kernel",
        "bspline:2",
        "--fn",
        "log",
        "--x",
        "2",
    ]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["predicted_limit"], 0.5);
    for v in json["scaled_errors"].as_array().unwrap() {
        assert!((v.as_f64().unwrap() - 0.5).abs() < 1e-11);
    }
}

#[test]
fn output_file_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        format!(
            "command=eval\nkernel=bspline:2\nfn=const:3\nw=7\nx=1.0:2.0:0.5\noutput={}\n",
            out.display()
        ),
    )
    .unwrap();
    let run = expsamp(&["--config", cfg.to_str().unwrap()]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let written = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = written.lines().collect();
    assert_eq!(lines[0], "x,approx,exact,abs_error");
    let xs: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(xs, ["1", "1.5", "2"]);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(1) == Some("3")));
}
