//! End-to-end tests of the `tadeval` binary: exit codes, config merging,
//! output files, and cross-command consistency.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tadeval"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary spawns")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Extracts the value following `key: ` on a line of stdout.
fn field(stdout: &str, key: &str) -> String {
    let prefix = format!("{key}: ");
    stdout
        .lines()
        .find_map(|line| line.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` line in output:\n{stdout}"))
        .trim()
        .to_string()
}

fn field_f64(stdout: &str, key: &str) -> f64 {
    field(stdout, key)
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .expect("numeric field")
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

const SCORES: &str = "0.1\n0.2\n0.9\n0.3\n0.1\n";
const LABELS: &str = "0\n1\n1\n1\n0\n";

#[test]
fn eval_documented_example_point_and_pa() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    let labels = dir.path().join("labels.csv");
    write(&scores, SCORES);
    write(&labels, LABELS);

    let point = run(&[
        "eval",
        "--scores",
        scores.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
        "--protocol",
        "point",
        "--delta",
        "0.5",
    ]);
    assert!(point.status.success());
    let out = stdout_of(&point);
    assert_eq!(field_f64(&out, "f1"), 0.5);
    assert_eq!(field(&out, "tp"), "1  fp: 0  tn: 2  fn: 2");

    let pa = run(&[
        "eval",
        "--scores",
        scores.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
        "--protocol",
        "pa",
        "--delta",
        "0.5",
    ]);
    assert!(pa.status.success());
    let out = stdout_of(&pa);
    assert_eq!(field_f64(&out, "precision"), 1.0);
    assert_eq!(field_f64(&out, "recall"), 1.0);
    assert_eq!(field_f64(&out, "f1"), 1.0);
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.csv");
    write(&labels, LABELS);

    // 1: unknown flag (usage).
    let out = run(&["eval", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));

    // 1: missing required value (usage).
    let out = run(&["eval", "--labels", labels.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("usage error"));

    // 2: unreadable input (data).
    let out = run(&[
        "eval",
        "--scores",
        dir.path().join("missing.csv").to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
        "--delta",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // 2: malformed input with a line number (data).
    let scores = dir.path().join("bad.csv");
    write(&scores, "0.1\nnot-a-number\n0.3\n");
    let out = run(&[
        "eval",
        "--scores",
        scores.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
        "--delta",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("line 2"), "{}", stderr_of(&out));

    // 0: help.
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_file_merges_under_cli_flags() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    let labels = dir.path().join("labels.csv");
    let config = dir.path().join("conf.toml");
    write(&scores, SCORES);
    write(&labels, LABELS);
    write(
        &config,
        &format!(
            "[eval]\nscores = {scores:?}\nlabels = {labels:?}\nprotocol = \"pa\"\ndelta = 0.5\n",
            scores = scores.to_str().unwrap(),
            labels = labels.to_str().unwrap(),
        ),
    );

    // Config alone supplies everything.
    let out = run(&["eval", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert_eq!(field(&text, "protocol"), "pa");
    assert_eq!(field_f64(&text, "f1"), 1.0);

    // A CLI flag overrides the config value (delta 0.95 excludes everything).
    let out = run(&[
        "eval",
        "--config",
        config.to_str().unwrap(),
        "--delta",
        "0.95",
    ]);
    assert!(out.status.success());
    assert_eq!(field_f64(&stdout_of(&out), "f1"), 0.0);

    // A typo in the config is a data error naming the bad key.
    write(&config, "[eval]\nscoers = \"x\"\n");
    let out = run(&[
        "eval",
        "--config",
        config.to_str().unwrap(),
        "--delta",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("scoers"));
}

#[test]
fn ksweep_endpoints_match_eval() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    let labels = dir.path().join("labels.csv");
    let curve = dir.path().join("curve.csv");
    write(&scores, SCORES);
    write(&labels, LABELS);

    let base = [
        "--scores",
        scores.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
    ];

    let ks = run(&[
        &["ksweep"],
        &base[..],
        &[
            "--delta",
            "0.5",
            "--k",
            "0:100:10",
            "--out",
            curve.to_str().unwrap(),
        ],
    ]
    .concat());
    assert!(ks.status.success());
    let text = stdout_of(&ks);

    let eval_at = |protocol: &str| {
        let out = run(&[
            &["eval"],
            &base[..],
            &["--protocol", protocol, "--delta", "0.5"],
        ]
        .concat());
        field_f64(&stdout_of(&out), "f1")
    };

    let f1_at = |label: &str| -> f64 {
        text.lines()
            .find(|line| line.starts_with(label))
            .and_then(|line| line.split("f1=").nth(1))
            .unwrap_or_else(|| panic!("no `{label}` line in:\n{text}"))
            .trim()
            .parse()
            .unwrap()
    };
    assert_eq!(f1_at("k=  0.0"), eval_at("pa"));
    assert_eq!(f1_at("k=100.0"), eval_at("point"));

    // 11-row curve CSV plus one header line; no partial files left behind.
    let body = std::fs::read_to_string(&curve).unwrap();
    assert_eq!(body.lines().count(), 12);
    assert_eq!(body.lines().next().unwrap(), "k,f1");
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with(".partial-"))
        .collect();
    assert!(leftovers.is_empty(), "partial files left: {leftovers:?}");
}

#[test]
fn sweep_engines_agree_and_write_curves() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    let labels = dir.path().join("labels.csv");
    write(&scores, SCORES);
    write(&labels, LABELS);
    let base = [
        "--scores",
        scores.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
        "--protocol",
        "pak",
        "--k",
        "40",
    ];
    let fast = run(&[&["sweep"], &base[..]].concat());
    let slow = run(&[&["sweep"], &base[..], &["--naive", "true"]].concat());
    assert!(fast.status.success() && slow.status.success());
    let pick = |o: &Output| {
        let t = stdout_of(o);
        (field(&t, "best_threshold"), field(&t, "best_f1"))
    };
    assert_eq!(pick(&fast), pick(&slow));
}

#[test]
fn synth_baseline_roc_pipeline_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let synth_args = [
        "synth",
        "--t-len",
        "600",
        "--channels",
        "2",
        "--noise-std",
        "0.1",
        "--seed",
        "9",
        "--inject",
        "point:100:140:0:8",
        "--inject",
        "contextual:300:360:1:4",
        "--out-dir",
        out_dir,
    ];
    let first = run(&synth_args);
    assert!(first.status.success(), "{}", stderr_of(&first));
    let test_a = std::fs::read_to_string(dir.path().join("test.csv")).unwrap();

    // Same seed regenerates byte-identical data.
    let again = run(&synth_args);
    assert!(again.status.success());
    let test_b = std::fs::read_to_string(dir.path().join("test.csv")).unwrap();
    assert_eq!(test_a, test_b);

    let stats = run(&[
        "stats",
        "--labels",
        dir.path().join("labels.csv").to_str().unwrap(),
    ]);
    let text = stdout_of(&stats);
    assert_eq!(field(&text, "num_segments"), "2");
    assert_eq!(field(&text, "total_length"), "600");

    let case2 = dir.path().join("case2.csv");
    let out = run(&[
        "baseline",
        "--case",
        "case2",
        "--series",
        dir.path().join("test.csv").to_str().unwrap(),
        "--train",
        dir.path().join("train.csv").to_str().unwrap(),
        "--labels",
        dir.path().join("labels.csv").to_str().unwrap(),
        "--tau",
        "16",
        "--out",
        case2.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(case2.exists());

    let roc = run(&[
        "roc",
        "--scores",
        case2.to_str().unwrap(),
        "--labels",
        dir.path().join("labels.csv").to_str().unwrap(),
    ]);
    assert!(roc.status.success());
    let auroc = field_f64(&stdout_of(&roc), "auroc");
    assert!((0.0..=1.0).contains(&auroc));
}

#[test]
fn baseline_case1_repeats_and_seeded_files() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.csv");
    write(&labels, &"0\n".repeat(40).replacen("0\n", "1\n", 8));
    let out = run(&[
        "baseline",
        "--case",
        "case1",
        "--labels",
        labels.to_str().unwrap(),
        "--seed",
        "3",
        "--repeats",
        "2",
        "--out",
        dir.path().join("c1.csv").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(dir.path().join("c1-seed3.csv").exists());
    assert!(dir.path().join("c1-seed4.csv").exists());
    let text = stdout_of(&out);
    assert!(text.contains("best_f1_point:"));
    assert!(text.contains("+/-"));

    // Same seed, same bytes.
    let rerun = run(&[
        "baseline",
        "--case",
        "case1",
        "--labels",
        labels.to_str().unwrap(),
        "--seed",
        "3",
        "--repeats",
        "1",
        "--out",
        dir.path().join("c1-again.csv").to_str().unwrap(),
    ]);
    assert!(rerun.status.success());
    let a = std::fs::read_to_string(dir.path().join("c1-seed3.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("c1-again.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn simulate_is_invariant_to_thread_count() {
    let args = [
        "simulate",
        "--gamma",
        "0.1",
        "--segment-length",
        "50",
        "--delta",
        "0.97",
        "--trials",
        "400",
        "--seed",
        "21",
    ];
    let one = bin()
        .args(args)
        .env("TADEVAL_THREADS", "1")
        .output()
        .unwrap();
    let many = bin()
        .args(args)
        .env("TADEVAL_THREADS", "5")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(stdout_of(&one), stdout_of(&many));

    let bad = bin()
        .args(["stats", "--labels", "x"])
        .env("TADEVAL_THREADS", "zero?")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn analytic_prints_closed_forms_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let out = run(&[
        "analytic",
        "--gamma",
        "0.05",
        "--segment-length",
        "1000",
        "--delta",
        "0.99",
        "--out",
        curve.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!((field_f64(&text, "expected_precision") - 0.8403).abs() < 5e-4);
    assert!(field_f64(&text, "max_expected_f1") >= 0.95);
    let body = std::fs::read_to_string(&curve).unwrap();
    assert_eq!(
        body.lines().next().unwrap(),
        "delta_prime,precision,recall,f1"
    );
    assert_eq!(body.lines().count(), 10_002); // header + default grid

    // `--L` works as an alias for --segment-length.
    let alias = run(&["analytic", "--gamma", "0.05", "--L", "1000"]);
    assert!(alias.status.success());
    assert_eq!(
        field(&stdout_of(&alias), "max_expected_f1"),
        field(&text, "max_expected_f1")
    );
}

#[test]
fn report_writes_markdown_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let synth = run(&[
        "synth",
        "--t-len",
        "400",
        "--channels",
        "1",
        "--seed",
        "2",
        "--inject",
        "point:120:160:0:8",
        "--out-dir",
        out_dir,
    ]);
    assert!(synth.status.success(), "{}", stderr_of(&synth));
    let md = dir.path().join("report.md");
    let csv = dir.path().join("report.csv");
    let out = run(&[
        "report",
        "--test",
        dir.path().join("test.csv").to_str().unwrap(),
        "--train",
        dir.path().join("train.csv").to_str().unwrap(),
        "--labels",
        dir.path().join("labels.csv").to_str().unwrap(),
        "--tau",
        "16",
        "--hidden",
        "8",
        "--repeats",
        "2",
        "--out-md",
        md.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let md_text = std::fs::read_to_string(&md).unwrap();
    assert!(md_text.starts_with("| method |"));
    for name in ["case1-random", "case2-input-norm", "case3-untrained"] {
        assert!(md_text.contains(name), "missing {name} in:\n{md_text}");
    }
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 4); // header + three baselines
    assert!(stdout_of(&out).contains("| method |"));
}

#[test]
fn correlate_reports_both_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let xs = dir.path().join("xs.csv");
    let ys = dir.path().join("ys.csv");
    write(&xs, "1\n2\n3\n4\n5\n");
    write(&ys, "2\n4\n6\n8\n10\n");
    let out = run(&[
        "correlate",
        "--xs",
        xs.to_str().unwrap(),
        "--ys",
        ys.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(field_f64(&text, "pearson_pcc"), 1.0);
    assert_eq!(field_f64(&text, "kendall_krc"), 1.0);

    // Degenerate column: coefficients are reported as undefined, not 0/NaN.
    write(&ys, "3\n3\n3\n3\n3\n");
    let out = run(&[
        "correlate",
        "--xs",
        xs.to_str().unwrap(),
        "--ys",
        ys.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(field(&text, "pearson_pcc").contains("undefined"));
    assert!(field(&text, "kendall_krc").contains("undefined"));
}
