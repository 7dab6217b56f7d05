use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ccrmap");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn ccrmap")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Splits a command line on whitespace, honouring double quotes.
fn words(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut started = false;
    for ch in line.chars() {
        match ch {
            '"' => {
                quoted = !quoted;
                started = true;
            }
            c if c.is_whitespace() && !quoted => {
                if started {
                    out.push(std::mem::take(&mut cur));
                    started = false;
                }
            }
            c => {
                cur.push(c);
                started = true;
            }
        }
    }
    assert!(!quoted, "unbalanced quotes in {line}");
    if started {
        out.push(cur);
    }
    out
}

struct Example {
    command: String,
    expected: String,
    exit: i32,
}

fn readme_examples() -> Vec<Example> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../README.md");
    let text = std::fs::read_to_string(path).expect("README.md");
    let mut examples: Vec<Example> = Vec::new();
    let mut in_block = false;
    for line in text.lines() {
        if line.starts_with("```") {
            in_block = line == "```console";
            continue;
        }
        if !in_block {
            continue;
        }
        if let Some(cmd) = line.strip_prefix("$ ") {
            examples.push(Example { command: cmd.to_string(), expected: String::new(), exit: 0 });
        } else if let Some(code) = line.strip_prefix("# exit ") {
            examples.last_mut().expect("exit after a command").exit = code.parse().expect("exit code");
        } else {
            let ex = examples.last_mut().expect("output after a command");
            ex.expected.push_str(line);
            ex.expected.push('\n');
        }
    }
    examples
}

#[test]
fn readme_examples_reproduce() {
    let examples = readme_examples();
    assert!(examples.len() >= 15, "found {} examples", examples.len());
    for ex in &examples {
        let argv = words(&ex.command);
        assert_eq!(argv[0], "ccrmap");
        let args: Vec<&str> = argv[1..].iter().map(String::as_str).collect();
        let out = run(&args);
        assert_eq!(stdout(&out) + &stderr(&out), ex.expected, "$ {}", ex.command);
        assert_eq!(out.status.code(), Some(ex.exit), "$ {}", ex.command);
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let cases: &[&[&str]] = &[
        &["verify", "all", "--q", "1/3", "--delta", "1/2", "--degree", "8", "--format", "json"],
        &["hahn", "abstract", "--alpha", "1/2", "--beta", "1/3", "--N", "7", "--kmax", "6", "--format", "csv"],
        &["realize", "xdelta*qb(Bdelta)", "--q", "-1/2", "--delta", "1/2", "--degree", "10", "--format", "csv"],
        &["basis", "phi_delta.phi_q.phi_delta", "--q", "9/10", "--n", "6", "--format", "json"],
    ];
    for args in cases {
        let first = run(args);
        assert!(first.status.success(), "{args:?}: {}", stderr(&first));
        for _ in 0..2 {
            let again = run(args);
            assert_eq!(again.stdout, first.stdout, "{args:?}");
            assert_eq!(again.stderr, first.stderr, "{args:?}");
        }
    }
}

#[test]
fn every_suite_passes() {
    for q in ["1/2", "-1/2", "1/3", "9/10"] {
        let out = run(&["verify", "all", "--q", q, "--degree", "12"]);
        assert!(out.status.success(), "q = {q}\n{}{}", stdout(&out), stderr(&out));
        assert!(!stdout(&out).contains("FAIL"));
    }
}

#[test]
fn ccr_suite_at_degree_24() {
    let out = run(&["verify", "ccr", "--q", "1/2", "--degree", "24"]);
    assert!(out.status.success());
    assert!(stdout(&out).ends_with("8/8 checks passed\n"));
}

#[test]
fn json_and_csv_shapes() {
    let out = run(&["apply", "x", "poly(1/2)", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"basis": "monomial", "coeffs": ["0", "1/2"]}));

    let out = run(&["apply", "x", "poly(1/2)", "--format", "csv"]);
    assert_eq!(stdout(&out), "degree,coeff\n0,0\n1,1/2\n");

    let out = run(&["verify", "similarity", "--q", "1/2", "--degree", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v.as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c["pass"] == true && c["D"] == 4));

    let out = run(&["hahn", "q-deformed", "--q", "1/2", "--kmax", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["variant"], "q_deformed");
    assert_eq!(v["q"], "1/2");
    assert_eq!(v["rows"][0]["eigenvalue"], "0");
    assert_eq!(v["rows"][0]["coeffs"], serde_json::json!(["1"]));
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["verify", "nonsense", "--q", "1/2"],
        &["verify", "ccr"],
        &["basis", "phi_x"],
        &["basis", "phi_q"],
        &["apply", "x", "poly(d)"],
        &["apply", "qb(x)", "poly(1)", "--q", "1/2"],
        &["apply", "x", "poly(1)", "--q", "1/0"],
        &["hahn", "q-deformed"],
        &["hahn", "continuous", "--delta", "0"],
        &["hahn", "continuous", "--kmax", "20"],
        &["spectrum", "q-spectrum"],
        &["apply", "x", "poly(1)", "--format", "xml"],
        &["apply", "x", "poly(1)", "--q", "-1", "--degree", "4"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn math_failures_exit_3() {
    let cases: &[&[&str]] = &[
        &["apply", "x", "poly(x^4)", "--degree", "4"],
        &["apply", "exp(x)", "poly(1)", "--degree", "4"],
        &["hahn", "continuous", "--alpha", "-2", "--beta", "-1", "--N", "3", "--kmax", "3"],
        &["basis", "phi_q_prime.phi_q", "--q", "1/2"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).starts_with("error: "), "{args:?}");
    }
}

#[test]
fn warning_outside_unit_interval() {
    let out = run(&["apply", "Dq", "poly(x^2)", "--q", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "4*x\n");
    assert_eq!(stderr(&out), "warning: q = 3 lies outside (-1, 1)\n");
}

#[test]
fn help_lists_defaults() {
    let out = run(&["--help"]);
    let text = stdout(&out);
    assert!(text.contains("[default: 16]"));
    assert!(text.contains("[default: text]"));
    for cmd in ["apply", "realize", "verify", "basis", "project", "hahn", "spectrum"] {
        assert!(text.contains(cmd), "{cmd}");
    }
}
