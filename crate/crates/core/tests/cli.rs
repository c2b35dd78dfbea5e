use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use burntrack::cli::{parse_session, run, Invocation, LENGTH_CAP_VAR};

fn session_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("sessions/examples.bt")
}

fn bt(args: &[&str]) -> Invocation {
    let session = session_path();
    let mut full = vec!["burntrack", "-s", session.to_str().unwrap()];
    full.extend_from_slice(args);
    run(full)
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = bt(&full);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

/// Half a unit in the last printed digit, so `2.000000` admits 5e-7.
fn printed_tolerance(text: &str) -> f64 {
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap()),
        None => (text, 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, d)| d.len()) as i32;
    0.5 * 10f64.powi(exp - decimals)
}

fn json_scalars<'a>(v: &'a Value, key: Option<&'a str>, out: &mut Vec<(&'a str, &'a Value)>) {
    match v {
        Value::Array(items) => items.iter().for_each(|x| json_scalars(x, key, out)),
        Value::Object(map) => map.iter().for_each(|(k, x)| json_scalars(x, Some(k), out)),
        _ => out.push((key.unwrap_or(""), v)),
    }
}

/// Every numeric `key=value` of the text report appears under the same key
/// in the JSON report. Words such as `1` that JSON keeps as strings match
/// as strings.
fn assert_agree(args: &[&str]) {
    let text = bt(args);
    assert_eq!(text.code, 0, "{}", text.stderr);
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let value: Value = serde_json::from_str(&bt(&full).stdout).unwrap();
    let mut scalars = Vec::new();
    json_scalars(&value, None, &mut scalars);
    let mut seen = 0;
    for token in text.stdout.split_whitespace() {
        let Some((key, raw)) = token.split_once('=') else {
            continue;
        };
        let Ok(x) = raw.parse::<f64>() else { continue };
        let key = if key == "p" { "power" } else { key };
        let tol = printed_tolerance(raw);
        assert!(
            scalars.iter().any(|&(k, y)| k == key
                && match y {
                    Value::Number(y) => (x - y.as_f64().unwrap()).abs() <= tol,
                    Value::String(y) => y == raw,
                    _ => false,
                }),
            "{args:?}: text {key}={raw} missing from JSON {scalars:?}"
        );
        seen += 1;
    }
    assert!(seen > 0, "{args:?}: no numeric fields in {}", text.stdout);
}

#[test]
fn orbit_of_fibonacci() {
    let out = bt(&["orbit", "fib", "b", "--depth", "7"]);
    assert_eq!(out.code, 0);
    let words: Vec<&str> = out
        .stdout
        .lines()
        .map(|l| l.rsplit(" = ").next().unwrap())
        .collect();
    assert_eq!(
        words,
        [
            "a",
            "ab",
            "aba",
            "abaab",
            "abaababa",
            "abaababaabaab",
            "abaababaabaababaababa"
        ]
    );
}

#[test]
fn burnside_order_of_dehn_twist() {
    let out = bt(&["burnside-order", "dehn", "--rank", "2", "--exp", "3"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "3\n"));
}

#[test]
fn pf_of_the_abc_cycle() {
    let out = bt(&["pf", "abc_cycle"]);
    assert_eq!(out.code, 0);
    assert!(
        out.stdout.starts_with("lambda=2.000000\n"),
        "{}",
        out.stdout
    );
    let v = json(&["pf", "abc_cycle"]);
    assert!(v["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn json_and_text_agree() {
    assert_agree(&["pf", "abc_cycle"]);
    assert_agree(&["pf", "cover"]);
    assert_agree(&["period", "fib", "a", "--bound", "5"]);
    assert_agree(&["power-index", "fib", "a", "--depth", "6"]);
    assert_agree(&["classify", "mixed"]);
    assert_agree(&["classify", "dehn"]);
    assert_agree(&["red", "cover", "cd", "--depth", "2"]);
    assert_agree(&["moves", "ababab", "--n", "3", "--xi", "1"]);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["--json", "classify", "mixed"][..],
        &["audit-yellow", "mixed", "b", "--depth", "3"],
        &["moves", "aaabbb", "--n", "3", "--xi", "1", "--join", "ab"],
        &["dump"],
    ] {
        let first = bt(args);
        assert_eq!(first, bt(args), "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let undecided = bt(&[
        "moves", "ab", "--n", "3", "--xi", "0", "--join", "ba", "--budget", "50",
    ]);
    assert_eq!(undecided.code, 2, "{undecided:?}");

    let dir = tempfile::tempdir().unwrap();
    let relators = dir.path().join("relators.txt");
    std::fs::write(&relators, "aaa\nbbb\n").unwrap();
    let limited = bt(&[
        "tc",
        "--rank",
        "2",
        "--relators",
        relators.to_str().unwrap(),
        "--max-cosets",
        "10",
    ]);
    assert_eq!(limited.code, 2);
    assert!(
        limited.stdout.starts_with("coset limit 10 reached"),
        "{}",
        limited.stdout
    );

    let session = dir.path().join("s.bt");
    std::fs::write(&session, "subst grow\n  a -> a b\n  b -> b\n").unwrap();
    let out = run([
        "burntrack",
        "-s",
        session.to_str().unwrap(),
        "period",
        "grow",
        "a",
        "--bound",
        "4",
    ]);
    assert_eq!(out.code, 2, "{out:?}");

    assert_eq!(bt(&["orbit", "nope", "a", "--depth", "1"]).code, 1);
    assert_eq!(bt(&["no-such-command"]).code, 1);
    assert_eq!(bt(&["--help"]).code, 0);
}

#[test]
fn errors_go_to_stderr() {
    let out = bt(&["pf", "missing"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.starts_with("error: "), "{}", out.stderr);
}

#[test]
fn dump_round_trips() {
    let out = bt(&["dump"]);
    assert_eq!(out.code, 0);
    let reparsed = parse_session(&out.stdout).unwrap();
    assert_eq!(reparsed.dump(), out.stdout);
    let original = std::fs::read_to_string(session_path()).unwrap();
    assert_eq!(parse_session(&original).unwrap().dump(), out.stdout);
}

#[test]
fn session_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let session = dir.path().join("s.bt");
    std::fs::write(
        &session,
        "autom f over ab\n  a -> a A a b\n  b -> b\nalphabet ab: a b\n",
    )
    .unwrap();
    // defined after use: an error naming the first line
    let out = run(["burntrack", "-s", session.to_str().unwrap(), "dump"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("line 1"), "{}", out.stderr);

    std::fs::write(
        &session,
        "alphabet ab: a b\nautom f over ab\n  a -> a A a b\n  b -> b\n",
    )
    .unwrap();
    let out = run(["burntrack", "-s", session.to_str().unwrap(), "dump"]);
    assert_eq!(out.code, 0);
    assert!(out.stderr.starts_with("warning: "), "{}", out.stderr);
    assert!(out.stdout.contains("a -> a b"), "{}", out.stdout);
}

#[test]
fn length_cap_from_environment() {
    let exe = env!("CARGO_BIN_EXE_burntrack");
    let session = session_path();
    let base = [
        "-s",
        session.to_str().unwrap(),
        "orbit",
        "fib",
        "b",
        "--depth",
        "12",
    ];
    let capped = Command::new(exe)
        .args(base)
        .env(LENGTH_CAP_VAR, "50")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&capped.stderr).starts_with("error: "));

    let open = Command::new(exe)
        .args(base)
        .env(LENGTH_CAP_VAR, "1000")
        .output()
        .unwrap();
    assert_eq!(open.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&open.stdout).lines().count(), 12);

    let flag_wins = Command::new(exe)
        .args(["--length-cap", "1000"])
        .args(base)
        .env(LENGTH_CAP_VAR, "50")
        .output()
        .unwrap();
    assert_eq!(flag_wins.status.code(), Some(0));

    let garbage = Command::new(exe)
        .args(base)
        .env(LENGTH_CAP_VAR, "lots")
        .output()
        .unwrap();
    assert_eq!(garbage.status.code(), Some(1));
}

#[test]
fn coset_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let relators = dir.path().join("relators.txt");
    let csv = dir.path().join("table.csv");
    std::fs::write(&relators, "aaa\nbbb\nabab\n").unwrap();
    let out = run([
        "burntrack",
        "tc",
        "--rank",
        "2",
        "--relators",
        relators.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.starts_with("cosets=12 "), "{}", out.stdout);
    let table = std::fs::read_to_string(csv).unwrap();
    let mut lines = table.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 5, "{header}");
    let rows: Vec<Vec<usize>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    // columns after the coset id: a, A, b, B; a and A undo each other
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(rows[row[1]][2], i);
        assert_eq!(rows[row[3]][4], i);
    }
}
