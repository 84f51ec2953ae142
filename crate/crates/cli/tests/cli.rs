use std::process::Command;

fn corpus(file: &str) -> String {
    format!("{}/../core/corpus/{file}", env!("CARGO_MANIFEST_DIR"))
}

fn golden(file: &str) -> String {
    let path = format!("{}/../../docs/golden/{file}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("golden file")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    run_with(args, &[])
}

fn run_with(args: &[&str], vars: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_livesession"));
    cmd.args(args);
    for (k, v) in vars {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn tmp(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("livesession-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_accepts_both_shopping_processes() {
    for p in ["shopping_d.proc", "shopping_d0.proc"] {
        let r = run(&["check", &corpus(p), &corpus("shopping.env")]);
        assert_eq!(r.code, 0, "{p}: {}", r.stderr);
        assert_eq!(r.stdout.trim(), "well-typed");
    }
}

#[test]
fn check_live_names_the_undischarged_response() {
    let r = run(&["check-live", &corpus("shopping_d0.proc"), &corpus("shopping.env")]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("undischarged {SI}"), "{}", r.stdout);
    let r = run(&["check-live", &corpus("shopping_d.proc"), &corpus("shopping.env")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("live-typed"));
}

#[test]
fn check_live_with_pending_responses() {
    let (d, env) = (corpus("delivery_d.proc"), corpus("delivery.env"));
    assert_eq!(run(&["check-live", &d, &env, "--pending", "SI"]).code, 0);
    let d0 = corpus("delivery_d0.proc");
    assert_eq!(run(&["check-live", &d0, &env, "--pending", "SI"]).code, 1);
}

#[test]
fn dual_verdicts() {
    assert_eq!(run(&["dual", &corpus("t_d.sty"), &corpus("t_e.sty")]).code, 0);
    let r = run(&["dual", &corpus("t_d.sty"), &corpus("t_d.sty")]);
    assert_eq!((r.code, r.stdout.trim()), (1, "not dual"));
}

#[test]
fn input_errors_exit_2() {
    let env = corpus("shopping.env");
    assert_eq!(run(&["check", "/nonexistent.proc", &env]).code, 2);
    let bad = tmp("bad.proc", "k+<<.0");
    let r = run(&["check", &bad, &env]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: "), "{}", r.stderr);
    let unbound = tmp("unbound.sty", "mu t. +{ a.u }");
    assert_eq!(run(&["dual", &unbound, &unbound]).code, 2);
    assert_eq!(run(&["suite", "no-such-suite"]).code, 2);
    let r = run_with(&["traces", &corpus("ab.proc")], &[("LIVESESSION_MAX_STATES", "lots")]);
    assert_eq!(r.code, 2);
}

#[test]
fn not_typed_exits_1() {
    let p = tmp("wrong.proc", "k+<<c.0");
    let r = run(&["check", &p, &corpus("ab.env")]);
    assert_eq!(r.code, 1);
    assert_eq!(r.stdout.trim(), "not well-typed");
    assert!(!r.stderr.is_empty());
}

#[test]
fn approx_prints_a() {
    let r = run(&["approx", &corpus("ab.proc")]);
    assert_eq!((r.code, r.stdout.trim()), (0, "{a, b}"));
}

#[test]
fn simulate_follows_picks() {
    let r = run(&["simulate", &corpus("ab.proc"), "--pick", "0", "--pick", "0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("pick 0: k+<<a"), "{}", r.stdout);
    assert!(r.stdout.contains("pick 0: k+<<b"), "{}", r.stdout);
    let r = run(&["simulate", &corpus("ab.proc"), "--pick", "5"]);
    assert_eq!(r.code, 1);
}

#[test]
fn state_budget_override_truncates() {
    let r = run_with(
        &["traces", &corpus("shopping_d.proc"), "--depth", "30"],
        &[("LIVESESSION_MAX_STATES", "5")],
    );
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["budgetExhausted"], true);
    assert!(r.stderr.contains("budget exhausted"));
}

#[test]
fn automaton_is_dot() {
    let r = run(&["automaton", &corpus("ab.sty")]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("digraph"), "{}", r.stdout);
}

#[test]
fn goldens_match() {
    let c = corpus;
    let cases: [(&str, Vec<String>); 4] = [
        (
            "traces.json",
            vec!["traces".into(), c("relay.proc"), "--lassos".into(), "--depth".into(), "6".into()],
        ),
        (
            "derivation.json",
            vec!["check-live".into(), c("ab.proc"), c("ab.env"), "--json".into()],
        ),
        (
            "type_error.json",
            vec!["check-live".into(), c("shopping_d0.proc"), c("shopping.env"), "--json".into()],
        ),
        (
            "suite_report.json",
            vec!["suite".into(), "duality".into(), "--count".into(), "3".into(), "--json".into()],
        ),
    ];
    for (file, args) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&args).stdout, golden(file), "{file}");
    }
}

#[test]
fn deterministic_given_seed() {
    let args = ["suite", "typing", "occurrences", "--seed", "7", "--count", "5", "--json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.code, 0, "{}", a.stdout);
    assert_eq!((a.code, &a.stdout), (b.code, &b.stdout));
    let other = run(&["suite", "typing", "--seed", "8", "--count", "5"]);
    assert_eq!(other.code, 0);
}
