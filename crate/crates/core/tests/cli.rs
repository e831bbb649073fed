use std::io::Write;
use std::process::Command;

use hambound::cli::run;
use hambound::Hamiltonian;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn hb(args: &[&str], stdin: &str) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hambound").chain(args.iter().copied());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(o: &Output) -> serde_json::Value {
    assert_eq!(o.code, 0, "stderr: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

#[test]
fn gen_text_round_trips_through_parser() {
    let o = hb(&["gen", "heisenberg", "--grid", "4x4", "--periodic"], "");
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("qubits 16\n"));
    let h: Hamiltonian = o.stdout.parse().unwrap();
    assert_eq!(h.num_terms(), 96);
}

#[test]
fn gen_json_matches_library() {
    let o = hb(&["gen", "signed-regular", "--n", "20", "--r", "4", "--seed", "7", "--format", "json"], "");
    let h = Hamiltonian::from_json(&o.stdout).unwrap();
    assert_eq!(h, hambound::instances::random_signed_regular_zz(20, 4, 7).unwrap());
}

#[test]
fn gen_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k4.txt");
    let o = hb(&["gen", "complete-zz", "--n", "4", "--out", path.to_str().unwrap()], "");
    assert_eq!(o.code, 0);
    assert!(o.stdout.is_empty());
    let h: Hamiltonian = std::fs::read_to_string(&path).unwrap().parse().unwrap();
    assert_eq!(h.num_terms(), 6);
}

#[test]
fn input_from_file_stdin_and_instance_agree() {
    let text = "qubits 4\n1 Z0 Z1\n1 Z1 Z2\n1 Z2 Z3\n1 Z0 Z3\n1 Z0 Z2\n1 Z1 Z3\n";
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(text.as_bytes()).unwrap();
    let a = hb(&["exact", file.path().to_str().unwrap()], "");
    let b = hb(&["exact", "-"], text);
    let c = hb(&["exact", "--instance", "complete-zz:4"], "");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["lambda_min"], json(&c)["lambda_min"]);
    assert!((json(&a)["lambda_min"].as_f64().unwrap() + 2.0).abs() < 1e-8);
}

#[test]
fn map_reports_statistics() {
    let v = json(&hb(&["map", "--instance", "heisenberg:cycle:4"], ""));
    assert!(v.to_string().contains("\"l_c\":4"), "{v}");
}

#[test]
fn greedy_min_on_cycle_meets_floor() {
    let v = json(&hb(&["greedy", "--instance", "heisenberg:cycle:4", "--min"], ""));
    let energy = v["energy"].as_f64().unwrap();
    assert!(energy <= -1.0 / 12.0, "{energy}");
    assert!(energy <= v["two_local_floor"].as_f64().unwrap());
}

#[test]
fn greedy_trace_goes_to_stderr() {
    let o = hb(&["greedy", "--instance", "complete-zz:4", "--trace", "--format", "text"], "");
    assert_eq!(o.code, 0);
    assert!(!o.stderr.is_empty());
    assert!(o.stdout.contains("energy"));
}

#[test]
fn json_output_is_byte_stable() {
    for args in [
        &["greedy", "--instance", "random:6:20:3:1:uniform", "--max"][..],
        &["sample", "--instance", "random:6:20:3:1", "--seed", "9", "--n-samples", "3000"][..],
        &["exact", "--instance", "heisenberg:cycle:6"][..],
    ] {
        let a = hb(args, "");
        let b = hb(args, "");
        assert_eq!(a.code, 0, "{}", a.stderr);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn sample_best_is_below_exact_norm() {
    let s = json(&hb(&["sample", "--instance", "signed-regular:12:3:2", "--seed", "1"], ""));
    let e = json(&hb(&["exact", "--instance", "signed-regular:12:3:2"], ""));
    assert!(s["best_abs"].as_f64().unwrap() <= e["norm"].as_f64().unwrap() + 1e-9);
}

#[test]
fn verify_passes_and_carries_note() {
    let o = hb(&["verify", "--instance", "heisenberg:cycle:4", "--seed", "0"], "");
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert!(!v["notes"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_2() {
    for (args, stdin) in [
        (&["sample", "--instance", "complete-zz:4"][..], ""),
        (&["map", "-"][..], "1 Q0\n"),
        (&["map", "-"][..], "qubits 2\n1 Z0 Z0\n"),
        (&["map", "-"][..], ""),
        (&["greedy", "--instance", "nope:3"][..], ""),
        (&["frobnicate"][..], ""),
    ] {
        let o = hb(args, stdin);
        assert_eq!(o.code, 2, "{args:?}: {}", o.stderr);
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn resource_limits_exit_3() {
    let o = hb(&["exact", "--instance", "complete-zz:22"], "");
    assert_eq!(o.code, 3);
    let o = hb(&["exact", "--instance", "complete-zz:10", "--max-n", "8"], "");
    assert_eq!(o.code, 3);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hambound");
    let ok = Command::new(bin).args(["gen", "complete-zz", "--n", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["exact", "/nonexistent/h.txt"]).output().unwrap();
    assert_ne!(bad.status.code(), Some(0));
    let usage = Command::new(bin).args(["verify"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
