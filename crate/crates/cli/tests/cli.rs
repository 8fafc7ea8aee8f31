use std::path::PathBuf;
use std::process::{Command, Output};

use pbc_core::parse_program;

fn circuit(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("circuits").join(name)
}

fn pbc(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pbc"));
    for a in args {
        if a.ends_with(".pbc") {
            cmd.arg(circuit(a));
        } else {
            cmd.arg(a);
        }
    }
    cmd.env_remove("PBC_MAX_WIRES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn check_every_demo_circuit() {
    let mut names: Vec<String> = std::fs::read_dir(circuit(""))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.len() >= 10);
    for name in &names {
        let out = pbc(&["check", name]);
        let want = if name == "bad.pbc" { 2 } else { 0 };
        assert_eq!(code(&out), want, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn type_error_has_location() {
    let out = pbc(&["check", "bad.pbc"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.pbc:3:10:"), "{err}");
}

#[test]
fn one_time_pad_is_equal() {
    let out = pbc(&["eq", "otp_lhs.pbc", "otp_rhs.pbc"]);
    assert_eq!((code(&out), stdout(&out).as_str()), (0, "EQUAL\n"));
}

#[test]
fn unequal_exits_one() {
    let out = pbc(&["eq", "vn_lhs.pbc", "vn_rhs.pbc", "--k", "0..3"]);
    assert_eq!((code(&out), stdout(&out).as_str()), (1, "UNEQUAL at k=0, input 0\n"));
    let out = pbc(&["eq", "all1_lhs.pbc", "all1_rhs.pbc"]);
    assert_eq!((code(&out), stdout(&out).as_str()), (1, "UNEQUAL at k=0, input -\n"));
}

#[test]
fn star_equality_up_to_k() {
    let out = pbc(&["eq", "keyguess_lhs.pbc", "keyguess_lhs.pbc"]);
    assert_eq!((code(&out), stdout(&out).as_str()), (0, "EQUAL up to k=6\n"));
}

#[test]
fn series_csv() {
    let out = pbc(&["series", "--k", "0..6", "all1_lhs.pbc", "all1_rhs.pbc", "--a", "2"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,d_num,d_den,scaled_num,scaled_den");
    assert_eq!(lines[1..8], ["0,1,1,0,1", "1,1,2,1,2", "2,1,4,1,1", "3,1,8,9,8", "4,1,16,1,1", "5,1,32,25,32", "6,1,64,9,16"]);
    assert!(lines[8].starts_with("verdict="));
    assert_eq!(code(&out), 0);
}

#[test]
fn series_not_decreasing_exits_one() {
    let out = pbc(&["series", "--k", "1..4", "vn_lhs.pbc", "vn_lhs.pbc", "--a", "1"]);
    assert!(stdout(&out).contains("verdict=ConsistentWithNegligible"));
    let out = pbc(&["series", "--k", "1..3", "noisy.pbc", "vn_lhs.pbc"]);
    assert!(stdout(&out).contains("verdict=NotDecreasing"), "{}", stdout(&out));
    assert_eq!(code(&out), 1);
}

#[test]
fn eval_tsv_and_decimal() {
    let out = pbc(&["eval", "noisy.pbc"]);
    assert_eq!(stdout(&out), "in\tout\tprob\n0\t0\t3/4\n0\t1\t1/4\n1\t0\t1/4\n1\t1\t3/4\n");
    let out = pbc(&["eval", "noisy.pbc", "--decimal"]);
    assert!(stdout(&out).contains("3/4\t0.75"), "{}", stdout(&out));
    let out = pbc(&["eval", "all1_lhs.pbc"]);
    assert_eq!(code(&out), 2);
    let out = pbc(&["eval", "all1_lhs.pbc", "--k", "1"]);
    assert_eq!(stdout(&out), "in\tout\tprob\n-\t00\t1/2\n-\t11\t1/2\n");
}

#[test]
fn dist_prints_a_derivation() {
    let out = pbc(&["dist", "noisy.pbc", "vn_lhs.pbc", "--k", "1"]);
    assert_eq!(stdout(&out), "k,d_num,d_den\n1,1,2\n");
    let out = pbc(&["dist", "otp_lhs.pbc", "otp_rhs.pbc"]);
    let text = stdout(&out);
    assert!(text.starts_with("distance=0/1\nderivation:\nRefl 0/1\n"), "{text}");
}

#[test]
fn demos() {
    let out = pbc(&["demo", "vonneumann", "--p", "3/5", "--k", "1..3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("k=3 d_k = 1/125 holds=true"));
    let out = pbc(&["demo", "otp", "--k", "0..2"]);
    assert!(stdout(&out).ends_with("base_equal=true\n"));
    assert_eq!(code(&pbc(&["demo", "nope"])), 2);
}

#[test]
fn output_is_deterministic() {
    for args in [&["dot", "otp_lhs.pbc"][..], &["eval", "otp_lhs.pbc"], &["demo", "all1", "--k", "0..4"]] {
        assert_eq!(pbc(args).stdout, pbc(args).stdout);
    }
}

#[test]
fn dot_shapes() {
    let id = std::env::temp_dir().join("pbc_dot_id.pbc");
    std::fs::write(&id, "main = id<B>\n").unwrap();
    let out = pbc(&["dot", id.to_str().unwrap()]);
    let text = stdout(&out);
    assert_eq!(text.matches("->").count(), 1, "{text}");

    let src = std::fs::read_to_string(circuit("otp_lhs.pbc")).unwrap();
    let gens = parse_program(&src).unwrap().main.generator_count();
    let text = stdout(&pbc(&["dot", "otp_lhs.pbc"]));
    let nodes = text.matches("[label=").count();
    assert_eq!(nodes, gens + 2);
    assert_eq!(text.matches("|coin 1/2|").count() + text.matches("{coin 1/2|").count(), 1);

    let text = stdout(&pbc(&["dot", "vn_lhs.pbc"]));
    assert!(text.contains("subgraph cluster_0") && text.contains("τ★ [B; (); ()]"), "{text}");
}

#[test]
fn arity_guard_is_configurable() {
    let out = Command::new(env!("CARGO_BIN_EXE_pbc"))
        .args(["eval"])
        .arg(circuit("otp_lhs.pbc"))
        .env("PBC_MAX_WIRES", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&pbc(&["series", "otp_lhs.pbc", "otp_rhs.pbc"])), 2);
    assert_eq!(code(&pbc(&["check", "missing.pbc"])), 2);
    assert_eq!(code(&pbc(&["eq", "otp_lhs.pbc", "noisy.pbc"])), 2);
    assert_eq!(code(&pbc(&["series", "--k", "3..1", "noisy.pbc", "noisy.pbc"])), 2);
}
