use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn convnec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convnec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = convnec(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn transfer_matrices() {
    let out = stdout(&["transfer", &data("butterfly_f2.net")]);
    assert!(out.contains("sink T1\n"));
    assert!(out.contains("  M_T = [[1,1],[0,1]]\n"));
    assert!(out.contains("  M_T = [[1,0],[1,1]]\n"));

    let out = stdout(&["transfer", &data("c42_f3.net")]);
    for m in [
        "[[1,0],[0,1]]",
        "[[1,1],[0,1]]",
        "[[1,1],[0,2]]",
        "[[0,1],[1,1]]",
        "[[0,1],[1,2]]",
        "[[1,1],[1,2]]",
    ] {
        assert!(out.contains(&format!("  M_T = {m}\n")), "missing {m}");
    }
}

#[test]
fn transfer_json_parses() {
    let out = stdout(&["transfer", &data("butterfly_f2.net"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["sinks"][1]["m_t"], serde_json::json!([[1, 0], [1, 1]]));
}

#[test]
fn malformed_network_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.net");
    std::fs::write(
        &path,
        "field 2 1\ninputs 1\nsource s\nsinks t\nedge 1 s t\nedge 3 s t\n",
    )
    .unwrap();
    let out = convnec(&["transfer", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 6"), "{err}");
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = convnec(&["transfer", "/nonexistent/net"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_codes() {
    let out = stdout(&["analyze", &data("cs.gen"), "--field", "2"]);
    for line in ["dfree: 5\n", "T_dfree: 6\n", "degree: 2\n", "Singleton bound: 6\n"] {
        assert!(out.contains(line), "{out}");
    }
    let out = stdout(&["analyze", "[1+z^2, 2z]", "--field", "3"]);
    assert!(out.contains("dfree: 3\nT_dfree: 4\n"), "{out}");
    let out = stdout(&["analyze", "[1+z, 1+z^2]", "--field", "2"]);
    assert!(out.contains("catastrophic: yes"));
    assert!(!out.contains("dfree"));
    let out = stdout(&["analyze", "[1+z, 1+z^2]", "--field", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["catastrophic"], true);
}

#[test]
fn analyze_without_field_is_a_usage_error() {
    let out = convnec(&["analyze", "[1+z, 1]"]);
    assert_eq!(out.status.code(), Some(2));
}

const BUTTERFLY_CS: &str = "\
Sink  Output code          dfree,T_dfree  max w_H(W_T)  Decoding
T1    [1+z^2, 2+z+2z^2]    5,6            2             Output trellis
T2    [2+z+2z^2, 1+z+z^2]  6,6            2             Output trellis
";

const BUTTERFLY_CS_PRIME: &str = "\
Sink  Output code      dfree,T_dfree  max w_H(W_T)  Decoding
T1    [1+z^2, 2+z]     4,3            2             Input trellis
T2    [2+z, 1+z+2z^2]  5,5            2             Output trellis
";

const COMBINATION: &str = "\
Sink  Output code          dfree,T_dfree  max w_H(W_T)  Decoding
T1    [1+z^2, 1+z+z^2]     5,6            2             Output trellis
T2    [1+z^2, 2+z+2z^2]    5,6            2             Output trellis
T3    [1+z^2, 2z]          3,4            2             Input trellis
T4    [1+z+z^2, 2+z+2z^2]  6,6            2             Output trellis
T5    [1+z+z^2, 2z]        4,5            2             Input trellis
T6    [2+z+2z^2, 2z]       4,5            2             Input trellis
";

fn table_of(out: &str) -> &str {
    &out[out.find("Sink").unwrap()..]
}

#[test]
fn construct_tables_are_stable() {
    let args = ["construct", &data("butterfly_f3.net"), "--code", &data("cs.gen")];
    let a = stdout(&args);
    assert_eq!(table_of(&a), BUTTERFLY_CS);
    assert_eq!(a, stdout(&args));

    let out = stdout(&[
        "construct",
        &data("butterfly_f3.net"),
        "--code",
        &data("cs_prime.gen"),
    ]);
    assert_eq!(table_of(&out), BUTTERFLY_CS_PRIME);

    let out = stdout(&[
        "construct",
        &data("c42_f3.net"),
        "--phi",
        "upto-2-edges",
        "--code",
        &data("cs.gen"),
    ]);
    assert_eq!(table_of(&out), COMBINATION);
    assert!(out.contains("t_s = 2, required dfree = 5\n"));
}

#[test]
fn construct_binary_butterfly() {
    let out = stdout(&["construct", &data("butterfly_f2.net"), "--code", &data("cs.gen")]);
    assert!(out.contains("W_s = {(0,0), (0,1), (1,0), (1,1)}\n"));
    assert!(out.contains("T1    [1+z^2, z]"));
    assert_eq!(out.matches("Input trellis").count(), 2);
    let json = stdout(&[
        "construct",
        &data("butterfly_f2.net"),
        "--code",
        &data("cs.gen"),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["t_s"], 2);
    assert_eq!(v["plans"][0]["mode"], "CaseB");
}

#[test]
fn construct_with_search() {
    let out = stdout(&[
        "construct",
        &data("butterfly_f2.net"),
        "--search",
        "--max-degree",
        "2",
    ]);
    assert!(out.contains("input code [1+z^2, 1+z+z^2] (search): dfree 5, T_dfree 6"), "{out}");
}

#[test]
fn weak_code_is_a_domain_error() {
    let out = convnec(&["construct", &data("butterfly_f2.net"), "--code", "[1+z, z]"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("below the required 5"));
}

#[test]
fn construct_needs_a_code_source() {
    let out = convnec(&["construct", &data("butterfly_f2.net")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_modes() {
    let out = stdout(&[
        "simulate",
        &data("butterfly_f2.net"),
        "--code",
        &data("cs.gen"),
        "--exhaustive",
        "--messages",
        "3",
        "--length",
        "6",
    ]);
    assert!(out.contains("T1    216     0\n"), "{out}");
    let out = stdout(&[
        "simulate",
        &data("butterfly_f2.net"),
        "--code",
        &data("cs.gen"),
        "--trials",
        "30",
        "--seed",
        "4",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["sinks"][0]["failures"], 0);
    assert_eq!(v["seed"], 4);
}

#[test]
fn bounds_examples() {
    let out = stdout(&[
        "bounds", "--n", "2", "--k", "1", "--delta", "2", "--sinks", "2", "--dfree", "5",
    ]);
    assert_eq!(
        out,
        "Singleton bound on dfree: 6\nsufficient field size: 11\nT_dfree cap: 9\nT_dfree cap for MDS codes: 11\n"
    );
    let out = stdout(&[
        "bounds", "--n", "2", "--k", "1", "--delta", "2", "--sinks", "2", "--j", "2", "--edges",
        "9", "--t", "1",
    ]);
    assert!(out.contains("q > 306"));
    let out = convnec(&["bounds", "--n", "2", "--k", "2", "--delta", "1", "--sinks", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
