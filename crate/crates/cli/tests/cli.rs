use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

const X7_CHARPOLY_DESC: [i64; 23] = [
    1, -993, -1152, -123, 924, 584, -500, -1022, -661, 105, 476, 878, 476, 105, -661, -1022, -500, 584, 924, -123,
    -1152, -993, 1,
];

fn k3salem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3salem")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn poly_file(dir: &TempDir, name: &str, coeffs_desc: &[i64]) -> std::path::PathBuf {
    let path = dir.path().join(name);
    let strings: Vec<String> = coeffs_desc.iter().map(|c| c.to_string()).collect();
    fs::write(&path, serde_json::json!({ "coeffs_desc": strings }).to_string()).unwrap();
    path
}

#[test]
fn build_lattice_writes_decimal_strings() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("lattice.json");
    let r = k3salem(&["build-lattice", "--p", "7", "--sigma", "1", "--out", path_str(&out)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let j = read(&out);
    assert_eq!(j["p"], "7");
    assert_eq!(j["q"], "11");
    assert_eq!(j["gamma"], "2");
    assert_eq!(j["gram"].as_array().unwrap().len(), 22);
    assert_eq!(j["gram"][4][4], "-42");

    let explicit = dir.path().join("explicit.json");
    let r = k3salem(&["build-lattice", "--p", "7", "--sigma", "1", "--q", "11", "--gamma", "2", "--out", path_str(&explicit)]);
    assert_eq!(code(&r), 0);
    assert_eq!(read(&explicit), j);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.json");
    assert_eq!(code(&k3salem(&["build-lattice", "--p", "8", "--sigma", "1", "--out", path_str(&out)])), 2);
    assert_eq!(code(&k3salem(&["build-lattice", "--p", "7", "--sigma", "11", "--out", path_str(&out)])), 2);
    assert_eq!(code(&k3salem(&["build-lattice", "--p", "7"])), 2);
    assert_eq!(code(&k3salem(&["no-such-command"])), 2);
    assert_eq!(code(&k3salem(&["verify", "--result", "/nonexistent/result.json"])), 2);
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{\"coeffs_desc\": [\"1\", \"x\"]}").unwrap();
    assert_eq!(code(&k3salem(&["salem-check", "--poly", path_str(&garbage)])), 2);
    let r = k3salem(&["search", "--p", "7", "--sigma", "1", "--max-word", "23", "--out", path_str(&out)]);
    assert_eq!(code(&r), 2);
}

#[test]
fn worked_example_passes() {
    let r = k3salem(&["paper-example"]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stdout));
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("994.158"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn salem_check_accepts_and_rejects() {
    let dir = TempDir::new().unwrap();
    let golden = poly_file(&dir, "golden.json", &X7_CHARPOLY_DESC);
    let cert = dir.path().join("cert.json");
    let r = k3salem(&["salem-check", "--poly", path_str(&golden), "--standalone", "--out", path_str(&cert)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let c = read(&cert);
    assert!(c["lambda_lo"].is_string() && c["lambda_hi"].is_string());
    assert_eq!(c["irreducibility"], "sieve-proved");

    // Lehmer's polynomial
    let lehmer = poly_file(&dir, "lehmer.json", &[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
    assert_eq!(code(&k3salem(&["salem-check", "--poly", path_str(&lehmer), "--standalone"])), 0);

    let cyclotomic = poly_file(&dir, "cyc.json", &[1, 0, 0, 0, 1]);
    assert_eq!(code(&k3salem(&["salem-check", "--poly", path_str(&cyclotomic), "--standalone"])), 1);
    let not_reciprocal = poly_file(&dir, "nr.json", &[1, -3, 1, 5]);
    assert_eq!(code(&k3salem(&["salem-check", "--poly", path_str(&not_reciprocal)])), 1);
}

#[test]
fn pool_search_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let pool = dir.path().join("pool.json");
    let r = k3salem(&["pool", "--p", "7", "--sigma", "1", "--seed", "1", "--size", "8", "--out", path_str(&pool)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let pj = read(&pool);
    assert_eq!(pj["involutions"].as_array().unwrap().len(), 8);
    assert!(pj["involutions"][0]["matrix"][0][0].is_string());

    let result = dir.path().join("result.json");
    let r = k3salem(&[
        "search", "--p", "7", "--sigma", "1", "--seed", "1", "--pool", path_str(&pool), "--max-word", "22",
        "--budget-trials", "20000", "--budget-seconds", "900", "--threads", "2", "--out", path_str(&result),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let mut rj = read(&result);
    assert_eq!(rj["p"], "7");
    assert!(rj["word"].as_array().unwrap().len() <= 22);
    assert_eq!(code(&k3salem(&["verify", "--result", path_str(&result)])), 0);

    rj["charpoly"]["coeffs_desc"][1] = Value::from("-1");
    let tampered = dir.path().join("tampered.json");
    fs::write(&tampered, rj.to_string()).unwrap();
    assert_eq!(code(&k3salem(&["verify", "--result", path_str(&tampered)])), 1);

    let wrong = dir.path().join("wrong.json");
    let r = k3salem(&["search", "--p", "5", "--sigma", "1", "--pool", path_str(&pool), "--out", path_str(&wrong)]);
    assert_eq!(code(&r), 2);
}

#[test]
fn exhausted_search_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("status.json");
    let r = k3salem(&[
        "search", "--p", "7", "--sigma", "1", "--seed", "1", "--pool-size", "4", "--budget-seconds", "0", "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&r), 1, "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(read(&out)["status"], "exhausted");

    let pool = dir.path().join("pool.json");
    let r = k3salem(&["pool", "--p", "7", "--sigma", "1", "--seed", "1", "--size", "4", "--out", path_str(&pool)]);
    assert_eq!(code(&r), 0);
    let r = k3salem(&[
        "search", "--p", "7", "--sigma", "1", "--seed", "1", "--pool", path_str(&pool), "--budget-trials", "0",
        "--out", path_str(&out),
    ]);
    assert_eq!(code(&r), 1, "{}", String::from_utf8_lossy(&r.stderr));
    let status = read(&out);
    assert_eq!(status["status"], "exhausted");
    assert_eq!(status["trials"], "0");
}

#[test]
fn sigma10_from_vectors_and_search() {
    let dir = TempDir::new().unwrap();
    let vectors = dir.path().join("vectors.json");
    let text = include_str!("../../core/data/p17389_sigma10.json");
    fs::write(&vectors, text).unwrap();
    let out = dir.path().join("s10.json");
    let r = k3salem(&["sigma10", "--p", "17389", "--vectors", path_str(&vectors), "--base-k", "1", "--out", path_str(&out)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stdout).contains("e100"));
    assert_eq!(read(&out)["base_k"], "1");
    assert_eq!(code(&k3salem(&["verify", "--result", path_str(&out)])), 0);

    let searched = dir.path().join("s11.json");
    let r = k3salem(&["sigma10", "--p", "11", "--seed", "1", "--out", path_str(&searched)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(read(&searched)["word"].as_array().unwrap().len(), 22);
}

#[test]
fn entropy_sweep_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let r = k3salem(&["entropy-sweep", "--primes", "11,13", "--seed", "1", "--out", path_str(&out)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,log_p,lambda_str,entropy"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("11,"));
    assert_eq!(code(&k3salem(&["entropy-sweep", "--primes", "11,12", "--out", path_str(&out)])), 2);
}
