use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn kakeya(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kakeya")).args(args).output().expect("spawn kakeya")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(o)))
}

fn write_set(dir: &Path, name: &str, q: u64, n: usize, bits_hex: &str) -> String {
    let path = dir.join(name);
    let body = serde_json::json!({ "q": q, "p": q, "k": 1, "n": n, "bits_hex": bits_hex });
    fs::write(&path, body.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bound_csv_grid() {
    let o = kakeya(&["bound", "--q", "2..5", "--n", "2..4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["q", "n", "numerator", "denominator", "decimal", "ceiling"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    let r33 = rows.iter().find(|r| &r[0] == "3" && &r[1] == "3").unwrap();
    assert_eq!((&r33[2], &r33[3], &r33[5]), ("117", "5", "24"));
    assert_eq!(&r33[4], "23.400000000000000000");
}

#[test]
fn bound_single_and_json() {
    let o = kakeya(&["bound", "--q", "2", "--n", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["rows"][0]["ceiling"], "3");
    assert_eq!(v["rows"][0]["dim2_known_bound"], "3");

    let text = stdout(&kakeya(&["bound", "--q", "2", "--n", "2"]));
    assert!(text.lines().nth(1).unwrap().split_whitespace().any(|t| t == "3"));
}

#[test]
fn bound_rejects_bad_input() {
    let o = kakeya(&["bound", "--q", "6", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("prime power"));
    assert_eq!(kakeya(&["bound", "--q", "2", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn verify_simple_sets() {
    let dir = TempDir::new().unwrap();
    let full = write_set(dir.path(), "full.json", 2, 3, "ff");
    let o = kakeya(&["verify", &full]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("KAKEYA"));

    let empty = write_set(dir.path(), "empty.json", 2, 3, "00");
    let o = kakeya(&["verify", &empty]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NOT KAKEYA"));

    for hex in ["fe", "7f"] {
        let minus_one = write_set(dir.path(), "minus.json", 2, 3, hex);
        let o = kakeya(&["verify", &minus_one, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0));
        let v = json(&o);
        assert_eq!(v["kakeya"], true, "{v}");
        assert_eq!(v["witness"].as_array().unwrap().len(), 7);
    }
}

#[test]
fn verify_rejects_malformed_file() {
    let dir = TempDir::new().unwrap();
    let bad = write_set(dir.path(), "bad.json", 2, 3, "1ff");
    assert_eq!(kakeya(&["verify", &bad]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(kakeya(&["verify", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn stats_on_union() {
    let dir = TempDir::new().unwrap();
    let set = dir.path().join("u.json");
    let set = set.to_str().unwrap();
    let o = kakeya(&["construct", "--field", "2", "--n", "3", "--levels", "0,1,0,1,0,1,1", "-o", set]);
    assert_eq!(o.status.code(), Some(0));
    let o = kakeya(&["stats", set, "--witness", &write_levels(dir.path(), "[0,1,0,1,0,1,1]"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["i_count"], 28);
    assert_eq!(v["w_count"], 112);
    assert_eq!(v["w_count_brute"], 112);
    assert_eq!(v["cs_bound"], "784/112");
    assert_eq!(v["cs_bound_reduced"], "7");
}

fn write_levels(dir: &Path, body: &str) -> String {
    let path = dir.join("levels.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn construct_is_deterministic_and_kakeya() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = kakeya(&["construct", "--field", "5", "--n", "2", "--seed", "7", "-o", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let o = kakeya(&["verify", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("KAKEYA"));

    let other = dir.path().join("c.json");
    kakeya(&["construct", "--field", "5", "--n", "2", "--seed", "8", "-o", other.to_str().unwrap()]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&other).unwrap());
}

#[test]
fn construct_validates_levels() {
    let o = kakeya(&["construct", "--field", "2", "--n", "3", "--levels", "0,0,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kakeya(&["construct", "--field", "2", "--n", "2", "--levels", "0,0,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_exact_and_budget() {
    let o = kakeya(&["search", "--field", "3", "--n", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["min_size"], 7);
    assert_eq!(v["proof_of_optimality"], true);
    assert_eq!(v["witness"].as_array().unwrap().len(), 4);

    let o = kakeya(&["search", "--field", "3", "--n", "3", "--budget", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let v = json(&o);
    assert_eq!(v["proof_of_optimality"], false);
    assert!(v["min_size"].as_u64().unwrap() >= 24);
}

#[test]
fn search_matches_across_workers() {
    let run = |workers: &str| {
        json(&kakeya(&["search", "--field", "2", "--n", "4", "--workers", workers, "--format", "json"]))
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one["min_size"], four["min_size"]);
    assert_eq!(one["witness"], four["witness"]);
}

#[test]
fn directions_listing() {
    let o = kakeya(&["directions", "--field", "2", "--n", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["count"], 7);
}

#[test]
fn tightness_table() {
    let o = kakeya(&["tightness", "--q", "2..3", "--n", "2..3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn selftest_passes() {
    let o = kakeya(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn output_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bound.csv");
    let o = kakeya(&["bound", "--q", "2", "--n", "2..3", "--format", "csv", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(out).unwrap().lines().count(), 3);
}
