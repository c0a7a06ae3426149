use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hullpeel")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

const TRIANGLE: &str = "2 3\n0 0 0\n1 4 0\n2 0 4\n";
const TRIANGLE_IN: &str = "# triangle with an interior point\n2 4\n0 0 0\n1 4 0\n2 0 4\n3 1 1\n";

#[test]
fn count_prints_exact_values() {
    let d = TempDir::new().unwrap();
    let o = run(&["count", &write(&d, "t.pts", TRIANGLE)]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "6"));
    let o = run(&["count", &write(&d, "t4.pts", TRIANGLE_IN), "--oracle", "--threads", "4"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "18"));
}

#[test]
fn count_json() {
    let d = TempDir::new().unwrap();
    let o = run(&["count", &write(&d, "t4.pts", TRIANGLE_IN), "--oracle", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], "18");
    assert_eq!(v["oracle"], "18");
    assert_eq!(v["agrees"], true);
    assert_eq!(v["n"], 4);
}

#[test]
fn input_errors_exit_3() {
    let d = TempDir::new().unwrap();
    let o = run(&["count", &write(&d, "bad.pts", "2 3\n0 0 0\n1 4 x\n2 0 4\n")]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let o = run(&["count", &write(&d, "col.pts", "2 3\n0 0 0\n1 1 1\n2 2 2\n")]);
    assert_eq!(code(&o), 3);
    let o = run(&["count", &path(&d, "missing.pts")]);
    assert_eq!(code(&o), 3);
    let o = run(&["count", &write(&d, "dup.pts", "2 3\n0 0 0\n0 4 0\n2 0 4\n")]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("repeated label 0"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["search", "--n", "4"])), 2);
    assert_eq!(code(&run(&["search", "--n", "25", "--seed", "1"])), 2);
    assert_eq!(code(&run(&["search", "--n", "0", "--seed", "1"])), 2);
    let d = TempDir::new().unwrap();
    let out = path(&d, "x.pts");
    assert_eq!(code(&run(&["construct", "ternary", "--out", &out])), 2);
    assert_eq!(code(&run(&["construct", "ternary", "--k", "4", "--out", &out])), 2);
    assert_eq!(code(&run(&["construct", "simplex", "--d", "1", "--k", "1", "--out", &out])), 2);
    // above 12 points certification samples, so a seed is required
    assert_eq!(code(&run(&["construct", "threeblock", "--n", "20", "--out", &out])), 2);
    assert_eq!(code(&run(&["curve", "--n-max", "65"])), 2);
    assert_eq!(code(&run(&["verify", "invariant"])), 2);
    assert_eq!(code(&run(&["verify", "lemmas"])), 2);
    assert!(!Path::new(&out).exists());
}

#[test]
fn construct_writes_certified_files() {
    let d = TempDir::new().unwrap();
    let out = path(&d, "s9.pts");
    let o = run(&["construct", "ternary", "--k", "2", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("2 9\n"));
    let report: Value = serde_json::from_str(&fs::read_to_string(path(&d, "s9.report.json")).unwrap()).unwrap();
    assert_eq!(report["certified"], true);
    assert_eq!(report["n"], 9);
    let blocks = path(&d, "s9.blocks");
    let o = run(&["verify", "invariant", "--file", &out, "--blocks", &blocks, "--exhaustive"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["verify", "invariant", "--file", &out, "--blocks", &blocks, "--seed", "3", "--samples", "500"]);
    assert_eq!(code(&o), 0);
    let o = run(&["count", &out]);
    assert_eq!(stdout(&o).trim(), "6552");

    let o = run(&["construct", "threeblock", "--n", "7", "--out", &path(&d, "t7.pts"), "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 7);
    assert!(fs::read_to_string(path(&d, "t7.pts")).unwrap().starts_with("2 7\n"));

    let o = run(&["construct", "simplex", "--d", "3", "--k", "1", "--out", &path(&d, "x.pts")]);
    assert_eq!(code(&o), 0);
    let o = run(&["count", &path(&d, "x.pts")]);
    assert_eq!(stdout(&o).trim(), "24");
}

#[test]
fn broken_invariant_exits_1() {
    let d = TempDir::new().unwrap();
    // the interior point is never extreme while its block mates remain
    let file = write(&d, "t4.pts", TRIANGLE_IN);
    let blocks = write(&d, "t4.blocks", "0 - 0,1,2,3\n1 0 0,3\n2 1 0\n3 1 3\n4 0 1\n5 0 2\n");
    let o = run(&["verify", "invariant", "--file", &file, "--blocks", &blocks, "--exhaustive"]);
    assert_eq!(code(&o), 1, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("REFUTED"));
    let bad = write(&d, "bad.blocks", "0 - 0,1\nnonsense\n");
    assert_eq!(code(&run(&["verify", "invariant", "--file", &file, "--blocks", &bad, "--exhaustive"])), 3);
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "constants"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 refuted"));
    let o = run(&["verify", "constants", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["items"].as_array().unwrap().iter().all(|i| i["verdict"] == "proved"));

    let o = run(&["verify", "small-values"]);
    assert_eq!(code(&o), 0);
    for g in ["g(3) = 6", "g(4) = 18", "g(5) = 60", "g(6) = 180"] {
        assert!(stdout(&o).contains(g));
    }

    let o = run(&["verify", "lemmas", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["verify", "bounds-chain"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn refutable_lemma_instance_exits_1() {
    let o = run(&["verify", "lemmas", "--only", "coef", "--coef-lo", "10", "--coef-hi", "10", "--json"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["items"][0]["id"], "coef.n10");
    assert_eq!(v["items"][0]["verdict"], "refuted");
    // below its stated range the lemma holds at n = 23 and fails at n = 22
    let o = run(&["verify", "lemmas", "--only", "coef", "--coef-lo", "22", "--coef-hi", "23"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("1 refuted"));
}

#[test]
fn bounds_chain_checks_files() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "m.pts", &format!("{TRIANGLE}\n{TRIANGLE_IN}\n2 3\n0 0 0\n1 1 1\n2 2 2\n"));
    assert_eq!(code(&run(&["verify", "bounds-chain", "--file", &f])), 3);
    let o = run(&["verify", "bounds-chain", "--file", &f, "--lenient", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ids: Vec<&str> = v["items"].as_array().unwrap().iter().map(|i| i["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"file.0") && ids.contains(&"file.1") && !ids.contains(&"file.2"));
    assert!(stderr(&o).contains("line 13"));
}

#[test]
fn curve_csv_round_trips() {
    let d = TempDir::new().unwrap();
    let out = path(&d, "curve.csv");
    let o = run(&["curve", "--n-max", "30", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rd = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["n", "lower_bound", "exact", "thm2_floor", "layer", "log2_thm2"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 30);
    assert_eq!(&rows[2].iter().take(5).collect::<Vec<_>>(), &["3", "6", "6", "18", "6"]);
    assert_eq!(&rows[5][1], "180");
    assert_eq!(&rows[5][2], "180");
    assert_eq!(&rows[5][4], "36");
    assert_eq!(&rows[8][3], "63968614");
    assert_eq!(&rows[12][2], "");
    assert_eq!(&rows[13][4], "");
    // writing the parsed rows back reproduces the file byte for byte
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).unwrap();
    for r in &rows {
        w.write_record(r).unwrap();
    }
    assert_eq!(w.into_inner().unwrap(), fs::read(&out).unwrap());
    let o = run(&["curve", "--n-max", "30"]);
    assert_eq!(o.stdout, fs::read(&out).unwrap());
}

#[test]
fn search_emits_witness() {
    let d = TempDir::new().unwrap();
    let o = run(&["search", "--n", "4", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("# count 18\n"));
    let w = write(&d, "w.pts", &text);
    assert_eq!(stdout(&run(&["count", &w])).trim(), "18");
    for line in stderr(&o).lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|t| t.parse::<u64>().is_ok()));
    }

    let o = run(&["search", "--n", "5", "--seed", "1", "--iterations", "20000", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], "60");

    let again = run(&["search", "--n", "6", "--seed", "4", "--iterations", "1000"]);
    let threaded = run(&["search", "--n", "6", "--seed", "4", "--iterations", "1000", "--threads", "4"]);
    assert_eq!(again.stdout, run(&["search", "--n", "6", "--seed", "4", "--iterations", "1000"]).stdout);
    assert_eq!(again.stdout, threaded.stdout);
}
