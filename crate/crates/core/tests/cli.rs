use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_balance-lens"));
    c.env_remove("BALANCE_LENS_ALPHA");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().args(args).current_dir(dir).output().expect("spawn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stdout {text:?}: {e}"))
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

fn cycle(n: u64) -> String {
    (0..n).map(|i| format!("{i}\t{}\n", (i + 1) % n)).collect()
}

#[test]
fn generate_conserves_in_degree_and_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let args = [
        "generate", "--model", "type3", "--nodes", "20000", "--gamma", "2.3", "--seed", "7", "--out", "g.tsv",
    ];
    let o = run(d.path(), &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout_json(&o);

    let text = fs::read_to_string(d.path().join("g.tsv")).unwrap();
    let lines = text.lines().count();
    let mut in_deg: HashMap<&str, u64> = HashMap::new();
    for l in text.lines() {
        let (_, t) = l.split_once('\t').unwrap();
        *in_deg.entry(t).or_default() += 1;
    }
    assert_eq!(in_deg.values().sum::<u64>(), lines as u64);
    assert_eq!(summary["n_edges"], lines);
    assert_eq!(summary["max_in_degree"], *in_deg.values().max().unwrap());
    assert_eq!(summary["n_vertices"], 20000);
    assert!(summary["scale_a"].as_f64().unwrap() > 0.0);

    let manifest = json_file(&d.path().join("g.tsv.manifest"));
    assert_eq!(manifest["subcommand"], "generate");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["params"]["gamma"], 2.3);
    assert_eq!(manifest["params"]["k_cap"], 19999);

    let first = fs::read(d.path().join("g.tsv")).unwrap();
    assert_eq!(code(&run(d.path(), &args)), 0);
    assert_eq!(fs::read(d.path().join("g.tsv")).unwrap(), first);
}

#[test]
fn generate_rejects_bad_gamma_and_unwritable_output() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &["generate", "--model", "type1", "--nodes", "100", "--gamma", "0.5", "--out", "g.tsv"],
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma"));
    assert!(o.stdout.is_empty());

    let o = run(d.path(), &["generate", "--model", "type9", "--nodes", "100", "--out", "g.tsv"]);
    assert_eq!(code(&o), 1);

    let o = run(
        d.path(),
        &["generate", "--model", "type1", "--nodes", "100", "--gamma", "2.3", "--out", "missing/dir/g.tsv"],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn generate_from_degree_sequence() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "seq.txt", "# targets\n0\n1\n2\n3\n2\n");
    let o = run(
        d.path(),
        &["generate", "--model", "sequence", "--degrees", "seq.txt", "--seed", "3", "--out", "g.tsv"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["n_edges"], 8);
}

#[test]
fn analyze_cycle_and_transitive_triangle() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "cycle.tsv", &cycle(6));
    let o = run(d.path(), &["analyze", "--in", "cycle.tsv", "--out", "p.json"]);
    assert_eq!(code(&o), 0);
    let s = stdout_json(&o);
    assert_eq!(s["positivity"], 0.0);
    assert_eq!(s["infinite_edges"], 0);
    let doc = json_file(&d.path().join("p.json"));
    assert_eq!(doc["kind"], "balance-profile");
    let bins = doc["bins"].as_array().unwrap();
    assert_eq!(bins.len(), 1);
    assert_eq!(bins[0]["s"], 0);
    assert_eq!(bins[0]["count"], 6);
    assert_eq!(doc["manifest"]["subcommand"], "analyze");
    assert!(d.path().join("p.json.manifest").exists());

    // A -> B, B -> C, A -> C: only B -> C has a finite ratio, d(C)/d(B) = 2.
    write(d.path(), "tri.tsv", "1\t2\n2\t3\n1\t3\n");
    let o = run(d.path(), &["analyze", "--in", "tri.tsv", "--out", "t.json"]);
    assert_eq!(code(&o), 0);
    let s = stdout_json(&o);
    assert_eq!(s["positivity"], 1.0);
    assert_eq!(s["infinite_edges"], 2);
}

#[test]
fn analyze_csv_and_alpha_sources() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "cycle.tsv", &cycle(4));
    let o = run(d.path(), &["analyze", "--in", "cycle.tsv", "--alpha", "2", "--format", "csv", "--out", "p.csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(d.path().join("p.csv")).unwrap(), "s,r_low,r_high,count\n0,1.0,2.0,4\n");

    let o = bin()
        .args(["analyze", "--in", "cycle.tsv", "--out", "e.json"])
        .env("BALANCE_LENS_ALPHA", "10^0.5")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let alpha = json_file(&d.path().join("e.json"))["alpha"].as_f64().unwrap();
    assert!((alpha - 10f64.sqrt()).abs() < 1e-12);

    let o = run(d.path(), &["analyze", "--in", "cycle.tsv", "--alpha", "1.0", "--out", "x.json"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn analyze_error_codes() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.tsv", "1\t2\nthree\tfour\n");
    let o = run(d.path(), &["analyze", "--in", "bad.tsv", "--strict", "--out", "p.json"]);
    assert_eq!(code(&o), 3);
    let o = run(d.path(), &["analyze", "--in", "bad.tsv", "--out", "p.json"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed"));

    let o = run(d.path(), &["analyze", "--in", "absent.tsv", "--out", "p.json"]);
    assert_eq!(code(&o), 2);

    // Two vertices: positivity undefined, reported as null with a warning.
    write(d.path(), "pair.tsv", "1\t2\n");
    let o = run(d.path(), &["analyze", "--in", "pair.tsv", "--out", "pair.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout_json(&o)["positivity"].is_null());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(json_file(&d.path().join("pair.json"))["positivity"].is_null());
}

#[test]
fn predict_exponents_and_singularity() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &["predict", "--gamma", "2.3", "--scale-a", "20000", "--nodes", "100000", "--out", "t.json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let expected = [("FAR_BELOW", 1.3), ("NEAR_BELOW", 2.3), ("NEAR_ABOVE", -1.3), ("FAR_ABOVE", -0.3)];
    let sections = stdout_json(&o)["sections"].as_array().unwrap().clone();
    assert_eq!(sections.len(), 4);
    for (label, exponent) in expected {
        let s = sections.iter().find(|s| s["label"] == label).unwrap();
        assert!((s["exponent"].as_f64().unwrap() - exponent).abs() < 1e-12, "{label}");
    }
    let doc = json_file(&d.path().join("t.json"));
    assert_eq!(doc["kind"], "theoretical-profile");
    // The interval grid covers [1/(N-1), N-1].
    let bins = doc["bins"].as_array().unwrap();
    let edge = |b: &Value, f: &str| b[f].as_f64().unwrap();
    let (first, last) = (bins.first().unwrap(), bins.last().unwrap());
    assert!(edge(first, "r_low") <= 1.0 / 99_999.0 && 1.0 / 99_999.0 < edge(first, "r_high"));
    assert!(edge(last, "r_low") <= 99_999.0 && 99_999.0 < edge(last, "r_high"));
    assert!(!doc["points"].as_array().unwrap().is_empty());

    for (gamma, factor) in [("2.0", "(γ − 2)"), ("1.5", "(2γ − 3)"), ("1", "")] {
        let o = run(
            d.path(),
            &["predict", "--gamma", gamma, "--scale-a", "100", "--nodes", "1000", "--out", "s.json"],
        );
        assert_eq!(code(&o), 1, "gamma {gamma}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(factor), "gamma {gamma}");
    }
}

#[test]
fn compare_pipeline_identity_and_mismatch() {
    let d = tempfile::tempdir().unwrap();
    let gen = [
        "generate", "--model", "type3", "--nodes", "50000", "--gamma", "2.3", "--seed", "7", "--out", "g.tsv",
    ];
    assert_eq!(code(&run(d.path(), &gen)), 0);
    assert_eq!(code(&run(d.path(), &["analyze", "--in", "g.tsv", "--out", "p.json"])), 0);

    // Auto mode: estimate, synthesize theory, compare.
    let o = run(d.path(), &["compare", "--empirical", "p.json", "--auto", "g.tsv", "--out", "c.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json_file(&d.path().join("c.json"));
    assert_eq!(report["kind"], "comparison");
    let sections = report["sections"].as_array().unwrap();
    assert_eq!(sections.len(), 4);
    assert!(sections.iter().all(|s| s["delta"].as_f64().is_some()));
    let gamma = report["estimate"]["gamma"]["gamma"].as_f64().unwrap();
    assert!((gamma - 2.3).abs() < 0.2, "{gamma}");

    // Predict output re-read by compare.
    let a = report["estimate"]["scale_a"].as_f64().unwrap().to_string();
    let g = gamma.to_string();
    let o = run(
        d.path(),
        &["predict", "--gamma", &g, "--scale-a", &a, "--nodes", "50000", "--out", "t.json"],
    );
    assert_eq!(code(&o), 0);
    let o = run(d.path(), &["compare", "--empirical", "p.json", "--theory", "t.json", "--out", "c2.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    // Identity: the profile against itself.
    let o = run(d.path(), &["compare", "--empirical", "p.json", "--theory", "p.json", "--out", "id.json"]);
    assert_eq!(code(&o), 0);
    for s in json_file(&d.path().join("id.json"))["sections"].as_array().unwrap() {
        if let Some(delta) = s["delta"].as_f64() {
            assert_eq!(delta, 0.0);
        }
    }

    // Mismatched alpha.
    assert_eq!(code(&run(d.path(), &["analyze", "--in", "g.tsv", "--alpha", "2", "--out", "p2.json"])), 0);
    let o = run(d.path(), &["compare", "--empirical", "p2.json", "--theory", "t.json", "--out", "bad.json"]);
    assert_eq!(code(&o), 1);
    let o = run(d.path(), &["compare", "--empirical", "p2.json", "--theory", "p.json", "--out", "bad.json"]);
    assert_eq!(code(&o), 1);

    // Neither or both reference flags.
    assert_eq!(code(&run(d.path(), &["compare", "--empirical", "p.json", "--out", "x.json"])), 1);
    let o = run(
        d.path(),
        &["compare", "--empirical", "p.json", "--theory", "t.json", "--auto", "g.tsv", "--out", "x.json"],
    );
    assert_eq!(code(&o), 1);

    // A malformed reference document.
    write(d.path(), "junk.json", "{\"kind\": \"nonsense\"}");
    let o = run(d.path(), &["compare", "--empirical", "p.json", "--theory", "junk.json", "--out", "x.json"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn slice_and_degrees() {
    let d = tempfile::tempdir().unwrap();
    // A -> B, C -> B, B -> C: B has in-degree 2.
    write(d.path(), "s.tsv", "1\t2\n3\t2\n2\t3\n");
    let o = run(d.path(), &["slice", "--in", "s.tsv", "--k", "2", "--out", "slice.csv"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(d.path().join("slice.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().filter(|r| r.starts_with("in,")).count(), 2);
    assert_eq!(rows.iter().filter(|r| r.starts_with("out,")).count(), 1);
    assert_eq!(stdout_json(&o)["in_edges"], 2);

    // Top 100 % resolves to the smallest in-degree present.
    let o = run(d.path(), &["slice", "--in", "s.tsv", "--top-percent", "100", "--out", "top.csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["k"], 0);
    for bad in ["0", "100.5", "-3"] {
        let o = run(d.path(), &["slice", "--in", "s.tsv", "--top-percent", bad, "--out", "x.csv"]);
        assert_eq!(code(&o), 1, "percent {bad}");
    }

    write(d.path(), "c5.tsv", &cycle(5));
    let o = run(d.path(), &["degrees", "--in", "c5.tsv", "--out", "deg.csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(d.path().join("deg.csv")).unwrap(), "k,n_k\n1,5\n");
}

#[test]
fn help_and_version_exit_zero() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("analyze"));
    let o = run(d.path(), &["--version"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(code(&run(d.path(), &[])), 1);
}
