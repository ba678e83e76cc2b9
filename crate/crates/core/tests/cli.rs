use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn naetree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_naetree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let o = naetree(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn golden(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_golden(mut actual: Value, name: &str) {
    actual.as_object_mut().unwrap().remove("input");
    let want = golden(name);
    assert_eq!(
        actual,
        want,
        "stats drifted from {name}:\n{}",
        serde_json::to_string_pretty(&actual).unwrap()
    );
}

#[test]
fn maj4_enumerates_six_lines() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "maj4.cnf",
        &["--family", "maj", "--n", "4", "--close"],
    );
    let out = dir.path().join("maj4.sol");
    let o = naetree(&[
        "enumerate",
        "--t",
        "2",
        f.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["stats"]["solutions_emitted"], 6);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 6);
}

#[test]
fn default_solution_path_sits_next_to_input() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "maj8.cnf",
        &["--family", "maj", "--n", "8", "--close"],
    );
    let o = naetree(&["enumerate", "--t", "4", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let sol = dir.path().join("maj8.cnf.sol");
    assert_eq!(json(&o)["solutions_file"], sol.to_str().unwrap());
    assert_eq!(fs::read_to_string(sol).unwrap().lines().count(), 36);
}

#[test]
fn seeded_runs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "r.cnf",
        &[
            "--family",
            "random-mixed",
            "--n",
            "12",
            "--m",
            "14",
            "--seed",
            "4",
        ],
    );
    let mut files = Vec::new();
    let mut stats = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.sol"));
        let o = naetree(&[
            "enumerate",
            "--t",
            "auto",
            "--seed",
            "7",
            f.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let mut s = json(&o);
        s.as_object_mut().unwrap().remove("solutions_file");
        stats.push(s);
        files.push(fs::read(out).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(stats[0], stats[1]);
}

#[test]
fn gen_is_reproducible_and_records_its_spec() {
    let a = naetree(&[
        "gen",
        "--family",
        "random-closed",
        "--n",
        "10",
        "--m",
        "9",
        "--seed",
        "3",
    ]);
    let b = naetree(&[
        "gen",
        "--family",
        "random-closed",
        "--n",
        "10",
        "--m",
        "9",
        "--seed",
        "3",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with(r#"c genspec {"family":"random_closed","n":10,"k":3,"m":9,"seed":3}"#));
}

#[test]
fn golden_stats() {
    let dir = TempDir::new().unwrap();
    let maj8 = gen(
        dir.path(),
        "maj8.cnf",
        &["--family", "maj", "--n", "8", "--close"],
    );
    let o = naetree(&["count", maj8.to_str().unwrap(), "--t", "4", "--seed", "3"]);
    assert_golden(json(&o), "maj8_seed3.json");
    for seed in ["5", "7"] {
        let f = gen(
            dir.path(),
            &format!("r{seed}.cnf"),
            &[
                "--family",
                "random-closed",
                "--n",
                "12",
                "--m",
                "6",
                "--seed",
                seed,
            ],
        );
        let o = naetree(&["count", f.to_str().unwrap(), "--t", "auto"]);
        assert_golden(json(&o), &format!("random12_seed{seed}.json"));
    }
}

#[test]
fn width_four_input_is_rejected() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "w4.cnf",
        "p cnf 4 2\n1 2 3 4 0\n-1 -2 -3 -4 0\n",
    );
    let o = naetree(&["count", f.to_str().unwrap(), "--t", "2"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("width"));
}

#[test]
fn parse_errors_and_usage_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "bad.cnf", "p cnf 3 1\n1 x 0\n");
    assert_eq!(
        code(&naetree(&["count", f.to_str().unwrap(), "--t", "1"])),
        3
    );
    assert_eq!(
        code(&naetree(&["count", "/nonexistent.cnf", "--t", "1"])),
        3
    );
    assert_eq!(code(&naetree(&["frobnicate"])), 3);
}

#[test]
fn open_input_needs_close_flag() {
    let dir = TempDir::new().unwrap();
    let f = gen(dir.path(), "maj4.cnf", &["--family", "maj", "--n", "4"]);
    assert_eq!(
        code(&naetree(&["count", f.to_str().unwrap(), "--t", "2"])),
        3
    );
    let o = naetree(&["count", f.to_str().unwrap(), "--t", "2", "--close"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["stats"]["solutions_emitted"], 6);
}

#[test]
fn smaller_solution_is_a_precondition_failure() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "maj8.cnf",
        &["--family", "maj", "--n", "8", "--close"],
    );
    assert_eq!(
        code(&naetree(&["count", f.to_str().unwrap(), "--t", "5"])),
        2
    );
}

#[test]
fn verify_passes_and_catches_duplicates() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "maj8.cnf",
        &["--family", "maj", "--n", "8", "--close"],
    );
    let fp = f.to_str().unwrap();
    let o = naetree(&["verify", fp, "--t", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["pass"], true);

    let sol = dir.path().join("maj8.sol");
    assert_eq!(
        code(&naetree(&[
            "enumerate",
            fp,
            "--t",
            "4",
            "--out",
            sol.to_str().unwrap()
        ])),
        0
    );
    let mut text = fs::read_to_string(&sol).unwrap();
    let first = text.lines().next().unwrap().to_string();
    text.push_str(&first);
    text.push('\n');
    let dup = write(dir.path(), "dup.sol", &text);
    let o = naetree(&[
        "verify",
        fp,
        "--t",
        "4",
        "--solutions",
        dup.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 5);
    let v = json(&o);
    assert_eq!(v["pass"], false);
    assert_eq!(v["report"]["duplicates"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_nae_cross_checks_the_raw_input() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "mixed.cnf",
        &[
            "--family",
            "random-mixed",
            "--n",
            "10",
            "--m",
            "12",
            "--seed",
            "2",
        ],
    );
    let o = naetree(&[
        "verify",
        f.to_str().unwrap(),
        "--t",
        "auto",
        "--close",
        "--nae",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["nae"]["closure_matches_direct"], true);
    assert_eq!(v["nae"]["emitted_vs_direct"]["pass"], true);
}

#[test]
fn bound_values_and_refusals() {
    let o = naetree(&["bound", "--f-large", "2", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["f_large"]["value"], "2");

    let o = naetree(&["bound", "--n", "8", "--profile", "2,0,0,0"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["certificate"]["N"], "27/8");
    assert_eq!(v["certificate"]["I"], 6);

    assert_eq!(
        code(&naetree(&["bound", "--n", "8", "--profile", "1,1,2,0"])),
        4
    );
    assert_eq!(code(&naetree(&["bound", "--f-small", "1", "-1", "0"])), 4);
    assert_eq!(code(&naetree(&["bound", "--sweep"])), 3);
}

#[test]
fn bound_claims_small_grid_and_csv() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("dp");
    let o = naetree(&[
        "bound",
        "--verify-claims",
        "--grid",
        "8",
        "--csv",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["claims"]["all_pass"], true);
    let large = fs::read_to_string(dir.path().join("dp_large.csv")).unwrap();
    assert!(large.starts_with("w,d,M,F\n"));
    let small = fs::read_to_string(dir.path().join("dp_small.csv")).unwrap();
    assert!(small.starts_with("w,d,h,M,F\n"));
}

#[test]
fn psi_mode_and_debug_tree() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "maj4.cnf",
        &["--family", "maj", "--n", "4", "--close"],
    );
    let tree = dir.path().join("tree.txt");
    let o = naetree(&[
        "enumerate",
        "--mode",
        "psi",
        "--exhaustive-orderings",
        "--t",
        "2",
        f.to_str().unwrap(),
        "--debug-tree",
        tree.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["psi"]["equal"], true);
    assert_eq!(v["psi"]["mean_leaves"], "6");
    assert_eq!(
        v["debug_tree"]["invariant_violations"]
            .as_array()
            .unwrap()
            .len(),
        0
    );
    assert!(fs::metadata(tree).unwrap().len() > 0);
}

#[test]
fn estimate_reports_mean_and_error() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "maj8.cnf",
        &["--family", "maj", "--n", "8", "--close"],
    );
    let o = naetree(&[
        "estimate",
        f.to_str().unwrap(),
        "--t",
        "4",
        "--samples",
        "200",
    ]);
    assert_eq!(code(&o), 0);
    let est = &json(&o)["estimate"];
    assert_eq!(est["samples"], 200);
    // Every ordering of this tree keeps all 36 leaves.
    assert_eq!(est["mean"], 36.0);
    assert_eq!(est["std_error"], 0.0);
}
