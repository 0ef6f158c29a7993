use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn caa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caa")).args(args).output().expect("binary runs")
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

const SMALL_UCURVE: [&str; 6] = [
    "--set",
    "ucurve.n=3000",
    "--set",
    "ucurve.replicates=3",
    "--set",
    "ucurve.p_grid=[0.0, 0.5, 1.0]",
];

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "2")] {
        let mut args = vec!["ucurve", "--seed", "11", "--jobs", jobs, "--out", out.to_str().unwrap()];
        args.extend(SMALL_UCURVE);
        let o = caa(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["ucurve.csv", "ucurve_replicates.csv", "manifest.json"] {
        let x = fs::read(a.join("ucurve").join(name)).unwrap();
        let y = fs::read(b.join("ucurve").join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn manifest_describes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["ucurve", "--out", tmp.path().to_str().unwrap()];
    args.extend(SMALL_UCURVE);
    assert!(caa(&args).status.success());
    let dir = tmp.path().join("ucurve");
    let m = manifest(&dir);
    assert_eq!(m["experiment"], "ucurve");
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(m["config"]["ucurve"]["n"], 3000);
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for o in outputs {
        let rows = o["rows"].as_u64().unwrap() as usize;
        assert_eq!(csv_rows(&dir.join(o["name"].as_str().unwrap())), rows);
    }
    // Three grid points for two pairs; the replicate file multiplies by three replicates.
    assert_eq!(csv_rows(&dir.join("ucurve.csv")), 6);
    assert_eq!(csv_rows(&dir.join("ucurve_replicates.csv")), 18);
    assert_eq!(outputs[0]["kind"], "ucurve");
}

#[test]
fn seed_changes_results() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |seed: &str, sub: &str| {
        let out = tmp.path().join(sub);
        let mut args = vec!["ucurve", "--seed", seed, "--out", out.to_str().unwrap()];
        args.extend(SMALL_UCURVE);
        assert!(caa(&args).status.success());
        fs::read(out.join("ucurve/ucurve_replicates.csv")).unwrap()
    };
    assert_ne!(run("1", "s1"), run("2", "s2"));
}

#[test]
fn config_violation_exits_nonzero_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = caa(&["crypto-ladder", "--out", out.to_str().unwrap(), "--set", "crypto_ladder.keys=[{len = 20}]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds max_budget"));
    assert!(!out.exists());

    let o = caa(&["ucurve", "--out", out.to_str().unwrap(), "--set", "ucurve.n=10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = caa(&["ucurve", "--out", out.to_str().unwrap(), "--set", "ucurve.unknown=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn config_file_and_show_config() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("run.toml");
    fs::write(
        &path,
        "seed = 5\n[infocheck]\nn = 5000\nmax_order = 3\n",
    )
    .unwrap();
    let o = caa(&["show-config", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    let shown: toml::Table = String::from_utf8(o.stdout).unwrap().parse().unwrap();
    assert_eq!(shown["seed"].as_integer(), Some(5));
    assert_eq!(shown["infocheck"]["max_order"].as_integer(), Some(3));
    assert_eq!(shown["ucurve"]["n"].as_integer(), Some(60_000));

    let out = tmp.path().join("out");
    let o = caa(&["infocheck", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // Four default sources, atoms m = 1..3.
    assert_eq!(csv_rows(&out.join("infocheck/infocheck.csv")), 12);
    assert_eq!(manifest(&out.join("infocheck"))["seed"], 5);
}

#[test]
fn rerun_replaces_previous_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let base = ["crypto-ladder", "--out", out, "--set", "crypto_ladder.n=3000", "--set", "crypto_ladder.replicates=2"];
    assert!(caa(&base).status.success());
    let mut narrower = base.to_vec();
    narrower.extend(["--set", "crypto_ladder.keys=[{bits = [0]}]"]);
    assert!(caa(&narrower).status.success());
    let dir = tmp.path().join("crypto-ladder");
    // One key, budgets 0..=16.
    assert_eq!(csv_rows(&dir.join("crypto_ladder_profile.csv")), 17);
    let leftovers: Vec<_> = fs::read_dir(tmp.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains("staging"))
        .collect();
    assert!(leftovers.is_empty());
}
