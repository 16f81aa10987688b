use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

fn pdik(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdik")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const GAUSS2: &str = r#"{"family":"product","parts":[{"type":"exp","rate":1},{"type":"exp","rate":1}]}"#;
const BROKEN3: &str =
    r#"{"family":"product","parts":[{"type":"power","a":1},{"type":"power","a":1},{"type":"power","a":1}],"scale":-1}"#;

fn noise_csv(dir: &Path, m: usize, seed: u64) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::from("a,b1,b2\n");
    for _ in 0..m {
        let row: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        text.push_str(&format!("{},{},{}\n", row[0], row[1], row[2]));
    }
    write(dir, "noise.csv", &text)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn partitions_of_three() {
    let out = pdik(&["partitions", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0]["blocks"], serde_json::json!([[1, 2, 3]]));
    assert_eq!(lines[4]["coefficient"], 2);
    let total: i64 = lines.iter().map(|l| l["coefficient"].as_i64().unwrap()).sum();
    assert_eq!(total, 0);
    assert_eq!(pdik(&["partitions", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn interaction_on_independent_noise() {
    let dir = TempDir::new().unwrap();
    let csv = noise_csv(dir.path(), 40, 5);
    let kernel = write(dir.path(), "k.json", GAUSS2);
    let report = dir.path().join("report.json");
    let args = [
        "interaction",
        "--input",
        s(&csv),
        "--groups",
        "1,2",
        "--order",
        "2",
        "--mode",
        "lancaster",
        "--kernel",
        s(&kernel),
        "--permutations",
        "199",
        "--seed",
        "11",
        "--out",
        s(&report),
    ];
    let out = pdik(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let first = fs::read(&report).unwrap();
    let json: Value = serde_json::from_slice(&first).unwrap();
    let p = json["p_value"].as_f64().unwrap();
    assert!((0.005..=1.0).contains(&p), "p = {p}");
    assert!(json["statistic"].is_f64());
    assert_eq!(json["order"], 2);
    assert_eq!(json["mode"], "lancaster");
    assert_eq!(json["seed"], 11);
    assert_eq!(json["kernel"]["family"], "product");
    assert!(json["version"].is_string());
    assert_eq!(json["config"]["groups"], serde_json::json!([1, 2]));

    assert_eq!(pdik(&args).status.code(), Some(0));
    assert_eq!(fs::read(&report).unwrap(), first, "reports differ across identical runs");
}

#[test]
fn statistic_without_permutations() {
    let dir = TempDir::new().unwrap();
    let csv = write(dir.path(), "d.csv", "0,0\n1,1\n");
    let kernel = write(dir.path(), "k.json", GAUSS2);
    let out = pdik(&[
        "interaction",
        "--input",
        s(&csv),
        "--groups",
        "1,1",
        "--order",
        "2",
        "--kernel",
        s(&kernel),
        "--no-header",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["p_value"].is_null());
    assert!(json["seed"].is_null());
    let expected = 0.25 * (1.0 - (-1f64).exp()).powi(2);
    assert!((json["statistic"].as_f64().unwrap() - expected).abs() < 1e-14);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let kernel = write(dir.path(), "k.json", GAUSS2);
    let run = |csv: &Path, groups: &str, kernel: &Path| {
        pdik(&["interaction", "--input", s(csv), "--groups", groups, "--order", "2", "--kernel", s(kernel)])
    };

    let bad_cell = write(dir.path(), "cell.csv", "x,y\n1,2\n3,abc\n");
    let out = run(&bad_cell, "1,1", &kernel);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let ragged = write(dir.path(), "ragged.csv", "x,y\n1,2\n3,4\n5\n");
    let out = run(&ragged, "1,1", &kernel);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let good = write(dir.path(), "good.csv", "x,y\n1,2\n3,4\n");
    assert_eq!(run(&good, "1,2", &kernel).status.code(), Some(2));
    assert_eq!(run(&good, "1,1", &dir.path().join("missing.json")).status.code(), Some(2));

    let schema = write(dir.path(), "schema.json", r#"{"family":"product","parts":[{"type":"cubic"}]}"#);
    assert_eq!(run(&good, "1,1", &schema).status.code(), Some(2));
    let domain = write(
        dir.path(),
        "domain.json",
        r#"{"family":"product","parts":[{"type":"power","a":3},{"type":"exp","rate":1}]}"#,
    );
    assert_eq!(run(&good, "1,1", &domain).status.code(), Some(2));

    assert_eq!(pdik(&["interaction", "--input", s(&good)]).status.code(), Some(2));
}

#[test]
fn verify_kernel_exit_codes() {
    let dir = TempDir::new().unwrap();
    let broken = write(dir.path(), "broken.json", BROKEN3);
    let out =
        pdik(&["verify-kernel", "--kernel", s(&broken), "--order", "3", "--trials", "30", "--seed", "1", "--dim", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["passed"], false);

    let good = write(dir.path(), "good.json", GAUSS2);
    let out =
        pdik(&["verify-kernel", "--kernel", s(&good), "--order", "2", "--trials", "30", "--seed", "1", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["checks"].as_array().unwrap().len(), 4);

    assert_eq!(pdik(&["verify-kernel", "--kernel", s(&good), "--order", "3"]).status.code(), Some(2));
}

#[test]
fn frechet_subcommand() {
    let out = pdik(&["frechet", "--ell", "3", "--t", "0.5,1.5,2"]);
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);
    assert_eq!(pdik(&["frechet", "--ell", "3", "--t", "1,2"]).status.code(), Some(2));
    assert_eq!(pdik(&["frechet", "--ell", "2", "--t", "1,-2"]).status.code(), Some(2));
}
