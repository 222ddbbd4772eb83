use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn linear_case() -> Value {
    json!({
        "alpha": 1.3, "r": 0.5, "variant": "acute",
        "k": "1+2*x", "b": "exp(x)", "c": "5+sin(x)", "f": "1",
        "N": 16, "Ns": [8, 10, 12, 14, 16], "N_ref": 40
    })
}

fn run(cmd: &str, config: &Value, dir: &Path) -> Output {
    let path = dir.join("config.in.json");
    std::fs::write(&path, serde_json::to_string(config).unwrap()).unwrap();
    Command::new(env!("CARGO_BIN_EXE_fracspec"))
        .args([cmd, "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn sqrt_beta(a: f64, b: f64) -> f64 {
    let g = |x: f64| fracspec::specfun::gamma(x).unwrap();
    (g(a) * g(b) / g(a + b)).sqrt()
}

#[test]
fn solve_writes_solution_and_summary() {
    let dir = TempDir::new().unwrap();
    let mut cfg = linear_case();
    cfg["grid_points"] = json!(101);
    let out = run("solve", &cfg, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = read(dir.path(), "solution.csv");
    assert!(csv.starts_with("x,u\n"));
    assert!(!csv.contains('\r'));
    let data = rows(&csv);
    assert_eq!(data.len(), 101);
    assert_eq!(data[0][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(data[100][0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(data[100][1].parse::<f64>().unwrap(), 0.0);
    assert!(data[50][1].parse::<f64>().unwrap() > 0.0);

    let summary = read(dir.path(), "summary.txt");
    assert!(summary.contains("beta = 0.65"), "{summary}");
    for key in ["c** = ", "predicted rate_L2 = 2.25", "predicted rate_H1 = 1.25", "condition estimate = ", "residual = "] {
        assert!(summary.contains(key), "missing {key}");
    }
    let rhs0: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("rhs[0] = "))
        .unwrap()
        .parse()
        .unwrap();
    // ‖G_0^{(β, α-β)}‖ = sqrt(B(β+1, α-β+1)).
    let want = sqrt_beta(1.65, 1.65);
    assert!((rhs0 - want).abs() <= 1e-12 * want, "{rhs0} vs {want}");

    let echo: Value = serde_json::from_str(&read(dir.path(), "config.json")).unwrap();
    assert_eq!(echo["quad_points"], json!(36));
    assert_eq!(echo["grid_points"], json!(101));
    assert_eq!(echo["norm_interval"], json!("reference"));
}

#[test]
fn output_is_deterministic() {
    let one = TempDir::new().unwrap();
    let two = TempDir::new().unwrap();
    let mut cfg = linear_case();
    cfg["N"] = json!(10);
    cfg["grid_points"] = json!(51);
    assert!(run("solve", &cfg, one.path()).status.success());
    assert!(run("solve", &cfg, two.path()).status.success());
    assert_eq!(read(one.path(), "solution.csv"), read(two.path(), "solution.csv"));
}

#[test]
fn converge_linear_case() {
    let dir = TempDir::new().unwrap();
    let out = run("converge", &linear_case(), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "convergence.csv");
    assert!(csv.starts_with("N,err_L2,rate_L2,err_H1,rate_H1\n"));
    let data = rows(&csv);
    assert_eq!(data.len(), 5);
    assert_eq!(data[0][0], "8");
    assert_eq!(data[0][2], "");
    let e8: f64 = data[0][1].parse().unwrap();
    assert!((e8 / 6.50e-3 - 1.0).abs() < 0.5, "err_L2(8) = {e8}");
    let k: f64 = data[1][2].parse().unwrap();
    assert!((1.9..=2.3).contains(&k));

    let pred = csv.lines().last().unwrap();
    let parts: Vec<f64> = pred.strip_prefix("# pred,").unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(format!("{:.2},{:.2}", parts[0], parts[1]), "2.25,1.25");
}

#[test]
fn converge_prediction_sine_case() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "alpha": 1.6, "r": 0.4, "k": "1-0.3*sin(x)", "b": "exp(x)", "c": "5+sin(x)", "f": "1",
        "N": 8, "Ns": [8], "N_ref": 20
    });
    let out = run("converge", &cfg, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "convergence.csv");
    let data = rows(&csv);
    assert_eq!(data.len(), 1);
    assert_eq!((data[0][2].as_str(), data[0][4].as_str()), ("", ""));
    let parts: Vec<f64> = csv.lines().last().unwrap()[7..].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(format!("{:.2},{:.2}", parts[0], parts[1]), "2.95,1.95");
}

#[test]
fn unit_interval_errors_are_smaller() {
    let dir = TempDir::new().unwrap();
    let mut cfg = linear_case();
    cfg["Ns"] = json!([8]);
    cfg["N_ref"] = json!(24);
    assert!(run("converge", &cfg, dir.path()).status.success());
    let wide: f64 = rows(&read(dir.path(), "convergence.csv"))[0][1].parse().unwrap();
    cfg["norm_interval"] = json!("unit");
    assert!(run("converge", &cfg, dir.path()).status.success());
    let unit: f64 = rows(&read(dir.path(), "convergence.csv"))[0][1].parse().unwrap();
    assert!((wide / unit - 2f64.powf(1.15)).abs() < 1e-12);
}

#[test]
fn compare_variants() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "alpha": 1.4, "r": 0.4, "k": "1", "b": "exp(x)", "c": "5+sin(x)", "f": "1",
        "N": 16, "grid_points": 201,
        "k_variants": {"one": "1", "k1": "piecewise(0.5; 2; 1)", "k2": "piecewise(0.5; 1; 2)"}
    });
    let out = run("compare", &cfg, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = |name: &str| -> Vec<[f64; 3]> {
        let csv = read(dir.path(), &format!("compare_{name}.csv"));
        assert!(csv.starts_with("x,u_acute,u_grave\n"));
        rows(&csv).iter().map(|r| [0, 1, 2].map(|i| r[i].parse().unwrap())).collect()
    };
    let (one, k1, k2) = (table("one"), table("k1"), table("k2"));
    assert_eq!(one.len(), 201);
    for t in [&one, &k1, &k2] {
        assert_eq!((t[0][1], t[0][2], t[200][1], t[200][2]), (0.0, 0.0, 0.0, 0.0));
    }
    assert!(one.iter().all(|r| (r[1] - r[2]).abs() <= 1e-8));
    let gap = k1.iter().zip(&k2).fold(0.0f64, |m, (a, b)| m.max((a[1] - b[1]).abs()));
    assert!(gap > 1e-3);

    let single = TempDir::new().unwrap();
    let mut cfg = cfg;
    cfg.as_object_mut().unwrap().remove("k_variants");
    assert!(run("compare", &cfg, single.path()).status.success());
    assert!(single.path().join("out/compare.csv").exists());
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let mut cfg = linear_case();
    cfg["k"] = json!("1+*x");
    let out = run("solve", &cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("byte 2"), "{err}");

    let mut cfg = linear_case();
    cfg.as_object_mut().unwrap().remove("Ns");
    assert_eq!(run("converge", &cfg, dir.path()).status.code(), Some(1));

    let mut cfg = linear_case();
    cfg["alpha"] = json!(2.5);
    assert_eq!(run("solve", &cfg, dir.path()).status.code(), Some(1));

    let missing = Command::new(env!("CARGO_BIN_EXE_fracspec"))
        .args(["solve", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn numerical_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let mut cfg = linear_case();
    cfg["k"] = json!("x - 0.5");
    let out = run("solve", &cfg, dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
}
