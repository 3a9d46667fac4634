use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hypspec_cli::table::Table;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hypspec"));
    cmd.env_remove("HYPSPEC_GRID_N");
    cmd
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn hypspec")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
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

fn cfg(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_string()
}

const SCALAR_HALF: &str = r#"{
  "n": 1,
  "lambda0": { "kind": "affine", "a": 1.0, "b": 1.0 },
  "M": { "kind": "zero" },
  "K": [[[1.0, 0.0]]],
  "L": [[[-0.5, 0.0]]]
}"#;

#[test]
fn baseline_heat_exchanger_is_stable() {
    let o = run(&["stability", &cfg("hx_baseline.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("exponentially stable"));
    let o = run(&["stability", &cfg("hx_baseline.json"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["growth_bound"].as_f64().unwrap() < 0.0);
    assert_eq!(v["classification"]["tag"], "RieszSpectralGroup");
}

#[test]
fn singular_k_is_not_riesz_spectral() {
    let o = run(&["classify", &cfg("singular_k.json")]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("NotWellPosed"));
    for sub in ["stability", "spectrum"] {
        assert_eq!(code(&run(&[sub, &cfg("singular_k.json")])), 4, "{sub}");
    }
    let o = run(&["modes", &cfg("singular_k.json")]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("NotWellPosed"));
}

#[test]
fn unstable_system_exits_three() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "grow.json", &SCALAR_HALF.replace("-0.5", "-2.0"));
    let o = run(&["stability", &p, "--grid-n", "64"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stdout(&o).contains("not exponentially stable"));
}

#[test]
fn spectrum_row_count() {
    let o = run(&["spectrum", &cfg("coupled.json"), "--lmax", "10", "--grid-n", "256"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = Table::read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(t.rows.len(), 2 * 21);
    assert_eq!(t.columns, ["k", "l", "Re_mu", "Im_mu", "abs_rho", "theta", "alg_mult", "geom_mult"]);
    // sorted by decreasing real part
    let re: Vec<f64> = t.column(2).collect();
    assert!(re.windows(2).all(|w| w[0] >= w[1]));

    let o = run(&["spectrum", &cfg("jordan.toml"), "--lmax", "10", "--grid-n", "64"]);
    let t = Table::read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(t.rows.len(), 21);
    assert!(t.rows.iter().all(|r| r[6].as_f64() == 2.0 && r[7].as_f64() == 1.0));
}

#[test]
fn config_errors_name_the_key() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "extra.json", &SCALAR_HALF.replace("\"n\": 1,", "\"n\": 1, \"colour\": 3,"));
    let o = run(&["validate", &p]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));

    let p = write(&dir, "missing.json", &SCALAR_HALF.replace("\"K\": [[[1.0, 0.0]]],", ""));
    let o = run(&["validate", &p]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`K`"), "{}", stderr(&o));

    let p = write(&dir, "neg.json", &SCALAR_HALF.replace("\"b\": 1.0", "\"b\": -2.0"));
    let o = run(&["validate", &p]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("lambda0"), "{}", stderr(&o));

    let o = run(&["validate", "/nonexistent/config.toml"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["spectrum", &cfg("coupled.json"), "--lmax", "x"])), 2);
}

#[test]
fn overflowing_coupling_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "big.json",
        &SCALAR_HALF.replace(r#"{ "kind": "zero" }"#, r#"{ "kind": "constant", "entries": [[[2000.0, 0.0]]] }"#),
    );
    let o = run(&["stability", &p, "--grid-n", "64"]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("similarity"), "{}", stderr(&o));
}

#[test]
fn grid_size_from_environment() {
    let o = bin()
        .args(["geometry", &cfg("coupled.json")])
        .env("HYPSPEC_GRID_N", "32")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let t = Table::read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(t.rows.len(), 33);
    assert_eq!(t.columns, ["zeta", "eta", "omega_1", "omega_2"]);
    let o = bin()
        .args(["geometry", &cfg("coupled.json")])
        .env("HYPSPEC_GRID_N", "33")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn table_outputs_round_trip() {
    let dir = TempDir::new().unwrap();
    let c = cfg("coupled.json");
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("geometry.csv", vec!["geometry", &c]),
        ("similarity.csv", vec!["similarity", &c]),
        ("spectrum.csv", vec!["spectrum", &c, "--lmax", "3"]),
        ("modes.csv", vec!["modes", &c, "--k", "2", "--l", "-1", "--grid", "20"]),
        ("project.csv", vec!["project", &c, "--lmax", "4"]),
        ("sim.csv", vec!["simulate", &c, "--t", "0,0.4,1.3"]),
    ];
    for (name, mut args) in runs {
        let out = dir.path().join(name);
        let out_s = out.to_str().unwrap().to_string();
        args.extend(["--grid-n", "128", "--out", &out_s]);
        let o = run(&args);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        assert!(stdout(&o).contains("wrote"), "{name}");
        let text = fs::read_to_string(&out).unwrap();
        let table = Table::read_csv(text.as_bytes()).unwrap();
        assert!(!table.rows.is_empty());
        assert_eq!(table.to_csv_string(), text, "{name}");
        let leftovers = fs::read_dir(dir.path()).unwrap().count();
        assert!(leftovers <= 6, "temporary files left behind");
    }
    let sim = Table::read_csv(fs::File::open(dir.path().join("sim.csv")).unwrap()).unwrap();
    assert_eq!(sim.rows.len(), 3 * 129);
    assert_eq!(sim.columns, ["t", "zeta", "Re_1", "Im_1", "Re_2", "Im_2"]);
}

#[test]
fn json_tables() {
    let o = run(&["spectrum", &cfg("coupled.json"), "--lmax", "1", "--grid-n", "64", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["columns"][0], "k");
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let c = cfg("coupled.json");
    let sim = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "simulate",
            &c,
            "--t",
            "0.3,1.1",
            "--method",
            "modal",
            "--lmax",
            "8",
            "--grid-n",
            "128",
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        fs::read(out).unwrap()
    };
    let a = sim("a.csv", "7");
    let b = sim("b.csv", "7");
    let other = sim("c.csv", "8");
    assert_eq!(a, b);
    assert_ne!(a, other);
}

#[test]
fn projected_mode_recovers_unit_coefficient() {
    // M = 0, so original and transformed variables coincide
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "half.json", SCALAR_HALF);
    let mode = dir.path().join("mode.csv");
    let o = run(&["modes", &sys, "--l", "2", "--grid", "512", "--out", mode.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["project", &sys, "--init", mode.to_str().unwrap(), "--lmax", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = Table::read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(t.rows.len(), 9);
    for r in &t.rows {
        let c = (r[3].as_f64(), r[4].as_f64());
        let expect = if r[2].as_f64() == 2.0 { (1.0, 0.0) } else { (0.0, 0.0) };
        assert!(
            (c.0 - expect.0).abs() < 1e-6 && (c.1 - expect.1).abs() < 1e-6,
            "l = {}: {c:?}",
            r[2].as_f64()
        );
    }
}

#[test]
fn simulate_modal_converges_to_oracle() {
    let c = cfg("coupled.json");
    let values = |args: &[&str]| -> Vec<f64> {
        let mut all = vec!["simulate", c.as_str(), "--t", "0.5,1.5", "--seed", "2"];
        all.extend(args);
        let o = run(&all);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let t = Table::read_csv(o.stdout.as_slice()).unwrap();
        t.rows.iter().flat_map(|r| r[2..].iter().map(|x| x.as_f64())).collect()
    };
    let oracle = values(&[]);
    let scale = oracle.iter().map(|x| x * x).sum::<f64>().sqrt();
    let error = |lmax: &str| {
        let modal = values(&["--method", "modal", "--lmax", lmax]);
        oracle.iter().zip(&modal).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt() / scale
    };
    let (e16, e64) = (error("16"), error("64"));
    assert!(e64 < e16, "{e16} -> {e64}");
    assert!(e64 < 3e-2, "relative difference {e64}");
}

#[test]
fn modal_needs_diagonalizable_boundary_matrix() {
    let o = run(&["simulate", &cfg("jordan.toml"), "--t", "1", "--method", "modal", "--grid-n", "64"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not diagonalizable"));
    let o = run(&["simulate", &cfg("jordan.toml"), "--t", "1", "--grid-n", "64"]);
    assert_eq!(code(&o), 0);
    let o = run(&["modes", &cfg("jordan.toml"), "--j", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn heat_exchanger_command() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let o = run(&["hx", "--kappa", "1", "--grid-n", "512", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!((v["kappa_star"].as_f64().unwrap() - 5.791_792_074_197_988).abs() < 1e-9);
    assert!((v["lambda1"].as_f64().unwrap() - 0.642_854_707_584_313).abs() < 1e-9);
    assert_eq!(v["stable"], true);
    assert_eq!(v["consistent"], true);

    let o = run(&["hx", "--kappa", "6", "--grid-n", "512", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["stable"], false);

    let profile = write(&dir, "v.csv", "zeta,value\n0,1.0\n0.5,1.5\n1,2.0\n");
    let spec = format!("file:{profile}");
    let o = run(&["hx", "--alpha1", "affine:1,0.5", "--v", &spec, "--kappa", "2", "--grid-n", "512"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    for bad in [vec!["--v", "const:-1"], vec!["--alpha1", "cubic:1"], vec!["--v", "file:/nonexistent.csv"]] {
        let mut args = vec!["hx", "--kappa", "1"];
        args.extend(bad);
        assert_eq!(code(&run(&args)), 2, "{args:?}");
    }
    assert_eq!(code(&run(&["hx", "--kappa", "-1"])), 2);
}

#[test]
fn init_file_is_checked() {
    let dir = TempDir::new().unwrap();
    let c = cfg("coupled.json");
    let narrow = write(&dir, "narrow.csv", "zeta,Re_1,Im_1\n0,1,0\n0.5,1,0\n0.7,1,0\n1,1,0\n");
    let o = run(&["simulate", &c, "--init", &narrow, "--t", "1", "--grid-n", "64"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--init"));
    let short = write(&dir, "short.csv", "zeta,a,b,c,d\n0,1,0,1,0\n0.5,1,0,1,0\n0.8,1,0,1,0\n");
    assert_eq!(code(&run(&["simulate", &c, "--init", &short, "--t", "1", "--grid-n", "64"])), 2);
    assert_eq!(code(&run(&["simulate", &c, "--t", "-0.5", "--grid-n", "64"])), 2);
}
