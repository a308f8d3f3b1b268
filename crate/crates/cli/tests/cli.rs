use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use absentia_cli::{parse_config_str, run, Command as Cmd};
use tempfile::TempDir;

const STEP: &str = r#"schema_version = 1
[field]
profile = "step"
strength = 1.0
radius = 0.25
[grid]
n_r = 48
n_theta = 32
r_max = 10.0
[certify]
theorem = "Thm1"
"#;

const AB: &str = r#"schema_version = 1
[field]
profile = "ab"
alpha_mean = 0.5
[grid]
n_r = 32
n_theta = 32
r_max = 8.0
[certify]
sweep_radii = [4.0, 8.0]
"#;

fn absentia(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("scenario.toml");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_absentia"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn certify_step_field_is_certified() {
    let dir = TempDir::new().unwrap();
    let o = absentia(dir.path(), STEP, &["certify"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("Thm1: certified"), "{}", stdout(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    let cert = &report["certificates"][0];
    assert_eq!(cert["theorem_id"], "Thm1");
    assert_eq!(cert["verdict"], "certified");
    assert!(cert["constants"]["b1"].as_f64().unwrap() <= 0.5);
    assert_eq!(report["config"]["solver"]["tol"], 1e-8);
    assert!(report["timings"].is_object());
}

#[test]
fn not_certified_exits_zero() {
    let dir = TempDir::new().unwrap();
    let config = STEP.replace(
        "[certify]\n",
        "[potential]\nshape = \"step\"\nvalue = -4.0\nradius = 1.0\n[certify]\ndecomposition = \"all_v2\"\n",
    );
    let o = absentia(dir.path(), &config, &["certify"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("Thm1: not_certified"), "{}", stdout(&o));
}

#[test]
fn config_errors_exit_two_with_a_hint() {
    let dir = TempDir::new().unwrap();
    let o = absentia(dir.path(), &STEP.replace("n_r = 48", "nr = 48"), &["certify"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("grid.nr") && err.contains("grid.n_r") && err.contains("line 7"), "{err}");

    let o = absentia(dir.path(), &STEP.replace("r_max = 10.0", "r_max = 10.0\nr_min = 10.0"), &["certify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("r_min"), "{}", stderr(&o));

    let o = absentia(dir.path(), "schema_version = 1\n[grid\n", &["certify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn missing_decomposition_is_a_config_error() {
    let config = STEP.replace("[certify]\n", "[potential]\nshape = \"constant\"\nvalue = 1.0\n[certify]\n");
    let c = parse_config_str(&config).unwrap();
    let e = run(Cmd::Certify, &c, None).unwrap_err();
    assert!(e.to_string().contains("certify.decomposition"), "{e}");
    assert!(run(Cmd::Hardy, &c, None).is_ok());
}

#[test]
fn spectrum_csv_format() {
    let dir = TempDir::new().unwrap();
    let o = absentia(dir.path(), STEP, &["spectrum"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("out/eigenvalues.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r_max,index,eigenvalue,residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.len() == 4 && r[2] > 0.0));
    assert_eq!(rows[0][1], 1.0);
}

#[test]
fn all_on_ab_collects_every_section() {
    let dir = TempDir::new().unwrap();
    let o = absentia(dir.path(), AB, &["all", "--dump-matrix"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["certificates"][0]["theorem_id"], "Thm5_AB");
    assert_eq!(report["certificates"][0]["constants"]["beta"], 0.5);
    assert!(!report["hardy_probes"].as_array().unwrap().is_empty());
    assert!(!report["identity_residuals"].as_array().unwrap().is_empty());
    let hardy = fs::read_to_string(dir.path().join("out/hardy.csv")).unwrap();
    assert!(hardy.starts_with("probe_id,constant,bound\n"));
    assert!(hardy.contains("\ncircle,"));
    let mtx = fs::read_to_string(dir.path().join("out/hamiltonian.mtx")).unwrap();
    assert!(mtx.starts_with("%%MatrixMarket matrix coordinate complex hermitian"));
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let c = parse_config_str(AB).unwrap();
    let a = run(Cmd::All, &c, Some(7)).unwrap();
    let b = run(Cmd::All, &c, Some(7)).unwrap();
    assert_eq!(a.deterministic_json(), b.deterministic_json());
    assert_eq!(a.seed, 7);
    assert_eq!(a.config.solver.seed, 7);
}

#[test]
fn complex_potential_skips_the_spectrum() {
    let config = STEP.replace(
        "[certify]\ntheorem = \"Thm1\"\n",
        "[potential]\nimag_shape = \"gaussian\"\nimag_value = 0.01\n[certify]\ntheorem = [\"Thm1\", \"Thm3_nsa\"]\n",
    );
    let c = parse_config_str(&config).unwrap();
    let r = run(Cmd::All, &c, None).unwrap();
    assert!(!r.operational_failure(), "{:?}", r.errors);
    assert!(r.spectra.is_none());
    assert_eq!(r.certificates[0].report.verdict.as_str(), "inapplicable");
    assert_eq!(r.certificates[1].report.theorem_id.as_str(), "Thm3_nsa");
    assert!(r.certificates[1].obvious.is_some());
}
