use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;
use tempfile::TempDir;
use timf_core::model_free::ModelFree;
use timf_core::poly::{BiPoly, JsonCoeff};

const TRAJECTORY_COLUMNS: [&str; 6] = ["branch_id", "re_z", "im_z", "re_root", "im_root", "step_index"];

fn timf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_timf")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn c(v: &Value) -> Complex64 {
    Complex64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

struct Row {
    branch: usize,
    root: Complex64,
    step: usize,
}

fn read_trajectories(path: &Path) -> Vec<Row> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), TRAJECTORY_COLUMNS);
    rd.records()
        .map(|r| {
            let r = r.unwrap();
            let f = |k: usize| r[k].parse::<f64>().unwrap();
            Row { branch: r[0].parse().unwrap(), root: Complex64::new(f(3), f(4)), step: r[5].parse().unwrap() }
        })
        .collect()
}

const BOUND_LINE: &str = "model = \"bound\"\n[path]\nstart = [-1.0, 0.01]\nend = [-1.0, 8.0]\nsteps = 400\n";

#[test]
fn bound_line_trace_flags_two_branches() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", BOUND_LINE);
    let o = timf(tmp.path(), &["trace", "-c", cfg.to_str().unwrap(), "-o", "out"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = tmp.path().join("out");
    let summary = json(&out.join("trace.json"));
    let branches = summary["result"]["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 7);
    let flagged = branches.iter().filter(|b| b["flagged_physical"] == Value::Bool(true)).count();
    assert_eq!(flagged, 2);
    for fam in ["D", "x", "y"] {
        let rows = read_trajectories(&out.join(format!("trace_{fam}.csv")));
        assert_eq!(rows.len(), 7 * 400, "family {fam}");
        assert_eq!(rows.iter().map(|r| r.branch).max(), Some(6));
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", BOUND_LINE);
    for out in ["a", "b"] {
        let o = timf(tmp.path(), &["trace", "-c", cfg.to_str().unwrap(), "-o", out, "--set", "path.steps=60"]);
        assert_eq!(code(&o), 0);
    }
    let names = ["trace_D.csv", "trace_x.csv", "trace_y.csv", "trace.json", "manifest.json"];
    for n in names {
        let a = fs::read(tmp.path().join("a").join(n)).unwrap();
        let b = fs::read(tmp.path().join("b").join(n)).unwrap();
        assert!(a == b, "{n} differs between runs");
    }
}

#[test]
fn outputs_carry_hash_seed_and_tolerances() {
    let tmp = TempDir::new().unwrap();
    let o = timf(
        tmp.path(),
        &[
            "trace",
            "--set",
            "path.start=[0.5, 1.0]",
            "--set",
            "path.end=[1.5, 1.0]",
            "--set",
            "path.steps=5",
            "--seed",
            "99",
            "--tau-resid",
            "1e-11",
            "-o",
            "out",
        ],
    );
    assert_eq!(code(&o), 0);
    let out = tmp.path().join("out");
    let summary = json(&out.join("trace.json"));
    let hash = summary["config_hash"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["seed"], 99);
    assert_eq!(summary["tolerances"]["tau_resid"].as_f64(), Some(1e-11));
    let first = fs::read_to_string(out.join("trace_D.csv")).unwrap().lines().next().unwrap().to_string();
    assert!(first.starts_with("# schema_version=1 "), "{first}");
    assert!(
        first.contains(&format!("config_hash={hash}"))
            && first.contains("seed=99")
            && first.contains("tau_resid=1e-11"),
        "{first}"
    );
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["config_hash"].as_str(), Some(hash.as_str()));
    assert_eq!(manifest["result"]["files"].as_array().unwrap().len(), 4);
}

#[test]
fn degenerate_path_gives_one_sample() {
    let tmp = TempDir::new().unwrap();
    let o = timf(
        tmp.path(),
        &[
            "trace",
            "--set",
            "path.start=[0.5, 1.0]",
            "--set",
            "path.end=[0.5, 1.0]",
            "--set",
            "path.steps=2",
            "-o",
            "out",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_trajectories(&tmp.path().join("out/trace_D.csv"));
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.step == 0));
    assert_eq!(json(&tmp.path().join("out/trace.json"))["result"]["samples"], 1);
}

#[test]
fn free_line_trace_crosses_near_sqrt_d_four() {
    let tmp = TempDir::new().unwrap();
    let o = timf(
        tmp.path(),
        &[
            "trace",
            "--set",
            "path.start=[-30.0, 0.075]",
            "--set",
            "path.end=[30.0, 0.075]",
            "--set",
            "path.steps=1500",
            "-o",
            "out",
        ],
    );
    assert_eq!(code(&o), 0);
    let rows = read_trajectories(&tmp.path().join("out/trace_D.csv"));
    let mut closest = [f64::INFINITY; 7];
    for r in &rows {
        closest[r.branch] = closest[r.branch].min((r.root.sqrt() - 4.0).norm());
    }
    assert!(closest.iter().filter(|&&d| d < 0.5).count() >= 2, "{closest:?}");
}

fn grid_config(n: usize, sector: &str) -> String {
    format!("[grid]\nre_min = -1.0\nre_max = 1.0\nim_min = -1.0\nim_max = 1.0\nn_re = {n}\nn_im = {n}\nsector = \"{sector}\"\n")
}

fn run_grid(n: usize, sector: &str) -> Value {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "g.toml", &grid_config(n, sector));
    let o = timf(tmp.path(), &["grid", "-c", cfg.to_str().unwrap(), "-o", "out"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    json(&tmp.path().join("out/grid.json"))
}

fn distance_to_origin(line: &Value) -> f64 {
    line.as_array().unwrap().iter().map(|p| c(p).norm()).fold(f64::INFINITY, f64::min)
}

#[test]
fn symmetric_grid_contour_reaches_origin() {
    let g = run_grid(41, "symmetric");
    assert_eq!(g["schema_version"], 1);
    let r = &g["result"];
    assert_eq!(r["quantity"], "product_re_x_symmetric");
    let cell = 2.0 / 40.0;
    let best = r["contour"].as_array().unwrap().iter().map(distance_to_origin).fold(f64::INFINITY, f64::min);
    assert!(best <= cell * 2f64.sqrt(), "closest contour point {best}");
}

#[test]
fn breaking_grid_contour_has_two_branches() {
    let g = run_grid(41, "breaking");
    let lines = g["result"]["contour"].as_array().unwrap();
    assert_eq!(lines.len(), 2);
    let mean_re = |l: &Value| {
        let pts = l.as_array().unwrap();
        pts.iter().map(|p| p[0].as_f64().unwrap()).sum::<f64>() / pts.len() as f64
    };
    let right = lines.iter().max_by(|a, b| mean_re(a).total_cmp(&mean_re(b))).unwrap();
    assert!(distance_to_origin(right) <= 2.0 / 40.0 * 2f64.sqrt());
}

#[test]
fn minimal_grid_is_well_formed() {
    let g = run_grid(8, "symmetric");
    let r = &g["result"];
    let re: Vec<f64> = r["re"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let im: Vec<f64> = r["im"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!((re.len(), im.len()), (8, 8));
    assert!(re.windows(2).all(|w| w[0] < w[1]) && im.windows(2).all(|w| w[0] < w[1]));
    let rows = r["values"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|row| row.as_array().unwrap().len() == 8));
}

#[test]
fn small_grid_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "g.toml", &grid_config(7, "symmetric"));
    let o = timf(tmp.path(), &["grid", "-c", cfg.to_str().unwrap(), "-o", "out"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("8x8"));
}

fn run_validate(tmp: &Path, out: &str, args: &[&str]) -> (i32, Value) {
    let mut all = vec!["validate", "-o", out];
    all.extend_from_slice(args);
    let o = timf(tmp, &all);
    (code(&o), json(&tmp.join(out).join("validate.json")))
}

#[test]
fn default_free_sweep_passes() {
    let tmp = TempDir::new().unwrap();
    let (code, v) = run_validate(tmp.path(), "out", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["pass"], true);
    assert_eq!(v["result"]["records"].as_array().unwrap().len(), 16);
}

#[test]
fn bound_sweep_without_potential_matches_free_sweep() {
    let tmp = TempDir::new().unwrap();
    let (c0, free) = run_validate(tmp.path(), "free", &["--set", "params.a2=2"]);
    let (c1, bound) = run_validate(tmp.path(), "bound", &["--model", "bound", "--set", "params.lambda=0"]);
    assert_eq!((c0, c1), (0, 0));
    let fr = free["result"]["records"].as_array().unwrap();
    let br = bound["result"]["records"].as_array().unwrap();
    assert_eq!(fr.len(), br.len());
    for (a, b) in fr.iter().zip(br) {
        assert!((c(&a["exact"]) - c(&b["exact"])).norm() <= 1e-8);
        assert_eq!(a["physical"], b["physical"]);
        assert_eq!(a["closest"], b["closest"]);
        for x in a["branches"].as_array().unwrap() {
            let gap = b["branches"]
                .as_array()
                .unwrap()
                .iter()
                .map(|y| (c(&x["D"]) - c(&y["D"])).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(gap <= 1e-8, "branch gap {gap} at z = {}", a["z"]);
        }
    }
}

#[test]
fn origin_in_sweep_is_recorded_not_fatal() {
    let tmp = TempDir::new().unwrap();
    let pts = "validate.points=[[0.0, 0.0], [-3.0, 0.2]]";
    let (code, v) = run_validate(tmp.path(), "out", &["--set", pts, "--set", "validate.required=1"]);
    assert_eq!(code, 0);
    let recs = v["result"]["records"].as_array().unwrap();
    assert!(recs[0]["error"].as_str().unwrap().contains("cut"));
    assert_eq!(recs[1]["pass"], true);

    let (code, v) = run_validate(tmp.path(), "strict", &["--set", pts]);
    assert_eq!(code, 4);
    assert_eq!(v["result"]["pass"], false);
}

fn run_thresholds(model: &str) -> Value {
    let tmp = TempDir::new().unwrap();
    let o = timf(tmp.path(), &["thresholds", "--model", model, "-o", "out"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    json(&tmp.path().join("out/thresholds.json"))
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["result"]["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn free_thresholds_pass() {
    let r = run_thresholds("free");
    assert_eq!(r["result"]["pass"], true);
    let t = check(&r, "triple_root_exponent_D");
    assert!((t["measured"].as_f64().unwrap() - 1.0 / 3.0).abs() <= 0.01);
    assert_eq!(check(&r, "appendix_violations")["measured"].as_f64(), Some(0.0));
}

#[test]
fn bound_thresholds_pass() {
    let r = run_thresholds("bound");
    assert_eq!(r["result"]["pass"], true);
    assert!((check(&r, "border_exponent")["measured"].as_f64().unwrap() - 2.5).abs() <= 0.1);
}

#[test]
fn derive_round_trips_exact_condition() {
    let tmp = TempDir::new().unwrap();
    let o = timf(tmp.path(), &["derive", "--mode", "exact", "-o", "out"]);
    assert_eq!(code(&o), 0);
    let d = json(&tmp.path().join("out/derive.json"));
    let cond = BiPoly::from_json(&d["result"]["amplitude_condition"]).unwrap();
    assert_eq!(cond, ModelFree::unit().unwrap().condition);
    let rx = BiPoly::from_json(&d["result"]["x_resultant"]).unwrap();
    assert_eq!(rx.degree(), Some(7));
}

#[test]
fn config_errors_exit_two_with_location() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "model = \"free\"\n[params]\na1 = 1.0\nmass = 2.0\n");
    let o = timf(tmp.path(), &["trace", "-c", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4") && err.contains("mass"), "{err}");

    let o = timf(tmp.path(), &["validate", "--set", "params.K1=1.0", "-o", "out"]);
    assert_eq!(code(&o), 2);
    let o = timf(
        tmp.path(),
        &["trace", "--set", "path.steps=1", "--set", "path.start=[0.0,1.0]", "--set", "path.end=[1.0,1.0]"],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn degree_drop_on_path_is_a_numerical_failure() {
    let tmp = TempDir::new().unwrap();
    let o = timf(
        tmp.path(),
        &[
            "trace",
            "--model",
            "bound",
            "--set",
            "path.start=[-1.0, 0.0]",
            "--set",
            "path.end=[-1.0, 1.0]",
            "--set",
            "path.steps=20",
            "-o",
            "out",
        ],
    );
    assert_eq!(code(&o), 3);
}
