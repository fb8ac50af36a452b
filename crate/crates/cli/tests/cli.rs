use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kakeya_core::bounds::{figure_panels, sweep, table_csv, MAX_PLOT_SAMPLES};

const MIDDLE_THIRD: &str = r#"{"kind":"ifs","ifs":{"branches":2,"ratio":0.3333333333333333,
  "translations":[0,0.6666666666666666],"probabilities":[0.5,0.5],"levels":12}}"#;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kakeya-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn construct(dir: &Path, name: &str, spec: &str, extra: &[&str]) -> (Output, std::path::PathBuf) {
    let spec_path = dir.join(format!("{name}.json"));
    fs::write(&spec_path, spec).unwrap();
    let out = dir.join(format!("{name}.msr"));
    let mut args = vec!["construct", "--spec", p(&spec_path), "--out", p(&out)];
    args.extend_from_slice(extra);
    (lab(&args), out)
}

fn estimate_json(measure: &Path, extra: &[&str]) -> serde_json::Value {
    let mut args = vec!["estimate", "--json", "--measure", p(measure)];
    args.extend_from_slice(extra);
    let out = lab(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn dim(v: &serde_json::Value, key: &str) -> f64 {
    v[key]["dim_value"].as_f64().unwrap()
}

#[test]
fn arc_kakeya_file_has_unit_mass() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"kind":"kakeya","directions":{"kind":"arc","start":0,"length":1.5707963267948966,
      "atoms":64},"fibers":{"kind":"bump","atoms":128}}"#;
    let (out, path) = construct(dir.path(), "k0", spec, &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("dim=2 mass="));
    let mass: f64 = header.split_whitespace().nth(1).unwrap()[5..]
        .parse()
        .unwrap();
    assert!((mass - 1.0).abs() < 1e-12);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("k0.msr.json")).unwrap()).unwrap();
    assert_eq!(meta["construction"], "kakeya");
    assert_eq!(meta["predicted_fourier_dim"], 2.0);
    assert!((meta["mass"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn middle_third_has_two_to_the_levels_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = construct(dir.path(), "cantor", MIDDLE_THIRD, &[]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(path).unwrap();
    assert!(text.lines().next().unwrap().contains(" n=4096 "));
    assert_eq!(text.lines().count(), 4097);
}

#[test]
fn malformed_spec_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = construct(dir.path(), "bad", r#"{"kind":"uniform","atomz":10}"#, &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("atomz"), "{}", stderr(&out));
    let (out, _) = construct(dir.path(), "trunc", r#"{"kind":"uniform","#, &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn stochastic_construction_needs_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"kind":"brownian","dim":1.0,"levels":10}"#;
    let (out, _) = construct(dir.path(), "b", spec, &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("seed"));
}

#[test]
fn outputs_are_byte_identical_for_identical_flags() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"kind":"brownian","dim":1.0,"levels":10}"#;
    let (a, pa) = construct(dir.path(), "a", spec, &["--seed", "9", "--threads", "1"]);
    let (b, pb) = construct(dir.path(), "b", spec, &["--seed", "9", "--threads", "1"]);
    let (c, pc) = construct(dir.path(), "c", spec, &["--seed", "10", "--threads", "1"]);
    assert!(a.status.success() && b.status.success() && c.status.success());
    let (ma, mb, mc) = (
        fs::read(pa).unwrap(),
        fs::read(pb).unwrap(),
        fs::read(pc).unwrap(),
    );
    assert_eq!(ma, mb);
    assert_ne!(ma, mc);
    let ea = lab(&[
        "estimate",
        "--threads",
        "1",
        "--measure",
        p(&dir.path().join("a.msr")),
    ]);
    let eb = lab(&[
        "estimate",
        "--threads",
        "1",
        "--measure",
        p(&dir.path().join("b.msr")),
    ]);
    let ea = stdout(&ea).replace("a.msr", "");
    let eb = stdout(&eb).replace("b.msr", "");
    assert_eq!(ea, eb);
}

#[test]
fn missing_output_directory_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("u.json");
    fs::write(&spec, r#"{"kind":"uniform","atoms":10}"#).unwrap();
    let out = dir.path().join("missing/u.msr");
    assert_eq!(
        code(&lab(&["construct", "--spec", p(&spec), "--out", p(&out)])),
        2
    );
}

#[test]
fn estimates_of_oracle_measures() {
    let dir = tempfile::tempdir().unwrap();
    let (_, lebesgue) = construct(dir.path(), "u", r#"{"kind":"uniform","atoms":10000}"#, &[]);
    let v = estimate_json(&lebesgue, &[]);
    assert!((dim(&v, "fourier") - 1.0).abs() <= 0.1);

    let (_, cantor) = construct(dir.path(), "c", MIDDLE_THIRD, &[]);
    let v = estimate_json(
        &cantor,
        &["--base", "triadic", "--scale-max", "0.3333333333333333"],
    );
    assert!(dim(&v, "fourier") <= 0.15);
    assert!((dim(&v, "frostman") - 0.6309).abs() <= 0.05);
    assert!((dim(&v, "box_counting") - 0.6309).abs() <= 0.05);

    let (_, dirac) = construct(dir.path(), "d", r#"{"kind":"dirac","dim":1}"#, &[]);
    let v = estimate_json(&dirac, &[]);
    assert_eq!(dim(&v, "fourier"), 0.0);
    assert_eq!(dim(&v, "frostman"), 0.0);
}

#[test]
fn profile_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let (_, m) = construct(dir.path(), "u", r#"{"kind":"uniform","atoms":4000}"#, &[]);
    let csv = dir.path().join("profile.csv");
    let out = lab(&["estimate", "--measure", p(&m), "--profile", p(&csv)]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("R,envelope"));
}

#[test]
fn scale_window_violation_exits_3_with_admissible_window() {
    let dir = tempfile::tempdir().unwrap();
    let (_, m) = construct(dir.path(), "u", r#"{"kind":"uniform","atoms":1000}"#, &[]);
    let out = lab(&["estimate", "--measure", p(&m), "--scale-min", "1e-6"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("admissible"), "{}", stderr(&out));
    let out = lab(&[
        "estimate",
        "--measure",
        p(&m),
        "--r0",
        "64",
        "--annuli",
        "8",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("admissible"));
}

#[test]
fn unreadable_measure_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.msr");
    fs::write(&bad, "dim=1 mass=1 n=2\n1 0\n").unwrap();
    assert_eq!(code(&lab(&["estimate", "--measure", p(&bad)])), 2);
    assert_eq!(
        code(&lab(&["estimate", "--measure", "/nonexistent/m.msr"])),
        2
    );
}

#[test]
fn bounds_point_and_domain_errors() {
    let out = lab(&["bounds", "--regime", "kakeya", "--s", "1", "--t", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("lower=0.666666666667 upper=1.000000000000"));
    assert_eq!(
        code(&lab(&[
            "bounds", "--regime", "kakeya", "--s", "1", "--t", "1.5"
        ])),
        2
    );
    assert_eq!(
        code(&lab(&[
            "bounds", "--regime", "bogus", "--s", "1", "--t", "1"
        ])),
        2
    );
    let grid = lab(&["bounds", "--regime", "ff", "--steps", "10"]);
    assert_eq!(stdout(&grid).lines().count(), 101);
}

#[test]
fn plot_all_matches_bound_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["plot", "--all", "--out", p(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for panel in figure_panels() {
        let csv = fs::read_to_string(dir.path().join(format!("{}.csv", panel.name))).unwrap();
        let expected = table_csv(&sweep(panel.regime, panel.fixed, MAX_PLOT_SAMPLES).unwrap());
        assert_eq!(csv, expected);
        let svg = fs::read_to_string(dir.path().join(format!("{}.svg", panel.name))).unwrap();
        assert!(svg.contains("<polyline"));
    }
}

#[test]
fn fh_plot_shows_the_jump() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fh.svg");
    let out = lab(&[
        "plot",
        "--regime",
        "fh",
        "--fixed-s",
        "0.4",
        "--out",
        p(&svg),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches(r#"class="upper""#).count(), 2);
    assert!(dir.path().join("fh.csv").exists());
    let bad = lab(&[
        "plot",
        "--regime",
        "kakeya",
        "--fixed-t",
        "1.5",
        "--out",
        p(&svg),
    ]);
    assert_ne!(code(&bad), 0);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, r#"{"experiments":[]}"#).unwrap();
    assert_eq!(code(&lab(&["verify", "--spec", p(&empty)])), 2);

    let plan = r#"{"fourier":{"plan":{"r0":4,"annuli":8,"samples":64,"seed":1}}}"#;
    let entry = |name: &str, predicted: f64, control: bool| {
        format!(
            r#"{{"name":"{name}","construction":{MIDDLE_THIRD},"estimators":{plan},
              "checks":[{{"estimator":"fourier","predicted":{predicted},"tolerance":0.1}}],
              "negative_control":{control}}}"#
        )
    };
    let good = dir.path().join("good.json");
    fs::write(
        &good,
        format!(
            r#"{{"experiments":[{},{}]}}"#,
            entry("zero", 0.0, false),
            entry("wrong", 0.9, true)
        ),
    )
    .unwrap();
    let verdicts = dir.path().join("v.json");
    let out = lab(&["verify", "--spec", p(&good), "--out", p(&verdicts)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&verdicts).unwrap()).unwrap();
    assert_eq!(v["verdicts"][1]["pass"], false);

    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        format!(r#"{{"experiments":[{}]}}"#, entry("wrong", 0.9, false)),
    )
    .unwrap();
    let out = lab(&["verify", "--spec", p(&bad)]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("FAIL"));
}
