use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use msland::artifact::{read_rates1d, read_rates2d, SurfaceArtifact, Table};
use msland::cohort_file::{format_cohort, parse_cohort};
use msland_core::estimate::{fit_landmark, Cohort, EstimationWindow, FitConfig};
use msland_core::model::{Jump, Landmark, SamplePath, StateSpace};
use proptest::prelude::*;
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn msland(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msland"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .env_remove("MSLAND_OUTPUT_DIR")
        .env_remove("MSLAND_THREADS")
        .output()
        .unwrap()
}

fn config() -> String {
    fixtures().join("run.toml").display().to_string()
}

fn error_report(o: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&o.stderr);
    let line = stderr.lines().last().expect("an error report");
    serde_json::from_str(line).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn validate_passes_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let o = msland(&["--config", &config(), "validate"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("validation.json"));
    assert_eq!(report["passed"], true);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for expected in [
        "indicator identity",
        "censored decomposition",
        "oracle rates",
        "oracle probabilities",
    ] {
        assert!(names.contains(&expected), "{names:?}");
    }
    assert!(names.iter().any(|n| n.starts_with("duhamel")));
    assert!(names.iter().any(|n| n.starts_with("volterra plug-back")));
}

#[test]
fn validate_reports_failures_with_exit_one() {
    // A large epsilon floors the small oracle occupations, so the estimator
    // no longer reproduces the enumerated probabilities.
    let dir = tempfile::tempdir().unwrap();
    let model = fixtures().join("illness_death.toml");
    let o = msland(
        &[
            "validate",
            "--model",
            model.to_str().unwrap(),
            "--s",
            "1",
            "--epsilon",
            "0.5",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_report(&o)["kind"], "validation_failed");
    assert_eq!(json(&dir.path().join("validation.json"))["passed"], false);
}

#[test]
fn simulate_is_reproducible() {
    let (a, b, c) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    assert!(msland(&["--config", &config(), "simulate"], a.path()).status.success());
    assert!(msland(&["--config", &config(), "simulate"], b.path()).status.success());
    assert!(msland(&["--config", &config(), "simulate", "--seed", "7"], c.path())
        .status
        .success());
    let read = |d: &Path| std::fs::read(d.join("cohort.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_ne!(read(a.path()), read(c.path()));
    // the shipped cohort is this very simulation
    assert_eq!(read(a.path()), std::fs::read(fixtures().join("cohort.csv")).unwrap());
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn at_risk_violation_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = write(dir.path(), "c.csv", "S,a,b\nH,1,a,3,\nJ,1,2,a,b\nH,2,a,2.5,\n");
    let o = msland(
        &["estimate", "--cohort", &cohort, "--tau", "4", "--landmark", "column"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let report = error_report(&o);
    assert_eq!(report["kind"], "at_risk");
    assert!(report["message"].as_str().unwrap().contains("at risk"), "{report}");
}

#[test]
fn malformed_cohorts_are_rejected_with_locations() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.csv", "");
    let o = msland(&["estimate", "--cohort", &empty], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(error_report(&o)["message"]
        .as_str()
        .unwrap()
        .ends_with("no individuals"));

    let broken = write(dir.path(), "broken.csv", "S,a,b,c\nH,5,a,inf,\nJ,5,1,a,b\nJ,5,2,a,c\n");
    let o = msland(&["estimate", "--cohort", &broken], dir.path());
    let report = error_report(&o);
    assert_eq!(
        (report["kind"].as_str(), report["line"].as_u64()),
        (Some("parse"), Some(4))
    );
    assert!(report["message"].as_str().unwrap().contains("individual 5"));

    let early = write(dir.path(), "early.csv", "S,a,b\nH,1,a,inf,\nH,2,a,0.5,\n");
    let o = msland(&["estimate", "--cohort", &early, "--s", "1"], dir.path());
    assert_eq!(error_report(&o)["line"], 3);
}

#[test]
fn estimate_artifacts_match_library_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = msland(&["--config", &config(), "estimate"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&dir.path().join("estimate.json"));
    let hash = summary["config_hash"].as_str().unwrap().to_string();

    let file = parse_cohort(
        &std::fs::read_to_string(fixtures().join("cohort.csv")).unwrap(),
        Path::new("c"),
    )
    .unwrap();
    let cohort = Cohort::new(file.paths, file.states.clone()).unwrap();
    let window = EstimationWindow::single(1.0, 5.0).unwrap();
    for class in summary["classes"].as_array().unwrap() {
        let z = Landmark::new(class["landmark"].as_str().unwrap());
        let dir = PathBuf::from(class["directory"].as_str().unwrap());
        let fit = fit_landmark(&cohort, &z, &FitConfig::new(window)).unwrap();
        let t1 = Table::read(&dir.join("rates1d.csv")).unwrap();
        assert_eq!(t1.get("config_hash").unwrap(), &Value::from(hash.clone()));
        assert_eq!(read_rates1d(&t1).unwrap(), fit.rates);
        let t2 = Table::read(&dir.join("rates2d.csv")).unwrap();
        assert_eq!(&read_rates2d(&t2).unwrap(), fit.rates2d.as_ref().unwrap());
        let s =
            SurfaceArtifact::from_table(&Table::read(&dir.join("surfaces").join("p2_ill_dead.csv")).unwrap()).unwrap();
        assert_eq!(s.surface, fit.probabilities2d.as_ref().unwrap().surface(1, 2));
    }
}

#[test]
fn value_reports_moments_per_class() {
    let dir = tempfile::tempdir().unwrap();
    let o = msland(&["--config", &config(), "value", "--threads", "2"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("valuation.json"));
    let values = v["values"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    for c in values {
        let (m1, m2) = (c["value"].as_f64().unwrap(), c["second_moment"].as_f64().unwrap());
        assert!(m2 >= m1 * m1 - 1e-12);
    }
    let dead = values.iter().find(|c| c["landmark"] == "dead").unwrap();
    assert_eq!(dead["value"], 0.0);
}

#[test]
fn bivariate_size_guard() {
    let dir = tempfile::tempdir().unwrap();
    let o = msland(&["--config", &config(), "estimate", "--max-cells-2d", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_report(&o)["kind"], "grid_too_large");
    let o = msland(
        &[
            "--config",
            &config(),
            "estimate",
            "--max-cells-2d",
            "3",
            "--bivariate",
            "false",
        ],
        dir.path(),
    );
    assert!(o.status.success());
}

#[test]
fn environment_overrides_and_flag_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_msland"))
            .args(["--config", &config(), "simulate", "--n", "5"])
            .args(extra)
            .env("MSLAND_OUTPUT_DIR", env_dir.path())
            .env("MSLAND_THREADS", "1")
            .output()
            .unwrap()
    };
    assert!(run(&[]).status.success());
    assert!(env_dir.path().join("cohort.csv").exists());
    assert!(run(&["--output-dir", flag_dir.path().to_str().unwrap()])
        .status
        .success());
    assert!(flag_dir.path().join("cohort.csv").exists());
    let bad = Command::new(env!("CARGO_BIN_EXE_msland"))
        .args(["--config", &config(), "simulate"])
        .env("MSLAND_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

fn arb_path(id: u64) -> impl Strategy<Value = SamplePath> {
    (
        0usize..3,
        prop::collection::vec((1u32..400, 1usize..3), 0..5),
        prop::option::of(1u32..500),
        0usize..3,
    )
        .prop_map(move |(start, steps, censor, z)| {
            let mut state = start;
            let mut time = 0.0;
            let mut jumps = Vec::new();
            for (dt, shift) in steps {
                time += f64::from(dt) / 64.0;
                let to = (state + shift) % 3;
                jumps.push(Jump::new(time, state, to));
                state = to;
            }
            let censor = censor.map_or(f64::INFINITY, |c| f64::from(c) / 37.0);
            let landmark = if z == 0 {
                Landmark::universal()
            } else {
                Landmark::new(format!("class|{z}"))
            };
            SamplePath::new(id, start, jumps, censor, landmark).unwrap()
        })
}

proptest! {
    #[test]
    fn cohort_files_round_trip(paths in (1usize..6).prop_flat_map(|n| (0..n as u64).map(|id| arb_path(id * 3 + 1)).collect::<Vec<_>>())) {
        let states = StateSpace::new(&["a", "b", "c"]).unwrap();
        let text = format_cohort(&states, &paths, &["header".into()]).unwrap();
        let back = parse_cohort(&text, Path::new("p.csv")).unwrap();
        prop_assert_eq!(back.states, states);
        prop_assert_eq!(back.paths, paths);
    }
}
