use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ipw-eval");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("spawn ipw-eval")
}

fn run_in(out: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn ipw-eval")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path)
        .expect("read output")
        .lines()
        .next()
        .unwrap_or_default()
        .to_string()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn config_errors_exit_one() {
    for args in [
        &["scenarios", "--bogus"][..],
        &["nonsense"],
        &["scenarios", "--scenario", "select_sideways"],
        &["scenarios", "--threshold", "1.5"],
        &["deploy-sweep", "--p-t", "0.3"],
        &["deploy-sweep", "--p-withhold", "0"],
        &["deploy-sweep", "--pop", "external"],
        &["scenarios", "--config", "/nonexistent/run.toml"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 1\nrepetitions = 5\n").unwrap();
    let o = run(&["scenarios", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("repetitions"), "{}", stderr(&o));
}

#[test]
fn scenarios_writes_expected_files_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &["scenarios", "--n", "500", "--reps", "5", "--json"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // --json alone restricts output to JSON plus the text table.
    assert!(dir.path().join("table1.json").exists());
    assert!(dir.path().join("table1.txt").exists());
    assert!(!dir.path().join("table1.csv").exists());

    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["scenarios", "--n", "500", "--reps", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = dir.path().join("table1.csv");
    assert_eq!(
        header(&table),
        "scenario,metric,estimator,mean,lo,hi,n_undefined"
    );
    let rows = std::fs::read_to_string(&table).unwrap().lines().count();
    assert_eq!(rows, 1 + 5 * 6 * 3);
    assert_eq!(
        header(&dir.path().join("calibration.csv")),
        "scenario,estimator,bin_index,bin_lo,bin_hi,mean_pred,prevalence,weight_mass,lo,hi"
    );
    for s in [
        "scar",
        "select_hard",
        "select_easy",
        "select_negative",
        "select_positive",
    ] {
        let svg = std::fs::read_to_string(dir.path().join(format!("calibration_{s}.svg"))).unwrap();
        assert!(svg.starts_with("<svg"));
    }
}

#[test]
fn scenario_and_metric_filters() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "scenarios",
            "--n",
            "500",
            "--reps",
            "3",
            "--scenario",
            "scar",
            "--metric",
            "auroc",
            "--csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3);
    assert!(text.lines().skip(1).all(|l| l.starts_with("scar,auroc,")));
}

#[test]
fn deploy_sweep_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "deploy-sweep",
            "--n",
            "1000",
            "--reps",
            "10",
            "--pt-grid",
            "0.9,0.7",
            "--withhold-grid",
            "0.5,0.1,0.01",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let expected =
        "swept_param,param_value,estimator,mean,lo,hi,mean_observed_fraction,n_undefined";
    assert_eq!(header(&dir.path().join("sweep_pt.csv")), expected);
    assert_eq!(header(&dir.path().join("sweep_withhold.csv")), expected);
    let pt = std::fs::read_to_string(dir.path().join("sweep_pt.csv")).unwrap();
    assert_eq!(pt.lines().count(), 1 + 2 * 3);
    let withhold = std::fs::read_to_string(dir.path().join("sweep_withhold.csv")).unwrap();
    assert_eq!(withhold.lines().count(), 1 + 3 * 3);
    assert!(std::fs::read_to_string(dir.path().join("figure3.svg"))
        .unwrap()
        .starts_with("<svg"));
}

/// Withholding every alert leaves every label observed, so all three
/// estimators coincide.
#[test]
fn full_withholding_single_point_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "deploy-sweep",
            "--n",
            "800",
            "--reps",
            "5",
            "--p-t",
            "0.9",
            "--p-withhold",
            "1.0",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for file in ["sweep_pt.csv", "sweep_withhold.csv"] {
        let mut reader = csv::Reader::from_path(dir.path().join(file)).unwrap();
        let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(&r[3], &rows[0][3], "{file}: means differ");
            assert_eq!(&r[6], "1.00000");
        }
    }
}

#[test]
fn external_population_two_rows_warns() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    std::fs::write(&pop, "score,label\n0.95,1\n0.2,0\n").unwrap();
    let out = dir.path().join("out");
    let o = run_in(
        &out,
        &[
            "deploy-sweep",
            "--pop",
            "external",
            "--file",
            pop.to_str().unwrap(),
            "--reps",
            "5",
            "--pt-grid",
            "0.9",
            "--withhold-grid",
            "0.5",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    assert!(out.join("sweep_pt.csv").exists());
}

#[test]
fn malformed_population_names_line_and_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    std::fs::write(&pop, "score,label\n0.9,1\n0.4,0\nnot-a-number,1\n").unwrap();
    let o = run_in(
        &dir.path().join("out"),
        &[
            "deploy-sweep",
            "--pop",
            "external",
            "--file",
            pop.to_str().unwrap(),
            "--reps",
            "2",
        ],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let o = run_in(
        &dir.path().join("out"),
        &[
            "deploy-sweep",
            "--pop",
            "external",
            "--file",
            "/nonexistent/pop.csv",
            "--reps",
            "2",
        ],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn validate_exit_codes() {
    let o = run(&["validate", "--quick"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        "validate",
        "--quick",
        "--inject-fault",
        "uninverted-weights",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL") && stdout.contains("counterexample"));
}

#[test]
fn seed_changes_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "scenarios",
        "--n",
        "500",
        "--reps",
        "3",
        "--scenario",
        "scar",
        "--csv",
    ];
    run_in(a.path(), &args);
    let o = Command::new(BIN)
        .args(args)
        .args(["--seed", "99", "--out"])
        .arg(b.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(
        std::fs::read(a.path().join("table1.csv")).unwrap(),
        std::fs::read(b.path().join("table1.csv")).unwrap()
    );
}

#[test]
fn resampled_population_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "deploy-sweep",
        "--n",
        "1000",
        "--reps",
        "10",
        "--pt-grid",
        "0.8",
        "--withhold-grid",
        "0.2",
        "--resample-population",
        "--csv",
    ];
    let o = run_in(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("sweep_pt.csv")).unwrap();
    let actual = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = actual.split(',').collect();
    // The population changes between replicates, so actual AUROC has spread.
    assert_ne!(fields[4], fields[5], "{actual}");

    let o = run(&[
        "deploy-sweep",
        "--pop",
        "external",
        "--file",
        "x.csv",
        "--resample-population",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
