//! The `rover-sim` binary: verbs, overrides, exit codes and output layout.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rover_sim::sweep::{SweepResult, RESULTS_FILE};

fn rover_sim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rover-sim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_SWEEP: &str = r#"
[sweep]
kinds = ["step", "slope"]
speeds = [0.5, 1.0]
step_heights = [0.03, 0.09]
slope_angles_deg = [10.0]

[report]
table_kinds = ["slope"]
table_slope_deg = 10.0

[output]
trace_stride = 40
"#;

#[test]
fn help_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(rover_sim(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(rover_sim(dir.path(), &["launch"]).status.code(), Some(1));
    assert_eq!(rover_sim(dir.path(), &["run", "--mode", "XX"]).status.code(), Some(1));
    assert_eq!(rover_sim(dir.path(), &["sweep", "--jobs", "0"]).status.code(), Some(1));
}

#[test]
fn validation_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "spring_rate = -1\n");
    let out = rover_sim(dir.path(), &["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("spring_rate"), "{}", stderr(&out));

    let out = rover_sim(dir.path(), &["check", "--gravity", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("gravity"));

    let config = write_config(dir.path(), "[sweep]\nstep_hieghts = [0.01]\n");
    let out = rover_sim(dir.path(), &["sweep", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("sweep.step_hieghts"));
}

#[test]
fn run_writes_one_row_trace_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = rover_sim(dir.path(), &["run", "--out", "result", "--mode", "ie", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let result = SweepResult::read_csv(&dir.path().join("result").join(RESULTS_FILE)).unwrap();
    assert_eq!(result.cells.len(), 1);
    let cell = &result.cells[0];
    assert_eq!(cell.spec.mode.label(), "IE");
    assert_eq!(cell.spec.seed, 3);
    assert!(dir.path().join("result").join(cell.trace.as_ref().unwrap()).exists());
    assert!(dir
        .path()
        .join("result")
        .join(format!("accel_{}.svg", cell.spec.key()))
        .exists());
}

#[test]
fn unstable_run_exits_with_failed_cells() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "contact_stiffness = 1e300\n");
    let out = rover_sim(dir.path(), &["run", "--config", &config, "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("numerical instability"));
    let result = SweepResult::read_csv(&dir.path().join("o").join(RESULTS_FILE)).unwrap();
    assert_eq!(result.failed_cells().count(), 1);
}

#[test]
fn check_prints_passing_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = rover_sim(dir.path(), &["check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 10);
    assert!(!text.contains("FAIL"));
}

#[test]
fn sweep_then_report_is_reproducible_and_contained() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_SWEEP);
    let out = rover_sim(
        dir.path(),
        &[
            "sweep",
            "--config",
            &config,
            "--out",
            "o",
            "--jobs",
            "3",
            "--gravity",
            "1.625",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let mut top: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    top.sort();
    assert_eq!(top, ["config.toml", "o"]);

    let o = dir.path().join("o");
    let result = SweepResult::read_csv(&o.join(RESULTS_FILE)).unwrap();
    assert_eq!(result.cells.len(), (2 + 1) * 2 * 3);
    let rows = fs::read_to_string(o.join(RESULTS_FILE))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .count();
    assert_eq!(rows, result.cells.len() + 1);

    let reports = [
        "heatmap_step.svg",
        "heatmap_step.csv",
        "heatmap_slope.svg",
        "heatmap_slope.csv",
        "max_table.csv",
        "summary.txt",
        "accel_slope10.svg",
    ];
    let first: Vec<Vec<u8>> = reports
        .iter()
        .map(|f| fs::read(o.join(f)).unwrap_or_else(|_| panic!("{f} written")))
        .collect();
    for f in reports {
        fs::remove_file(o.join(f)).unwrap();
    }
    let out = rover_sim(dir.path(), &["report", "--config", &config, "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for (f, before) in reports.iter().zip(&first) {
        assert_eq!(&fs::read(o.join(f)).unwrap(), before, "{f} differs after report");
    }
}

#[test]
fn mode_flag_restricts_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[sweep]\nkinds = [\"step\"]\nspeeds = [1.0]\nstep_heights = [0.02]\n[output]\nwrite_traces = false\n",
    );
    let out = rover_sim(
        dir.path(),
        &["sweep", "--config", &config, "--out", "o", "--mode", "MHS"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let result = SweepResult::read_csv(&dir.path().join("o").join(RESULTS_FILE)).unwrap();
    assert_eq!(result.cells.len(), 1);
    assert_eq!(result.cells[0].spec.mode.label(), "MHS");
}

#[test]
fn report_without_results_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = rover_sim(dir.path(), &["report", "--out", "missing"]);
    assert_eq!(out.status.code(), Some(1));
}
