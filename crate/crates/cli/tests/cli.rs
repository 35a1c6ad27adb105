//! End-to-end checks of the binary: exit codes, pinned summary lines,
//! schema rejection, the b-range warning, output determinism, and every
//! documented example config.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_wavepacket-cli")
}

fn run_in(dir: &Path, command: &str, config: &Path) -> Output {
    Command::new(bin())
        .arg(command)
        .arg(config)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const WPT_BODY: &str = "\
[grid]
x_min = -16
x_max = 16
n = 128

[signal]
kind = gaussian
center = 0
width = 1
momentum = 1

[window]
base = gaussian
{WINDOW_EXTRA}

[wpt]
lambda = 2

[output]
dir = {DIR}
";

fn wpt_config(window_extra: &str, out_dir: &str) -> String {
    WPT_BODY.replace("{WINDOW_EXTRA}", window_extra).replace("{DIR}", out_dir)
}

#[test]
fn every_documented_example_config_runs_clean() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for command in
        ["wpt", "evolve", "flow", "detect", "verify-free", "verify-flow", "residual", "roundtrip", "bounds"]
    {
        let tmp = tempfile::tempdir().unwrap();
        let out = run_in(tmp.path(), command, &configs.join(format!("{command}.conf")));
        assert_eq!(
            code(&out),
            0,
            "{command} example failed\nstdout: {}\nstderr: {}",
            stdout(&out),
            stderr(&out)
        );
        // Every run leaves a manifest next to its data files.
        let manifest = tmp.path().join("out").join(command).join("manifest.txt");
        let text = std::fs::read_to_string(&manifest).expect("manifest written");
        assert!(text.starts_with(&format!("command = {command}\n")));
    }
}

#[test]
fn identical_configs_produce_byte_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.conf", &wpt_config("b = 0.25", "run"));
    let files = ["wpt.csv", "signal.csv", "manifest.txt"];
    assert_eq!(code(&run_in(tmp.path(), "wpt", &cfg)), 0);
    let first: Vec<Vec<u8>> = files
        .iter()
        .map(|f| std::fs::read(tmp.path().join("run").join(f)).unwrap())
        .collect();
    assert_eq!(code(&run_in(tmp.path(), "wpt", &cfg)), 0);
    for (f, bytes) in files.iter().zip(&first) {
        let again = std::fs::read(tmp.path().join("run").join(f)).unwrap();
        assert_eq!(&again, bytes, "{f} differs between identical runs");
    }
}

#[test]
fn verify_free_prints_the_pinned_summary_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "vf.conf",
        "\
[grid]
x_min = -16
x_max = 16
n = 1024

[signal]
kind = gaussian
center = 0
width = 1
momentum = 0.5

[window]
base = gaussian
b = 0.25

[verify]
t_list = 0.5
lambda_list = 1, 4
x_list = -1, 0, 1
xi_list = -1, 0, 1

[output]
dir = vf
",
    );
    let out = run_in(tmp.path(), "verify-free", &cfg);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let line = stdout(&out);
    assert!(
        line.starts_with("eq2 max_rel_err ") && line.trim_end().ends_with(" PASS"),
        "unexpected summary: {line}"
    );
    assert!(tmp.path().join("vf").join("free_identity.csv").exists());
}

#[test]
fn exceeded_tolerance_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "vf.conf",
        "\
[grid]
x_min = -16
x_max = 16
n = 512

[signal]
kind = gaussian
center = 0
width = 1
momentum = 0.5

[window]
base = gaussian
b = 0.25

[verify]
t_list = 0.5
lambda_list = 1
x_list = 0, 1
xi_list = 0, 1
tol = 1e-18

[output]
dir = vf
",
    );
    let out = run_in(tmp.path(), "verify-free", &cfg);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn oversized_scale_exponent_warns_but_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "warn.conf", &wpt_config("b = 0.7", "warn"));
    let out = run_in(tmp.path(), "wpt", &cfg);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("exceeds min((2-rho)/4, 1/4)"));
    assert!(std::fs::read_to_string(tmp.path().join("warn").join("manifest.txt"))
        .unwrap()
        .contains("window.b = 0.7"));
}

#[test]
fn scale_exponent_outside_unit_interval_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.conf", &wpt_config("b = 1.2", "bad"));
    let out = run_in(tmp.path(), "wpt", &cfg);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("scale exponent"));
}

#[test]
fn configuration_errors_exit_one_with_a_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "ok.conf", &wpt_config("b = 0.25", "ok"));

    let out = run_in(tmp.path(), "transmogrify", &cfg);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("unknown command"));

    let out = run_in(tmp.path(), "wpt", &tmp.path().join("absent.conf"));
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("cannot read config"));

    let stray = write_config(
        tmp.path(),
        "stray.conf",
        &wpt_config("b = 0.25", "stray").replace("[wpt]\nlambda = 2", "[wpt]\nlambda = 2\nwobble = 3"),
    );
    let out = run_in(tmp.path(), "wpt", &stray);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("wobble"));

    let dirac = write_config(
        tmp.path(),
        "dirac.conf",
        &wpt_config("b = 0.25", "dirac").replace(
            "kind = gaussian\ncenter = 0\nwidth = 1\nmomentum = 1",
            "kind = dirac\ncenter = 0",
        ),
    );
    let out = run_in(tmp.path(), "wpt", &dirac);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("dirac"));
}

#[test]
fn detect_dirac_lights_up_only_the_origin() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "detect.conf",
        "\
[signal]
kind = dirac
center = 0

[window]
base = gaussian
b = 0.25

[detect]
x0_list = -2, -1, 0, 1, 2
a = 2
lambda_list = 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384

[output]
dir = det
",
    );
    let out = run_in(tmp.path(), "detect", &cfg);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(tmp.path().join("det").join("classification.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let x0: f64 = cells[0].parse().unwrap();
        let verdict = cells[3];
        if x0 == 0.0 {
            assert_eq!(verdict, "InWavefront", "row: {line}");
        } else {
            assert_eq!(verdict, "Regular", "row: {line}");
        }
        rows += 1;
    }
    assert_eq!(rows, 10);
    assert!(stdout(&out).contains("2 InWavefront, 8 Regular, 0 Inconclusive"));
}

#[test]
fn manifest_echoes_resolved_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "defaults.conf",
        &wpt_config("", "defaults").replace("[wpt]\nlambda = 2\n", "[wpt]\nlambda = 2\n# complex defaults to false\n"),
    );
    let out = run_in(tmp.path(), "wpt", &cfg);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let manifest =
        std::fs::read_to_string(tmp.path().join("defaults").join("manifest.txt")).unwrap();
    for expected in [
        "command = wpt",
        "grid.x_min = -16",
        "grid.n = 128",
        "window.base = gaussian",
        "window.b = 0.25",
        "wpt.lambda = 2",
        "wpt.complex = false",
    ] {
        assert!(manifest.contains(expected), "manifest lacks `{expected}`:\n{manifest}");
    }
}
