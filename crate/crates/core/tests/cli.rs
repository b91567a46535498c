use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_memsmag"));
    c.env_remove("MEMSMAG_CONFIG_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn simulate_defaults_to_shipped_scenario() {
    let o = run(&["simulate"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let doc: memsmag::explorer::ReportDocument = toml::from_str(&text).unwrap();
    assert_eq!(doc.scenario, memsmag::explorer::Scenario::default_lorentz());
}

#[test]
fn validation_error_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "[drive]\namplitude = -0.01\n[environment]\ntemperature = -1.0\n").unwrap();
    let o = run(&["simulate", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("drive.amplitude") && err.contains("environment.temperature"), "{err}");
}

#[test]
fn bad_arguments_exit_1() {
    assert_eq!(code(&run(&["sweep", "--param", "drive.amplitude", "--from", "0", "--to", "1", "--steps", "1"])), 1);
    assert_eq!(code(&run(&["sweep", "--param", "drive.nope", "--from", "0", "--to", "1", "--steps", "3"])), 1);
    assert_eq!(code(&run(&["optimize", "--free", "drive.amplitude"])), 1);
    assert_eq!(code(&run(&["simulate", "--config", "/does/not/exist.toml"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn runtime_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("zero.toml");
    // valid input, but zero sensitivity leaves the detectable field undefined
    std::fs::write(&p, "[drive]\namplitude = 0.0\n").unwrap();
    let o = run(&["simulate", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["transient", "--config", shipped("ferro.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let o = run(&["simulate", "--out", "/does/not/exist/x.toml"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_dir_env_var() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("default.toml"), "[environment]\nfield_magnitude = 2e-3\n").unwrap();
    let o = bin()
        .env("MEMSMAG_CONFIG_DIR", dir.path())
        .args(["simulate"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let doc: memsmag::explorer::ReportDocument =
        toml::from_str(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(doc.scenario.environment.field_magnitude, 2e-3);
}

#[test]
fn out_extension_selects_format() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let toml_path = dir.path().join("r.toml");
    assert_eq!(code(&run(&["simulate", "--out", csv.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["simulate", "--out", toml_path.to_str().unwrap()])), 0);
    let c = std::fs::read_to_string(&csv).unwrap();
    assert!(c.starts_with("sensor_kind,sensitivity_V_per_T"));
    let t = std::fs::read_to_string(&toml_path).unwrap();
    assert!(t.starts_with("[scenario]"));
}

#[test]
fn noise_and_frequency_tables() {
    let o = run(&["freq-response", "--points", "32"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 33);
    assert!(text.starts_with("frequency_Hz,amplitude_m_per_N,phase_rad"));

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("psd.csv");
    assert_eq!(code(&run(&["noise", "--points", "10", "--out", p.to_str().unwrap()])), 0);
    assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), 11);
}

#[test]
fn transient_csv_header() {
    let o = run(&["transient", "--at-resonance"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("t,x,v,V_out\n"));
    let o = run(&["transient", "--dt", "1e-3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_passes_on_both_defaults() {
    for cfg in ["default.toml", "ferro.toml"] {
        let o = run(&["verify", "--config", shipped(cfg).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{cfg}");
        let text = String::from_utf8(o.stdout).unwrap();
        assert_eq!(text.matches("PASS").count(), 3, "{text}");
    }
}
