use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: &[&str] = &["--L", "4", "--n", "4", "--order", "1", "--tau-min", "-1", "--tau-max", "1", "--tau-step", "0.5"];

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wedge-spectra"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("WEDGE_SPECTRA_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().chain(SMALL).copied().collect()
}

#[test]
fn constants_prints_and_writes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["constants", "--format", "csv,json"], dir.path());
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("Theta0"));
    assert!(stdout.contains("Theta0 < Xi0 <= sqrt(4-pi): true"));
    let j: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("constants.json")).unwrap()).unwrap();
    let theta0 = j["Theta0"].as_f64().unwrap();
    assert!((theta0 - 0.59).abs() < 0.001);
    let csv = std::fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    assert!(csv.starts_with("name,value\nTheta0,0.59010"));
}

#[test]
fn band_output_is_byte_deterministic_and_plots_have_sidecars() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = with_small(&["band", "--alpha", "0.8pi", "--format", "csv,json,svg"]);
    assert_eq!(code(&run(&args, a.path())), 0);
    assert_eq!(code(&run(&args, b.path())), 0);
    for f in ["band.csv", "band.json", "band.svg", "band_plot.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs between runs");
    }
    let csv = std::fs::read_to_string(a.path().join("band.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "tau,s_value,L,n,order,residual");
    assert_eq!(lines.len(), 6);
    let sidecar = std::fs::read_to_string(a.path().join("band_plot.csv")).unwrap();
    let band_rows = sidecar.lines().filter(|l| l.starts_with("s(tau),")).count();
    assert_eq!(band_rows, 5);
    assert!(sidecar.lines().any(|l| l.starts_with("sigma(theta+),")));
    // the sidecar holds exactly the band values of the CSV
    for (row, plotted) in lines[1..].iter().zip(sidecar.lines().filter(|l| l.starts_with("s(tau),"))) {
        let c: Vec<&str> = row.split(',').collect();
        assert_eq!(plotted, format!("s(tau),{},{}", c[0], c[1]));
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = with_small(&["band", "--alpha", "0.6pi", "--field", "0.3,0.5,0.8"]);
    assert_eq!(code(&run(&args, a.path())), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_wedge-spectra"))
        .args(&args)
        .arg("--out")
        .arg(b.path())
        .env("WEDGE_SPECTRA_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(a.path().join("band.csv")).unwrap(), std::fs::read(b.path().join("band.csv")).unwrap());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // empty tau grid
    let o = run(&with_small(&["band"]).into_iter().chain(["--tau-min", "2"]).collect::<Vec<_>>(), dir.path());
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["band", "--order", "3"], dir.path())), 2);
    assert_eq!(code(&run(&["band", "--no-such-flag"], dir.path())), 2);
    assert_eq!(code(&run(&["compare", "--field", "0,0,0"], dir.path())), 2);
    assert_eq!(code(&run(&["sweep-alpha", "--alpha-list", "0.99pi"], dir.path())), 2);
    assert_eq!(code(&run(&["band", "--gamma", "0.3"], dir.path())), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_wedge-spectra"))
        .args(["constants", "--out"])
        .arg(dir.path())
        .env("WEDGE_SPECTRA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"L": 4.0, "n": 4, "order": 1, "tau_min": -1.0, "tau_max": 1.0, "tau_step": 1.0, "alpha": 2.0}"#)
        .unwrap();
    let out = dir.path().join("out");
    let o = run(&["band", "--config", cfg.to_str().unwrap(), "--tau-step", "0.5"], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("band.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().skip(1).all(|l| l.contains(",4,4,1,")), "{csv}");

    std::fs::write(&cfg, r#"{"n": 4, "colour": "red"}"#).unwrap();
    assert_eq!(code(&run(&["band", "--config", cfg.to_str().unwrap()], &out)), 2);
    std::fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(code(&run(&["band", "--config", cfg.to_str().unwrap()], &out)), 2);
}

#[test]
fn real_field_eigenvectors_have_zero_imaginary_part() {
    let dir = tempfile::tempdir().unwrap();
    let args = with_small(&["eigenfunctions", "--tau-list", "-1,2", "--format", "csv,json"]);
    let o = run(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["eigvec_tau_m1.txt", "eigvec_tau_2.txt"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x1 x2 re(v) im(v) |v|");
        for l in lines {
            let cols: Vec<&str> = l.split_whitespace().collect();
            assert_eq!(cols.len(), 5);
            assert_eq!(cols[3].parse::<f64>().unwrap(), 0.0, "{l}");
        }
    }
    let j: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("eigenfunctions.json")).unwrap()).unwrap();
    let rows = j.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["generalized"]["tau_c"].as_f64().unwrap(), -1.0);
}

#[test]
fn compare_reports_essential_spectrum_by_class() {
    let dir = tempfile::tempdir().unwrap();
    let theta0 = 0.590106;
    // field along the edge: tangent to both faces
    let o = run(&with_small(&["compare", "--field", "0,0,1", "--alpha", "0.5pi"]), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["report"]["klass"], "tangent");
    assert!((j["report"]["E_star"].as_f64().unwrap() - theta0).abs() < 1e-6);
    assert!(j["report"]["s_ess_inf"].as_f64().unwrap() >= theta0 - 1e-9);
    assert!(dir.path().join("compare.csv").exists());

    let o = run(&with_small(&["compare", "--field", "0,1,0", "--alpha", "0.3pi"]), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["report"]["klass"], "outgoing");
    assert_eq!(j["report"]["s_ess_inf"], "inf");
    assert!(j["bounds"]["bound_gauss"].as_f64().is_some());

    let o = run(&with_small(&["compare", "--field", "0.7071067811865476,0.7071067811865476,0", "--alpha", "0.8pi"]), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["report"]["klass"], "ingoing");
    assert_eq!(j["report"]["s_ess_inf"].as_f64().unwrap(), 1.0);
}

#[test]
fn sweep_records_rows_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let args = with_small(&["sweep-alpha", "--field", "0,0,1", "--alpha-list", "0.4pi,0.6pi", "--format", "csv,svg"]);
    let o = run(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "alpha,E,E_star,s_ess_inf,klass,strict,bound_small_angle");
    assert_eq!(lines.count(), 2);
    let sidecar = std::fs::read_to_string(dir.path().join("sweep_plot.csv")).unwrap();
    assert!(sidecar.lines().any(|l| l.starts_with("Theta0,")));
    assert!(dir.path().join("sweep.svg").exists());
}
