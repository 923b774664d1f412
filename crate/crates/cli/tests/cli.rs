use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ilw(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ilw")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn json(args: &[&str], out: &Path) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = ilw(&all, out);
    let report = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
    (o.status.code().unwrap(), report)
}

/// Numeric rows of a CSV written by the tool, skipping `#` lines and the header.
fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn wave_writes_matching_routes_and_a_plot() {
    let dir = tempfile::tempdir().unwrap();
    let o = ilw(&["wave"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("wave.csv")).unwrap();
    for key in ["# c = ", "# A = ", "# a = ", "# sigma = ", "# k1 = "] {
        assert!(text.contains(key), "{key}");
    }
    assert!(text.contains("x,phi_elliptic,phi_fourier,abs_diff"));
    let rows = csv_rows(&dir.path().join("wave.csv"));
    assert_eq!(rows.len(), 256);
    assert!(rows.iter().all(|r| r[3] < 1e-9));
    let trough = rows.iter().min_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert!((trough[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    let svg = std::fs::read_to_string(dir.path().join("wave.svg")).unwrap();
    assert!(svg.contains("width=\"800\"") && svg.contains("height=\"600\""));
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert!(ilw(&["wave", "--k", "0.7", "--N", "128"], dir.path()).status.success());
    }
    for file in ["wave.csv", "wave.svg"] {
        assert_eq!(std::fs::read(a.path().join(file)).unwrap(), std::fs::read(b.path().join(file)).unwrap());
    }
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["wave", "--k", "0.99"],
        vec!["wave", "--N", "63"],
        vec!["evolve", "--dt", "-1"],
        vec!["speed-scan", "--k-range", "0.5:0.99:4"],
        vec!["speed-scan", "--k-range", "0.5"],
        vec!["wave", "--scheme", "euler"],
        vec!["bogus"],
    ] {
        let o = ilw(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# wave settings\nk = 0.5\nN = 128\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, r) = json(&["wave", "--config", cfg], dir.path());
    assert_eq!(code, 0);
    assert_eq!((r["inputs"]["k"].as_f64(), r["inputs"]["N"].as_u64()), (Some(0.5), Some(128)));
    let (_, r) = json(&["wave", "--config", cfg, "--k", "0.3"], dir.path());
    assert_eq!(r["inputs"]["k"].as_f64(), Some(0.3));
    std::fs::write(dir.path().join("bad.cfg"), "colour = blue\n").unwrap();
    let o = ilw(&["wave", "--config", dir.path().join("bad.cfg").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn speed_scan_reports_k0_and_sign_checks() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = json(&["speed-scan", "--k-range", "0.1:0.9:17"], dir.path());
    assert_eq!(code, 0);
    assert!((r["outputs"]["k0"].as_f64().unwrap() - 0.795178532).abs() < 1e-6);
    assert!((r["outputs"]["k1"].as_f64().unwrap() - 0.944085037).abs() < 1e-6);
    let rows = csv_rows(&dir.path().join("speed_scan.csv"));
    assert_eq!(rows.len(), 17);
    assert!(rows.iter().all(|row| row[2] > 0.0 && row[5] > row[6]));
    for file in ["speed_scan_c.svg", "speed_scan_n.svg", "speed_scan_a.svg", "speed_scan.json"] {
        assert!(dir.path().join(file).exists(), "{file}");
    }
}

#[test]
fn stability_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = json(&["stability"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["verdict"], "LinearlyStable");
    assert_eq!(r["outputs"]["K_Ham"], 0);

    let (code, r) = json(&["stability", "--k", "0.5"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["n_L"], 1);
    assert_eq!(r["outputs"]["n_zero"], 1);
    assert!(r["outputs"]["I_direct"].as_f64().unwrap() > 0.0);

    let (code, r) = json(&["stability", "--k", "0.795178532122"], dir.path());
    assert_eq!(code, 1);
    assert_eq!(r["outputs"]["verdict"], "Inconclusive");
    assert!(r["outputs"]["I_direct"].as_f64().unwrap().is_finite());
    let failed: Vec<&str> = r["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["pass"] == false)
        .map(|a| a["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["verdict_linearly_stable"]);
}

#[test]
fn evolve_tracks_orbit_distance_and_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = json(&["evolve", "--t-end", "0.5", "--record-every", "50"], dir.path());
    assert_eq!(code, 0, "{r}");
    assert!(r["outputs"]["sup_rho_W"].as_f64().unwrap() < 1e-6);
    let text = std::fs::read_to_string(dir.path().join("evolve.csv")).unwrap();
    assert!(text.contains("t,rho_W,E_minus1,E_0,E_1,M_k"));
    let rows = csv_rows(&dir.path().join("evolve.csv"));
    assert_eq!(rows.len(), 11);
    assert!((rows.last().unwrap()[0] - 0.5).abs() < 1e-12);

    let (_, r) = json(&["evolve", "--t-end", "0.5", "--epsilon", "1e-3"], dir.path());
    let sup = r["outputs"]["sup_rho_W"].as_f64().unwrap();
    assert!(sup > 0.0 && sup <= 1e-2);
}
