use std::path::Path;
use std::process::{Command, Output};

fn gliou(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gliou")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV document as numbers (empty cells become NaN).
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let data = lines
        .map(|l| l.split(',').map(|c| if c.is_empty() { f64::NAN } else { c.parse().unwrap_or(f64::NAN) }).collect())
        .collect();
    (header, data)
}

fn column(header: &[String], data: &[Vec<f64>], name: &str) -> Vec<f64> {
    let j = header.iter().position(|h| h == name).unwrap();
    data.iter().map(|r| r[j]).collect()
}

#[test]
fn evolve_zero_damping_gives_polynomial_decay() {
    let o = gliou(&["evolve", "--gamma-d", "0", "--gamma-j", "1", "--omega", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# gliou "));
    assert!(text.lines().next().unwrap().contains("command=evolve gamma_d=0 gamma_j=1 omega=0"));
    let (h, d) = rows(&text);
    assert_eq!(d.len(), 201);
    for (t, p) in column(&h, &d, "t").iter().zip(column(&h, &d, "p2")) {
        assert!((p - 1.0 / (t + 2.0)).abs() < 1e-10);
    }
    assert!(column(&h, &d, "survivor_model").iter().all(|x| x.is_nan()));
}

#[test]
fn evolve_jump_free_stays_pure() {
    let o = gliou(&["evolve", "--gamma-d", "1", "--gamma-j", "0", "--omega", "0.24"]);
    let (h, d) = rows(&stdout(&o));
    assert!(column(&h, &d, "purity").iter().all(|p| (p - 1.0).abs() < 1e-10));
}

#[test]
fn evolve_lindblad_reaches_steady_state() {
    let o = gliou(&["evolve", "--gamma-d", "1", "--gamma-j", "1", "--omega", "2", "--t-max", "50"]);
    let (h, d) = rows(&stdout(&o));
    let last = d.len() - 1;
    let (x, y, z) = (column(&h, &d, "x")[last], column(&h, &d, "y")[last], column(&h, &d, "z")[last]);
    assert!(x.abs() < 1e-6 && (y + 4.0 / 9.0).abs() < 1e-6 && (z - 1.0 / 9.0).abs() < 1e-6);
}

#[test]
fn spectrum_at_zero_drive() {
    let o = gliou(&["spectrum", "--gamma-d", "1", "--gamma-j", "1", "--omega", "0"]);
    let (h, d) = rows(&stdout(&o));
    let mut re: Vec<f64> = (0..4).map(|i| column(&h, &d, &format!("re_l{i}"))[0]).collect();
    re.sort_by(f64::total_cmp);
    for (a, b) in re.iter().zip([-1.0, -0.5, -0.5, 0.0]) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn spectrum_sweep_finds_the_ep_root() {
    let o = gliou(&["spectrum", "--gamma-d", "1", "--gamma-j", "0.5", "--sweep", "omega:0.2:0.4", "--points", "2001"]);
    assert!(o.status.success());
    let (h, d) = rows(&stdout(&o));
    let gaps = column(&h, &d, "min_gap");
    let omegas = column(&h, &d, "omega");
    let k = (0..gaps.len()).min_by(|&a, &b| gaps[a].total_cmp(&gaps[b])).unwrap();
    let e = gliou(&["ep-locus", "--gamma-d", "1", "--gamma-j", "0.5"]);
    let (eh, ed) = rows(&stdout(&e));
    let root = column(&eh, &ed, "omega_root")[0];
    assert!((omegas[k] - root).abs() < 2e-4, "gap minimum {} vs root {root}", omegas[k]);
}

#[test]
fn ep_locus_grid_is_even() {
    let o = gliou(&["ep-locus", "--gamma-d-range", "-2:2:5", "--gamma-j-range", "0:2:3"]);
    let (h, d) = rows(&stdout(&o));
    let gd = column(&h, &d, "gamma_d");
    let gj = column(&h, &d, "gamma_j");
    let w = column(&h, &d, "omega_root");
    for i in 0..d.len() {
        let mirror: Vec<f64> = (0..d.len()).filter(|&k| gd[k] == -gd[i] && gj[k] == gj[i]).map(|k| w[k]).collect();
        assert!(mirror.iter().any(|&m| m == w[i] || (m.is_nan() && w[i].is_nan())));
    }
    let special = |g: f64, j: f64| (0..d.len()).find(|&k| gd[k] == g && gj[k] == j).map(|k| w[k]).unwrap();
    assert!((special(2.0, 0.0) - 1.0).abs() < 1e-9);
}

#[test]
fn trajectories_in_the_lindblad_limit_keep_every_trial() {
    let o = gliou(&[
        "trajectories", "--gamma-1", "0", "--gamma-2", "1", "--omega", "0.5", "--n-traj", "500", "--t-max", "3",
        "--points", "7",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, d) = rows(&stdout(&o));
    assert_eq!(h, ["t", "p2_mc", "stderr", "survivor_fraction", "survivor_model", "p2_master"]);
    assert!(column(&h, &d, "survivor_fraction").iter().all(|&f| f == 1.0));
}

#[test]
fn json_output() {
    let o = gliou(&["evolve", "--points", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["meta"]["command"], "evolve");
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert_eq!(v["columns"][0], "t");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "gamma_d = 0.0\ngamma_j = 1.0\npoints = 3\nt_max = 2.0\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = gliou(&["evolve", "--config", cfg.to_str().unwrap(), "--points", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (h, d) = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(d.len(), 5);
    assert_eq!(column(&h, &d, "t").last().copied(), Some(2.0));
}

#[test]
fn exit_codes() {
    assert_eq!(gliou(&["evolve", "--gamma-j=-1"]).status.code(), Some(2));
    assert_eq!(gliou(&["reproduce", "--panel", "fig7"]).status.code(), Some(2));
    assert_eq!(gliou(&["spectrum", "--sweep", "omega:0:1", "--sweep", "gamma_j:0:1"]).status.code(), Some(2));
    assert_eq!(gliou(&["trajectories", "--gamma-1", "1", "--gamma-2", "1", "--dt", "0.01"]).status.code(), Some(2));
    assert_eq!(gliou(&["evolve", "--psi0", "ket0"]).status.code(), Some(2));
    assert_eq!(gliou(&["evolve", "--out", "/nonexistent-dir/x.csv"]).status.code(), Some(1));
    // Pure Γ₁ decay from |1⟩ empties the selected ensemble.
    let o = gliou(&[
        "trajectories", "--gamma-1", "50", "--gamma-2", "0", "--psi0", "ket1", "--n-traj", "8", "--t-max", "2",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("postselected ensemble is empty"));
}

fn panel_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn reproduce_fig2c_and_fig3a() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(gliou(&["reproduce", "--panel", "fig2c", "--out", d, "--plot-stub"]).status.success());
    assert!(gliou(&["reproduce", "--panel", "fig3a", "--out", d]).status.success());
    assert_eq!(
        panel_files(dir.path()),
        [
            "fig2c_negative.csv", "fig2c_plot.py", "fig2c_positive.csv", "fig2c_zero.csv", "fig3a_collinearity.csv",
            "fig3a_ll.csv", "fig3a_nhh.csv", "fig3a_zdl.csv",
        ]
    );
    let neg = std::fs::read_to_string(dir.path().join("fig2c_negative.csv")).unwrap();
    assert!(neg.lines().next().unwrap().contains("panel=fig2c curve=negative gamma_d=-1 gamma_j=1 omega=0.24"));
    let (h, rows_) = rows(&std::fs::read_to_string(dir.path().join("fig3a_collinearity.csv")).unwrap());
    assert!(column(&h, &rows_, "residual")[0] <= 1e-10);
    let stub = std::fs::read_to_string(dir.path().join("fig2c_plot.py")).unwrap();
    assert!(stub.contains("fig2c_negative.csv"));
}

#[test]
fn reproduce_fig3e() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = gliou(&["reproduce", "--panel", "fig3e", "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        panel_files(dir.path()),
        ["fig3e_ll_master.csv", "fig3e_nhh_master.csv", "fig3e_zdl_analytic.csv", "fig3e_zdl_mc.csv"]
    );
    let (h, d) = rows(&std::fs::read_to_string(dir.path().join("fig3e_zdl_mc.csv")).unwrap());
    assert_eq!(d.len(), 201);
    let t = column(&h, &d, "t");
    let mc = column(&h, &d, "p2_mc");
    let se = column(&h, &d, "stderr");
    for k in 0..d.len() {
        assert!((mc[k] - 1.0 / (t[k] + 2.0)).abs() <= 3.0 * se[k] + 1e-12, "t = {}", t[k]);
    }
}
