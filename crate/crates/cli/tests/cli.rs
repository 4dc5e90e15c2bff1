use std::path::Path;
use std::process::{Command, Output};

use nanolase::engine::{run_ensemble, SimConfig};
use nanolase::observables::PhotonStatistics;
use nanolase::LaserParams;
use nanolase_cli::config::{parse_config, preset, Method};
use nanolase_cli::sweep::{sweep, COLUMNS};
use tempfile::TempDir;

const LASER: &str = r#"
[laser]
g = 0.1
kappa = 0.04
gamma_a = 0.012
gamma_d = 1.0
n0 = 1
pump = 0.1
"#;

const FAST: &str = r#"
[simulation]
t_end = 3000.0
burn_in = 200.0
sample_dt = 0.5
max_lag = 200
n_traj = 2
base_seed = 11
"#;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nanolase"));
    cmd.env_remove("NANOLASE_OUT").env("RUST_LOG", "error");
    cmd
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("run")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn table(out: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(header, COLUMNS);
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

fn without_wall_time(rows: &[Vec<String>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r[..r.len() - 1].to_vec()).collect()
}

#[test]
fn check_echo_round_trips() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "min.toml", LASER);
    let first = bin().arg("check").arg(&cfg).output().unwrap();
    assert!(first.status.success());
    let dumped = String::from_utf8(first.stdout).unwrap();
    let again = write(tmp.path(), "echo.toml", &dumped);
    let second = bin().arg("check").arg(&again).output().unwrap();
    assert_eq!(String::from_utf8(second.stdout).unwrap(), dumped);
    assert_eq!(parse_config(&dumped).unwrap(), parse_config(LASER).unwrap());
}

#[test]
fn master_equation_beyond_cap_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.toml", &LASER.replace("n0 = 1", "n0 = 5"));
    let out = run(&cfg, &tmp.path().join("out"), &["--methods", "sta,me"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("n0 <= 3"), "{err}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn photonic_crystal_caption_rates() {
    let cfg = preset("fig2").unwrap();
    assert_eq!(
        (cfg.laser.g, cfg.laser.kappa, cfg.laser.gamma_a, cfg.laser.gamma_d, cfg.laser.n0),
        (0.1, 0.04, 0.012, 1.0, 5)
    );
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let missing = run(&tmp.path().join("nope.toml"), tmp.path(), &[]);
    assert_eq!(missing.status.code(), Some(1));

    let bad = write(tmp.path(), "bad.toml", "[laser\n");
    assert_eq!(run(&bad, tmp.path(), &[]).status.code(), Some(1));

    let negative = write(tmp.path(), "neg.toml", &LASER.replace("pump = 0.1", "pump = -0.1"));
    let out = run(&negative, tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("laser.pump"));

    let unknown = run(&write(tmp.path(), "ok.toml", LASER), tmp.path(), &["--methods", "sta,xyz"]);
    assert_eq!(unknown.status.code(), Some(1));

    // Output path occupied by a regular file.
    let blocker = write(tmp.path(), "blocker", "");
    let cfg = write(tmp.path(), "fast.toml", &format!("methods = [\"meanfield\"]\n{LASER}"));
    assert_eq!(run(&cfg, &blocker, &[]).status.code(), Some(2));

    assert_eq!(bin().args(["presets", "fig9"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn empty_method_list_writes_no_plots() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.toml", &format!("methods = []\n{LASER}"));
    let out_dir = tmp.path().join("out");
    let out = run(&cfg, &out_dir, &[]);
    assert!(out.status.success());
    assert!(table(&out_dir).is_empty());
    assert!(!out_dir.join("plots").exists());

    let out = run(&write(tmp.path(), "d.toml", LASER), &tmp.path().join("out2"), &["--methods", ""]);
    assert!(out.status.success());
    assert!(!tmp.path().join("out2").join("plots").exists());
}

#[test]
fn same_seed_reproduces_outputs_for_any_thread_count() {
    let tmp = TempDir::new().unwrap();
    let text = format!(
        "methods = [\"sta\", \"me\", \"analytic\", \"meanfield\"]\n{LASER}[sweep]\nvalues = [0.05, 0.2]\n{FAST}"
    );
    let cfg = write(tmp.path(), "c.toml", &text);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run(&cfg, &a, &["--threads", "1"]).status.success());
    assert!(run(&cfg, &b, &["--threads", "2"]).status.success());
    let rows = table(&a);
    assert_eq!(rows.len(), 8);
    assert_eq!(without_wall_time(&rows), without_wall_time(&table(&b)));
    for entry in std::fs::read_dir(a.join("coherence")).unwrap() {
        let path = entry.unwrap().path();
        let twin = b.join("coherence").join(path.file_name().unwrap());
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(twin).unwrap(), "{path:?}");
    }
    let svg = std::fs::read(a.join("plots/point_000_phase_portrait.csv")).unwrap();
    assert_eq!(svg, std::fs::read(b.join("plots/point_000_phase_portrait.csv")).unwrap());

    let c = tmp.path().join("c");
    assert!(run(&cfg, &c, &["--seed", "12"]).status.success());
    assert_ne!(without_wall_time(&rows), without_wall_time(&table(&c)));
}

#[test]
fn pump_columns_are_consistent() {
    let text = format!(
        "methods = [\"meanfield\", \"analytic\"]\n{}[sweep]\nconvention = \"total\"\nstart = 0.05\nstop = 50.0\npoints = 7\n",
        LASER.replace("n0 = 1", "n0 = 5")
    );
    let cfg = parse_config(&text).unwrap();
    let result = sweep(&cfg);
    assert_eq!(result.rows.len(), 14);
    for r in &result.rows {
        assert_eq!(r.status, "ok");
        let rel = (r.pump_total - f64::from(r.n0) * r.pump_per_emitter).abs() / r.pump_total;
        assert!(rel < 1e-15, "{r:?}");
    }
    assert!((result.rows[0].pump_total - 0.05).abs() < 1e-15);
    assert!((result.rows[13].pump_total - 50.0).abs() < 1e-12);
}

#[test]
fn single_point_sweep_equals_single_run() {
    let grid = parse_config(&format!("methods = [\"sta\"]\n{LASER}[sweep]\nvalues = [0.1]\n{FAST}")).unwrap();
    let single = parse_config(&format!("methods = [\"sta\"]\n{LASER}{FAST}")).unwrap();
    let (a, b) = (sweep(&grid), sweep(&single));
    let strip = |mut r: nanolase_cli::sweep::Row| {
        r.wall_time_s = 0.0;
        r
    };
    assert_eq!(strip(a.rows[0].clone()), strip(b.rows[0].clone()));

    // The same numbers come straight out of the engine.
    let params = LaserParams::photonic_crystal(0.1).with_emitters(1);
    let trajs = run_ensemble(&params, 2, 11, &SimConfig::new(3000.0, 200.0, 0.5)).unwrap();
    let stats = PhotonStatistics::from_ensemble(&trajs).unwrap();
    assert_eq!(a.rows[0].g2_zero, stats.g2_zero);
    assert_eq!(a.rows[0].mean_photons, Some(stats.mean));
}

#[test]
fn emitter_sweep_limits_master_equation_to_small_devices() {
    let mut cfg = preset("fig4").unwrap();
    cfg.sweep.as_mut().unwrap().emitters = Some(vec![1, 3, 10]);
    cfg.methods = vec![Method::Me, Method::Meanfield];
    let result = sweep(&cfg);
    let me: Vec<u32> = result.rows.iter().filter(|r| r.method == "me").map(|r| r.n0).collect();
    let mf: Vec<u32> = result.rows.iter().filter(|r| r.method == "meanfield").map(|r| r.n0).collect();
    assert_eq!(me, vec![1, 3]);
    assert_eq!(mf, vec![1, 3, 10]);
    assert!(result.rows.iter().all(|r| r.status.starts_with("ok")), "{:?}", result.rows);
    assert!(result.rows.iter().all(|r| r.pump_per_emitter == 0.63));
}

#[test]
fn phase_portrait_ring_above_threshold_and_origin_below() {
    let five = LASER.replace("n0 = 1", "n0 = 5");
    let empty_fraction = |pump: f64| {
        let text = format!(
            "methods = [\"sta\"]\n{}[simulation]\nt_end = 4000.0\nburn_in = 500.0\nsample_dt = 1.0\nmax_lag = 100\nn_traj = 1\n",
            five.replace("pump = 0.1", &format!("pump = {pump}"))
        );
        let result = sweep(&parse_config(&text).unwrap());
        let t = &result.trajectories[0];
        t.field.iter().filter(|e| e.norm() < 0.5).count() as f64 / t.field.len() as f64
    };
    // Lasing: the empty field is never visited and samples sit on a ring.
    assert!(empty_fraction(0.6) < 0.01);
    // Well below threshold the field is mostly at the origin.
    assert!(empty_fraction(0.002) > 0.8);
}
