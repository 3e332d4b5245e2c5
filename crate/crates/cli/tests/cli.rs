use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gkdv_core::io::{read_field, read_trajectory, write_field, write_trajectory};
use gkdv_core::spectral::airy_propagate;
use gkdv_core::{Grid, PhysicalField, Trajectory};

fn gkdv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkdv"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const ZERO: &str = r#"
[grid]
half_length = 10.0
n = 64
[nonlinearity]
kind = "polynomial"
coefficients = [0.0, 0.0, 1.0]
[solver]
dt = 0.01
t_final = 0.5
"#;

const KINK: &str = r#"
[grid]
half_length = 40.0
n = 512
[nonlinearity]
kind = "polynomial"
coefficients = [0.0, 0.0, 0.0, -1.0]
[background]
variant = "mkdv-kink"
c = 1.0
sign = "plus"
[solver]
dt = 1e-3
t_final = 1.0
save_every = 50
"#;

#[test]
fn zero_scenario_writes_zero_series() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "zero.toml", ZERO);
    let o = gkdv(
        dir.path(),
        &["run", "--config", "zero.toml", "--output", "out", "--quiet"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let run = dir.path().join("out/zero");
    let csv = fs::read_to_string(run.join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,I1,I2,I3,E,hs,hs_omega,boundary_mass");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 51);
    for row in rows {
        assert!(
            row.split(',').skip(1).all(|c| c.parse::<f64>().unwrap() == 0.0),
            "{row}"
        );
    }
    let traj = read_trajectory(&run.join("trajectory.bin")).unwrap();
    assert!(traj.frames().iter().all(|f| f.max_abs() == 0.0));
    let meta = fs::read_to_string(run.join("run.toml")).unwrap();
    assert!(meta.contains("exit_code = 0") && meta.contains("[config.grid]"));
    assert!(fs::read_to_string(run.join("trajectory.toml"))
        .unwrap()
        .contains("kind = \"trajectory\""));
}

#[test]
fn kink_zero_data_passes_exactness() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "kink.toml", KINK);
    let o = gkdv(dir.path(), &["run", "--config", "kink.toml", "--output", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("background-exactness PASS"), "{text}");
    assert!(text.contains("zero-persistence PASS"), "{text}");
    let verdicts = fs::read_to_string(dir.path().join("out/kink/verdicts.toml")).unwrap();
    assert!(verdicts.contains("[[verdict]]"));
}

#[test]
fn unresolved_grid_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        format!("{ZERO}\n[initial]\nkind = \"gaussian\"\namplitude = 1.0\nwidth = 0.2\n").replace("n = 64", "n = 32");
    write(dir.path(), "coarse.toml", &text);
    let o = gkdv(dir.path(), &["run", "--config", "coarse.toml", "--output", "out"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unresolved field"), "{}", stderr(&o));
    let meta = fs::read_to_string(dir.path().join("out/coarse/run.toml")).unwrap();
    assert!(meta.contains("exit_code = 3"));
}

#[test]
fn config_and_io_errors_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "typo.toml", &ZERO.replace("t_final", "t_end"));
    let o = gkdv(dir.path(), &["run", "--config", "typo.toml"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    write(dir.path(), "neg.toml", &ZERO.replace("dt = 0.01", "dt = -0.01"));
    assert_eq!(
        gkdv(dir.path(), &["run", "--config", "neg.toml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gkdv(dir.path(), &["run", "--config", "missing.toml"]).status.code(),
        Some(1)
    );
    assert_eq!(gkdv(dir.path(), &["run"]).status.code(), Some(2));
    assert_eq!(gkdv(dir.path(), &["frobnicate"]).status.code(), Some(2));
    write(
        dir.path(),
        "nofile.toml",
        &format!("{ZERO}\n[initial]\nkind = \"file\"\npath = \"nope.bin\"\n"),
    );
    assert_eq!(
        gkdv(dir.path(), &["run", "--config", "nofile.toml"]).status.code(),
        Some(1)
    );
}

#[test]
fn failed_verdict_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let text = ZERO
        .replace("coefficients = [0.0, 0.0, 1.0]", "coefficients = [0.0]")
        .replace("half_length = 10.0\nn = 64", "half_length = 30.0\nn = 256")
        + "\n[initial]\nkind = \"gaussian\"\namplitude = 1.0\nwidth = 2.0\n[diagnostics]\nlipschitz = [1e-2, 1e-3]\nlipschitz_bound = 0.5\n";
    write(dir.path(), "strict.toml", &text);
    let o = gkdv(dir.path(), &["run", "--config", "strict.toml", "--output", "out"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stdout(&o).contains("flow-lipschitz FAIL"));
    assert!(stderr(&o).contains("verdict failure: flow-lipschitz"));
}

#[test]
fn batch_reports_the_worst_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.toml", ZERO);
    write(dir.path(), "b.toml", &ZERO.replace("t_final", "t_end"));
    let o = gkdv(
        dir.path(),
        &[
            "run", "--config", "a.toml", "--config", "b.toml", "--jobs", "2", "--quiet", "--output", "out",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(dir.path().join("out/a/diagnostics.csv").exists());
}

#[test]
fn catalog_lists_families() {
    let dir = tempfile::tempdir().unwrap();
    let o = gkdv(dir.path(), &["catalog"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in [
        "mkdv-kink",
        "gardner-kink",
        "kdv-cnoidal",
        "mkdv-dnoidal",
        "synthetic",
        "tabulated",
        "polynomial",
        "exponential",
    ] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn temporal_study_is_fourth_order() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[grid]
half_length = 20.0
n = 256
[nonlinearity]
kind = "polynomial"
coefficients = [0.0, 0.0, 1.0]
[initial]
kind = "gaussian"
amplitude = 1.0
width = 2.0
[solver]
dt = 0.02
t_final = 0.5
[study]
kind = "temporal"
ladder = [0.02, 0.01, 0.005, 0.0025]
"#;
    write(dir.path(), "temporal.toml", text);
    let o = gkdv(dir.path(), &["study", "--config", "temporal.toml", "--output", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: toml::Table =
        toml::from_str(&fs::read_to_string(dir.path().join("out/temporal/study.toml")).unwrap()).unwrap();
    let p = summary["fitted"].as_float().unwrap();
    assert!((p - 4.0).abs() <= 0.3, "fitted order {p}");
    let csv = fs::read_to_string(dir.path().join("out/temporal/study.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    // a coarse save lattice must not merge ladder members
    write(
        dir.path(),
        "sparse.toml",
        &text.replace("t_final = 0.5", "t_final = 0.5\nsave_every = 100"),
    );
    let o = gkdv(dir.path(), &["study", "--config", "sparse.toml", "--output", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(dir.path().join("out/sparse/study.csv")).unwrap(),
        csv
    );
}

#[test]
fn spatial_study_reaches_the_floor() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[grid]
half_length = 20.0
n = 64
[nonlinearity]
kind = "polynomial"
coefficients = [0.0, 0.0, 1.0]
[initial]
kind = "gaussian"
amplitude = 1.0
width = 1.0
[solver]
dt = 1e-3
t_final = 0.1
tail_threshold = 1.0
[study]
kind = "spatial"
ladder = [64, 128, 256, 512]
"#;
    write(dir.path(), "spatial.toml", text);
    let o = gkdv(
        dir.path(),
        &["study", "--config", "spatial.toml", "--output", "out", "--quiet"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("out/spatial/study.csv")).unwrap();
    let errors: Vec<f64> = csv
        .lines()
        .skip(1)
        .take(3)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(errors[0] / errors[1] >= 10.0, "{errors:?}");
    assert!(errors[2] < 1e-11, "{errors:?}");
}

#[test]
fn bad_ladders_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for ladder in [
        "kind = \"temporal\"\nladder = [0.01, 0.02]",
        "kind = \"temporal\"\nladder = [0.3, 0.26]",
        "kind = \"viscosity\"\nladder = [0.1, 0.05]",
        "kind = \"spatial\"\nladder = [64, 63]",
    ] {
        write(dir.path(), "s.toml", &format!("{ZERO}\n[study]\n{ladder}\n"));
        assert_eq!(
            gkdv(dir.path(), &["study", "--config", "s.toml"]).status.code(),
            Some(2),
            "{ladder}"
        );
    }
    write(dir.path(), "none.toml", ZERO);
    assert_eq!(
        gkdv(dir.path(), &["study", "--config", "none.toml"]).status.code(),
        Some(2)
    );
}

fn free_fixture(dir: &Path) -> PathBuf {
    let grid = Grid::new(20.0, 128).unwrap();
    let u0 = PhysicalField::from_fn(grid, |x| (-(x * x) / 4.0).exp()).transform();
    let frames = (0..=20)
        .map(|m| airy_propagate(&u0, m as f64 * 0.05).inverse())
        .collect();
    let traj = Trajectory::new(grid, 0.0, 0.05, frames).unwrap();
    let path = dir.join("free.bin");
    write_trajectory(&path, &traj, None).unwrap();
    path
}

fn norm_table(csv: &str) -> Vec<(String, f64, String, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (
                c[0].to_string(),
                c[1].parse().unwrap(),
                c[2].to_string(),
                c[3].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn norms_of_free_solution() {
    let dir = tempfile::tempdir().unwrap();
    free_fixture(dir.path());
    write(
        dir.path(),
        "free-norms.toml",
        "trajectory = \"free.bin\"\ns = [0.0, 1.0]\nb = [0.0, 0.5, 1.0]\nextend = true\n",
    );
    let o = gkdv(
        dir.path(),
        &["norms", "--config", "free-norms.toml", "--output", "out", "--quiet"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = norm_table(&fs::read_to_string(dir.path().join("out/free-norms/norms.csv")).unwrap());
    assert_eq!(rows.len(), 12);
    for s in [0.0, 1.0] {
        let get = |name: &str, b: &str| rows.iter().find(|r| r.0 == name && r.1 == s && r.2 == b).unwrap().3;
        let l2 = get("l2t_hs", "");
        assert!((get("bourgain", "0") - l2).abs() <= 1e-8 * l2);
        assert!(get("bourgain", "0.5") > l2 && get("bourgain", "1") > get("bourgain", "0.5"));
    }
    // Pinned regression values (s, b, value).
    let pinned = [(0.0, "1", PIN_B1_S0), (1.0, "1", PIN_B1_S1), (1.0, "", PIN_SOBOLEV_S1)];
    for (s, b, want) in pinned {
        let name = if b.is_empty() { "sobolev" } else { "bourgain" };
        let got = rows.iter().find(|r| r.0 == name && r.1 == s && r.2 == b).unwrap().3;
        assert!((got - want).abs() <= 1e-10 * want, "{name} s={s} b={b}: {got:.15e}");
    }
}

const PIN_B1_S0: f64 = 4.641702692110892;
const PIN_B1_S1: f64 = 5.189581375451865;
// √(1.25·√(2π)) up to the periodic truncation
const PIN_SOBOLEV_S1: f64 = 1.770108850689345;

#[test]
fn norms_of_zero_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let traj = Trajectory::from_fn(Grid::new(10.0, 64).unwrap(), 0.0, 0.1, 11, |_, _| 0.0);
    write_trajectory(&dir.path().join("z.bin"), &traj, None).unwrap();
    write(
        dir.path(),
        "zn.toml",
        "trajectory = \"z.bin\"\ns = [0.0, 1.0]\nb = [0.5]\n",
    );
    let o = gkdv(dir.path(), &["norms", "--config", "zn.toml", "--output", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = norm_table(&fs::read_to_string(dir.path().join("out/zn/norms.csv")).unwrap());
    assert!(rows.iter().all(|r| r.3 == 0.0));
    fs::write(dir.path().join("z.bin"), b"garbage").unwrap();
    assert_eq!(
        gkdv(dir.path(), &["norms", "--config", "zn.toml"]).status.code(),
        Some(1)
    );
}

fn split_of(dir: &Path, name: &str, phi: &PhysicalField) -> (PhysicalField, PhysicalField, String) {
    write_field(&dir.join(format!("{name}.bin")), phi, None).unwrap();
    write(dir, &format!("{name}-split.toml"), &format!("input = \"{name}.bin\"\n"));
    let o = gkdv(
        dir,
        &["split", "--config", &format!("{name}-split.toml"), "--output", "out"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.join(format!("out/{name}-split"));
    (
        read_field(&out.join("psi0.bin")).unwrap(),
        read_field(&out.join("u0.bin")).unwrap(),
        stdout(&o),
    )
}

#[test]
fn split_constant_and_tanh() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::new(20.0, 256).unwrap();
    let c = PhysicalField::from_fn(grid, |_| 0.75);
    let (psi, u, _) = split_of(dir.path(), "const", &c);
    assert!(psi.values().iter().all(|&v| (v - 0.75).abs() < 1e-14));
    assert!(u.max_abs() < 1e-14);
    let phi = PhysicalField::from_fn(grid, f64::tanh);
    let (psi, u, text) = split_of(dir.path(), "tanh", &phi);
    assert!(psi.max_abs() <= 1.0);
    let reported: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("psi0_linf = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(reported <= 1.0);
    for ((p, v), f) in psi.values().iter().zip(u.values()).zip(phi.values()) {
        assert_eq!(p + v, *f);
    }
}
