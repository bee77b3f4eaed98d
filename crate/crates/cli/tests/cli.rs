use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use eustat::parse_config;

fn eustat(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eustat"));
    cmd.args(args).env_remove("EUSTAT_JOBS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn error_record(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("an error line");
    serde_json::from_str(line).expect("JSON error record")
}

const SHEAR: &str = "\
[grid]
n = 32
box_half_width = 3.141592653589793
[solver]
nu = 0.01
dt = 0.05
boundary_guard_tol = none
[measure]
profiles = sine:1,0,1
[verify]
q = 2
";

#[test]
fn shear_l2_decays_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SHEAR);
    let out = tmp.path().join("run");
    let res = eustat(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(out.join("apriori.csv")).unwrap();
    assert!(csv.starts_with("series_id,t,value\n"));
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .filter(|l| l.starts_with("vorticity_L2,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 11);
    let initial = rows[0].1;
    for (t, v) in rows {
        let exact = (-0.01 * t).exp() * initial;
        assert!((v - exact).abs() <= 1e-10 * exact, "t={t}: {v} vs {exact}");
    }
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 12);
}

const ENSEMBLE: &str = "\
[sigma]
horizon_T = 0.2
[solver]
dt = 0.05
save_times = uniform:2
[measure]
n_atoms = 3
master_seed = 11
";

#[test]
fn ensemble_artifacts_are_reproducible_and_jobs_independent() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), ENSEMBLE);
    let run = |name: &str, jobs: &str| {
        let out = tmp.path().join(name);
        let res = eustat(
            &["ensemble", "--config", &cfg, "--out", out.to_str().unwrap()],
            &[("EUSTAT_JOBS", jobs)],
        );
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        (dir_contents(&out), String::from_utf8(res.stdout).unwrap())
    };
    let (a, stdout_a) = run("a", "1");
    let (b, stdout_b) = run("b", "1");
    let (c, _) = run("c", "3");
    assert_eq!(a.len(), 3 * 3 + 1);
    assert!(a.contains_key("manifest.txt"));
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(stdout_a.contains("manifest_sha256 = "));
    assert_eq!(stdout_a, stdout_b);

    let out = tmp.path().join("d");
    let res = eustat(
        &["ensemble", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", "2", "--seed", "12"],
        &[],
    );
    assert!(res.status.success());
    assert_ne!(dir_contents(&out)["manifest.txt"], a["manifest.txt"]);
}

#[test]
fn verify_exit_status_follows_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    let base = "[solver]\ndt = 0.05\nsave_times = uniform:4\n[measure]\nn_atoms = 3\nmaster_seed = 5\n";
    let cfg = write_config(tmp.path(), &format!("{base}[verify]\nlaws = energy,vorticity\nq = 2,inf\n"));
    let out = tmp.path().join("pass");
    let res = eustat(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
    let csv = std::fs::read_to_string(out.join("verdicts.csv")).unwrap();
    assert!(csv.starts_with("law_id,time,lhs,rhs,margin,pass\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 5);

    // A zero tolerance on a residual that is only small, not zero, must fail.
    let cfg = write_config(
        tmp.path(),
        &format!("{base}[verify]\nlaws = foias_liouville\nfl_tolerance = 0\n"),
    );
    let out = tmp.path().join("fail");
    let res = eustat(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stdout).contains("FAIL foias_liouville_first_moment"));
}

#[test]
fn studies_write_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[sigma]\nhorizon_T = 0.5\n[solver]\ndt = 0.05\nsave_times = uniform:2\nboundary_guard_tol = 1e-6\n\
[measure]\nn_atoms = 2\n[verify]\nnu_schedule = 0.02,0.01\nepsilon_schedule = 0.4,0.2,0.1\nfl_strides = 2,1\n",
    );
    for (cmd, table) in [
        ("inviscid-limit", "inviscid_limit.csv"),
        ("uniqueness-probe", "uniqueness_probe.csv"),
        ("foias-liouville", "foias_liouville.csv"),
    ] {
        let out = tmp.path().join(cmd);
        let res = eustat(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
        assert!(matches!(res.status.code(), Some(0 | 1)), "{cmd}: {}", String::from_utf8_lossy(&res.stderr));
        assert!(out.join(table).exists(), "{cmd}");
        assert!(out.join("verdicts.csv").exists(), "{cmd}");
    }
}

#[test]
fn info_output_parses_back() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[measure]\nn_atoms = 2\n[solver]\nnu = 0.001\n");
    let res = eustat(&["info", "--config", &cfg], &[]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.contains("# a = "));
    assert!(text.contains("# grad_sigma_sup = "));
    assert!(text.contains("# gamma min/mean/max = "));
    let original = parse_config(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    assert_eq!(parse_config(&text).unwrap(), original);
}

#[test]
fn errors_are_json_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[solver]\nnu = -1\n");
    let res = eustat(&["simulate", "--config", &cfg], &[]);
    assert_eq!(res.status.code(), Some(2));
    let rec = error_record(&res);
    assert_eq!(rec["code"], "ValidationError");
    assert_eq!(rec["module"], "experiment-cli");
    assert!(rec["message"].as_str().unwrap().contains("nu ≥ 0"));

    let cfg = write_config(tmp.path(), "[solver]\nnu = 0.1\nnu = 0.2\n");
    let rec = error_record(&eustat(&["info", "--config", &cfg], &[]));
    assert_eq!(rec["code"], "ParseError");
    assert!(rec["message"].as_str().unwrap().starts_with("line 3:"));

    let missing = tmp.path().join("missing.cfg");
    let rec = error_record(&eustat(&["info", "--config", missing.to_str().unwrap()], &[]));
    assert_eq!(rec["code"], "IoError");

    // The dipole in a box this small reaches the guard annulus.
    let cfg = write_config(tmp.path(), "[grid]\nbox_half_width = 2\n[sigma]\nsupport_radius = 0.4\n");
    let res = eustat(&["ensemble", "--config", &cfg, "--out", tmp.path().join("x").to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_record(&res)["code"], "ClassViolation");
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 2);
}
