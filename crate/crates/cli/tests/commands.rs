use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use allspeed::grid::Boundary;
use allspeed::io::load_dump;

fn allspeed(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_allspeed"))
        .args(args)
        .current_dir(dir)
        .env("ALLSPEED_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_from_config_writes_dumps_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("gresho.cfg"),
        "[problem]\nproblem = gresho\neps = 1e-2\n[grid]\nnx = 12\nny = 12\n\
         [scheme]\nscheme = lp-multid\nt_end = 0.02\n[output]\nout = res\ndiag_every = 0.01\ndump_every = 0.01\n",
    )
    .unwrap();
    let o = allspeed(&["run", "--config", "gresho.cfg"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("res");
    let diag = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    let mut lines = diag.lines();
    assert_eq!(lines.next().unwrap(), allspeed::diagnostics::CSV_HEADER);
    assert_eq!(lines.count(), 3);
    let (f, t) = load_dump(
        &out.join("dump_0002.txt"),
        Boundary::Periodic,
        Boundary::Periodic,
    )
    .unwrap();
    assert_eq!(t, 0.02);
    assert_eq!(f.spec().nx, 12);
    assert!(out.join("run.cfg").exists());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.cfg"),
        "problem = gresho\nscheme = lp-split\nnx = 40\nny = 40\nt_end = 5\n",
    )
    .unwrap();
    let o = allspeed(
        &[
            "run", "--config", "c.cfg", "--nx", "8", "--ny", "8", "--t-end", "0.001", "--cfl",
            "0.4", "--out", "o",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg =
        allspeed_cli::parse_config(&fs::read_to_string(dir.path().join("o/run.cfg")).unwrap())
            .unwrap();
    assert_eq!(
        (cfg.problem.nx, cfg.scheme.cfl, cfg.scheme.t_end),
        (8, 0.4, 0.001)
    );
}

#[test]
fn radial_runs_write_a_scatter_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = allspeed(
        &[
            "run",
            "--problem",
            "radial-sod",
            "--scheme",
            "lp-multid",
            "--nx",
            "16",
            "--ny",
            "16",
            "--t-end",
            "0.01",
            "--out",
            "r",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("r/scatter.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "r,rho,vrad,p");
    assert_eq!(csv.lines().count(), 1 + 256);
}

#[test]
fn bad_invocations_fail_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let o = allspeed(&["run"], dir.path());
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("problem, scheme, nx, ny, t_end"),
        "{}",
        stderr(&o)
    );

    fs::write(
        dir.path().join("bad.cfg"),
        "problem = gresho\nscheme = bogus\n",
    )
    .unwrap();
    let o = allspeed(&["run", "--config", "bad.cfg"], dir.path());
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("line 2") && stderr(&o).contains("relax-multid"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn failed_runs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("f.cfg"),
        "problem = gresho\nscheme = relax-split\nnx = 16\nny = 16\nt_end = 0.2\ncfl = 40\nmax_halvings = 0\nout = x\n",
    )
    .unwrap();
    let o = allspeed(&["run", "--config", "f.cfg"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("stopped early"), "{}", stderr(&o));
    // the last valid state is still dumped
    assert!(dir.path().join("x/dump_0001.txt").exists());
}

#[test]
fn stability_scan_reports_the_maximum() {
    let dir = tempfile::tempdir().unwrap();
    let o = allspeed(&["stability-scan", "--cfl", "1.0", "--n", "16"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("stability.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "beta_x,beta_y,spectral_radius");
    assert_eq!(csv.lines().count(), 1 + 256);
    let max = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(max <= 1.0 + 1e-12);
    assert!(stdout(&o).contains("max spectral radius"));
}

#[test]
fn toy_writes_the_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let o = allspeed(
        &["toy", "--tau", "0.5", "--eps", "0.01", "--steps", "10"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("toy.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n,t,q");
    let last: Vec<f64> = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(last, vec![10.0, 0.05, 0.5f64.powi(10)]);
}

#[test]
fn oracle_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let o = allspeed(
        &["sample-nullspace", "--nx", "6", "--ny", "5", "--seed", "9"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(dir.path().join("nullspace.csv"))
            .unwrap()
            .lines()
            .count(),
        31
    );

    let o = allspeed(&["riemann", "--n", "50"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("p* = 0.303130"), "{}", stdout(&o));
    assert_eq!(
        fs::read_to_string(dir.path().join("riemann.csv"))
            .unwrap()
            .lines()
            .count(),
        51
    );

    let o = allspeed(&["riemann", "--left", "1,0"], dir.path());
    assert!(!o.status.success());
}
