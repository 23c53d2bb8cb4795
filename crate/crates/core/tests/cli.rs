use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_bcdpf");

const TINY: &str = "\
preset = desk-small
# a short scenario
time_slots = 5
runs = 2
particles = 60
trackers = exact,ncpf,dpf-sbc,dpf-bp
";

fn bcdpf(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    fs::write(&cfg, TINY).unwrap();
    let outs: Vec<_> = ["a", "b"].iter().map(|d| dir.path().join(d)).collect();
    for out in &outs {
        let o = bcdpf(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = read_dir_sorted(&outs[0]);
    let b = read_dir_sorted(&outs[1]);
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    for expected in ["estimates.csv", "summary.csv", "manifest.txt", "graph.txt"] {
        assert!(names.contains(&expected), "missing {expected} in {names:?}");
    }
    assert_eq!(a, b);
}

#[test]
fn estimates_table_has_one_row_per_slot_tracker_run_and_node() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    fs::write(&cfg, TINY).unwrap();
    let out = dir.path().join("o");
    let o = bcdpf(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("estimates.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,tracker,run,node,est_x1,est_x2,err"));
    assert_eq!(lines.count(), 5 * 4 * 2 * 25);
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    fs::write(&cfg, TINY).unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    assert!(bcdpf(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        first.to_str().unwrap()
    ])
    .status
    .success());
    let manifest = first.join("manifest.txt");
    assert!(bcdpf(&[
        "simulate",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(
        fs::read(first.join("estimates.csv")).unwrap(),
        fs::read(second.join("estimates.csv")).unwrap()
    );
}

#[test]
fn cost_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = bcdpf(&[
        "cost",
        "--preset",
        "paper-loopy-45",
        "--radii",
        "40:50:10",
        "--networks",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("cost.csv")).unwrap();
    assert!(csv.starts_with("R,method,packets_per_node\n"));
    assert!(csv.lines().any(|l| l.starts_with("40,dpf,")));
}

#[test]
fn analyze_alpha_prints_the_report() {
    let o = bcdpf(&["analyze-alpha", "--kind", "even-cycle:4"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("alpha_max = 2\n"));
}

#[test]
fn unknown_preset_is_an_error() {
    let o = bcdpf(&["simulate", "--preset", "no-such-preset", "--out", "/nonexistent/never"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("preset"));
}

#[test]
fn malformed_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "runs = 3\nparticles = many\n").unwrap();
    let o = bcdpf(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2:"));
}
