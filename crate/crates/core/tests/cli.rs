use std::path::Path;
use std::process::{Command, Output};

fn maee(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maee"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn proposed_line(text: &str) -> &str {
    text.lines().find(|l| l.starts_with("proposed")).unwrap()
}

#[test]
fn solve_twice_gives_identical_output() {
    let a = maee(&["solve", "--seed", "7"]);
    let b = maee(&["solve", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    for scheme in [
        "proposed",
        "upper_bound",
        "max_throughput",
        "max_snr",
        "fpa",
        "oracle",
    ] {
        assert!(
            text.lines().any(|l| l.starts_with(scheme)),
            "{scheme} missing:\n{text}"
        );
    }
}

#[test]
fn trace_prints_csv_rows() {
    let o = maee(&["solve", "--seed", "3", "--trace"]);
    let text = stdout(&o);
    let header = text
        .lines()
        .position(|l| l == "outer,inner,x,alpha,objective,ee")
        .expect("trace header");
    assert!(text.lines().count() > header + 1);
}

#[test]
fn saved_instance_reproduces_the_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let first = maee(&["solve", "--seed", "11", "--out", out]);
    let fixture = dir.path().join("instance.txt");
    assert!(fixture.exists());
    assert!(dir.path().join("trace.csv").exists());
    let again = maee(&["solve", "--instance", fixture.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(
        proposed_line(&stdout(&first)),
        proposed_line(&stdout(&again))
    );
}

#[test]
fn sweep_writes_both_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = maee(&[
        "sweep",
        "--sweep",
        "power",
        "--values",
        "0.5,2",
        "--trials",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let trials = std::fs::read_to_string(out.join("trials.csv")).unwrap();
    // header + 2 values × 3 trials × 5 schemes
    assert_eq!(trials.lines().count(), 1 + 2 * 3 * 5);
    assert!(Path::new(&out.join("aggregate.csv")).exists());
}

#[test]
fn check_passes_on_defaults() {
    let o = maee(&["check", "--trials", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(maee(&["solve", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(maee(&["sweep", "--sweep", "volume"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "lambda = 0.01\nwarp = 9\n").unwrap();
    let o = maee(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warp"));
}

#[test]
fn unreachable_throughput_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hard.cfg");
    std::fs::write(&cfg, "# far beyond any channel\nR_TH = 1000\n").unwrap();
    let o = maee(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}
