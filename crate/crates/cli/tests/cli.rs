use std::fs;
use std::process::Command;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bench"))
}

fn pf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pf"))
}

fn strip_elapsed(csv: &str) -> String {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f[4] = "";
            f.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn run_small(dir: &std::path::Path, name: &str, workers: &str) -> String {
    let out = dir.join(name);
    let status = bench()
        .args(["run", "--algorithms", "systematic,metropolis", "--n", "2^6,2^8", "--y", "0,1"])
        .args(["--reps", "10", "--precision", "f32", "--seed", "7", "--workers", workers])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    fs::read_to_string(out).unwrap()
}

#[test]
fn bench_run_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_small(dir.path(), "a.csv", "1");
    let b = run_small(dir.path(), "b.csv", "8");
    assert!(a.starts_with("algorithm,N,y,replicate,elapsed_ns,mse,extras\n"));
    assert_eq!(a.lines().count(), 1 + 2 * 2 * 2 * 10);
    assert_eq!(strip_elapsed(&a), strip_elapsed(&b));
    assert!(a.lines().skip(1).all(|l| l.starts_with("systematic") || l.contains("B=")));
}

#[test]
fn aggregate_produces_one_row_per_group() {
    let dir = tempfile::tempdir().unwrap();
    run_small(dir.path(), "run.csv", "2");
    let out = dir.path().join("rmse.csv");
    let status = bench()
        .arg("aggregate")
        .arg("--in")
        .arg(dir.path().join("run.csv"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("algorithm,N,y,rmse,replicates"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert!(f[3].parse::<f64>().unwrap() > 0.0);
        assert_eq!(f[4], "10");
    }
}

#[test]
fn bench_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    for args in [["--algorithms", "residual"], ["--n", "1"], ["--y", "a:b"]] {
        let status = bench().arg("run").args(args).arg("--reps").arg("1").arg("--out").arg(&out).status().unwrap();
        assert!(!status.success(), "{args:?}");
    }
}

#[test]
fn pf_demo_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pf.csv");
    let status = pf()
        .args(["demo", "--resampler", "rejection", "--n", "2000", "--steps", "25", "--seed", "3"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,filtered_mean,ess,resampled,oracle_mean"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 25);
    for (t, r) in rows.iter().enumerate() {
        assert_eq!(r[0], (t + 1).to_string());
        let (m, ess, oracle): (f64, f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap(), r[4].parse().unwrap());
        assert!((m - oracle).abs() < 0.15, "step {t}: {m} vs {oracle}");
        assert!((1.0..=2000.0).contains(&ess));
        assert!(r[3] == "true" || r[3] == "false");
    }
}

#[test]
fn pf_demo_rejects_unknown_resampler() {
    let dir = tempfile::tempdir().unwrap();
    let status = pf()
        .args(["demo", "--resampler", "residual", "--out"])
        .arg(dir.path().join("pf.csv"))
        .status()
        .unwrap();
    assert!(!status.success());
}
