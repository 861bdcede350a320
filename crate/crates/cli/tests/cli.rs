use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn zx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zx"))
        .arg("--output-dir")
        .arg(dir)
        .arg("--workers")
        .arg("2")
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("spawn zx")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn coeffs_table_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out = zx(dir.path(), &["coeffs", "--n-max", "18"]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    let text = read(dir.path(), "alphas.txt");
    assert!(text.contains(" 12      851308.97"), "{text}");
    assert!(text.contains(" 18        7.70e12"));
    let csv = read(dir.path(), "alphas.csv");
    let again = tempfile::tempdir().unwrap();
    zx(again.path(), &["coeffs", "--n-max", "18"]);
    assert_eq!(csv, read(again.path(), "alphas.csv"));
    assert_eq!(text, read(again.path(), "alphas.txt"));
}

#[test]
fn coeffs_n_max_zero_has_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    assert!(zx(dir.path(), &["coeffs", "--n-max", "0"]).status.success());
    let csv = read(dir.path(), "alphas.csv");
    let ns: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["-2", "-1", "0"]);
}

#[test]
fn verify_small_sieve_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.jsonl");
    let out = zx(
        dir.path(),
        &["verify", "--x-max", "1000", "--report", report.to_str().unwrap()],
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("mobius: PASS (n ≤ 1000)"));
    assert!(stdout.contains("closed_forms: PASS"));
    let lines: Vec<serde_json::Value> = fs::read_to_string(report)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), stdout.lines().count());
    assert_eq!(lines[0]["property"], "mobius");
    assert_eq!(lines[0]["status"], "PASS");
}

#[test]
fn corrupted_stieltjes_table_fails_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let good = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/stieltjes.tsv")).unwrap();
    let bad = good.replacen("1\t-7.28", "1\t-7.29", 1);
    assert_ne!(good, bad);
    let path = dir.path().join("bad.tsv");
    fs::write(&path, bad).unwrap();
    let out = zx(
        dir.path(),
        &["verify", "--x-max", "1000", "--stieltjes-table", path.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("closed_forms: FAIL"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("closed_forms"));
}

#[test]
fn extrema_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = zx(dir.path(), &["extrema", "--zero-count", "1000"]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    assert_eq!(read(dir.path(), "extrema.csv").lines().count(), 1001);
    assert_eq!(read(dir.path(), "flagged.csv").lines().count(), 1);
    let out = zx(dir.path(), &["extrema", "--zero-count", "0"]);
    assert!(out.status.success());
    assert_eq!(
        read(dir.path(), "extrema.csv"),
        "index,gamma_lo,gamma_hi,t_star,z2,location_tol\n"
    );
}

#[test]
fn extrema_resume_from_checkpoint_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    assert!(zx(dir.path(), &["extrema", "--zero-count", "12000"]).status.success());
    let full = read(dir.path(), "extrema.csv");
    // interrupted state: one complete shard, one half-written temp file
    let ckpt = dir.path().join("extrema.ckpt");
    fs::create_dir_all(&ckpt).unwrap();
    let first: String = full.lines().skip(1).take(10_000).map(|l| format!("{l}\n")).collect();
    fs::write(ckpt.join("shard-000000.csv"), first).unwrap();
    fs::write(ckpt.join("shard-000001.tmp"), "10001,2.0").unwrap();
    fs::remove_file(dir.path().join("extrema.csv")).unwrap();
    assert!(zx(dir.path(), &["extrema", "--zero-count", "12000"]).status.success());
    assert_eq!(full, read(dir.path(), "extrema.csv"));
    assert!(!ckpt.exists());
}

#[test]
fn tables_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let out = zx(dir.path(), &["tables", "--zero-count", "500", "--n-list", "-2"]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    let table = read(dir.path(), "error_table.csv");
    assert_eq!(table.lines().count(), 2);
    assert!(table.starts_with("N,error\n-2,"));
    let out = zx(
        dir.path(),
        &["figure", "--zero-count", "500", "--n-list", "-2,0,3", "--stride", "100"],
    );
    assert!(out.status.success());
    let fig = read(dir.path(), "figure.csv");
    let lines: Vec<&str> = fig.lines().collect();
    assert_eq!(lines[0], "t,true_cumulative,asym_N-2,asym_N0,asym_N3,err_N-2,err_N0,err_N3");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1].split(',').count(), 8);
}

#[test]
fn zeros_round_trip_and_bad_file() {
    let dir = tempfile::tempdir().unwrap();
    assert!(zx(dir.path(), &["zeros", "--zero-count", "50"]).status.success());
    let zeros = dir.path().join("zeros.txt");
    let sub = dir.path().join("from_file");
    let out = zx(
        &sub,
        &["extrema", "--zero-count", "49", "--zeros-file", zeros.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let computed = tempfile::tempdir().unwrap();
    zx(computed.path(), &["extrema", "--zero-count", "49"]);
    assert_eq!(read(&sub, "extrema.csv"), read(computed.path(), "extrema.csv"));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "14.134725141734693\n25.010857580145688\n21.022039638771555\n").unwrap();
    let out = zx(dir.path(), &["extrema", "--zeros-file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("zx.conf");
    fs::write(&conf, "digits = 40\nn-max = 2\n").unwrap();
    let run = |extra: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_zx"));
        c.arg("--output-dir").arg(dir.path()).arg("--config").arg(&conf);
        c.args(extra).arg("coeffs");
        c.env_remove("ZX_DIGITS");
        if let Some(v) = env {
            c.env("ZX_DIGITS", v);
        }
        String::from_utf8(c.output().unwrap().stdout).unwrap()
    };
    assert!(run(&[], None).contains("alpha_2 at 40 digits"));
    assert!(run(&[], Some("45")).contains("at 45 digits"));
    assert!(run(&["--digits", "42"], Some("45")).contains("at 42 digits"));
}

#[test]
fn exit_codes_for_bad_setup() {
    let dir = tempfile::tempdir().unwrap();
    let out = zx(dir.path(), &["coeffs", "--digits", "20", "--n-max", "12"]);
    assert_eq!(out.status.code(), Some(6));
    let out = zx(dir.path(), &["extrema", "--zero-count", "5", "--t-max", "100"]);
    assert_eq!(out.status.code(), Some(6));
    let file = dir.path().join("occupied");
    fs::write(&file, "").unwrap();
    let out = zx(&file, &["coeffs", "--n-max", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = zx(dir.path(), &["coeffs", "--k-max", "3", "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(2));
}
