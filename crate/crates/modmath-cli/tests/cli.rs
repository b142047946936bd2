//! End-to-end checks of the CLI surface: subcommands, CSV shape, golden
//! file determinism and mismatch reporting, and exit codes.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modmath"))
}

fn tmpfile(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("modmath-test-{}-{tag}", std::process::id()))
}

#[test]
fn goldens_dump_then_verify() {
    let path = tmpfile("roundtrip");
    let out = bin()
        .args(["goldens", "dump", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = bin()
        .args(["goldens", "verify", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // determinism: dumping again yields the identical file
    let first = std::fs::read_to_string(&path).unwrap();
    bin()
        .args(["goldens", "dump", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(first, std::fs::read_to_string(&path).unwrap());
    std::fs::remove_file(&path).ok();
}

#[test]
fn goldens_accepts_known_cases() {
    let path = tmpfile("known");
    std::fs::write(
        &path,
        "# known-good cases\n\
         mul_mod 07 3 05 03 -> 01\n\
         add_mod 07 3 00 00 -> 00\n\
         mont_mul 07 3 05 02 -> 06\n",
    )
    .unwrap();
    let out = bin()
        .args(["goldens", "verify", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::remove_file(&path).ok();
}

#[test]
fn goldens_reports_mismatches() {
    let path = tmpfile("mismatch");
    std::fs::write(&path, "mul_mod 07 3 05 03 -> 02\n").unwrap();
    let out = bin()
        .args(["goldens", "verify", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("MISMATCH"), "{stderr}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn goldens_parse_error_names_the_line() {
    let path = tmpfile("parse");
    std::fs::write(&path, "# fine\nmul_mod zz 3 05 03 -> 01\n").unwrap();
    let out = bin()
        .args(["goldens", "verify", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "{stderr}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn bench_emits_the_documented_csv_row() {
    let out = bin()
        .args([
            "bench",
            "--op",
            "add_mod",
            "--lanes",
            "32",
            "--m",
            "31",
            "--strategy",
            "barrett",
            "--reps",
            "3",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "op,strategy,lane_bits,m,len,ns_per_elem_mean,ns_per_elem_median"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("add_mod,barrett,32,31,1024,"), "{row}");
}

#[test]
fn bench_rejects_invalid_combinations() {
    // barrett_half needs a half-width modulus bound
    let out = bin()
        .args([
            "bench",
            "--op",
            "mul_mod",
            "--lanes",
            "8",
            "--m",
            "8",
            "--strategy",
            "barrett_half",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("barrett_half"), "{stderr}");
}

#[test]
fn selftest_small_budget_passes() {
    let out = bin()
        .args(["selftest", "--scope", "ntt", "--budget", "1"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("0 failed"), "{stderr}");
}
