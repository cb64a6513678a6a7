//! End-to-end CLI coverage: exit codes, output bytes, config precedence.

use std::io::Write;
use std::process::{Command, Output};

fn diffprobe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffprobe"))
        .args(args)
        .env_remove("DIFFPROBE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn corpus_all_match_exits_zero() {
    let out = diffprobe(&["corpus"]);
    assert_eq!(exit_code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("7/7 matched"));

    let strict = diffprobe(&["corpus", "--strict"]);
    assert_eq!(exit_code(&strict), 0, "{}", stdout(&strict));
}

#[test]
fn corpus_json_format() {
    let out = diffprobe(&["corpus", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["total"], 7);
    assert_eq!(parsed["matched"], 7);
}

#[test]
fn probe_exit_codes_follow_verdicts() {
    let refuted = diffprobe(&["probe", "--fn", "g2", "--no-timestamp"]);
    assert_eq!(exit_code(&refuted), 2);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&refuted)).unwrap();
    assert_eq!(parsed["combined"], "refuted");

    let consistent = diffprobe(&["probe", "--fn", "linear_23", "--no-timestamp"]);
    assert_eq!(exit_code(&consistent), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&consistent)).unwrap();
    assert_eq!(parsed["combined"], "consistent");
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(exit_code(&diffprobe(&["probe", "--fn", "nope"])), 64);
    assert_eq!(
        exit_code(&diffprobe(&["probe", "--fn", "g2", "--format", "xml"])),
        64
    );
    assert_eq!(
        exit_code(&diffprobe(&["probe", "--fn", "g2", "--criteria", ""])),
        64
    );
    assert_eq!(
        exit_code(&diffprobe(&["probe", "--fn", "g2", "--criteria", "bogus"])),
        64
    );
    assert_eq!(
        exit_code(&diffprobe(&["probe", "--fn", "g2", "--point", "1,zzz"])),
        64
    );
    assert_eq!(
        exit_code(&diffprobe(&["probe", "--fn", "g2", "--lambda", "1.5"])),
        64
    );
    assert_eq!(exit_code(&diffprobe(&["no-such-command"])), 64);
    assert_eq!(exit_code(&diffprobe(&["surface", "--fn", "h_osc3"])), 64);
}

#[test]
fn probe_output_is_byte_stable() {
    let args = ["probe", "--fn", "g2", "--seed", "7", "--no-timestamp"];
    let a = diffprobe(&args);
    let b = diffprobe(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);

    // With the timestamp on, the report carries one.
    let with_ts = diffprobe(&["probe", "--fn", "linear_23"]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&with_ts)).unwrap();
    assert!(parsed["timestamp"].is_u64());
}

#[test]
fn csv_evidence_format() {
    let out = diffprobe(&[
        "probe",
        "--fn",
        "g2",
        "--format",
        "csv-evidence",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 2);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "criterion,context,rho,value,ratio");
    let mut criteria_seen = std::collections::BTreeSet::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5, "bad row {line}");
        criteria_seen.insert(fields[0].to_string());
        let rho: f64 = fields[2].parse().unwrap();
        assert!(rho > 0.0);
    }
    assert!(criteria_seen.contains("cauchy_like"));
    assert!(criteria_seen.contains("cauchy_determinant"));
    assert!(criteria_seen.contains("geo"));
}

#[test]
fn surface_grid_csv() {
    let out = diffprobe(&["surface", "--fn", "g2", "--grid", "5", "--extent", "1.0"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,f");
    assert_eq!(lines.len(), 26);
    // The center row is the origin, normalized to zero.
    assert!(lines.contains(&"0,0,0"));
    // Corner (1,1): g = 1/2.
    assert!(lines.contains(&"1,1,0.5"));
}

#[test]
fn block_probe_reports() {
    let out = diffprobe(&["block-probe", "--fn", "block_cross", "--no-timestamp"]);
    assert_eq!(exit_code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["combined"], "consistent");
    assert_eq!(parsed["block_dims"], serde_json::json!([2, 3]));

    let out = diffprobe(&["block-probe", "--fn", "block_sqrt_cross", "--no-timestamp"]);
    assert_eq!(exit_code(&out), 2);

    assert_eq!(exit_code(&diffprobe(&["block-probe", "--fn", "g2"])), 64);
}

#[test]
fn list_prints_catalog() {
    let out = diffprobe(&["list"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    for id in [
        "g2",
        "h_osc2",
        "h_osc3",
        "linear_23",
        "prod_xy",
        "euclid_norm",
        "relaxed_demo",
    ] {
        assert!(text.contains(id), "missing {id}");
    }
    assert!(text.contains("block_sqrt_cross"));
    assert!(text.contains("cx_conj"));
    // The rational-indicator function is documented as not implementable.
    assert!(text.contains("not implemented"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("probe.conf");
    let mut file = std::fs::File::create(&path).unwrap();
    writeln!(file, "# test config\nseed = 123\nratio_floor = 10.0").unwrap();
    let path = path.to_str().unwrap();

    // ratio_floor = 10 starves the not-little-o rule: g2 goes inconclusive.
    let out = diffprobe(&["probe", "--fn", "g2", "--config", path, "--no-timestamp"]);
    assert_eq!(exit_code(&out), 3, "{}", stdout(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["combined"], "inconclusive");
    assert_eq!(parsed["seed"], 123);

    // ... and the corpus run mismatches, exit 2.
    let corpus = diffprobe(&["corpus", "--config", path]);
    assert_eq!(exit_code(&corpus), 2);
    assert!(stdout(&corpus).contains("MISMATCH"));

    // Flags override the file.
    let out = diffprobe(&[
        "probe",
        "--fn",
        "g2",
        "--config",
        path,
        "--seed",
        "9",
        "--no-timestamp",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["seed"], 9);

    // Unknown keys are usage errors.
    let mut bad = std::fs::File::create(dir.path().join("bad.conf")).unwrap();
    writeln!(bad, "bogus = 1").unwrap();
    let out = diffprobe(&[
        "probe",
        "--fn",
        "g2",
        "--config",
        dir.path().join("bad.conf").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 64);
}

#[test]
fn env_seed_is_default_only() {
    let out = Command::new(env!("CARGO_BIN_EXE_diffprobe"))
        .args(["probe", "--fn", "linear_23", "--no-timestamp"])
        .env("DIFFPROBE_SEED", "555")
        .output()
        .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["seed"], 555);

    let out = Command::new(env!("CARGO_BIN_EXE_diffprobe"))
        .args([
            "probe",
            "--fn",
            "linear_23",
            "--seed",
            "8",
            "--no-timestamp",
        ])
        .env("DIFFPROBE_SEED", "555")
        .output()
        .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["seed"], 8);

    let out = Command::new(env!("CARGO_BIN_EXE_diffprobe"))
        .args(["probe", "--fn", "linear_23"])
        .env("DIFFPROBE_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 64);
}

#[test]
fn probe_at_translated_point() {
    // prod_xy away from the origin is still smooth; the translated probe
    // must come back consistent.
    let out = diffprobe(&[
        "probe",
        "--fn",
        "prod_xy",
        "--point",
        "0.3,-0.2",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stdout(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["point"], serde_json::json!([0.3, -0.2]));

    let out = diffprobe(&["probe", "--fn", "g2", "--point", "1,2,3"]);
    assert_eq!(exit_code(&out), 64);
}
