//! End-to-end tests of the binary: golden table bytes, exit codes, and the
//! byte-exact round-trip of `--format records` output.

use std::process::{Command, Output};

use carmichael_cli::records::{
    CandidateRecord, CertificateRecord, ComboRecord, CompareRecord, LadderCellRecord,
    ScanHitRecord, TraceRecord,
};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carmichael"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn golden_tables_are_byte_stable() {
    let cases: &[(&[&str], &str)] = &[
        (&["tables", "1"], include_str!("golden/table1.txt")),
        (&["tables", "2"], include_str!("golden/table2.txt")),
        (&["tables", "caseB"], include_str!("golden/case_b.txt")),
        (&["tables", "caseC"], include_str!("golden/case_c.txt")),
        (
            &["tables", "ladder", "--p", "3", "--n-max", "18"],
            include_str!("golden/ladder_p3_18.txt"),
        ),
        (
            &["tables", "ladder", "--p", "7", "--n-max", "16"],
            include_str!("golden/ladder_p7_16.txt"),
        ),
    ];
    for (args, golden) in cases {
        assert_eq!(&stdout(args), golden, "golden mismatch for {args:?}");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    // 0: success with zero certificates is still success.
    let out = run(&["search", "--p", "43", "--case", "A"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("reject"), "trace shows the dead leaf");
    assert!(text.contains("0 certificate(s)"));

    // 1: a factor list that fails Korselt.
    let out = run(&["verify", "3", "5"]);
    assert_eq!(out.status.code(), Some(1));

    // 1: a repeated factor fails the squarefree half of the criterion.
    let out = run(&["verify", "3", "3", "11"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("squarefree"));

    // 2: non-prime verify input, naming the offender.
    let out = run(&["verify", "3", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('9'.to_string().as_str()));

    // 2: inadmissible P, with reasons.
    let out = run(&["search", "--p", "13", "--case", "A"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("composite"));

    // 2: unknown table selector and bad flags.
    assert_eq!(run(&["tables", "9"]).status.code(), Some(2));
    assert_eq!(run(&["tables", "ladder"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn verify_reports_the_invariant() {
    let text = stdout(&["verify", "3", "11", "17"]);
    assert!(text.contains("PASS: m = 561"));
    assert!(text.contains("L = 80 = 2^4*5"));
    assert!(text.contains("not the target shape"));

    let text = stdout(&["verify", "5", "13", "257", "577", "1153"]);
    assert!(text.contains("PASS: m = 11113519105"));
    assert!(text.contains("L = 2304 = 2^8*3^2"));
    assert!(text.contains("target shape L = 2^alpha * P^2"));
}

#[test]
fn run_all_lists_eleven_certificates() {
    let text = stdout(&["run-all", "--n-max", "32"]);
    assert!(text.contains("11 distinct Carmichael numbers"));
    assert!(text.contains("m = 825265 = 5 * 7 * 17 * 19 * 73"));
    assert!(text.contains("44428201205269571987560724263876473913345"));
    // Every reported emptiness is proven within the ceiling.
    assert!(!text.contains("closed at ceiling"));
}

#[test]
fn oracle_scan_shape_filter() {
    let text = stdout(&["oracle", "scan", "--bound", "1000000", "--shape"]);
    assert!(text.contains("825265"));
    let text = stdout(&["oracle", "scan", "--bound", "600"]);
    assert!(text.contains("561 = 3*11*17"));
}

#[test]
fn oracle_compare_sweeps_clean() {
    let out = run(&[
        "oracle",
        "compare",
        "--pool-n-max",
        "12",
        "--max-factors",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("37/37 comparisons matched"));
    assert!(!text.contains("MISMATCH"));
}

/// Every records line must re-serialize to the exact bytes emitted.
fn assert_roundtrip(args: &[&str]) {
    let text = stdout(args);
    assert!(!text.is_empty());
    for line in text.lines() {
        let value: serde_json::Value = serde_json::from_str(line).expect("valid JSON");
        let kind = value["record"].as_str().expect("record tag");
        let rebuilt = match kind {
            "combo" => {
                serde_json::to_string(&serde_json::from_str::<ComboRecord>(line).unwrap())
            }
            "candidate" => {
                serde_json::to_string(&serde_json::from_str::<CandidateRecord>(line).unwrap())
            }
            "ladder_cell" => {
                serde_json::to_string(&serde_json::from_str::<LadderCellRecord>(line).unwrap())
            }
            "certificate" => {
                serde_json::to_string(&serde_json::from_str::<CertificateRecord>(line).unwrap())
            }
            "trace" => {
                serde_json::to_string(&serde_json::from_str::<TraceRecord>(line).unwrap())
            }
            "scan_hit" => {
                serde_json::to_string(&serde_json::from_str::<ScanHitRecord>(line).unwrap())
            }
            "compare" => {
                serde_json::to_string(&serde_json::from_str::<CompareRecord>(line).unwrap())
            }
            other => panic!("unknown record kind {other}"),
        }
        .unwrap();
        assert_eq!(rebuilt, line, "round-trip for {args:?}");
    }
}

#[test]
fn records_round_trip_byte_for_byte() {
    assert_roundtrip(&["tables", "1", "--format", "records"]);
    assert_roundtrip(&["tables", "ladder", "--p", "5", "--n-max", "8", "--format", "records"]);
    assert_roundtrip(&["candidates", "--format", "records"]);
    assert_roundtrip(&["search", "--p", "5", "--case", "A", "--format", "records"]);
    assert_roundtrip(&["run-all", "--format", "records"]);
    assert_roundtrip(&["oracle", "scan", "--bound", "10000", "--format", "records"]);
    assert_roundtrip(&[
        "oracle", "compare", "--p", "3", "--case", "A", "--format", "records",
    ]);
}

#[test]
fn run_all_records_carry_eleven_certificates() {
    let text = stdout(&["run-all", "--format", "records"]);
    let certs: Vec<CertificateRecord> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(certs.len(), 11);
    assert!(certs.iter().all(|c| c.p == "3" || c.p == "5"));
    let smallest = certs.iter().find(|c| c.m == "825265").unwrap();
    assert_eq!(smallest.l_factorization, "2^4*3^2");
    assert_eq!(smallest.case.as_deref(), Some("C"));
}

#[test]
fn search_trace_records_replay() {
    let text = stdout(&["search", "--p", "3", "--case", "B", "--format", "records"]);
    let mut traces: Vec<TraceRecord> = Vec::new();
    for line in text.lines() {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        if value["record"] == "trace" {
            traces.push(serde_json::from_str(line).unwrap());
        }
    }
    assert!(traces.iter().any(|t| t.kind == "seed"));
    assert!(traces.iter().any(|t| t.kind == "accept_certificate"));
    assert!(traces.iter().any(|t| t.kind == "reject_empty"));
}
