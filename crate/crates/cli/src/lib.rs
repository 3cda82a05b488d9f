//! Command implementations for the `carmichael` binary.
//!
//! Exit codes: 0 success, 1 verification failure or oracle mismatch,
//! 2 usage error or inadmissible input.

pub mod records;

use std::collections::BTreeSet;

use clap::{Args, Parser, Subcommand, ValueEnum};

use carmichael_core::carmichael::{CarmichaelCertificate, FactorSet};
use carmichael_core::fermat::{
    admissible_triples, candidate_ps, enumerate_combos, filter_case_a, filter_case_b,
    filter_case_c, CaseTag, FermatCombo,
};
use carmichael_core::kernel::PrimePower;
use carmichael_core::ladder::build_ladder;
use carmichael_core::oracle::{brute_carmichael_with, compare_all_with, filter_target_shape};
use carmichael_core::render::{
    format_factorization, render_case_b_table, render_case_c_table, render_certificate,
    render_ladder, render_run_all, render_table1, render_table2,
};
use carmichael_core::search::{run_all_with, run_triple};

use records::{
    CandidateRecord, CertificateRecord, ComboRecord, CompareRecord, LadderCellRecord,
    ScanHitRecord, TraceRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Records,
}

#[derive(Debug, Parser)]
#[command(
    name = "carmichael",
    about = "Classify Carmichael numbers with a Fermat prime factor and L = 2^a * P^2",
    version
)]
pub struct Cli {
    /// Worker threads for parallel commands: 0 = all cores, 1 = sequential.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a table: 1 (combinations), 2 (Case A candidates), caseB,
    /// caseC, or ladder (primality grid, requires --p).
    Tables {
        which: String,
        #[command(flatten)]
        opts: TableOpts,
    },
    /// Audit every (combination, P, case) admissibility verdict.
    Candidates {
        #[arg(long)]
        case: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run the pruned backtracking search over admissible triples.
    Search {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        case: Option<String>,
        /// Restrict to one Type 1 combination, e.g. "5,257".
        #[arg(long)]
        combo: Option<String>,
        #[arg(long, default_value_t = 32)]
        n_max: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// The full classification sweep over every admissible triple.
    RunAll {
        #[arg(long, default_value_t = 32)]
        n_max: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check a factor list against the Korselt criterion and type it.
    Verify { factors: Vec<String> },
    /// Ground-truth oracles.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
}

#[derive(Debug, Args)]
pub struct TableOpts {
    /// P for the ladder grid.
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 32)]
    pub n_max: u32,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// Scan all odd integers up to --bound for the Korselt property.
    Scan {
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        /// Keep only hits with L = 2^a * P^2 and a Fermat prime factor.
        #[arg(long)]
        shape: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compare the pruned search against the exhaustive subset oracle on
    /// identical candidate pools; exits nonzero on any mismatch.
    Compare {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        combo: Option<String>,
        #[arg(long, default_value_t = 12)]
        pool_n_max: u32,
        #[arg(long, default_value_t = 10)]
        max_factors: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn emit<T: serde::Serialize>(record: &T) {
    println!("{}", serde_json::to_string(record).expect("records serialize"));
}

fn parse_case(s: &str) -> Result<CaseTag, String> {
    CaseTag::parse(s).ok_or_else(|| format!("unknown case '{s}' (expected A, B, or C)"))
}

fn parse_combo(s: &str) -> Result<FermatCombo, String> {
    let mut members = Vec::new();
    for part in s.split([',', '*', 'x']) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: u64 = part
            .parse()
            .map_err(|_| format!("combo member '{part}' is not an integer"))?;
        members.push(v);
    }
    members.sort_unstable();
    members.dedup();
    enumerate_combos()
        .into_iter()
        .find(|c| c.members == members)
        .ok_or_else(|| {
            format!(
                "'{s}' is not a combination of two or more known Fermat primes (3, 5, 17, 257, 65537)"
            )
        })
}

pub fn run(cli: Cli) -> i32 {
    #[cfg(feature = "parallel")]
    if cli.jobs > 1 {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    let parallel = cfg!(feature = "parallel") && cli.jobs != 1;

    match cli.command {
        Command::Tables { which, opts } => cmd_tables(&which, &opts),
        Command::Candidates { case, format } => cmd_candidates(case.as_deref(), format),
        Command::Search {
            p,
            case,
            combo,
            n_max,
            format,
        } => cmd_search(p, case.as_deref(), combo.as_deref(), n_max, format),
        Command::RunAll { n_max, format } => cmd_run_all(n_max, format, parallel),
        Command::Verify { factors } => cmd_verify(&factors),
        Command::Oracle { cmd } => match cmd {
            OracleCmd::Scan {
                bound,
                shape,
                format,
            } => cmd_oracle_scan(bound, shape, format, parallel),
            OracleCmd::Compare {
                p,
                case,
                combo,
                pool_n_max,
                max_factors,
                format,
            } => cmd_oracle_compare(
                p,
                case.as_deref(),
                combo.as_deref(),
                pool_n_max,
                max_factors,
                format,
                parallel,
            ),
        },
    }
}

fn usage_error(message: &str) -> i32 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn cmd_tables(which: &str, opts: &TableOpts) -> i32 {
    let selector = which.to_ascii_lowercase().replace('-', "");
    match selector.as_str() {
        "1" => match opts.format {
            Format::Text => print!("{}", render_table1()),
            Format::Records => {
                for combo in enumerate_combos() {
                    emit(&ComboRecord {
                        record: "combo".into(),
                        combination: combo.label(),
                        r: combo.r.to_string(),
                        factorization: format_factorization(&combo.r_minus_1_factors),
                        k1: combo.k1.to_string(),
                    });
                }
            }
        },
        "2" => match opts.format {
            Format::Text => print!("{}", render_table2()),
            Format::Records => emit_case_rows(CaseTag::A, true),
        },
        "caseb" => match opts.format {
            Format::Text => print!("{}", render_case_b_table()),
            Format::Records => emit_case_rows(CaseTag::B, true),
        },
        "casec" => match opts.format {
            Format::Text => print!("{}", render_case_c_table()),
            Format::Records => emit_case_rows(CaseTag::C, true),
        },
        "ladder" => {
            let Some(p) = opts.p else {
                return usage_error("tables ladder requires --p");
            };
            match build_ladder(p, opts.n_max) {
                Ok(ladder) => match opts.format {
                    Format::Text => print!("{}", render_ladder(&ladder)),
                    Format::Records => {
                        for row in ladder.rows() {
                            for cell in row {
                                emit(&LadderCellRecord::from_cell(p, cell));
                            }
                        }
                    }
                },
                Err(e) => return usage_error(&e.to_string()),
            }
        }
        _ => {
            return usage_error(&format!(
                "unknown table '{which}' (expected 1, 2, caseB, caseC, or ladder)"
            ))
        }
    }
    EXIT_OK
}

fn case_rows(case: CaseTag) -> Vec<CandidateRecord> {
    let mut rows = Vec::new();
    for combo in enumerate_combos() {
        for p in candidate_ps(&combo) {
            match case {
                CaseTag::A | CaseTag::B => {
                    let verdict = if case == CaseTag::A {
                        filter_case_a(&combo, p)
                    } else {
                        filter_case_b(&combo, p)
                    };
                    rows.push(CandidateRecord {
                        record: "candidate".into(),
                        case: case.to_string(),
                        combination: combo.label(),
                        p: p.to_string(),
                        seed_exponent: None,
                        verdict: if verdict.is_ok() {
                            "admissible".into()
                        } else {
                            "rejected".into()
                        },
                        reason: verdict.err().map(|r| r.to_string()),
                    });
                }
                CaseTag::C => {
                    for (t, verdict) in filter_case_c(&combo, p) {
                        rows.push(CandidateRecord {
                            record: "candidate".into(),
                            case: "C".into(),
                            combination: combo.label(),
                            p: p.to_string(),
                            // t = 0 is the no-room-below-k1 sentinel.
                            seed_exponent: (t > 0).then(|| t.to_string()),
                            verdict: if verdict.is_ok() {
                                "admissible".into()
                            } else {
                                "rejected".into()
                            },
                            reason: verdict.err().map(|r| r.to_string()),
                        });
                    }
                }
            }
        }
    }
    rows
}

fn emit_case_rows(case: CaseTag, admissible_only: bool) {
    for row in case_rows(case) {
        if !admissible_only || row.verdict == "admissible" {
            emit(&row);
        }
    }
}

fn cmd_candidates(case: Option<&str>, format: Format) -> i32 {
    let cases: Vec<CaseTag> = match case {
        Some(s) => match parse_case(s) {
            Ok(c) => vec![c],
            Err(e) => return usage_error(&e),
        },
        None => vec![CaseTag::A, CaseTag::B, CaseTag::C],
    };
    for case in cases {
        for row in case_rows(case) {
            match format {
                Format::Records => emit(&row),
                Format::Text => {
                    let seed = row
                        .seed_exponent
                        .as_ref()
                        .map(|t| format!(" l1=s1={t}"))
                        .unwrap_or_default();
                    let reason = row
                        .reason
                        .as_ref()
                        .map(|r| format!(": {r}"))
                        .unwrap_or_default();
                    println!(
                        "case {}  {:<22} P={:<10}{} {}{}",
                        row.case, row.combination, row.p, seed, row.verdict, reason
                    );
                }
            }
        }
    }
    EXIT_OK
}

fn select_triples(
    p: Option<u64>,
    case: Option<CaseTag>,
    combo: Option<&FermatCombo>,
) -> Vec<carmichael_core::fermat::CandidateTriple> {
    admissible_triples()
        .into_iter()
        .filter(|t| p.is_none_or(|p| t.p == p))
        .filter(|t| case.is_none_or(|c| t.case == c))
        .filter(|t| combo.is_none_or(|c| t.combo.r == c.r))
        .collect()
}

/// Why no triple matched: every rejection verdict involving the requested P.
fn rejection_reasons(p: u64, case: Option<CaseTag>) -> Vec<String> {
    let mut out = Vec::new();
    for tag in [CaseTag::A, CaseTag::B, CaseTag::C] {
        if case.is_some_and(|c| c != tag) {
            continue;
        }
        for row in case_rows(tag) {
            if row.p == p.to_string() && row.verdict == "rejected" {
                out.push(format!(
                    "case {} combo {}: {}",
                    row.case,
                    row.combination,
                    row.reason.unwrap_or_default()
                ));
            }
        }
    }
    if out.is_empty() {
        out.push(format!(
            "{p} does not divide R - 1 for any combination of two or more Fermat primes"
        ));
    }
    out
}

fn cmd_search(
    p: Option<u64>,
    case: Option<&str>,
    combo: Option<&str>,
    n_max: u32,
    format: Format,
) -> i32 {
    let case = match case.map(parse_case).transpose() {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let combo = match combo.map(parse_combo).transpose() {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let triples = select_triples(p, case, combo.as_ref());
    if triples.is_empty() {
        if let Some(p) = p {
            eprintln!("error: no admissible (combination, case) start for P = {p}:");
            for reason in rejection_reasons(p, case) {
                eprintln!("  {reason}");
            }
            return EXIT_USAGE;
        }
        println!("no admissible triples selected");
        return EXIT_OK;
    }

    let mut certificates: Vec<CarmichaelCertificate> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for triple in &triples {
        let outcome = match run_triple(triple, n_max) {
            Ok(o) => o,
            Err(e) => return usage_error(&e.to_string()),
        };
        match format {
            Format::Text => {
                println!(
                    "run {} ({})",
                    triple.id(),
                    if outcome.fully_closed {
                        "closed"
                    } else {
                        "closed at ceiling"
                    }
                );
                for event in &outcome.trace {
                    println!("  {}", format_trace_line(event));
                }
            }
            Format::Records => {
                let run_id = triple.id();
                for event in &outcome.trace {
                    emit(&TraceRecord::from_event(&run_id, event));
                }
            }
        }
        for cert in outcome.certificates {
            if seen.insert(cert.m().to_string()) {
                match format {
                    Format::Text => {}
                    Format::Records => emit(&CertificateRecord::from_certificate(
                        &cert,
                        Some(triple.case.to_string()),
                    )),
                }
                certificates.push(cert);
            }
        }
    }
    if format == Format::Text {
        println!();
        println!("{} certificate(s)", certificates.len());
        for cert in &certificates {
            print!("{}", render_certificate(cert));
        }
    }
    EXIT_OK
}

fn format_trace_line(event: &carmichael_core::search::TraceEvent) -> String {
    use carmichael_core::search::TraceKind;
    let ba = match (event.b, event.a) {
        (Some(b), Some(a)) => format!(" [b={b} a={a}]"),
        _ => String::new(),
    };
    let parent = event
        .parent
        .map(|p| format!(" <- {p}"))
        .unwrap_or_default();
    let body = match &event.kind {
        TraceKind::Seed { primes } => format!(
            "seed {{{}}}",
            primes
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
        TraceKind::BranchPrime { prime, beta } => format!("branch {beta}-prime {prime}"),
        TraceKind::BranchPair { first, second, beta } => {
            format!("branch {beta}-pair ({first}, {second})")
        }
        TraceKind::AcceptCertificate { m } => format!("accept m = {m}"),
        TraceKind::RejectEmpty { m, reason } => format!("reject m = {m}: {reason}"),
        TraceKind::Prune { m, reason } => format!("prune m = {m}: {reason}"),
    };
    format!("#{}{}{} {}", event.id, parent, ba, body)
}

fn cmd_run_all(n_max: u32, format: Format, parallel: bool) -> i32 {
    let report = match run_all_with(n_max, parallel) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    match format {
        Format::Text => print!("{}", render_run_all(&report)),
        Format::Records => {
            for cert in &report.certificates {
                let case = report
                    .runs
                    .iter()
                    .find(|r| r.certificate_ms.contains(cert.m()))
                    .map(|r| r.triple.case.to_string());
                emit(&CertificateRecord::from_certificate(cert, case));
            }
        }
    }
    EXIT_OK
}

fn cmd_verify(factors: &[String]) -> i32 {
    if factors.len() < 2 {
        return usage_error("verify needs at least two factors");
    }
    let mut parsed = Vec::new();
    for f in factors {
        match f.parse::<u64>() {
            Ok(v) => parsed.push(v),
            Err(_) => return usage_error(&format!("'{f}' is not a decimal integer")),
        }
    }
    let set = match FactorSet::new(parsed) {
        Ok(s) => s,
        // A repeated prime is a verification failure (m would not be
        // squarefree); anything else is bad input.
        Err(e @ carmichael_core::carmichael::CarmichaelError::NotSquarefree(_)) => {
            println!("FAIL: {e}");
            return EXIT_FAIL;
        }
        Err(e) => return usage_error(&e.to_string()),
    };
    match carmichael_core::carmichael::korselt_check(&set) {
        Err(e) => {
            println!("FAIL: {e}");
            EXIT_FAIL
        }
        Ok(pass) => {
            let odd_primes: Vec<&PrimePower> =
                pass.l_factors.iter().filter(|pp| pp.prime != 2).collect();
            let inferred: Option<(u64, u32)> = match odd_primes.as_slice() {
                [only] if only.exponent <= 2 => Some((only.prime, only.exponent)),
                _ => None,
            };
            println!("PASS: m = {}", pass.m);
            println!(
                "  L = {} = {}",
                pass.l,
                format_factorization(&pass.l_factors)
            );
            println!("  (m-1)/L = {}", pass.quotient);
            match inferred {
                None if odd_primes.is_empty() => {
                    println!("  L = 2^alpha: every factor is a Fermat prime; no odd P");
                }
                None => {
                    println!("  no P fits: the odd part of L is not P or P^2");
                }
                Some((p, e)) => {
                    let cert = CarmichaelCertificate::assemble(set, p)
                        .expect("korselt already passed");
                    let shape = if e == 2 {
                        "target shape L = 2^alpha * P^2".to_string()
                    } else {
                        format!("L = 2^alpha * {p}: not the target shape 2^alpha * {p}^2")
                    };
                    println!("  P = {p} ({shape})");
                    for (q, t) in cert
                        .factors
                        .primes()
                        .iter()
                        .zip(&cert.typed)
                    {
                        match t {
                            Some(t) => println!(
                                "    {q}: {} with exponent {}",
                                records::class_name(t.class),
                                t.exponent
                            ),
                            None => println!("    {q}: does not classify under P = {p}"),
                        }
                    }
                }
            }
            EXIT_OK
        }
    }
}

fn cmd_oracle_scan(bound: u64, shape: bool, format: Format, parallel: bool) -> i32 {
    let result = match brute_carmichael_with(bound, parallel) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    if shape {
        let hits = filter_target_shape(&result);
        match format {
            Format::Text => {
                println!(
                    "{} Carmichael number(s) up to {} with L = 2^a * P^2 and a Fermat factor",
                    hits.len(),
                    bound
                );
                for m in hits {
                    println!("  {m}");
                }
            }
            Format::Records => {
                for m in hits {
                    let factors = result
                        .carmichaels
                        .iter()
                        .find(|(v, _)| *v == m)
                        .map(|(_, f)| f.iter().map(|p| p.to_string()).collect())
                        .unwrap_or_default();
                    emit(&ScanHitRecord {
                        record: "scan_hit".into(),
                        m: m.to_string(),
                        factors,
                    });
                }
            }
        }
    } else {
        match format {
            Format::Text => {
                println!("{} Carmichael number(s) up to {}", result.count, bound);
                for (m, factors) in &result.carmichaels {
                    println!(
                        "  {m} = {}",
                        factors
                            .iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join("*")
                    );
                }
            }
            Format::Records => {
                for (m, factors) in &result.carmichaels {
                    emit(&ScanHitRecord {
                        record: "scan_hit".into(),
                        m: m.to_string(),
                        factors: factors.iter().map(|p| p.to_string()).collect(),
                    });
                }
            }
        }
    }
    EXIT_OK
}

fn cmd_oracle_compare(
    p: Option<u64>,
    case: Option<&str>,
    combo: Option<&str>,
    pool_n_max: u32,
    max_factors: u32,
    format: Format,
    parallel: bool,
) -> i32 {
    let case = match case.map(parse_case).transpose() {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let combo = match combo.map(parse_combo).transpose() {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let outcomes = match compare_all_with(pool_n_max, max_factors, parallel) {
        Ok(o) => o,
        Err(e) => return usage_error(&e.to_string()),
    };
    let selected: Vec<_> = outcomes
        .into_iter()
        .filter(|o| {
            let mut parts = o.label.split(':');
            let (c, pp, label) = (
                parts.next().unwrap_or_default(),
                parts.next().unwrap_or_default(),
                parts.next().unwrap_or_default(),
            );
            case.is_none_or(|want| want.to_string() == c)
                && p.is_none_or(|want| want.to_string() == pp)
                && combo.as_ref().is_none_or(|want| want.label() == label)
        })
        .collect();
    if selected.is_empty() {
        return usage_error("no admissible triple matches the selection");
    }
    let mut mismatches = 0;
    for o in &selected {
        match format {
            Format::Text => {
                let verdict = if o.matched { "MATCH" } else { "MISMATCH" };
                println!(
                    "{verdict} {} (pruned {}, exhaustive {})",
                    o.label,
                    o.pruned.len(),
                    o.exhaustive.len()
                );
            }
            Format::Records => emit(&CompareRecord {
                record: "compare".into(),
                label: o.label.clone(),
                matched: o.matched,
                pruned: o.pruned.iter().map(|m| m.to_string()).collect(),
                exhaustive: o.exhaustive.iter().map(|m| m.to_string()).collect(),
            }),
        }
        if !o.matched {
            mismatches += 1;
        }
    }
    if format == Format::Text {
        println!(
            "{}/{} comparisons matched",
            selected.len() - mismatches,
            selected.len()
        );
    }
    if mismatches == 0 {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}
