//! Plain-text renderings of the combination tables, the per-case candidate
//! tables, the primality grids, and search results. Layouts are fixed and
//! covered by byte-level golden tests.

use crate::carmichael::{CarmichaelCertificate, FactorClass};
use crate::fermat::{
    candidate_ps, enumerate_combos, filter_case_a, filter_case_b, filter_case_c,
};
use crate::kernel::PrimePower;
use crate::ladder::{CellStatus, Ladder};
use crate::search::ClassificationReport;

pub fn format_factorization(factors: &[PrimePower]) -> String {
    if factors.is_empty() {
        return "1".into();
    }
    factors
        .iter()
        .map(|pp| {
            if pp.exponent == 1 {
                pp.prime.to_string()
            } else {
                format!("{}^{}", pp.prime, pp.exponent)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn pad(s: &str, width: usize) -> String {
    format!("{s:<width$}")
}

fn rule(width: usize) -> String {
    "-".repeat(width)
}

/// The 26 Fermat-prime combinations with the factorization of R - 1,
/// grouped by k1.
pub fn render_table1() -> String {
    let combos = enumerate_combos();
    let rows: Vec<(String, String, String)> = combos
        .iter()
        .map(|c| {
            (
                c.label(),
                format_factorization(&c.r_minus_1_factors),
                c.k1.to_string(),
            )
        })
        .collect();
    let w1 = rows.iter().map(|r| r.0.len()).max().unwrap().max(15) + 2;
    let w2 = rows.iter().map(|r| r.1.len()).max().unwrap().max(20) + 2;

    let mut out = String::new();
    out.push_str(&format!(
        "{}{}k1\n",
        pad("combination (R)", w1),
        pad("factorization of R-1", w2)
    ));
    out.push_str(&format!("{}\n", rule(w1 + w2 + 2)));
    let mut last_k1 = None;
    for (combo, (label, fact, k1)) in combos.iter().zip(&rows) {
        if last_k1.is_some() && last_k1 != Some(combo.k1) {
            out.push_str(&format!("{}\n", rule(w1 + w2 + 2)));
        }
        last_k1 = Some(combo.k1);
        out.push_str(&format!("{}{}{}\n", pad(label, w1), pad(fact, w2), k1));
    }
    out
}

/// Case A survivors: for each combination, the P that pass the parity and
/// seed-primality filters.
pub fn render_table2() -> String {
    let mut rows: Vec<(String, String, u32)> = Vec::new();
    for combo in enumerate_combos() {
        let ps: Vec<String> = candidate_ps(&combo)
            .into_iter()
            .filter(|&p| filter_case_a(&combo, p).is_ok())
            .map(|p| p.to_string())
            .collect();
        if !ps.is_empty() {
            rows.push((combo.label(), ps.join(", "), combo.k1));
        }
    }
    let w1 = rows.iter().map(|r| r.0.len()).max().unwrap().max(15) + 2;
    let w2 = rows.iter().map(|r| r.1.len()).max().unwrap().max(20) + 2;
    let mut out = String::new();
    out.push_str(&format!(
        "{}{}k1\n",
        pad("combination (R)", w1),
        pad("admissible P", w2)
    ));
    out.push_str(&format!("{}\n", rule(w1 + w2 + 2)));
    for (label, ps, k1) in rows {
        out.push_str(&format!("{}{}{}\n", pad(&label, w1), pad(&ps, w2), k1));
    }
    out
}

/// Case B survivors: (P, k1) pairs grouped by the Type 1 combination.
pub fn render_case_b_table() -> String {
    let mut rows: Vec<(String, String)> = Vec::new();
    for combo in enumerate_combos() {
        let pairs: Vec<String> = candidate_ps(&combo)
            .into_iter()
            .filter(|&p| filter_case_b(&combo, p).is_ok())
            .map(|p| format!("({p}, {})", combo.k1))
            .collect();
        if !pairs.is_empty() {
            rows.push((combo.label(), pairs.join(" ")));
        }
    }
    let w1 = rows.iter().map(|r| r.0.len()).max().unwrap().max(15) + 2;
    let mut out = String::new();
    out.push_str(&format!("{}(P, k1)\n", pad("combination (R)", w1)));
    out.push_str(&format!("{}\n", rule(w1 + 10)));
    for (label, pairs) in rows {
        out.push_str(&format!("{}{}\n", pad(&label, w1), pairs));
    }
    out
}

/// Case C seed exponents per (combination, P), with the rejected exponents
/// annotated.
pub fn render_case_c_table() -> String {
    let mut out = String::new();
    out.push_str("combination (R)      P      admissible l1 = s1 (< k1)\n");
    out.push_str(&rule(60));
    out.push('\n');
    for combo in enumerate_combos() {
        if combo.k1 < 2 {
            continue;
        }
        for p in candidate_ps(&combo) {
            let admissible: Vec<String> = filter_case_c(&combo, p)
                .into_iter()
                .filter_map(|(t, v)| v.is_ok().then(|| t.to_string()))
                .collect();
            if !admissible.is_empty() {
                out.push_str(&format!(
                    "{}{}{}\n",
                    pad(&combo.label(), 21),
                    pad(&p.to_string(), 7),
                    admissible.join(", ")
                ));
            }
        }
    }
    out
}

fn cell_text(status: &CellStatus, value: u64) -> String {
    match status {
        CellStatus::Prime => format!("{value} prime"),
        CellStatus::Composite(_) | CellStatus::ParityExcluded => "x".into(),
    }
}

/// The primality grid for one P, column order matching the case analyses:
/// n, Type 2, Type 3, Type 1. For P = 1 (mod 3) only even rows are shown,
/// since both odd-l and odd-s cells are divisible by 3.
pub fn render_ladder(ladder: &Ladder) -> String {
    let p = ladder.p();
    let mut out = String::new();
    let note = match p % 3 {
        0 => "no parity restriction".to_string(),
        1 => format!("{p} = 1 (mod 3): odd rows excluded"),
        _ => format!("{p} = 2 (mod 3): l odd, s even"),
    };
    out.push_str(&format!("P = {p} ({note})\n"));
    let headers = (
        "n".to_string(),
        format!("2^n*{p}+1"),
        format!("2^n*{p}^2+1"),
        "2^n+1".to_string(),
    );

    let mut rows: Vec<(String, String, String, String)> = vec![headers];
    for n in 1..=ladder.n_max() {
        if p % 3 == 1 && n % 2 == 1 {
            continue;
        }
        let t2 = ladder.cell(n, FactorClass::Type2);
        let t3 = ladder.cell(n, FactorClass::Type3);
        let t1 = ladder.cell(n, FactorClass::Type1);
        rows.push((
            n.to_string(),
            cell_text(&t2.status, t2.value),
            cell_text(&t3.status, t3.value),
            cell_text(&t1.status, t1.value),
        ));
    }
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap() + 2;
    let w1 = rows.iter().map(|r| r.1.len()).max().unwrap() + 2;
    let w2 = rows.iter().map(|r| r.2.len()).max().unwrap() + 2;
    for (i, (c0, c1, c2, c3)) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{}{}{}{}\n",
            pad(c0, w0),
            pad(c1, w1),
            pad(c2, w2),
            c3
        ));
        if i == 0 {
            out.push_str(&format!("{}\n", rule(w0 + w1 + w2 + 8)));
        }
    }
    out
}

pub fn render_certificate(cert: &CarmichaelCertificate) -> String {
    let factors: Vec<String> = cert
        .factors
        .primes()
        .iter()
        .map(|p| p.to_string())
        .collect();
    let types: Vec<String> = cert
        .factors
        .primes()
        .iter()
        .zip(&cert.typed)
        .map(|(p, t)| match t {
            Some(t) => {
                let letter = match t.class {
                    FactorClass::Type1 => 'k',
                    FactorClass::Type2 => 'l',
                    FactorClass::Type3 => 's',
                };
                format!("{p}={}({letter}={})", t.class, t.exponent)
            }
            None => format!("{p}=unclassified"),
        })
        .collect();
    let mut out = String::new();
    out.push_str(&format!("m = {} = {}\n", cert.m(), factors.join(" * ")));
    out.push_str(&format!("  P = {}  types: {}\n", cert.p, types.join(" ")));
    out.push_str(&format!(
        "  L = {} = {}  (alpha = {})\n",
        cert.l,
        format_factorization(&cert.l_factors),
        cert.alpha
    ));
    out.push_str(&format!("  (m-1)/L = {}\n", cert.quotient));
    out
}

pub fn render_run_all(report: &ClassificationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "classification sweep, exponent ceiling n_max = {}\n\n",
        report.n_max
    ));
    for run in &report.runs {
        let verdict = if run.certificate_ms.is_empty() {
            if run.fully_closed {
                "empty (closed)".to_string()
            } else {
                "empty (closed at ceiling)".to_string()
            }
        } else {
            format!(
                "{} certificate{}",
                run.certificate_ms.len(),
                if run.certificate_ms.len() == 1 { "" } else { "s" }
            )
        };
        out.push_str(&format!(
            "  case {}  P = {:<6} combo {:<22} -> {}\n",
            run.triple.case,
            run.triple.p,
            match run.triple.seed_exponent {
                Some(t) => format!("{} (l1=s1={t})", run.triple.combo.label()),
                None => run.triple.combo.label(),
            },
            verdict
        ));
    }
    out.push_str(&format!(
        "\n{} distinct Carmichael numbers:\n\n",
        report.certificates.len()
    ));
    for cert in &report.certificates {
        out.push_str(&render_certificate(cert));
    }
    out
}
