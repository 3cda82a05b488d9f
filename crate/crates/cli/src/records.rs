//! Line-delimited record schema for `--format records`.
//!
//! One JSON object per line; every integer is a decimal string so consumers
//! never lose precision on values beyond native widths. Field names and
//! their order are fixed; parsing a record into its struct and re-serializing
//! reproduces the emitted bytes.

use serde::{Deserialize, Serialize};

use carmichael_core::carmichael::{CarmichaelCertificate, FactorClass};
use carmichael_core::kernel::PrimePower;
use carmichael_core::ladder::{CellStatus, LadderCell};
use carmichael_core::render::format_factorization;
use carmichael_core::search::{TraceEvent, TraceKind};

pub fn class_name(class: FactorClass) -> &'static str {
    match class {
        FactorClass::Type1 => "T1",
        FactorClass::Type2 => "T2",
        FactorClass::Type3 => "T3",
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComboRecord {
    pub record: String,
    pub combination: String,
    pub r: String,
    pub factorization: String,
    pub k1: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CandidateRecord {
    pub record: String,
    pub case: String,
    pub combination: String,
    pub p: String,
    /// For Case C rows: the seed exponent l1 = s1 under discussion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_exponent: Option<String>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LadderCellRecord {
    pub record: String,
    pub p: String,
    pub n: String,
    pub class: String,
    pub value: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorization: Option<String>,
}

impl LadderCellRecord {
    pub fn from_cell(p: u64, cell: &LadderCell) -> Self {
        let (status, factorization) = match &cell.status {
            CellStatus::Prime => ("prime".to_string(), None),
            CellStatus::Composite(f) => (
                "composite".to_string(),
                f.as_ref().map(|f| format_factorization(f)),
            ),
            CellStatus::ParityExcluded => ("parity-excluded".to_string(), None),
        };
        LadderCellRecord {
            record: "ladder_cell".into(),
            p: p.to_string(),
            n: cell.n.to_string(),
            class: class_name(cell.class).into(),
            value: cell.value.to_string(),
            status,
            factorization,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FactorRecord {
    pub value: String,
    pub class: String,
    pub exponent: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateRecord {
    pub record: String,
    pub m: String,
    pub p: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub factors: Vec<FactorRecord>,
    pub l: String,
    pub l_factorization: String,
    pub alpha: String,
    pub quotient: String,
}

impl CertificateRecord {
    pub fn from_certificate(cert: &CarmichaelCertificate, case: Option<String>) -> Self {
        let factors = cert
            .factors
            .primes()
            .iter()
            .zip(&cert.typed)
            .map(|(&p, t)| FactorRecord {
                value: p.to_string(),
                class: t.map(|t| class_name(t.class)).unwrap_or("none").into(),
                exponent: t.map(|t| t.exponent.to_string()).unwrap_or_default(),
            })
            .collect();
        CertificateRecord {
            record: "certificate".into(),
            m: cert.m().to_string(),
            p: cert.p.to_string(),
            case,
            factors,
            l: cert.l.to_string(),
            l_factorization: format_factorization(&cert.l_factors),
            alpha: cert.alpha.to_string(),
            quotient: cert.quotient.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TraceRecord {
    pub record: String,
    pub run: String,
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub kind: String,
    pub primes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl TraceRecord {
    pub fn from_event(run: &str, event: &TraceEvent) -> Self {
        let (kind, primes, beta, m, reason) = match &event.kind {
            TraceKind::Seed { primes } => (
                "seed",
                primes.iter().map(|p| p.to_string()).collect(),
                None,
                None,
                None,
            ),
            TraceKind::BranchPrime { prime, beta } => (
                "branch_prime",
                vec![prime.to_string()],
                Some(beta.to_string()),
                None,
                None,
            ),
            TraceKind::BranchPair { first, second, beta } => (
                "branch_pair",
                vec![first.to_string(), second.to_string()],
                Some(beta.to_string()),
                None,
                None,
            ),
            TraceKind::AcceptCertificate { m } => (
                "accept_certificate",
                Vec::new(),
                None,
                Some(m.to_string()),
                None,
            ),
            TraceKind::RejectEmpty { m, reason } => (
                "reject_empty",
                Vec::new(),
                None,
                Some(m.to_string()),
                Some(reason.clone()),
            ),
            TraceKind::Prune { m, reason } => (
                "prune",
                Vec::new(),
                None,
                Some(m.to_string()),
                Some(reason.clone()),
            ),
        };
        TraceRecord {
            record: "trace".into(),
            run: run.to_string(),
            id: event.id.to_string(),
            parent: event.parent.map(|p| p.to_string()),
            kind: kind.into(),
            primes,
            beta,
            b: event.b.map(|b| b.to_string()),
            a: event.a.map(|a| a.to_string()),
            m,
            reason,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScanHitRecord {
    pub record: String,
    pub m: String,
    pub factors: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CompareRecord {
    pub record: String,
    pub label: String,
    pub matched: bool,
    pub pruned: Vec<String>,
    pub exhaustive: Vec<String>,
}

pub fn format_prime_power(pp: &PrimePower) -> String {
    if pp.exponent == 1 {
        pp.prime.to_string()
    } else {
        format!("{}^{}", pp.prime, pp.exponent)
    }
}
