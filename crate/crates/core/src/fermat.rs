//! Enumeration of Fermat-prime combinations R and the admissibility filters
//! that select, per case, which odd primes P can support a Carmichael number
//! with `L = 2^a * P^2`.
//!
//! P must divide R - 1 (the product of all Type 1 factors is 1 mod P), and a
//! combination needs at least two members (a unique Fermat factor would force
//! P | 2^k). The filters then apply the parity constraints on prime values
//! `2^l P + 1` / `2^s P^2 + 1` and test the mandatory seed primes directly.

use std::fmt;

use crate::kernel::{factorize, is_prime, two_power_of, PrimePower};

/// The five known Fermat primes; larger ones are assumed not to exist.
pub const FERMAT_PRIMES: [u64; 5] = [3, 5, 17, 257, 65537];

/// The three orderings of the minimal type exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseTag {
    /// k1 = l1 <= s1
    A,
    /// k1 = s1 < l1
    B,
    /// l1 = s1 < k1
    C,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::A => write!(f, "A"),
            CaseTag::B => write!(f, "B"),
            CaseTag::C => write!(f, "C"),
        }
    }
}

impl CaseTag {
    pub fn parse(s: &str) -> Option<CaseTag> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Some(CaseTag::A),
            "B" => Some(CaseTag::B),
            "C" => Some(CaseTag::C),
            _ => None,
        }
    }
}

/// A subset R of the known Fermat primes with |R| >= 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatCombo {
    /// Ascending members.
    pub members: Vec<u64>,
    /// Product of the members; at most 2^32 - 1.
    pub r: u64,
    pub r_minus_1_factors: Vec<PrimePower>,
    /// Minimal Fermat exponent among the members (1, 2, 4, 8, or 16).
    pub k1: u32,
}

impl FermatCombo {
    pub fn label(&self) -> String {
        self.members
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn contains(&self, p: u64) -> bool {
        self.members.contains(&p)
    }
}

/// All 26 subsets of the five Fermat primes with at least two members,
/// ordered by (k1, size, product).
pub fn enumerate_combos() -> Vec<FermatCombo> {
    let mut combos = Vec::new();
    for mask in 1u32..(1 << FERMAT_PRIMES.len()) {
        if mask.count_ones() < 2 {
            continue;
        }
        let members: Vec<u64> = FERMAT_PRIMES
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &p)| p)
            .collect();
        let r: u64 = members.iter().product();
        let k1 = members.iter().map(|&p| two_power_of(p)).min().unwrap();
        combos.push(FermatCombo {
            r_minus_1_factors: factorize(r - 1),
            members,
            r,
            k1,
        });
    }
    combos.sort_by_key(|c| (c.k1, c.members.len(), c.r));
    combos
}

/// The distinct odd prime divisors of R - 1, ascending: the only candidates
/// for P given this combination of Type 1 factors.
pub fn candidate_ps(combo: &FermatCombo) -> Vec<u64> {
    combo
        .r_minus_1_factors
        .iter()
        .map(|pp| pp.prime)
        .filter(|&p| p != 2)
        .collect()
}

/// Why a (combo, P) pair or a Case C exponent was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    /// The exponent of a would-be Type 2 prime has the parity that forces
    /// divisibility by 3.
    LParity { p_mod_3: u64, exponent: u32 },
    /// Likewise for a Type 3 prime: s must be even when P != 3.
    SParity { exponent: u32 },
    /// A mandatory seed value is composite.
    SeedComposite { value: u64, factors: Vec<PrimePower> },
    /// P = 1 mod 12 admits only the triple p1*q1*r1 with k1 = l1 = s1, and
    /// one of the two required seeds is composite.
    TripleSeedComposite { value: u64, factors: Vec<PrimePower> },
    /// Case B requires k1 >= 2: s1 = k1 = 1 is odd, and a combo with k1 = 1
    /// contains 3, so P = 3 is unavailable there as well.
    CaseBNeedsEvenSeed,
    /// Case C needs room for l1 = s1 < k1.
    NoRoomBelowK1,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::LParity { p_mod_3, exponent } => write!(
                f,
                "l = {exponent} has the wrong parity for P = {p_mod_3} (mod 3)"
            ),
            RejectReason::SParity { exponent } => {
                write!(f, "s = {exponent} must be even when P != 3")
            }
            RejectReason::SeedComposite { value, factors } => {
                write!(f, "seed {value} = {} is composite", factor_string(factors))
            }
            RejectReason::TripleSeedComposite { value, factors } => write!(
                f,
                "P = 1 (mod 12) allows only the k1=l1=s1 triple, but {value} = {} is composite",
                factor_string(factors)
            ),
            RejectReason::CaseBNeedsEvenSeed => {
                write!(f, "k1 = 1: s1 = 1 is odd, impossible for P != 3")
            }
            RejectReason::NoRoomBelowK1 => write!(f, "k1 = 1 leaves no exponent below it"),
        }
    }
}

fn factor_string(factors: &[PrimePower]) -> String {
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

/// Type 2 value `2^l * P + 1`, checked against u64 overflow.
pub fn type2_value(p: u64, l: u32) -> Option<u64> {
    1u64.checked_shl(l)?.checked_mul(p)?.checked_add(1)
}

/// Type 3 value `2^s * P^2 + 1`, checked against u64 overflow.
pub fn type3_value(p: u64, s: u32) -> Option<u64> {
    1u64.checked_shl(s)?
        .checked_mul(p.checked_mul(p)?)?
        .checked_add(1)
}

/// Parity admissible for a Type 2 exponent l: odd iff P = 2 (mod 3), even
/// iff P = 1 (mod 3), unrestricted for P = 3. The excluded parity makes
/// `2^l P + 1` divisible by 3.
pub fn l_parity_ok(p: u64, l: u32) -> bool {
    match p % 3 {
        0 => true,
        1 => l.is_multiple_of(2),
        _ => l % 2 == 1,
    }
}

/// Parity admissible for a Type 3 exponent s: even unless P = 3.
pub fn s_parity_ok(p: u64, s: u32) -> bool {
    p == 3 || s.is_multiple_of(2)
}

fn reject_if_composite(value: u64, triple: bool) -> Result<(), RejectReason> {
    if is_prime(value) {
        Ok(())
    } else if triple {
        Err(RejectReason::TripleSeedComposite {
            value,
            factors: factorize(value),
        })
    } else {
        Err(RejectReason::SeedComposite {
            value,
            factors: factorize(value),
        })
    }
}

/// Case A admissibility of (combo, P): k1 = l1, so `2^{k1} P + 1` must be a
/// prime of the right parity. When P = 1 (mod 12) only the k1 = l1 = s1
/// triple survives, which additionally needs `2^{k1} P^2 + 1` prime.
pub fn filter_case_a(combo: &FermatCombo, p: u64) -> Result<(), RejectReason> {
    let k1 = combo.k1;
    if !l_parity_ok(p, k1) {
        return Err(RejectReason::LParity {
            p_mod_3: p % 3,
            exponent: k1,
        });
    }
    let triple_only = p % 3 == 1 && p % 4 == 1;
    let q1 = type2_value(p, k1).expect("seed fits in u64");
    reject_if_composite(q1, triple_only)?;
    if triple_only {
        if !s_parity_ok(p, k1) {
            return Err(RejectReason::SParity { exponent: k1 });
        }
        let r1 = type3_value(p, k1).expect("seed fits in u64");
        reject_if_composite(r1, true)?;
    }
    Ok(())
}

/// Case B admissibility of (combo, P): k1 = s1 < l1, so k1 must be an even
/// exponent (>= 2) and `2^{k1} P^2 + 1` must be prime.
pub fn filter_case_b(combo: &FermatCombo, p: u64) -> Result<(), RejectReason> {
    let k1 = combo.k1;
    if k1 < 2 {
        return Err(RejectReason::CaseBNeedsEvenSeed);
    }
    if !s_parity_ok(p, k1) {
        return Err(RejectReason::SParity { exponent: k1 });
    }
    let r1 = type3_value(p, k1).expect("seed fits in u64");
    reject_if_composite(r1, false)
}

/// Case C admissibility: for each l1 = s1 in [1, k1 - 1], both parities must
/// allow primes and both `2^{l1} P + 1` and `2^{l1} P^2 + 1` must be prime.
/// Returns one verdict per exponent so rejected seeds can be audited.
pub fn filter_case_c(combo: &FermatCombo, p: u64) -> Vec<(u32, Result<(), RejectReason>)> {
    if combo.k1 < 2 {
        return vec![(0, Err(RejectReason::NoRoomBelowK1))];
    }
    (1..combo.k1)
        .map(|t| {
            let verdict = (|| {
                if !s_parity_ok(p, t) {
                    return Err(RejectReason::SParity { exponent: t });
                }
                if !l_parity_ok(p, t) {
                    return Err(RejectReason::LParity {
                        p_mod_3: p % 3,
                        exponent: t,
                    });
                }
                reject_if_composite(type2_value(p, t).expect("seed fits"), false)?;
                reject_if_composite(type3_value(p, t).expect("seed fits"), false)
            })();
            (t, verdict)
        })
        .collect()
}

/// Admissible Case C seed exponents only.
pub fn case_c_exponents(combo: &FermatCombo, p: u64) -> Vec<u32> {
    filter_case_c(combo, p)
        .into_iter()
        .filter_map(|(t, v)| v.is_ok().then_some(t))
        .collect()
}

/// An admissible (P, combo, case) start for the search. Case C runs carry
/// one seed exponent each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateTriple {
    pub p: u64,
    pub combo: FermatCombo,
    pub case: CaseTag,
    /// l1 = s1 for Case C; `None` otherwise.
    pub seed_exponent: Option<u32>,
}

impl CandidateTriple {
    pub fn id(&self) -> String {
        match self.seed_exponent {
            Some(t) => format!("{}:{}:{}:t{}", self.case, self.p, self.combo.label(), t),
            None => format!("{}:{}:{}", self.case, self.p, self.combo.label()),
        }
    }
}

/// Every admissible triple over all combos and candidate P, in deterministic
/// (case, P, combo) order.
pub fn admissible_triples() -> Vec<CandidateTriple> {
    let mut out = Vec::new();
    for combo in enumerate_combos() {
        for p in candidate_ps(&combo) {
            if filter_case_a(&combo, p).is_ok() {
                out.push(CandidateTriple {
                    p,
                    combo: combo.clone(),
                    case: CaseTag::A,
                    seed_exponent: None,
                });
            }
            if filter_case_b(&combo, p).is_ok() {
                out.push(CandidateTriple {
                    p,
                    combo: combo.clone(),
                    case: CaseTag::B,
                    seed_exponent: None,
                });
            }
            for t in case_c_exponents(&combo, p) {
                out.push(CandidateTriple {
                    p,
                    combo: combo.clone(),
                    case: CaseTag::C,
                    seed_exponent: Some(t),
                });
            }
        }
    }
    out.sort_by(|a, b| {
        (a.case, a.p, a.combo.r, a.seed_exponent).cmp(&(b.case, b.p, b.combo.r, b.seed_exponent))
    });
    out
}
