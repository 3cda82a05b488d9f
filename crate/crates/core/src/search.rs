//! Depth-first backtracking over prime factors, pruned by the minimality
//! rule: group every chosen factor into one product `2^b x + 1`, let `2^a`
//! be the power of two already forced into L, and then any extension must
//! contain either a prime with 2-power in `[min(a, b), b]` or two new primes
//! sharing a 2-power below `min(a, b)`. Nothing else can repair a unique
//! smallest 2-power.
//!
//! Each accepted state is certified independently through the Korselt check
//! rather than trusted from the search logic.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::carmichael::{
    check_shape, classify_factor, compute_l, CarmichaelCertificate, FactorClass, FactorSet,
    FactorType,
};
use crate::fermat::{
    admissible_triples, case_c_exponents, filter_case_a, filter_case_b, type2_value, type3_value,
    CandidateTriple, CaseTag, FermatCombo,
};
use crate::kernel::two_adic_valuation;
use crate::ladder::{build_ladder, Ladder, LadderError};

/// One node of the backtracking tree: the chosen primes with their types,
/// and the cached product.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub p: u64,
    pub case: CaseTag,
    pub chosen: BTreeMap<u64, FactorType>,
    pub product: BigUint,
}

impl SearchState {
    fn new(p: u64, case: CaseTag, primes: &[u64]) -> SearchState {
        let mut state = SearchState {
            p,
            case,
            chosen: BTreeMap::new(),
            product: BigUint::one(),
        };
        for &q in primes {
            state.add(q);
        }
        state
    }

    fn add(&mut self, prime: u64) {
        let t = classify_factor(prime, self.p)
            .expect("every chosen prime classifies under P");
        let previous = self.chosen.insert(prime, t);
        debug_assert!(previous.is_none(), "primes are chosen at most once");
        self.product *= BigUint::from(prime);
    }

    fn with(&self, primes: &[u64]) -> SearchState {
        let mut next = self.clone();
        for &q in primes {
            next.add(q);
        }
        next
    }

    pub fn primes(&self) -> Vec<u64> {
        self.chosen.keys().copied().collect()
    }

    /// Largest 2-power among the chosen factors: a lower bound for the
    /// 2-adic valuation of the final L.
    pub fn forced_two_power(&self) -> u32 {
        self.chosen
            .values()
            .map(|t| t.exponent)
            .max()
            .expect("states are never empty")
    }
}

/// Mandatory start states for an admissible (P, case, combo). Case C yields
/// one state per admissible seed exponent; an inadmissible input yields none.
pub fn seed_states(p: u64, case: CaseTag, combo: &FermatCombo) -> Vec<SearchState> {
    match case {
        CaseTag::A => {
            if filter_case_a(combo, p).is_err() {
                return Vec::new();
            }
            let q1 = type2_value(p, combo.k1).expect("seed fits in u64");
            let mut primes = combo.members.clone();
            primes.push(q1);
            vec![SearchState::new(p, case, &primes)]
        }
        CaseTag::B => {
            if filter_case_b(combo, p).is_err() {
                return Vec::new();
            }
            let r1 = type3_value(p, combo.k1).expect("seed fits in u64");
            let mut primes = combo.members.clone();
            primes.push(r1);
            vec![SearchState::new(p, case, &primes)]
        }
        CaseTag::C => case_c_exponents(combo, p)
            .into_iter()
            .map(|t| {
                let mut primes = combo.members.clone();
                primes.push(type2_value(p, t).expect("seed fits in u64"));
                primes.push(type3_value(p, t).expect("seed fits in u64"));
                SearchState::new(p, case, &primes)
            })
            .collect(),
    }
}

/// Smallest exponent a new Type 2 / Type 3 factor may carry without
/// breaking the case's defining inequality on minimal exponents.
fn min_exponents(case: CaseTag, k1: u32, seed_exponent: Option<u32>) -> (u32, u32) {
    match case {
        CaseTag::A => (k1, k1),
        CaseTag::B => (k1 + 1, k1),
        CaseTag::C => {
            let t = seed_exponent.expect("Case C states carry a seed exponent");
            (t, t)
        }
    }
}

/// One branch out of a node: the prime (or same-2-power pair) to add.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildMove {
    pub primes: Vec<u64>,
    pub beta: u32,
}

/// Everything [`expand`] decides at one node.
#[derive(Debug, Clone)]
pub struct Expansion {
    /// 2-power of `product - 1` when all chosen factors form one group.
    pub b: u32,
    /// 2-adic valuation of L forced by the chosen factors alone.
    pub a: u32,
    /// Set when L(chosen) divides m - 1 and the L = 2^alpha P^2 shape holds.
    pub accepted: bool,
    pub children: Vec<ChildMove>,
    /// True when the prime query range ran past the ladder ceiling, so
    /// emptiness below proves nothing beyond n_max.
    pub truncated: bool,
    /// Populated when the node is a dead leaf: why m itself fails.
    pub reject_reason: Option<String>,
}

/// Apply the minimality rule at one state.
pub fn expand(state: &SearchState, ladder: &Ladder) -> Expansion {
    let m_minus_1 = &state.product - BigUint::one();
    let b = two_adic_valuation(&m_minus_1).expect("product >= 3") as u32;
    let a = state.forced_two_power();

    let factors = FactorSet::new(state.primes()).expect("chosen primes are valid");
    let (l, l_factors) = compute_l(&factors);
    let l_divides = (&m_minus_1 % &l).is_zero();
    let odd_part_of_l = &l >> two_adic_valuation(&l).expect("L >= 2");
    let p_squared = BigUint::from(state.p) * BigUint::from(state.p);
    let has_type3 = state
        .chosen
        .values()
        .any(|t| t.class == FactorClass::Type3);
    let accepted = l_divides && odd_part_of_l == p_squared && has_type3;

    let seed_exponent = state
        .chosen
        .values()
        .filter(|t| t.class != FactorClass::Type1)
        .map(|t| t.exponent)
        .min();
    let (min_l, min_s) = min_exponents(
        state.case,
        state.chosen
            .values()
            .filter(|t| t.class == FactorClass::Type1)
            .map(|t| t.exponent)
            .min()
            .expect("combo members are chosen"),
        seed_exponent,
    );

    let chosen_values: BTreeSet<u64> = state.chosen.keys().copied().collect();
    let available = |n: u32| -> Vec<u64> {
        ladder
            .n_primes(n, &chosen_values)
            .into_iter()
            .filter(|&v| {
                let t = classify_factor(v, state.p).expect("ladder primes classify");
                match t.class {
                    // A Type 1 prime outside the combo would change the
                    // combination; combo members are already chosen.
                    FactorClass::Type1 => false,
                    FactorClass::Type2 => t.exponent >= min_l,
                    FactorClass::Type3 => t.exponent >= min_s,
                }
            })
            .collect()
    };

    let low = a.min(b);
    let truncated = b > ladder.n_max();
    let mut children = Vec::new();
    for n in low..=b.min(ladder.n_max()) {
        for v in available(n) {
            children.push(ChildMove {
                primes: vec![v],
                beta: n,
            });
        }
    }
    for n in 1..low.min(ladder.n_max() + 1) {
        let primes = available(n);
        for i in 0..primes.len() {
            for j in (i + 1)..primes.len() {
                children.push(ChildMove {
                    primes: vec![primes[i], primes[j]],
                    beta: n,
                });
            }
        }
    }
    children.sort_by(|x, y| (x.beta, &x.primes).cmp(&(y.beta, &y.primes)));

    let reject_reason = if children.is_empty() && !accepted {
        Some(if !l_divides {
            let witness = l_factors
                .iter()
                .find(|pp| !(&m_minus_1 % pp.value()).is_zero())
                .expect("some part of L fails when L does not divide");
            if witness.exponent == 1 {
                format!("{} does not divide m - 1", witness.prime)
            } else {
                format!(
                    "{}^{} does not divide m - 1",
                    witness.prime, witness.exponent
                )
            }
        } else if !has_type3 {
            format!("no Type 3 factor, so L omits {}^2", state.p)
        } else {
            format!("L has odd part {} instead of {}^2", odd_part_of_l, state.p)
        })
    } else {
        None
    };

    Expansion {
        b,
        a,
        accepted,
        children,
        truncated,
        reject_reason,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceKind {
    Seed { primes: Vec<u64> },
    BranchPrime { prime: u64, beta: u32 },
    BranchPair { first: u64, second: u64, beta: u32 },
    AcceptCertificate { m: BigUint },
    RejectEmpty { m: BigUint, reason: String },
    /// The chosen set was already reached along another branch order.
    Prune { m: BigUint, reason: String },
}

/// One line of the search ledger. Replaying the Seed/Branch chain from any
/// event's parent links reproduces the chosen set it talks about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub id: u32,
    pub parent: Option<u32>,
    pub kind: TraceKind,
    pub b: Option<u32>,
    pub a: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub certificates: Vec<CarmichaelCertificate>,
    pub trace: Vec<TraceEvent>,
    /// True when every dead leaf was proven empty inside the ladder range;
    /// false marks an emptiness claim that only holds up to n_max.
    pub fully_closed: bool,
}

struct Driver<'a> {
    ladder: &'a Ladder,
    trace: Vec<TraceEvent>,
    visited: BTreeSet<Vec<u64>>,
    certificates: BTreeMap<BigUint, CarmichaelCertificate>,
    truncated: bool,
    next_id: u32,
}

impl<'a> Driver<'a> {
    fn push(&mut self, parent: Option<u32>, kind: TraceKind, b: Option<u32>, a: Option<u32>) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        self.trace.push(TraceEvent {
            id,
            parent,
            kind,
            b,
            a,
        });
        id
    }

    fn dfs(&mut self, state: &SearchState, node: u32) {
        if !self.visited.insert(state.primes()) {
            self.push(
                Some(node),
                TraceKind::Prune {
                    m: state.product.clone(),
                    reason: "state already explored along another order".into(),
                },
                None,
                None,
            );
            return;
        }
        let exp = expand(state, self.ladder);
        self.truncated |= exp.truncated;
        if exp.accepted {
            let cert = CarmichaelCertificate::assemble(
                FactorSet::new(state.primes()).expect("valid factor set"),
                state.p,
            )
            .expect("accepted states pass the Korselt check");
            debug_assert!(check_shape(&cert));
            debug_assert!(case_consistent(&cert, state.case));
            self.push(
                Some(node),
                TraceKind::AcceptCertificate {
                    m: state.product.clone(),
                },
                Some(exp.b),
                Some(exp.a),
            );
            self.certificates.insert(state.product.clone(), cert);
        }
        if exp.children.is_empty() {
            if let Some(reason) = exp.reject_reason {
                self.push(
                    Some(node),
                    TraceKind::RejectEmpty {
                        m: state.product.clone(),
                        reason,
                    },
                    Some(exp.b),
                    Some(exp.a),
                );
            }
            return;
        }
        for child in exp.children {
            let kind = match child.primes.as_slice() {
                [v] => TraceKind::BranchPrime {
                    prime: *v,
                    beta: child.beta,
                },
                [v, w] => TraceKind::BranchPair {
                    first: *v,
                    second: *w,
                    beta: child.beta,
                },
                _ => unreachable!("children add one prime or one pair"),
            };
            let child_id = self.push(Some(node), kind, Some(exp.b), Some(exp.a));
            let child_state = state.with(&child.primes);
            self.dfs(&child_state, child_id);
        }
    }
}

/// Exhaust the tree for one (P, case, combo), running every seed the case
/// admits. Children are explored in ascending (2-power, value) order, so two
/// runs with the same inputs produce identical traces.
pub fn run_case(
    p: u64,
    case: CaseTag,
    combo: &FermatCombo,
    n_max: u32,
) -> Result<RunOutcome, LadderError> {
    let ladder = build_ladder(p, n_max)?;
    run_case_on(&ladder, p, case, combo, None)
}

/// [`run_case`] restricted to a single Case C seed exponent.
pub fn run_triple(triple: &CandidateTriple, n_max: u32) -> Result<RunOutcome, LadderError> {
    let ladder = build_ladder(triple.p, n_max)?;
    run_case_on(&ladder, triple.p, triple.case, &triple.combo, triple.seed_exponent)
}

fn run_case_on(
    ladder: &Ladder,
    p: u64,
    case: CaseTag,
    combo: &FermatCombo,
    only_seed_exponent: Option<u32>,
) -> Result<RunOutcome, LadderError> {
    let mut driver = Driver {
        ladder,
        trace: Vec::new(),
        visited: BTreeSet::new(),
        certificates: BTreeMap::new(),
        truncated: false,
        next_id: 0,
    };
    for seed in seed_states(p, case, combo) {
        if let Some(t) = only_seed_exponent {
            let seed_t = seed
                .chosen
                .values()
                .filter(|ty| ty.class != FactorClass::Type1)
                .map(|ty| ty.exponent)
                .min()
                .expect("seeds carry a non-Type-1 prime");
            if seed_t != t {
                continue;
            }
        }
        let id = driver.push(
            None,
            TraceKind::Seed {
                primes: seed.primes(),
            },
            None,
            None,
        );
        driver.dfs(&seed, id);
    }
    Ok(RunOutcome {
        certificates: driver.certificates.into_values().collect(),
        trace: driver.trace,
        fully_closed: !driver.truncated,
    })
}

/// The case's defining inequality on a finished certificate's minimal
/// exponents: A needs min k = min l <= min s, B needs min k = min s < min l,
/// C needs min l = min s < min k.
pub fn case_consistent(cert: &CarmichaelCertificate, case: CaseTag) -> bool {
    let min_of = |class: FactorClass| {
        cert.typed
            .iter()
            .flatten()
            .filter(|t| t.class == class)
            .map(|t| t.exponent)
            .min()
    };
    let (k, l, s) = (
        min_of(FactorClass::Type1),
        min_of(FactorClass::Type2),
        min_of(FactorClass::Type3),
    );
    let Some(k) = k else { return false };
    let Some(s) = s else { return false };
    match case {
        CaseTag::A => l == Some(k) && k <= s,
        CaseTag::B => s == k && l.is_none_or(|l| l > k),
        CaseTag::C => l == Some(s) && s < k,
    }
}

/// Outcome of the full classification sweep.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub triple: CandidateTriple,
    pub certificate_ms: Vec<BigUint>,
    pub fully_closed: bool,
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub n_max: u32,
    pub runs: Vec<RunReport>,
    /// Union over all runs, deduplicated by m, ascending.
    pub certificates: Vec<CarmichaelCertificate>,
}

/// Run every admissible triple and merge the certificates.
///
/// ```
/// let report = carmichael_core::search::run_all(32).unwrap();
/// assert_eq!(report.certificates.len(), 11);
/// ```
pub fn run_all(n_max: u32) -> Result<ClassificationReport, LadderError> {
    run_all_with(n_max, cfg!(feature = "parallel"))
}

pub fn run_all_with(n_max: u32, parallel: bool) -> Result<ClassificationReport, LadderError> {
    let triples = admissible_triples();
    let outcomes = crate::par::map(triples, parallel, |triple| {
        let outcome = run_triple(&triple, n_max)?;
        Ok::<_, LadderError>((triple, outcome))
    });
    let mut runs = Vec::new();
    let mut merged: BTreeMap<BigUint, CarmichaelCertificate> = BTreeMap::new();
    for item in outcomes {
        let (triple, outcome) = item?;
        runs.push(RunReport {
            triple,
            certificate_ms: outcome
                .certificates
                .iter()
                .map(|c| c.m().clone())
                .collect(),
            fully_closed: outcome.fully_closed,
        });
        for cert in outcome.certificates {
            merged.insert(cert.m().clone(), cert);
        }
    }
    Ok(ClassificationReport {
        n_max,
        runs,
        certificates: merged.into_values().collect(),
    })
}
