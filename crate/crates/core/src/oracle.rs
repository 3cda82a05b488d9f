//! Independent ground truth: a direct Korselt scan over all odd integers up
//! to a bound, and an exhaustive (unpruned) subset search over truncated
//! candidate pools. The scan factors every candidate itself by sieved trial
//! division and never goes through the factor-list Korselt path it is meant
//! to validate; the subset search knows nothing about minimality pruning.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::carmichael::{check_shape, CarmichaelCertificate, FactorClass, FactorSet};
use crate::fermat::{CaseTag, FermatCombo, FERMAT_PRIMES};
use crate::ladder::{build_ladder, LadderError};
use crate::search::{case_consistent, run_case, seed_states};

pub const SCAN_BOUND_LIMIT: u64 = 100_000_000;
pub const POOL_CEILING: u32 = 14;
pub const MAX_FACTORS_LIMIT: u32 = 13;
pub const POOL_SIZE_LIMIT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("scan bound {0} must be at least 3")]
    BoundTooSmall(u64),
    #[error("scan bound {0} exceeds the 10^8 runtime guard")]
    BoundTooLarge(u64),
    #[error("pool_n_max {0} exceeds the exhaustive ceiling of 14")]
    PoolCeiling(u32),
    #[error("max_factors {0} exceeds the ceiling of 13")]
    MaxFactorsTooLarge(u32),
    #[error("candidate pool has {size} primes, above the {limit} limit")]
    PoolTooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Ladder(#[from] LadderError),
}

/// All Carmichael numbers up to a bound, each with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub bound: u64,
    pub carmichaels: Vec<(u64, Vec<u64>)>,
    pub count: usize,
}

/// Scan every odd integer in [3, bound] for the Korselt property, factoring
/// by sieved trial division in segments.
pub fn brute_carmichael(bound: u64) -> Result<ScanResult, OracleError> {
    brute_carmichael_with(bound, cfg!(feature = "parallel"))
}

pub fn brute_carmichael_with(bound: u64, parallel: bool) -> Result<ScanResult, OracleError> {
    if bound < 3 {
        return Err(OracleError::BoundTooSmall(bound));
    }
    if bound > SCAN_BOUND_LIMIT {
        return Err(OracleError::BoundTooLarge(bound));
    }
    let root = integer_sqrt(bound);
    let small_primes = odd_primes_up_to(root);

    const BLOCK: u64 = 1 << 18;
    let mut blocks = Vec::new();
    let mut lo = 3u64;
    while lo <= bound {
        let hi = (lo + BLOCK).min(bound + 1);
        blocks.push((lo, hi));
        lo = hi | 1; // keep block starts odd
    }

    let hits_per_block = crate::par::map(blocks, parallel, |(lo, hi)| {
        scan_block(lo, hi, &small_primes)
    });

    let mut carmichaels = Vec::new();
    for hits in hits_per_block {
        for m in hits {
            carmichaels.push((m, factor_by_trial(m, &small_primes)));
        }
    }
    carmichaels.sort_unstable();
    Ok(ScanResult {
        bound,
        count: carmichaels.len(),
        carmichaels,
    })
}

/// Check every odd value in [lo, hi) directly: divide out each sieved prime,
/// rejecting on a square factor or a failed `(p - 1) | (m - 1)`. Whatever
/// remains after all primes up to sqrt(bound) is either 1 or a single large
/// prime.
fn scan_block(lo: u64, hi: u64, small_primes: &[u64]) -> Vec<u64> {
    debug_assert!(lo % 2 == 1);
    if hi <= lo {
        return Vec::new();
    }
    let len = ((hi - lo) as usize).div_ceil(2);
    let mut remaining: Vec<u64> = (0..len).map(|i| lo + 2 * i as u64).collect();
    let mut alive: Vec<bool> = vec![true; len];
    let mut factor_count: Vec<u8> = vec![0; len];

    for &p in small_primes {
        let mut v = lo.div_ceil(p) * p;
        if v % 2 == 0 {
            v += p;
        }
        while v < hi {
            let i = ((v - lo) / 2) as usize;
            if alive[i] {
                let mut e = 0;
                while remaining[i].is_multiple_of(p) {
                    remaining[i] /= p;
                    e += 1;
                }
                debug_assert!(e >= 1);
                if e >= 2 || (v - 1) % (p - 1) != 0 {
                    alive[i] = false;
                } else {
                    factor_count[i] += 1;
                }
            }
            v += 2 * p;
        }
    }

    let mut hits = Vec::new();
    for i in 0..len {
        if !alive[i] {
            continue;
        }
        let m = lo + 2 * i as u64;
        let mut count = factor_count[i];
        let rest = remaining[i];
        if rest > 1 {
            if rest == m {
                continue; // m itself is prime (or 1 survived): not composite
            }
            // rest has no factor below sqrt(bound), so it is prime and
            // appears exactly once.
            if !(m - 1).is_multiple_of(rest - 1) {
                continue;
            }
            count += 1;
        }
        if count >= 3 {
            hits.push(m);
        }
    }
    hits
}

fn factor_by_trial(mut n: u64, small_primes: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for &p in small_primes {
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn odd_primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let size = (limit + 1) as usize;
    let mut composite = vec![false; size];
    let mut primes = Vec::new();
    let mut n = 3;
    while n <= limit {
        if !composite[n as usize] {
            primes.push(n);
            let mut v = n * n;
            while v <= limit {
                composite[v as usize] = true;
                v += 2 * n;
            }
        }
        n += 2;
    }
    primes
}

fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Restrict a scan to the target shape: L = 2^alpha * P^2 for an odd prime
/// P, with at least one known Fermat prime among the factors.
pub fn filter_target_shape(result: &ScanResult) -> Vec<u64> {
    result
        .carmichaels
        .iter()
        .filter(|(_, factors)| {
            let l = factors
                .iter()
                .fold(1u64, |acc, &p| num_integer::lcm(acc, p - 1));
            let odd = l >> l.trailing_zeros();
            let root = integer_sqrt(odd);
            let is_p_squared = root * root == odd && root > 1 && crate::kernel::is_prime(root);
            let has_fermat = factors.iter().any(|p| FERMAT_PRIMES.contains(p));
            is_p_squared && has_fermat
        })
        .map(|(m, _)| *m)
        .collect()
}

/// Enumerate every subset of the candidate pool that contains the mandatory
/// seeds, with 3..=max_factors factors, and keep those passing the Korselt
/// check, the shape check, and the case inequality. No other pruning.
pub fn exhaustive_subset_search(
    p: u64,
    combo: &FermatCombo,
    case: CaseTag,
    pool_n_max: u32,
    max_factors: u32,
) -> Result<Vec<CarmichaelCertificate>, OracleError> {
    if pool_n_max > POOL_CEILING {
        return Err(OracleError::PoolCeiling(pool_n_max));
    }
    if max_factors > MAX_FACTORS_LIMIT {
        return Err(OracleError::MaxFactorsTooLarge(max_factors));
    }
    let ladder = build_ladder(p, pool_n_max)?;
    let mut found: BTreeMap<BigUint, CarmichaelCertificate> = BTreeMap::new();

    for seed in seed_states(p, case, combo) {
        let mandatory = seed.primes();
        let pool: Vec<u64> = ladder
            .rows()
            .flat_map(|row| row.iter())
            .filter(|cell| {
                cell.status.is_prime()
                    && cell.class != FactorClass::Type1
                    && !mandatory.contains(&cell.value)
            })
            .map(|cell| cell.value)
            .collect();
        if pool.len() > POOL_SIZE_LIMIT {
            return Err(OracleError::PoolTooLarge {
                size: pool.len(),
                limit: POOL_SIZE_LIMIT,
            });
        }
        for mask in 0u32..(1 << pool.len()) {
            let mut primes = mandatory.clone();
            for (i, &candidate) in pool.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    primes.push(candidate);
                }
            }
            if primes.len() < 3 || primes.len() > max_factors as usize {
                continue;
            }
            let factors = FactorSet::new(primes).expect("pool entries are distinct primes");
            let Ok(cert) = CarmichaelCertificate::assemble(factors, p) else {
                continue;
            };
            if check_shape(&cert) && case_consistent(&cert, case) {
                found.insert(cert.m().clone(), cert);
            }
        }
    }
    Ok(found.into_values().collect())
}

/// One pruned-vs-exhaustive comparison on the identical pool.
#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub label: String,
    pub pruned: Vec<BigUint>,
    pub exhaustive: Vec<BigUint>,
    pub matched: bool,
}

pub fn compare_case(
    p: u64,
    case: CaseTag,
    combo: &FermatCombo,
    pool_n_max: u32,
    max_factors: u32,
) -> Result<CompareOutcome, OracleError> {
    let pruned_run = run_case(p, case, combo, pool_n_max)?;
    let pruned: Vec<BigUint> = pruned_run
        .certificates
        .iter()
        .filter(|c| c.factors.len() <= max_factors as usize)
        .map(|c| c.m().clone())
        .collect();
    let exhaustive: Vec<BigUint> = exhaustive_subset_search(p, combo, case, pool_n_max, max_factors)?
        .iter()
        .map(|c| c.m().clone())
        .collect();
    Ok(CompareOutcome {
        label: format!("{case}:{p}:{}", combo.label()),
        matched: pruned == exhaustive,
        pruned,
        exhaustive,
    })
}

/// Sweep every admissible (combo, P, case) and compare both searches.
pub fn compare_all(pool_n_max: u32, max_factors: u32) -> Result<Vec<CompareOutcome>, OracleError> {
    compare_all_with(pool_n_max, max_factors, cfg!(feature = "parallel"))
}

pub fn compare_all_with(
    pool_n_max: u32,
    max_factors: u32,
    parallel: bool,
) -> Result<Vec<CompareOutcome>, OracleError> {
    let mut cases: Vec<(u64, CaseTag, FermatCombo)> = Vec::new();
    for triple in crate::fermat::admissible_triples() {
        let entry = (triple.p, triple.case, triple.combo);
        if !cases.iter().any(|(p, c, combo)| {
            *p == entry.0 && *c == entry.1 && combo.r == entry.2.r
        }) {
            cases.push(entry);
        }
    }
    let outcomes = crate::par::map(cases, parallel, |(p, case, combo)| {
        compare_case(p, case, &combo, pool_n_max, max_factors)
    });
    outcomes.into_iter().collect()
}
