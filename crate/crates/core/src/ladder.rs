//! Per-P primality grids for the three factor shapes `2^n + 1`,
//! `2^n * P + 1`, and `2^n * P^2 + 1`, answering the "n-prime" and "n-pair"
//! queries the search runs on.
//!
//! Cells whose exponent parity already forces divisibility by 3 are marked
//! `ParityExcluded` and never primality-tested during construction; tests
//! verify each of them composite independently.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::carmichael::FactorClass;
use crate::fermat::{l_parity_ok, s_parity_ok, FERMAT_PRIMES};
use crate::kernel::{factorize, is_prime, PrimePower};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LadderError {
    #[error("P = {0} must be an odd prime")]
    BadP(u64),
    #[error("n_max = {0} exceeds the 64-row ceiling")]
    NMaxTooLarge(u32),
    #[error("2^{n_max} * {p}^2 + 1 does not fit in 64 bits; lower n_max")]
    ValueOverflow { p: u64, n_max: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellStatus {
    Prime,
    /// Factorizations are kept for rows n <= 20, where the grids get
    /// rendered; beyond that the flag alone is enough.
    Composite(Option<Vec<PrimePower>>),
    ParityExcluded,
}

impl CellStatus {
    pub fn is_prime(&self) -> bool {
        matches!(self, CellStatus::Prime)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderCell {
    pub n: u32,
    pub class: FactorClass,
    pub value: u64,
    pub status: CellStatus,
}

/// The full grid for one P: rows 1..=n_max, columns Type 1/2/3.
#[derive(Debug, Clone)]
pub struct Ladder {
    p: u64,
    n_max: u32,
    /// Indexed `[n - 1][class as usize]`.
    rows: Vec<[LadderCell; 3]>,
}

const FACTORIZATION_ROW_LIMIT: u32 = 20;

/// Build the grid. `n_max` is capped at 64 and, independently, at the point
/// where `2^n_max * P^2 + 1` would leave the deterministic 64-bit primality
/// range.
pub fn build_ladder(p: u64, n_max: u32) -> Result<Ladder, LadderError> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(LadderError::BadP(p));
    }
    if n_max == 0 || n_max > 64 {
        return Err(LadderError::NMaxTooLarge(n_max));
    }
    let p2 = p
        .checked_mul(p)
        .ok_or(LadderError::ValueOverflow { p, n_max })?;
    if 1u64
        .checked_shl(n_max)
        .and_then(|s| s.checked_mul(p2))
        .and_then(|v| v.checked_add(1))
        .is_none()
    {
        return Err(LadderError::ValueOverflow { p, n_max });
    }

    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let make = |class: FactorClass| {
            let value = match class {
                FactorClass::Type1 => (1u64 << n) + 1,
                FactorClass::Type2 => (1u64 << n) * p + 1,
                FactorClass::Type3 => (1u64 << n) * p2 + 1,
            };
            let excluded = match class {
                FactorClass::Type1 => false,
                FactorClass::Type2 => !l_parity_ok(p, n),
                FactorClass::Type3 => !s_parity_ok(p, n),
            };
            let status = if excluded {
                CellStatus::ParityExcluded
            } else if class == FactorClass::Type1 && !FERMAT_PRIMES.contains(&value) {
                // 2^n + 1 can only be prime when n is a power of 2, and the
                // known Fermat primes stop at 65537.
                CellStatus::Composite(composite_factors(value, n))
            } else if is_prime(value) {
                CellStatus::Prime
            } else {
                CellStatus::Composite(composite_factors(value, n))
            };
            LadderCell {
                n,
                class,
                value,
                status,
            }
        };
        rows.push([
            make(FactorClass::Type1),
            make(FactorClass::Type2),
            make(FactorClass::Type3),
        ]);
    }
    Ok(Ladder { p, n_max, rows })
}

fn composite_factors(value: u64, n: u32) -> Option<Vec<PrimePower>> {
    (n <= FACTORIZATION_ROW_LIMIT).then(|| factorize(value))
}

impl Ladder {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn cell(&self, n: u32, class: FactorClass) -> &LadderCell {
        let idx = match class {
            FactorClass::Type1 => 0,
            FactorClass::Type2 => 1,
            FactorClass::Type3 => 2,
        };
        &self.rows[(n - 1) as usize][idx]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[LadderCell; 3]> {
        self.rows.iter()
    }

    /// All prime values with 2-power `n`, any type, excluding `exclude`.
    /// Type 1 entries are only ever the five known Fermat primes.
    pub fn n_primes(&self, n: u32, exclude: &BTreeSet<u64>) -> Vec<u64> {
        if n == 0 || n > self.n_max {
            return Vec::new();
        }
        let mut out: Vec<u64> = self.rows[(n - 1) as usize]
            .iter()
            .filter(|c| c.status.is_prime() && !exclude.contains(&c.value))
            .map(|c| c.value)
            .collect();
        out.sort_unstable();
        out
    }

    /// All unordered pairs of distinct available Type 2 / Type 3 primes
    /// sharing the same 2-power within `range`. Pairs are cross-type by
    /// construction (two same-type primes with equal exponent would be the
    /// same number); Type 1 membership is fixed by the combination upfront,
    /// so Type 1 cells never pair.
    pub fn n_pairs(
        &self,
        range: RangeInclusive<u32>,
        exclude: &BTreeSet<u64>,
    ) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for n in range {
            if n == 0 || n > self.n_max {
                continue;
            }
            let primes: Vec<u64> = self.rows[(n - 1) as usize]
                .iter()
                .filter(|c| {
                    c.class != FactorClass::Type1
                        && c.status.is_prime()
                        && !exclude.contains(&c.value)
                })
                .map(|c| c.value)
                .collect();
            for i in 0..primes.len() {
                for j in (i + 1)..primes.len() {
                    let (x, y) = (primes[i].min(primes[j]), primes[i].max(primes[j]));
                    out.push((x, y));
                }
            }
        }
        out
    }
}
