//! Carmichael-number semantics: the L invariant, Korselt verification,
//! factor typing relative to a fixed odd prime P, and the structural
//! no-unique-smallest-2-power check.
//!
//! Throughout, `L` is the least common multiple of `p - 1` over the prime
//! factors `p` of `m`. Korselt's criterion says a squarefree composite `m`
//! is Carmichael exactly when `L` divides `m - 1`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::kernel::{
    self, factorize, is_prime, lcm_all_u64, two_power_of, PrimePower,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CarmichaelError {
    #[error("a factor set needs at least one prime")]
    Empty,
    #[error("factor {0} is not prime")]
    NotPrime(u64),
    #[error("factor 2 is even; only odd primes can divide a Carmichael number")]
    EvenFactor,
    #[error("fewer than two factors supplied; m is not composite")]
    NotComposite,
    #[error("duplicate factor {0}; m would not be squarefree")]
    NotSquarefree(u64),
    #[error("Korselt fails: {witness} - 1 does not divide m - 1")]
    KorseltFail { witness: u64 },
    #[error("factor {factor} does not classify as Type 1/2/3 under P = {p}")]
    Unclassifiable { factor: u64, p: u64 },
    #[error("the 2-power theorem needs at least two groups")]
    TooFewGroups,
    #[error("group value {0} must be odd and at least 3")]
    BadGroup(BigUint),
}

/// A strictly increasing set of distinct odd primes with its cached product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSet {
    primes: Vec<u64>,
    product: BigUint,
}

impl FactorSet {
    /// Validate and sort a list of factors. Rejects empty input, the prime 2,
    /// any non-prime entry, and duplicates.
    pub fn new(mut primes: Vec<u64>) -> Result<Self, CarmichaelError> {
        if primes.is_empty() {
            return Err(CarmichaelError::Empty);
        }
        primes.sort_unstable();
        for window in primes.windows(2) {
            if window[0] == window[1] {
                return Err(CarmichaelError::NotSquarefree(window[0]));
            }
        }
        for &p in &primes {
            if p == 2 {
                return Err(CarmichaelError::EvenFactor);
            }
            if !is_prime(p) {
                return Err(CarmichaelError::NotPrime(p));
            }
        }
        let product = primes
            .iter()
            .fold(BigUint::one(), |acc, &p| acc * BigUint::from(p));
        Ok(FactorSet { primes, product })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn product(&self) -> &BigUint {
        &self.product
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// The three admissible shapes of a prime factor when `L = 2^a * P^2`:
/// `2^k + 1`, `2^l * P + 1`, `2^s * P^2 + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactorClass {
    Type1,
    Type2,
    Type3,
}

impl fmt::Display for FactorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorClass::Type1 => write!(f, "T1"),
            FactorClass::Type2 => write!(f, "T2"),
            FactorClass::Type3 => write!(f, "T3"),
        }
    }
}

/// A factor's class together with its exponent of 2 (k, l, or s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FactorType {
    pub class: FactorClass,
    pub exponent: u32,
}

/// Classify an odd prime `p` relative to `big_p`: the odd part of `p - 1`
/// must be 1, `big_p`, or `big_p^2`. At most one class can match because
/// those three odd parts are pairwise distinct.
pub fn classify_factor(p: u64, big_p: u64) -> Option<FactorType> {
    debug_assert!(p >= 3 && p % 2 == 1);
    debug_assert!(big_p >= 3 && big_p % 2 == 1);
    let exponent = two_power_of(p);
    let odd = (p - 1) >> exponent;
    if odd == 1 {
        return Some(FactorType {
            class: FactorClass::Type1,
            exponent,
        });
    }
    if odd == big_p {
        return Some(FactorType {
            class: FactorClass::Type2,
            exponent,
        });
    }
    if let Some(sq) = big_p.checked_mul(big_p) {
        if odd == sq {
            return Some(FactorType {
                class: FactorClass::Type3,
                exponent,
            });
        }
    }
    None
}

/// Compute `L = lcm(p - 1)` together with its factorization.
pub fn compute_l(factors: &FactorSet) -> (BigUint, Vec<PrimePower>) {
    let shifted: Vec<u64> = factors.primes().iter().map(|&p| p - 1).collect();
    let l = lcm_all_u64(&shifted).expect("factor set is nonempty");
    let mut exps: std::collections::BTreeMap<u64, u32> = std::collections::BTreeMap::new();
    for v in shifted {
        for pp in factorize(v) {
            let e = exps.entry(pp.prime).or_insert(0);
            *e = (*e).max(pp.exponent);
        }
    }
    let fact: Vec<PrimePower> = exps
        .into_iter()
        .map(|(prime, exponent)| PrimePower { prime, exponent })
        .collect();
    debug_assert_eq!(kernel::recompose(&fact), l);
    (l, fact)
}

/// The data established by a successful Korselt check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KorseltPass {
    pub m: BigUint,
    pub l: BigUint,
    pub l_factors: Vec<PrimePower>,
    /// Exact quotient `(m - 1) / L`.
    pub quotient: BigUint,
}

/// Korselt's criterion over an explicit factor list: squarefreeness is
/// guaranteed by [`FactorSet`], so this checks `(p - 1) | (m - 1)` for every
/// factor and that `m` is a composite of at least three primes.
pub fn korselt_check(factors: &FactorSet) -> Result<KorseltPass, CarmichaelError> {
    if factors.len() < 2 {
        return Err(CarmichaelError::NotComposite);
    }
    let m = factors.product().clone();
    let m_minus_1 = &m - BigUint::one();
    for &p in factors.primes() {
        if !(&m_minus_1 % BigUint::from(p - 1)).is_zero() {
            return Err(CarmichaelError::KorseltFail { witness: p });
        }
    }
    // Two distinct odd primes can never pass the divisibility test, so
    // reaching this point already implies at least three factors.
    debug_assert!(factors.len() >= 3);
    let (l, l_factors) = compute_l(factors);
    let quotient = &m_minus_1 / &l;
    debug_assert_eq!(&quotient * &l, m_minus_1);
    Ok(KorseltPass {
        m,
        l,
        l_factors,
        quotient,
    })
}

/// A verified Carmichael number with its typing under a fixed P.
///
/// `korselt` always holds for a constructed certificate; whether the typing
/// and the `L = 2^alpha * P^2` shape hold is a separate question answered by
/// [`check_shape`], so that the same record can describe a Carmichael number
/// probed under the wrong P.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarmichaelCertificate {
    pub factors: FactorSet,
    pub p: u64,
    /// Per-factor classification, parallel to `factors.primes()`; `None`
    /// when a factor does not classify under `p`.
    pub typed: Vec<Option<FactorType>>,
    pub l: BigUint,
    pub l_factors: Vec<PrimePower>,
    /// 2-adic valuation of L.
    pub alpha: u64,
    pub quotient: BigUint,
}

impl CarmichaelCertificate {
    /// Run the Korselt check and classify every factor under `p`.
    pub fn assemble(factors: FactorSet, p: u64) -> Result<Self, CarmichaelError> {
        let pass = korselt_check(&factors)?;
        let typed = factors
            .primes()
            .iter()
            .map(|&q| classify_factor(q, p))
            .collect();
        let alpha = kernel::two_adic_valuation(&pass.l).expect("L >= 2");
        Ok(CarmichaelCertificate {
            factors,
            p,
            typed,
            l: pass.l,
            l_factors: pass.l_factors,
            alpha,
            quotient: pass.quotient,
        })
    }

    pub fn m(&self) -> &BigUint {
        self.factors.product()
    }

    /// Classified (prime, type) pairs; only meaningful when every factor
    /// classifies, which [`check_shape`] guarantees.
    pub fn typed_factors(&self) -> Vec<(u64, FactorType)> {
        self.factors
            .primes()
            .iter()
            .zip(&self.typed)
            .filter_map(|(&q, t)| t.map(|t| (q, t)))
            .collect()
    }

    pub fn count_class(&self, class: FactorClass) -> usize {
        self.typed
            .iter()
            .filter(|t| t.map(|t| t.class) == Some(class))
            .count()
    }
}

/// True exactly when every factor classifies under the certificate's P, the
/// odd part of L is P^2, and some factor is Type 3.
pub fn check_shape(cert: &CarmichaelCertificate) -> bool {
    if cert.typed.iter().any(|t| t.is_none()) {
        return false;
    }
    let odd = &cert.l >> cert.alpha;
    let p2 = BigUint::from(cert.p) * BigUint::from(cert.p);
    odd == p2 && cert.count_class(FactorClass::Type3) >= 1
}

/// The structural 2-power constraint on any grouping of a Carmichael number
/// into odd factors `2^{a_i} x_i + 1`: a violation is reported exactly when
/// the smallest `a_i` is unique and `2^{a_min + 1}` divides L.
///
/// The divisibility hypothesis is the one the underlying proof actually uses
/// (`2^{a_min + 1} | L`, one power higher than the statement's `2^{a_min}`);
/// with the weaker hypothesis the claim is false, e.g. for 561 grouped as
/// {33, 17} where the minimum 2-power 4 is unique and 2^4 | 80.
pub fn two_power_consistent(groups: &[BigUint], l: &BigUint) -> Result<bool, CarmichaelError> {
    if groups.len() < 2 {
        return Err(CarmichaelError::TooFewGroups);
    }
    let three = BigUint::from(3u32);
    let mut powers = Vec::with_capacity(groups.len());
    for g in groups {
        if g < &three || (g % 2u32).is_zero() {
            return Err(CarmichaelError::BadGroup(g.clone()));
        }
        let v = kernel::two_adic_valuation(&(g - BigUint::one())).expect("g >= 3");
        powers.push(v);
    }
    let a_min = *powers.iter().min().expect("nonempty");
    let unique = powers.iter().filter(|&&a| a == a_min).count() == 1;
    if !unique {
        return Ok(true);
    }
    let modulus = BigUint::one() << (a_min + 1);
    Ok(!(l % modulus).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn fs(primes: &[u64]) -> FactorSet {
        FactorSet::new(primes.to_vec()).unwrap()
    }

    #[test]
    fn factor_set_validation() {
        assert_eq!(FactorSet::new(vec![]), Err(CarmichaelError::Empty));
        assert_eq!(
            FactorSet::new(vec![3, 3]),
            Err(CarmichaelError::NotSquarefree(3))
        );
        assert_eq!(FactorSet::new(vec![9]), Err(CarmichaelError::NotPrime(9)));
        assert_eq!(FactorSet::new(vec![2, 3]), Err(CarmichaelError::EvenFactor));
        let set = fs(&[17, 3, 11]);
        assert_eq!(set.primes(), &[3, 11, 17]);
        assert_eq!(set.product(), &big(561));
    }

    #[test]
    fn compute_l_examples() {
        let (l, f) = compute_l(&fs(&[3, 11, 17]));
        assert_eq!(l, big(80)); // lcm(2, 10, 16) = 2^4 * 5
        assert_eq!(
            f,
            vec![
                PrimePower { prime: 2, exponent: 4 },
                PrimePower { prime: 5, exponent: 1 },
            ]
        );

        let (l, f) = compute_l(&fs(&[5, 7, 17, 19, 73]));
        assert_eq!(l, big(144)); // 2^4 * 3^2
        assert_eq!(
            f,
            vec![
                PrimePower { prime: 2, exponent: 4 },
                PrimePower { prime: 3, exponent: 2 },
            ]
        );

        let (l, _) = compute_l(&fs(&[3]));
        assert_eq!(l, big(2));
    }

    #[test]
    fn korselt_561() {
        let pass = korselt_check(&fs(&[3, 11, 17])).unwrap();
        assert_eq!(pass.m, big(561));
        assert_eq!(pass.l, big(80));
        assert_eq!(pass.quotient, big(7)); // 560 / 80
    }

    #[test]
    fn korselt_case2_subcase2_number() {
        // m = 5*13*257*577*1153; m - 1 = 2^11 * 3^2 * 602947 exactly.
        let pass = korselt_check(&fs(&[5, 13, 257, 577, 1153])).unwrap();
        let expected_m_minus_1 = big(2048) * big(9) * big(602947);
        assert_eq!(&pass.m - BigUint::one(), expected_m_minus_1);
        assert_eq!(pass.l, big(1 << 8) * big(9));
        assert_eq!(pass.quotient, big(8) * big(602947));
    }

    #[test]
    fn korselt_failures() {
        assert_eq!(
            korselt_check(&fs(&[3, 5])),
            Err(CarmichaelError::KorseltFail { witness: 5 })
        );
        assert_eq!(korselt_check(&fs(&[3])), Err(CarmichaelError::NotComposite));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_factor(17, 3),
            Some(FactorType { class: FactorClass::Type1, exponent: 4 })
        );
        assert_eq!(
            classify_factor(37, 3),
            Some(FactorType { class: FactorClass::Type3, exponent: 2 })
        );
        assert_eq!(classify_factor(11, 3), None); // odd part 5 is none of 1, 3, 9
        assert_eq!(
            classify_factor(11, 5),
            Some(FactorType { class: FactorClass::Type2, exponent: 1 })
        );
    }

    #[test]
    fn shape_examples() {
        let cert = CarmichaelCertificate::assemble(fs(&[5, 7, 17, 19, 73]), 3).unwrap();
        assert!(check_shape(&cert));
        assert_eq!(cert.alpha, 4);

        // 561 under P = 5: L = 2^4 * 5, odd part 5 is not 25.
        let cert = CarmichaelCertificate::assemble(fs(&[3, 11, 17]), 5).unwrap();
        assert!(!check_shape(&cert));

        // Wrong P: 7 does not classify under P = 5.
        let cert = CarmichaelCertificate::assemble(fs(&[5, 7, 17, 19, 73]), 5).unwrap();
        assert!(!check_shape(&cert));
    }

    #[test]
    fn two_power_examples() {
        // 561 split into single primes: 2-powers 1, 1, 4 tie at the minimum.
        let groups = vec![big(3), big(11), big(17)];
        assert_eq!(two_power_consistent(&groups, &big(80)), Ok(true));

        // 561 grouped as {3*11, 17}: powers 5 and 4, minimum unique, but
        // 2^5 does not divide 80, so no violation is reported.
        let groups = vec![big(33), big(17)];
        assert_eq!(two_power_consistent(&groups, &big(80)), Ok(true));

        // A unique smallest 2-power of 3 with 2^4 | L is a violation.
        let groups = vec![big(665), big(17)]; // 665 = 2^3 * 83 + 1
        assert_eq!(two_power_consistent(&groups, &big(16 * 9)), Ok(false));

        assert_eq!(
            two_power_consistent(&[big(17)], &big(16)),
            Err(CarmichaelError::TooFewGroups)
        );
        assert_eq!(
            two_power_consistent(&[big(4), big(17)], &big(16)),
            Err(CarmichaelError::BadGroup(big(4)))
        );
    }
}
