//! Exact integer primitives: 2-adic decomposition, least common multiples,
//! deterministic primality and complete factorization of 64-bit values.
//!
//! Everything here is exact. Primality is a deterministic strong-pseudoprime
//! test with a base set proven correct for all 64-bit inputs, so no result in
//! this crate carries a probabilistic caveat. Products of many primes exceed
//! 64 bits and are handled as `BigUint`; primality and factorization are only
//! ever needed for values that fit in a `u64`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("2-adic decomposition of 0 is undefined")]
    ZeroValue,
    #[error("lcm of an empty list is undefined")]
    EmptyList,
}

/// An integer written as `2^two_power * odd_part` with `odd_part` odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddDecomposition {
    pub two_power: u64,
    pub odd_part: BigUint,
}

impl OddDecomposition {
    pub fn recompose(&self) -> BigUint {
        &self.odd_part << self.two_power
    }
}

/// Split `n >= 1` into `2^a * d` with `d` odd. For odd `n` this is `(0, n)`.
pub fn odd_decompose(n: &BigUint) -> Result<OddDecomposition, KernelError> {
    if n.is_zero() {
        return Err(KernelError::ZeroValue);
    }
    let a = n.trailing_zeros().unwrap_or(0);
    Ok(OddDecomposition {
        two_power: a,
        odd_part: n >> a,
    })
}

/// 2-adic valuation of `n >= 1` as a plain integer.
pub fn two_adic_valuation(n: &BigUint) -> Result<u64, KernelError> {
    if n.is_zero() {
        return Err(KernelError::ZeroValue);
    }
    Ok(n.trailing_zeros().unwrap_or(0))
}

/// The 2-power of an odd `v >= 3`: the exponent `a` in `v = 2^a * d + 1`.
pub fn two_power_of(v: u64) -> u32 {
    debug_assert!(v >= 3 && v % 2 == 1);
    (v - 1).trailing_zeros()
}

/// A prime raised to a positive exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    pub fn value(&self) -> BigUint {
        BigUint::from(self.prime).pow(self.exponent)
    }
}

/// Recompose a factorization into the integer it describes.
pub fn recompose(factors: &[PrimePower]) -> BigUint {
    factors
        .iter()
        .fold(BigUint::one(), |acc, pp| acc * pp.value())
}

const TRIAL_DIVISION_CUTOFF: u64 = 1 << 20;

/// Deterministic primality for any `u64`. 0 and 1 are not prime.
///
/// Below 2^20 this is plain trial division; above, a strong-pseudoprime test
/// over the first twelve primes, a witness set proven sufficient for every
/// input below 3.18e23 and in particular for the whole 64-bit range.
///
/// ```
/// use carmichael_core::kernel::is_prime;
///
/// assert!(is_prime(193));
/// assert!(!is_prime(561));
/// ```
pub fn is_prime(n: u64) -> bool {
    if n < TRIAL_DIVISION_CUTOFF {
        return is_prime_trial(n);
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) || n.is_multiple_of(5) {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    WITNESSES.iter().all(|&a| strong_probable_prime(n, a, d, s))
}

fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = 7u64;
    let mut step = 4u64; // alternate +4, +2 around multiples of 6
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += step;
        step = 6 - step;
    }
    true
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime(n: u64, a: u64, d: u64, s: u32) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Complete factorization of `n >= 1` as strictly increasing prime powers.
/// `factorize(1)` is the empty list.
///
/// Trial division up to 10^6, then Brent-cycle Pollard rho on what remains;
/// every cofactor is certified by [`is_prime`] before being accepted.
pub fn factorize(n: u64) -> Vec<PrimePower> {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut out: Vec<PrimePower> = Vec::new();
    let mut rem = n;
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push(PrimePower {
                prime: p,
                exponent: e,
            });
        }
    };

    for p in [2u64, 3, 5] {
        let mut e = 0;
        while rem.is_multiple_of(p) {
            rem /= p;
            e += 1;
        }
        push(p, e);
    }
    let mut d = 7u64;
    let mut step = 4u64;
    while d <= 1_000_000 && d * d <= rem {
        let mut e = 0;
        while rem.is_multiple_of(d) {
            rem /= d;
            e += 1;
        }
        push(d, e);
        d += step;
        step = 6 - step;
    }

    if rem > 1 {
        let mut hard = vec![rem];
        let mut found: Vec<u64> = Vec::new();
        while let Some(v) = hard.pop() {
            if is_prime(v) {
                found.push(v);
            } else {
                let f = pollard_brent(v);
                hard.push(f);
                hard.push(v / f);
            }
        }
        found.sort_unstable();
        let mut i = 0;
        while i < found.len() {
            let p = found[i];
            let mut e = 0;
            while i < found.len() && found[i] == p {
                e += 1;
                i += 1;
            }
            out.push(PrimePower {
                prime: p,
                exponent: e,
            });
        }
    }

    out.sort_by_key(|pp| pp.prime);
    out
}

/// Brent's variant of Pollard rho. `n` must be odd, composite, and free of
/// factors below 10^6, which the caller guarantees.
fn pollard_brent(n: u64) -> u64 {
    debug_assert!(n % 2 == 1 && !is_prime(n) && n > 1);
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
            count += 1;
            if count > 1 << 24 {
                break;
            }
        }
        if d != n && d != 1 {
            return d;
        }
        c += 1; // cycle degenerated; retry with the next polynomial offset
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple of a nonempty list of positive integers.
pub fn lcm_all(values: &[BigUint]) -> Result<BigUint, KernelError> {
    if values.is_empty() {
        return Err(KernelError::EmptyList);
    }
    if values.iter().any(|v| v.is_zero()) {
        return Err(KernelError::ZeroValue);
    }
    Ok(values
        .iter()
        .fold(BigUint::one(), |acc, v| acc.lcm(v)))
}

/// [`lcm_all`] for machine-sized inputs.
pub fn lcm_all_u64(values: &[u64]) -> Result<BigUint, KernelError> {
    let big: Vec<BigUint> = values.iter().map(|&v| BigUint::from(v)).collect();
    lcm_all(&big)
}
