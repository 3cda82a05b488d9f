//! Standalone property suites: algebraic invariants of the integer kernel,
//! the 2-power partition invariant over the classified numbers, parity-
//! exclusion soundness, and cross-checks between the scan oracle and the
//! factor-list Korselt path.

use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use carmichael_core::carmichael::{
    classify_factor, korselt_check, two_power_consistent, FactorSet,
};
use carmichael_core::fermat::admissible_triples;
use carmichael_core::kernel::{
    factorize, is_prime, lcm_all_u64, odd_decompose, recompose,
};
use carmichael_core::ladder::{build_ladder, CellStatus};
use carmichael_core::oracle::{brute_carmichael, exhaustive_subset_search};
use carmichael_core::search::run_all;

#[test]
fn odd_decompose_reconstructs_everything_to_1e6() {
    for n in 1u64..=1_000_000 {
        let d = odd_decompose(&BigUint::from(n)).unwrap();
        assert_eq!(d.recompose(), BigUint::from(n), "at {n}");
        assert!(&d.odd_part % 2u32 == BigUint::one(), "odd part odd at {n}");
    }
}

#[test]
fn is_prime_agrees_with_sieve_to_1e7() {
    const LIMIT: usize = 10_000_000;
    let mut composite = vec![false; LIMIT + 1];
    let mut n = 2usize;
    while n * n <= LIMIT {
        if !composite[n] {
            let mut v = n * n;
            while v <= LIMIT {
                composite[v] = true;
                v += n;
            }
        }
        n += 1;
    }
    for (v, &is_composite) in composite.iter().enumerate() {
        let expected = v >= 2 && !is_composite;
        assert_eq!(is_prime(v as u64), expected, "at {v}");
    }
}

#[test]
fn factorize_recomposes_small_range_and_random_u64() {
    for n in 1u64..=100_000 {
        assert_eq!(recompose(&factorize(n)), BigUint::from(n), "at {n}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d61_7468);
    for _ in 0..10_000 {
        let n: u64 = rng.gen_range(1..=u64::MAX);
        let factors = factorize(n);
        assert_eq!(recompose(&factors), BigUint::from(n), "at {n}");
        for pp in &factors {
            assert!(is_prime(pp.prime), "factor {} of {n}", pp.prime);
        }
        for w in factors.windows(2) {
            assert!(w[0].prime < w[1].prime, "ascending factors of {n}");
        }
    }
}

proptest! {
    #[test]
    fn lcm_divides_every_input_and_ignores_order(mut values in prop::collection::vec(1u64..1_000_000, 1..8)) {
        let l = lcm_all_u64(&values).unwrap();
        for &v in &values {
            prop_assert!((&l % BigUint::from(v)) == BigUint::from(0u32));
        }
        values.reverse();
        prop_assert_eq!(lcm_all_u64(&values).unwrap(), l);
    }

    #[test]
    fn odd_decompose_roundtrip_random(a in 0u32..40, d in prop::num::u64::ANY) {
        let d = BigUint::from(d | 1); // force odd
        let n = &d << a;
        let dec = odd_decompose(&n).unwrap();
        prop_assert_eq!(dec.two_power, a as u64);
        prop_assert_eq!(dec.odd_part, d);
    }

    #[test]
    fn classification_is_unambiguous(p_idx in 0usize..3, n in 1u32..20) {
        // For a value that classifies, the (class, exponent) is unique since
        // the odd parts 1, P, P^2 are pairwise distinct.
        let p = [3u64, 5, 7][p_idx];
        let candidates = [(1u64 << n) + 1, (1u64 << n) * p + 1, (1u64 << n) * p * p + 1];
        let mut seen = std::collections::BTreeSet::new();
        for v in candidates {
            if v % 2 == 1 && is_prime(v) {
                if let Some(t) = classify_factor(v, p) {
                    prop_assert!(seen.insert((v, t.class)));
                    prop_assert_eq!(t.exponent, n);
                }
            }
        }
    }
}

fn all_partitions_hold(primes: &[u64], l: &BigUint) {
    fn rec(primes: &[u64], l: &BigUint, assignment: &mut Vec<usize>, index: usize, blocks: usize) {
        if index == primes.len() {
            if blocks >= 2 {
                let mut groups = vec![BigUint::one(); blocks];
                for (i, &b) in assignment.iter().enumerate() {
                    groups[b] *= BigUint::from(primes[i]);
                }
                assert_eq!(
                    two_power_consistent(&groups, l),
                    Ok(true),
                    "partition {assignment:?} of {primes:?}"
                );
            }
            return;
        }
        for b in 0..=blocks.min(index) {
            assignment[index] = b;
            rec(primes, l, assignment, index + 1, blocks.max(b + 1));
        }
    }
    let mut assignment = vec![0usize; primes.len()];
    rec(primes, l, &mut assignment, 1, 1);
}

fn random_partitions_hold(primes: &[u64], l: &BigUint, rng: &mut ChaCha8Rng) {
    for _ in 0..1000 {
        let blocks = rng.gen_range(2..=primes.len());
        let assignment: Vec<usize> = (0..primes.len())
            .map(|_| rng.gen_range(0..blocks))
            .collect();
        let used: std::collections::BTreeSet<usize> = assignment.iter().copied().collect();
        if used.len() < 2 {
            continue;
        }
        let remap: std::collections::BTreeMap<usize, usize> =
            used.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let mut groups = vec![BigUint::one(); used.len()];
        for (i, &b) in assignment.iter().enumerate() {
            groups[remap[&b]] *= BigUint::from(primes[i]);
        }
        assert_eq!(two_power_consistent(&groups, l), Ok(true));
    }
}

#[test]
fn two_power_partition_invariant_over_all_certificates() {
    let report = run_all(32).unwrap();
    assert_eq!(report.certificates.len(), 11);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5061_7274);
    for cert in &report.certificates {
        let primes = cert.factors.primes();
        if primes.len() <= 8 {
            all_partitions_hold(primes, &cert.l);
        } else {
            random_partitions_hold(primes, &cert.l, &mut rng);
        }
    }
}

#[test]
fn parity_excluded_cells_are_all_divisible_by_3_and_composite() {
    // Every P that any case filter can reach, including the large ones.
    for p in [5u64, 7, 11, 13, 29, 41, 43, 47, 107, 127, 19661] {
        let n_max = if p > 1000 { 24 } else { 32 };
        let ladder = build_ladder(p, n_max).unwrap();
        for row in ladder.rows() {
            for cell in row {
                if matches!(cell.status, CellStatus::ParityExcluded) {
                    assert_eq!(cell.value % 3, 0, "P={p} n={} {:?}", cell.n, cell.class);
                    assert!(!is_prime(cell.value));
                }
            }
        }
    }
}

#[test]
fn certificates_satisfy_fermat_congruence_spot_checks() {
    let report = run_all(32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4665_726d);
    for cert in &report.certificates {
        let m = cert.m();
        for _ in 0..100 {
            let a = BigUint::from(rng.gen_range(2u64..1 << 62));
            assert_eq!(a.modpow(m, m), &a % m, "a^m = a (mod m) for m = {m}");
        }
    }
}

#[test]
fn scan_hits_pass_the_factor_list_korselt_path() {
    let result = brute_carmichael(1_000_000).unwrap();
    assert_eq!(result.count, 43);
    for (m, factors) in &result.carmichaels {
        let set = FactorSet::new(factors.clone()).unwrap();
        let pass = korselt_check(&set).expect("scan hits satisfy Korselt");
        assert_eq!(pass.m, BigUint::from(*m));
        // Fermat spot check with small witnesses.
        for a in [2u64, 3, 5, 7] {
            let a = BigUint::from(a);
            let m = BigUint::from(*m);
            assert_eq!(a.modpow(&m, &m), &a % &m);
        }
    }
}

#[test]
fn scan_counts_are_monotone_in_the_bound() {
    let mut last = 0usize;
    for bound in [1_000u64, 10_000, 100_000, 1_000_000] {
        let count = brute_carmichael(bound).unwrap().count;
        assert!(count >= last, "count dropped at {bound}");
        last = count;
    }
}

#[test]
fn exhaustive_certificates_below_1e8_appear_in_the_scan() {
    let scan = brute_carmichael(100_000_000).unwrap();
    let scanned: std::collections::BTreeSet<u64> =
        scan.carmichaels.iter().map(|(m, _)| *m).collect();
    let mut checked = 0;
    for triple in admissible_triples() {
        let certs =
            exhaustive_subset_search(triple.p, &triple.combo, triple.case, 12, 10).unwrap();
        for cert in certs {
            if let Ok(m) = u64::try_from(cert.m()) {
                if m <= 100_000_000 {
                    assert!(scanned.contains(&m), "{m} missing from the scan");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 1, "825265 is in range");
}
