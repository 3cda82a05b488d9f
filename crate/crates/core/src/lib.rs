//! Classification of the Carmichael numbers that carry a known Fermat prime
//! factor and whose invariant `L = lcm(p - 1)` has the shape `2^a * P^2` for
//! an odd prime P.
//!
//! The library is organized bottom-up:
//!
//! - [`kernel`]: exact 2-adic decomposition, lcm, deterministic 64-bit
//!   primality and factorization;
//! - [`carmichael`]: Korselt verification, the L invariant, factor typing,
//!   and the no-unique-smallest-2-power constraint;
//! - [`fermat`]: Fermat-prime combinations and the per-case admissibility
//!   filters for P;
//! - [`ladder`]: primality grids for `2^n + 1`, `2^n P + 1`, `2^n P^2 + 1`;
//! - [`search`]: the minimality-pruned backtracking search and the full
//!   classification sweep;
//! - [`oracle`]: a direct Korselt scan and an exhaustive subset search used
//!   to validate the pruned engine;
//! - [`render`]: plain-text tables.
//!
//! The sweep in [`search::run_all`] reproduces the complete list of eleven
//! such Carmichael numbers; only P = 3 and P = 5 occur.

pub mod carmichael;
pub mod fermat;
pub mod kernel;
pub mod ladder;
pub mod oracle;
pub mod render;
pub mod search;

pub use carmichael::{
    check_shape, classify_factor, compute_l, korselt_check, two_power_consistent,
    CarmichaelCertificate, CarmichaelError, FactorClass, FactorSet, FactorType,
};
pub use fermat::{CandidateTriple, CaseTag, FermatCombo, FERMAT_PRIMES};
pub use kernel::{
    factorize, is_prime, lcm_all, odd_decompose, KernelError, OddDecomposition, PrimePower,
};
pub use ladder::{build_ladder, CellStatus, Ladder, LadderCell, LadderError};
pub use oracle::{brute_carmichael, exhaustive_subset_search, OracleError, ScanResult};
pub use search::{
    expand, run_all, run_case, seed_states, ClassificationReport, RunOutcome, SearchState,
    TraceEvent, TraceKind,
};

/// Run `f` over `items`, in parallel when the `parallel` feature is enabled
/// and the caller asks for it.
pub(crate) mod par {
    #[cfg(feature = "parallel")]
    pub fn map<T, U, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Send + Sync,
    {
        if parallel {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        } else {
            items.into_iter().map(f).collect()
        }
    }

    #[cfg(not(feature = "parallel"))]
    pub fn map<T, U, F>(items: Vec<T>, _parallel: bool, f: F) -> Vec<U>
    where
        F: Fn(T) -> U,
    {
        items.into_iter().map(f).collect()
    }
}
