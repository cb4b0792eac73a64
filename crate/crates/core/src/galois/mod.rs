//! Monte Carlo screening for full symmetric Galois group: reduce an integer
//! polynomial modulo random primes, read factor degrees off a distinct-degree
//! factorization, and feed the resulting cycle types to the Jordan certificate.

pub mod ff;
pub mod poly;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::invariable::{full_certificate, Certificate};
use crate::perm_model::CycleType;
use crate::primes::is_prime;
use crate::rng::trial_rng;

pub use ff::{Field, FqPoly};
pub use poly::IntPolynomial;

/// Ranges at most this wide are scanned exhaustively by [`sample_prime`].
pub const SCAN_WIDTH: u64 = 1 << 16;
/// Rejection attempts before [`sample_prime`] gives up.
pub const MAX_PRIME_ATTEMPTS: usize = 100_000;
/// Degrees up to this are rejected by the certificate regardless of evidence.
pub const MIN_SUPPORTED_DEGREE: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    NotSquarefree,
    DegreeDrop,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NotSquarefree => "not_squarefree",
            Self::DegreeDrop => "degree_drop",
        })
    }
}

/// Factor degrees of `p mod q`, ascending, or the reason the prime was unusable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeList {
    pub prime: u64,
    pub degrees: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped: Option<SkipReason>,
}

impl DegreeList {
    pub fn is_skipped(&self) -> bool {
        self.skipped.is_some()
    }

    pub fn cycle_type(&self) -> Result<CycleType> {
        if let Some(reason) = self.skipped {
            return Err(invalid(format!(
                "prime {} was skipped ({reason})",
                self.prime
            )));
        }
        CycleType::from_parts(&self.degrees)
    }
}

/// Coefficients of `p` reduced into `[0, q)`.
pub fn reduce(p: &IntPolynomial, q: u64) -> FqPoly {
    let qb = BigInt::from(q);
    let mut out: FqPoly = p
        .coeffs()
        .iter()
        .map(|c| c.mod_floor(&qb).to_u64().expect("residue below q"))
        .collect();
    Field::trim(&mut out);
    out
}

pub fn degree_list(p: &IntPolynomial, q: u64) -> Result<DegreeList> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let skip = |reason| DegreeList {
        prime: q,
        degrees: Vec::new(),
        skipped: Some(reason),
    };
    let mut f = reduce(p, q);
    if f.len() != p.coeffs().len() {
        return Ok(skip(SkipReason::DegreeDrop));
    }
    let field = Field::new(q);
    field.monic(&mut f);
    if !field.is_squarefree(&f) {
        return Ok(skip(SkipReason::NotSquarefree));
    }
    Ok(DegreeList {
        prime: q,
        degrees: field.distinct_degree_degrees(&f),
        skipped: None,
    })
}

/// Uniform prime from `[lo, hi]`.
pub fn sample_prime<R: Rng + ?Sized>(lo: u64, hi: u64, rng: &mut R) -> Result<u64> {
    if lo < 2 || hi <= lo {
        return Err(invalid(format!(
            "prime range needs hi > lo >= 2, got [{lo}, {hi}]"
        )));
    }
    if hi - lo <= SCAN_WIDTH {
        let primes: Vec<u64> = (lo..=hi).filter(|&v| is_prime(v)).collect();
        if primes.is_empty() {
            return Err(Error::NoPrimeInRange {
                lo,
                hi,
                attempts: (hi - lo + 1) as usize,
            });
        }
        return Ok(primes[rng.random_range(0..primes.len())]);
    }
    for _ in 0..MAX_PRIME_ATTEMPTS {
        let v = rng.random_range(lo..=hi);
        if is_prime(v) {
            return Ok(v);
        }
    }
    Err(Error::NoPrimeInRange {
        lo,
        hi,
        attempts: MAX_PRIME_ATTEMPTS,
    })
}

/// `[n^2, 100 n^2]`, saturating.
pub fn default_prime_range(n: usize) -> (u64, u64) {
    let n2 = (n as u64).saturating_mul(n as u64).max(2);
    (n2, n2.saturating_mul(100))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Positive,
    Negative,
    UnsupportedDegree,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Positive => "POSITIVE",
            Self::Negative => "NEGATIVE",
            Self::UnsupportedDegree => "UNSUPPORTED_DEGREE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenVerdict {
    pub verdict: Verdict,
    pub polynomial: IntPolynomial,
    pub n: usize,
    pub r: usize,
    pub seed: u64,
    pub prime_range: (u64, u64),
    /// Primes whose reductions were used, in draw order.
    pub primes: Vec<u64>,
    /// Every draw in order, skipped ones included.
    pub degree_lists: Vec<DegreeList>,
    pub certificate: Certificate,
    /// `n > 12`; the certificate cannot prove anything below that.
    pub degree_supported: bool,
    pub primes_used: usize,
    pub primes_skipped: usize,
}

/// Draw cap for [`screen`].
pub fn resample_cap(r: usize) -> usize {
    4 * r + 64
}

/// Collects `r` usable degree lists and certifies.
///
/// A polynomial whose certificate checks (transitivity, odd class, prime
/// cycle) fail is NEGATIVE at every degree. When they pass but `n <= 12` the
/// verdict is UNSUPPORTED_DEGREE.
pub fn screen(
    p: &IntPolynomial,
    r: usize,
    prime_range: Option<(u64, u64)>,
    seed: u64,
) -> Result<ScreenVerdict> {
    let n = p.degree();
    if r == 0 {
        return Err(invalid("r must be at least 1"));
    }
    if n < 2 {
        return Err(invalid("screening needs degree at least 2"));
    }
    let (lo, hi) = prime_range.unwrap_or_else(|| default_prime_range(n));
    let cap = resample_cap(r);
    let mut rng = trial_rng(seed, 0);
    let mut lists: Vec<DegreeList> = Vec::new();
    let mut used = 0;
    while used < r {
        if lists.len() >= cap {
            let mut reasons: BTreeMap<SkipReason, usize> = BTreeMap::new();
            for l in &lists {
                if let Some(s) = l.skipped {
                    *reasons.entry(s).or_insert(0) += 1;
                }
            }
            let reason = reasons
                .iter()
                .map(|(k, v)| format!("{k}: {v}"))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::ResampleCapExhausted {
                attempts: lists.len(),
                accepted: used,
                wanted: r,
                reason,
            });
        }
        let batch = (r - used).min(cap - lists.len());
        let primes: Vec<u64> = (0..batch)
            .map(|_| sample_prime(lo, hi, &mut rng))
            .collect::<Result<_>>()?;
        let results: Vec<DegreeList> = primes
            .par_iter()
            .map(|&q| degree_list(p, q))
            .collect::<Result<_>>()?;
        used += results.iter().filter(|l| !l.is_skipped()).count();
        lists.extend(results);
    }
    let cycle_types: Vec<CycleType> = lists
        .iter()
        .filter(|l| !l.is_skipped())
        .map(DegreeList::cycle_type)
        .collect::<Result<_>>()?;
    let certificate = full_certificate(&cycle_types)?;
    let checks = certificate.transitive
        && certificate.odd_class_present
        && certificate.large_prime_cycle_present;
    let degree_supported = n >= MIN_SUPPORTED_DEGREE;
    let verdict = match (checks, degree_supported) {
        (false, _) => Verdict::Negative,
        (true, false) => Verdict::UnsupportedDegree,
        (true, true) => Verdict::Positive,
    };
    debug_assert_eq!(
        verdict == Verdict::Positive,
        certificate.proves_full_symmetric()
    );
    Ok(ScreenVerdict {
        verdict,
        polynomial: p.clone(),
        n,
        r,
        seed,
        prime_range: (lo, hi),
        primes: lists
            .iter()
            .filter(|l| !l.is_skipped())
            .map(|l| l.prime)
            .collect(),
        primes_skipped: lists.len() - used,
        primes_used: used,
        degree_lists: lists,
        certificate,
        degree_supported,
    })
}
