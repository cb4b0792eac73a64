//! Invariable generation of transitive subgroups from cycle types.
//!
//! Conjugacy classes `V_1, ..., V_r` of S_n invariably generate a transitive
//! group exactly when their sumsets share no element other than 0 and n.
//! Together with an odd class and a prime cycle length in `(n/2, n-5]`,
//! Jordan's theorem (n > 12) then forces the generated group to be S_n.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::perm_model::{enumerate_partitions, sample_cycle_type, CycleType, Parity};
use crate::primes::is_prime;
use crate::rng::run_trials;
use crate::stats::{wilson_interval, MeanEstimate, Moments, Z95};
use crate::sumset::{intersect_nontrivial, sumset_of_cycle_type, SumsetMask};

/// Largest n accepted by [`exact_q`].
pub const EXACT_Q_CAP: usize = 12;
/// Largest n accepted by [`tv_distance_exact`].
pub const TV_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transitivity {
    pub transitive: bool,
    /// Common sumset elements strictly between 0 and n.
    pub common_elements: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub transitive: bool,
    pub odd_class_present: bool,
    pub large_prime_cycle_present: bool,
    pub witness_prime: Option<usize>,
    pub jordan_applicable: bool,
    pub common_elements: Vec<usize>,
}

impl Certificate {
    /// All hypotheses of Jordan's criterion hold.
    pub fn proves_full_symmetric(&self) -> bool {
        self.transitive
            && self.odd_class_present
            && self.large_prime_cycle_present
            && self.jordan_applicable
    }
}

fn common_n(cts: &[CycleType]) -> Result<usize> {
    let first = cts
        .first()
        .ok_or_else(|| invalid("need at least one cycle type"))?;
    let n = first.n();
    if let Some(bad) = cts.iter().find(|c| c.n() != n) {
        return Err(invalid(format!(
            "cycle types of different sizes: {n} and {}",
            bad.n()
        )));
    }
    Ok(n)
}

pub fn invariably_transitive(cts: &[CycleType]) -> Result<Transitivity> {
    let n = common_n(cts)?;
    let masks: Vec<SumsetMask> = cts.iter().map(sumset_of_cycle_type).collect();
    let common_elements = intersect_nontrivial(&masks, n, true)?;
    Ok(Transitivity {
        transitive: common_elements.is_empty(),
        common_elements,
    })
}

/// True if `k` is a prime in `(n/2, n-5]`.
pub fn is_jordan_prime(k: usize, n: usize) -> bool {
    2 * k > n && k + 5 <= n && is_prime(k as u64)
}

pub fn full_certificate(cts: &[CycleType]) -> Result<Certificate> {
    let n = common_n(cts)?;
    let Transitivity {
        transitive,
        common_elements,
    } = invariably_transitive(cts)?;
    let odd_class_present = cts.iter().any(|c| c.parity() == Parity::Odd);
    let witness_prime = cts
        .iter()
        .flat_map(|c| c.counts().keys().copied())
        .filter(|&k| is_jordan_prime(k, n))
        .max();
    Ok(Certificate {
        n,
        transitive,
        odd_class_present,
        large_prime_cycle_present: witness_prime.is_some(),
        witness_prime,
        jordan_applicable: n > 12,
        common_elements,
    })
}

/// Monte Carlo estimate of the probability that `r` uniform cycle types of
/// S_n invariably generate a transitive group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QEstimate {
    pub n: usize,
    pub r: usize,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Wilson 95%.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl QEstimate {
    fn new(n: usize, r: usize, successes: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
        Self {
            n,
            r,
            trials,
            successes,
            estimate: successes as f64 / trials as f64,
            ci_low,
            ci_high,
        }
    }

    /// Wilson interval at another normal quantile.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, z)
    }
}

/// Samples `r_max` cycle types and returns the smallest prefix length whose
/// sumsets have no common interior element, or `r_max + 1` if none does.
pub fn first_transitive_prefix<R: rand::Rng + ?Sized>(
    n: usize,
    r_max: usize,
    rng: &mut R,
) -> usize {
    let mut acc: Option<SumsetMask> = None;
    let mut hit = r_max + 1;
    for r in 1..=r_max {
        let ct = sample_cycle_type(n, rng).expect("n >= 1");
        let mask = sumset_of_cycle_type(&ct);
        match acc.as_mut() {
            Some(a) => a.and_assign(&mask).expect("same window"),
            None => acc = Some(mask),
        }
        if hit > r_max && !acc.as_ref().unwrap().has_interior() {
            hit = r;
        }
    }
    hit
}

/// Per-prefix success indicators recomputed from scratch for each `r`.
pub fn prefix_indicators<R: rand::Rng + ?Sized>(n: usize, r_max: usize, rng: &mut R) -> Vec<bool> {
    let cts: Vec<CycleType> = (0..r_max)
        .map(|_| sample_cycle_type(n, rng).expect("n >= 1"))
        .collect();
    (1..=r_max)
        .map(|r| invariably_transitive(&cts[..r]).unwrap().transitive)
        .collect()
}

/// Estimates q(n, r) for r = 1..=r_max with prefix coupling: each trial
/// draws `r_max` cycle types and scores every prefix.
pub fn estimate_q(n: usize, r_max: usize, trials: u64, seed: u64) -> Result<Vec<QEstimate>> {
    if n < 2 {
        return Err(invalid("estimate_q needs n >= 2"));
    }
    if r_max == 0 {
        return Err(invalid("estimate_q needs r_max >= 1"));
    }
    if trials == 0 {
        return Err(invalid("estimate_q needs trials >= 1"));
    }
    // first_hit[r - 1] counts trials that first became transitive at prefix r
    let first_hit: Vec<u64> = run_trials(trials, seed, |_, rng, acc: &mut Vec<u64>| {
        if acc.is_empty() {
            acc.resize(r_max + 1, 0);
        }
        acc[first_transitive_prefix(n, r_max, rng) - 1] += 1;
    });
    let mut successes = 0;
    Ok((1..=r_max)
        .map(|r| {
            successes += first_hit.get(r - 1).copied().unwrap_or(0);
            QEstimate::new(n, r, successes, trials)
        })
        .collect())
}

fn interior_key(mask: &SumsetMask) -> u64 {
    let n = mask.window();
    (1..n)
        .filter(|&j| mask.contains(j))
        .fold(0u64, |acc, j| acc | 1 << j)
}

/// Exact probability that `r` independent uniform cycle types of S_n have no
/// common interior sumset element.
pub fn exact_q(n: usize, r: usize) -> Result<BigRational> {
    if n == 0 || r == 0 {
        return Err(invalid("exact_q needs n >= 1 and r >= 1"));
    }
    if n > EXACT_Q_CAP {
        return Err(Error::OracleLimit {
            what: "n",
            value: n,
            cap: EXACT_Q_CAP,
        });
    }
    let table = enumerate_partitions(n)?;
    let mut classes: HashMap<u64, BigRational> = HashMap::new();
    for e in &table.entries {
        let key = interior_key(&sumset_of_cycle_type(&e.cycle_type));
        *classes.entry(key).or_insert_with(BigRational::zero) += &e.probability;
    }
    let full: u64 = (1..n).fold(0, |acc, j| acc | 1 << j);
    let mut states: HashMap<u64, BigRational> = HashMap::from([(full, BigRational::one())]);
    for _ in 0..r {
        let mut next: HashMap<u64, BigRational> = HashMap::new();
        for (s, ps) in &states {
            for (c, pc) in &classes {
                *next.entry(s & c).or_insert_with(BigRational::zero) += ps * pc;
            }
        }
        states = next;
    }
    Ok(states.remove(&0).unwrap_or_else(BigRational::zero))
}

/// Coefficients of `prod_j (1 + z^j)^{m_j}`: entry `k` counts invariant sets
/// of size `k` that are unions of cycles.
pub fn invariant_set_counts(ct: &CycleType) -> Vec<BigUint> {
    let n = ct.n();
    let mut coeffs = vec![BigUint::zero(); n + 1];
    coeffs[0] = BigUint::one();
    let mut degree = 0;
    for (&j, &m) in ct.counts() {
        for _ in 0..m {
            degree += j;
            for k in (j..=degree).rev() {
                let (lo, hi) = coeffs.split_at_mut(k);
                hi[0] += &lo[k - j];
            }
        }
    }
    coeffs
}

pub fn count_invariant_sets(ct: &CycleType, k: usize) -> Result<BigUint> {
    if k > ct.n() {
        return Err(invalid(format!("k = {k} exceeds n = {}", ct.n())));
    }
    Ok(invariant_set_counts(ct).swap_remove(k))
}

/// Exact expected number of invariant `k`-sets of a uniform permutation.
pub fn exact_mean_invariant_sets(n: usize, k: usize) -> Result<BigRational> {
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    let table = enumerate_partitions(n)?;
    Ok(table.entries.iter().fold(BigRational::zero(), |acc, e| {
        let c = BigInt::from(invariant_set_counts(&e.cycle_type).swap_remove(k));
        acc + &e.probability * c
    }))
}

/// Monte Carlo mean number of invariant `k`-sets; the exact value is 1.
pub fn mean_invariant_sets(n: usize, k: usize, trials: u64, seed: u64) -> Result<MeanEstimate> {
    if n == 0 || k > n {
        return Err(invalid(format!(
            "need 0 <= k <= n and n >= 1, got n = {n}, k = {k}"
        )));
    }
    if trials < 2 {
        return Err(invalid("mean_invariant_sets needs trials >= 2"));
    }
    let m: Moments = run_trials(trials, seed, |_, rng, acc: &mut Moments| {
        let ct = sample_cycle_type(n, rng).expect("n >= 1");
        let c = invariant_set_counts(&ct).swap_remove(k);
        acc.push(c.to_f64().unwrap_or(f64::INFINITY));
    });
    Ok(m.summary(Z95))
}

fn ln_factorial(c: usize) -> f64 {
    (2..=c).map(|i| (i as f64).ln()).sum()
}

/// Exact total variation distance between the joint law of the small-cycle
/// counts `(C_1, ..., C_m)` of a uniform permutation of `[n]` and the product
/// of `Poisson(1/j)`, `j <= m`.
///
/// The Poisson mass outside the finite support of the permutation law is
/// accounted for as `1 - sum over the support`, so nothing is truncated.
pub fn tv_distance_exact(n: usize, m: usize) -> Result<f64> {
    if n == 0 || m == 0 || m > n {
        return Err(invalid(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
    }
    if n > TV_CAP {
        return Err(Error::OracleLimit {
            what: "n",
            value: n,
            cap: TV_CAP,
        });
    }
    let table = enumerate_partitions(n)?;
    let mut marginal: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
    for e in &table.entries {
        let key: Vec<usize> = (1..=m).map(|j| e.cycle_type.multiplicity(j)).collect();
        *marginal.entry(key).or_insert_with(BigRational::zero) += &e.probability;
    }
    let h_m: f64 = (1..=m).map(|j| 1.0 / j as f64).sum();
    let mut abs_diff = 0.0;
    let mut poisson_inside = 0.0;
    for (key, q) in &marginal {
        let log_nu: f64 = key
            .iter()
            .enumerate()
            .map(|(i, &c)| -(c as f64) * ((i + 1) as f64).ln() - ln_factorial(c))
            .sum::<f64>()
            - h_m;
        let nu = log_nu.exp();
        poisson_inside += nu;
        abs_diff += (q.to_f64().unwrap() - nu).abs();
    }
    let outside = (1.0 - poisson_inside).max(0.0);
    Ok((0.5 * (abs_diff + outside)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use proptest::prelude::*;

    fn ct(parts: &[usize]) -> CycleType {
        CycleType::from_parts(parts).unwrap()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn transitivity_examples() {
        let t = invariably_transitive(&[ct(&[3, 4]), ct(&[2, 5])]).unwrap();
        assert!(t.transitive);
        let t = invariably_transitive(&[ct(&[2, 2]), ct(&[2, 2])]).unwrap();
        assert!(!t.transitive);
        assert_eq!(t.common_elements, vec![2]);
        assert!(invariably_transitive(&[ct(&[17])]).unwrap().transitive);
        assert!(invariably_transitive(&[ct(&[3]), ct(&[2, 2])]).is_err());
        assert!(invariably_transitive(&[]).is_err());
    }

    #[test]
    fn certificate_examples() {
        let c = full_certificate(&[ct(&[11, 3, 2]), ct(&[16])]).unwrap();
        assert_eq!(c.witness_prime, Some(11));
        assert!(c.large_prime_cycle_present && c.jordan_applicable && c.transitive);
        // 11 + 3 + 2 has 3 cycles: 16 - 3 = 13 odd
        assert!(c.odd_class_present);
        assert!(c.proves_full_symmetric());

        let c = full_certificate(&[ct(&[8]), ct(&[5, 3])]).unwrap();
        assert!(!c.jordan_applicable);
        assert!(!c.large_prime_cycle_present);

        let c = full_certificate(&[ct(&[3, 3]), ct(&[5, 1])]).unwrap();
        assert!(!c.odd_class_present);

        // 13 is prime but 13 > 17 - 5
        let c = full_certificate(&[ct(&[13, 4])]).unwrap();
        assert_eq!(c.witness_prime, None);
    }

    #[test]
    fn exact_q_spot_values() {
        assert_eq!(exact_q(3, 1).unwrap(), rat(1, 3));
        assert_eq!(exact_q(3, 2).unwrap(), rat(5, 9));
        assert!(exact_q(1, 3).unwrap().is_one());
        assert!(matches!(exact_q(13, 1), Err(Error::OracleLimit { .. })));
        // r = 1: only the n-cycle has no interior sums
        for n in 2..=12 {
            assert_eq!(exact_q(n, 1).unwrap(), rat(1, n as i64));
        }
    }

    // Brute force over all r-tuples of partitions for tiny n.
    #[test]
    fn exact_q_matches_tuple_enumeration() {
        for n in 2..=6 {
            let table = enumerate_partitions(n).unwrap();
            for r in 1..=3 {
                let mut total = BigRational::zero();
                let k = table.entries.len();
                let mut idx = vec![0usize; r];
                loop {
                    let cts: Vec<CycleType> = idx
                        .iter()
                        .map(|&i| table.entries[i].cycle_type.clone())
                        .collect();
                    if invariably_transitive(&cts).unwrap().transitive {
                        total += idx.iter().fold(BigRational::one(), |p, &i| {
                            p * &table.entries[i].probability
                        });
                    }
                    let mut pos = 0;
                    while pos < r {
                        idx[pos] += 1;
                        if idx[pos] < k {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                    if pos == r {
                        break;
                    }
                }
                assert_eq!(exact_q(n, r).unwrap(), total, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn invariant_set_count_examples() {
        assert_eq!(
            count_invariant_sets(&ct(&[1, 1, 1]), 2).unwrap(),
            3u32.into()
        );
        assert_eq!(count_invariant_sets(&ct(&[5]), 2).unwrap(), 0u32.into());
        assert_eq!(
            count_invariant_sets(&ct(&[2, 2, 4]), 4).unwrap(),
            2u32.into()
        );
        assert!(count_invariant_sets(&ct(&[5]), 6).is_err());
    }

    #[test]
    fn exact_mean_is_one_at_eight() {
        for k in 0..=8 {
            assert!(exact_mean_invariant_sets(8, k).unwrap().is_one());
        }
    }

    #[test]
    fn mean_estimate_whole_set() {
        let e = mean_invariant_sets(9, 9, 100, 1).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn tv_examples() {
        let a = tv_distance_exact(6, 2).unwrap();
        let b = tv_distance_exact(12, 2).unwrap();
        assert!((0.0..=1.0).contains(&a));
        assert!(b < a);
        assert!(tv_distance_exact(21, 2).is_err());
        assert!(tv_distance_exact(5, 6).is_err());
        // n = m = 1: Q is a point mass at C_1 = 1, Poisson(1) has mass 1/e there
        let t = tv_distance_exact(1, 1).unwrap();
        assert!((t - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        // n = 2, m = 1: C_1 is 2 or 0 with probability 1/2 each
        let e1 = (-1.0f64).exp();
        let by_hand = 0.5 * ((0.5 - e1).abs() + (0.5 - e1 / 2.0).abs() + (1.0 - 1.5 * e1));
        assert!((tv_distance_exact(2, 1).unwrap() - by_hand).abs() < 1e-15);
        // summation order is fixed
        for _ in 0..5 {
            assert_eq!(
                tv_distance_exact(12, 3).unwrap().to_bits(),
                tv_distance_exact(12, 3).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn prefix_paths_are_monotone() {
        let mut rng = trial_rng(3, 0);
        for _ in 0..2000 {
            let ind = prefix_indicators(12, 6, &mut rng);
            assert!(ind.windows(2).all(|w| !w[0] || w[1]), "{ind:?}");
        }
    }

    #[test]
    fn fast_prefix_matches_recomputation() {
        for i in 0..2000 {
            let first = first_transitive_prefix(20, 5, &mut trial_rng(4, i));
            let ind = prefix_indicators(20, 5, &mut trial_rng(4, i));
            let expected = ind.iter().position(|&b| b).map(|p| p + 1).unwrap_or(6);
            assert_eq!(first, expected);
        }
    }

    #[test]
    fn estimate_q_is_monotone_in_r() {
        let est = estimate_q(30, 5, 5000, 9).unwrap();
        assert!(est.windows(2).all(|w| w[0].successes <= w[1].successes));
        assert!(est
            .iter()
            .all(|e| e.ci_low <= e.estimate && e.estimate <= e.ci_high));
        assert!(estimate_q(1, 3, 10, 0).is_err());
        assert!(estimate_q(5, 0, 10, 0).is_err());
    }

    proptest! {
        #[test]
        fn counts_are_symmetric_and_total(parts in proptest::collection::vec(1usize..12, 1..8)) {
            let c = CycleType::from_parts(&parts).unwrap();
            let counts = invariant_set_counts(&c);
            let n = c.n();
            for k in 0..=n {
                prop_assert_eq!(&counts[k], &counts[n - k]);
            }
            let total: BigUint = counts.iter().sum();
            prop_assert_eq!(total, BigUint::one() << c.num_cycles());
        }
    }
}
