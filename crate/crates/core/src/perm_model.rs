//! Cycle types of uniform random permutations and the independent Poisson
//! model that approximates their small-cycle counts.
//!
//! A uniform permutation of `[n]` is sampled only through its cycle type:
//! the cycle through the smallest unplaced point has length uniform on the
//! number of unplaced points, so repeatedly drawing a length uniform on the
//! remaining size reproduces the exact law of the cycle type.
//!
//! The Poisson model sets `X_k ~ Poisson(x/k)` independently (`x = 1` is the
//! untilted law). It is sampled as a Poisson point process: the total count
//! `Z_n` is `Poisson(x H_n)` and, given the total, each point lands on `k`
//! with probability `(1/k) / H_n`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::poisson_lab::m_of;

/// Default cap for exact partition enumeration (p(30) = 5604).
pub const DEFAULT_ORACLE_CAP: usize = 30;

/// Default typicality slack for `tau_eps`.
pub const DEFAULT_EPS: f64 = 0.01;

/// Multiset of cycle lengths of a permutation of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    n: usize,
    counts: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl CycleType {
    pub fn new(n: usize, counts: BTreeMap<usize, usize>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("cycle type of size 0"));
        }
        let mut total = 0usize;
        for (&k, &m) in &counts {
            if k == 0 || k > n {
                return Err(invalid(format!("cycle length {k} outside [1, {n}]")));
            }
            if m == 0 {
                return Err(invalid(format!("zero multiplicity stored for length {k}")));
            }
            total += k * m;
        }
        if total != n {
            return Err(invalid(format!(
                "cycle lengths sum to {total}, expected {n}"
            )));
        }
        Ok(Self { n, counts })
    }

    /// Builds a cycle type from an unordered list of cycle lengths.
    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for &k in parts {
            if k == 0 {
                return Err(invalid("cycle length 0"));
            }
            *counts.entry(k).or_insert(0) += 1;
        }
        Self::new(parts.iter().sum(), counts)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, BTreeMap::from([(1, n)]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }

    pub fn multiplicity(&self, k: usize) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn num_cycles(&self) -> usize {
        self.counts.values().sum()
    }

    /// Cycle lengths in nondecreasing order, repeated by multiplicity.
    pub fn parts(&self) -> Vec<usize> {
        self.counts
            .iter()
            .flat_map(|(&k, &m)| std::iter::repeat_n(k, m))
            .collect()
    }

    pub fn parity(&self) -> Parity {
        parity(self)
    }

    /// Probability of this cycle type under the uniform measure on S_n.
    pub fn probability(&self) -> BigRational {
        let mut denom = BigInt::one();
        for (&k, &m) in &self.counts {
            denom *= BigInt::from(k).pow(m as u32);
            for i in 2..=m {
                denom *= BigInt::from(i);
            }
        }
        BigRational::new(BigInt::one(), denom)
    }
}

impl std::fmt::Display for CycleType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, (k, m)) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}:{m}")?;
        }
        write!(f, "}}")
    }
}

/// Odd iff `n - (number of cycles)` is odd.
pub fn parity(ct: &CycleType) -> Parity {
    if (ct.n - ct.num_cycles()) % 2 == 1 {
        Parity::Odd
    } else {
        Parity::Even
    }
}

/// Exact sample of the cycle type of a uniform element of S_n.
pub fn sample_cycle_type<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CycleType> {
    if n == 0 {
        return Err(invalid("sample_cycle_type requires n >= 1"));
    }
    let mut counts = BTreeMap::new();
    let mut remaining = n;
    while remaining > 0 {
        let len = rng.random_range(1..=remaining);
        *counts.entry(len).or_insert(0) += 1;
        remaining -= len;
    }
    Ok(CycleType { n, counts })
}

/// Poisson-model sample `(X_1, ..., X_limit)`, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityVector {
    limit: usize,
    // (k, X_k) for X_k > 0, increasing in k
    entries: Vec<(usize, u32)>,
}

impl MultiplicityVector {
    pub fn zeros(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(invalid("multiplicity vector needs limit >= 1"));
        }
        Ok(Self {
            limit,
            entries: Vec::new(),
        })
    }

    /// `x[k - 1]` is `X_k`.
    pub fn from_dense(x: &[u32]) -> Result<Self> {
        let mut mv = Self::zeros(x.len())?;
        mv.entries = x
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i + 1, c))
            .collect();
        Ok(mv)
    }

    /// Builds from `(k, count)` pairs; repeated `k` accumulate.
    pub fn from_pairs(limit: usize, pairs: &[(usize, u32)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(k, c) in pairs {
            if k == 0 || k > limit {
                return Err(invalid(format!("index {k} outside [1, {limit}]")));
            }
            *map.entry(k).or_insert(0u32) += c;
        }
        let mut mv = Self::zeros(limit)?;
        mv.entries = map.into_iter().filter(|&(_, c)| c > 0).collect();
        Ok(mv)
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// `X_k` for `1 <= k <= limit`.
    pub fn x(&self, k: usize) -> u32 {
        self.entries
            .binary_search_by_key(&k, |&(j, _)| j)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn nonzero(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn to_dense(&self) -> Vec<u32> {
        let mut x = vec![0; self.limit];
        for &(k, c) in &self.entries {
            x[k - 1] = c;
        }
        x
    }

    /// `Z_limit`.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c as u64).sum()
    }

    /// `W_limit`.
    pub fn total_weight(&self) -> u64 {
        self.entries.iter().map(|&(k, c)| k as u64 * c as u64).sum()
    }

    /// `Z_k` for `k <= limit`.
    pub fn z_at(&self, k: usize) -> u64 {
        self.entries
            .iter()
            .take_while(|&&(j, _)| j <= k)
            .map(|&(_, c)| c as u64)
            .sum()
    }

    /// `W_k` for `k <= limit`.
    pub fn w_at(&self, k: usize) -> u64 {
        self.entries
            .iter()
            .take_while(|&&(j, _)| j <= k)
            .map(|&(j, c)| j as u64 * c as u64)
            .sum()
    }
}

/// Poisson variate by sequential inversion; large means are split into
/// pieces of at most 500 so `e^{-mean}` never underflows.
pub fn sample_poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    const PIECE: f64 = 500.0;
    let mut mean = mean;
    let mut total = 0;
    while mean > PIECE {
        total += poisson_inversion(PIECE, rng);
        mean -= PIECE;
    }
    total + poisson_inversion(mean, rng)
}

fn poisson_inversion<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u >= cdf {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
        if p == 0.0 && k as f64 > mean {
            break;
        }
    }
    k
}

/// Precomputed harmonic prefix sums for sampling the Poisson model up to a
/// fixed truncation.
#[derive(Debug, Clone)]
pub struct PoissonSampler {
    // harmonic[k - 1] = H_k
    harmonic: Vec<f64>,
}

impl PoissonSampler {
    pub fn new(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(invalid("Poisson model needs limit >= 1"));
        }
        let mut harmonic = Vec::with_capacity(limit);
        let mut h = 0.0;
        for k in 1..=limit {
            h += 1.0 / k as f64;
            harmonic.push(h);
        }
        Ok(Self { harmonic })
    }

    pub fn limit(&self) -> usize {
        self.harmonic.len()
    }

    /// `H_limit`.
    pub fn harmonic(&self) -> f64 {
        *self.harmonic.last().unwrap()
    }

    /// Untilted law, `X_k ~ Poisson(1/k)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MultiplicityVector {
        self.sample_scaled(1.0, rng)
    }

    /// Tilted law, `X_k ~ Poisson(x/k)`.
    pub fn sample_tilted<R: Rng + ?Sized>(
        &self,
        x: f64,
        rng: &mut R,
    ) -> Result<MultiplicityVector> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(invalid(format!("tilt must be positive, got {x}")));
        }
        Ok(self.sample_scaled(x, rng))
    }

    fn sample_scaled<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> MultiplicityVector {
        let limit = self.limit();
        let h = self.harmonic();
        let total = sample_poisson_count(x * h, rng);
        let mut points: Vec<usize> = (0..total)
            .map(|_| {
                let u = rng.random::<f64>() * h;
                (self.harmonic.partition_point(|&c| c <= u) + 1).min(limit)
            })
            .collect();
        points.sort_unstable();
        let mut entries: Vec<(usize, u32)> = Vec::new();
        for k in points {
            match entries.last_mut() {
                Some((j, c)) if *j == k => *c += 1,
                _ => entries.push((k, 1)),
            }
        }
        MultiplicityVector { limit, entries }
    }
}

/// One draw of the untilted Poisson model up to `limit`.
pub fn sample_poisson<R: Rng + ?Sized>(limit: usize, rng: &mut R) -> Result<MultiplicityVector> {
    Ok(PoissonSampler::new(limit)?.sample(rng))
}

/// One draw of the tilted Poisson model, `X_k ~ Poisson(x/k)`.
pub fn sample_poisson_tilted<R: Rng + ?Sized>(
    limit: usize,
    x: f64,
    rng: &mut R,
) -> Result<MultiplicityVector> {
    PoissonSampler::new(limit)?.sample_tilted(x, rng)
}

/// Coordinate-by-coordinate sampler; O(limit) per draw. Used to cross-check
/// the point-process sampler.
pub fn sample_poisson_direct<R: Rng + ?Sized>(
    limit: usize,
    x: f64,
    rng: &mut R,
) -> Result<MultiplicityVector> {
    if !(x > 0.0) {
        return Err(invalid(format!("tilt must be positive, got {x}")));
    }
    let mut mv = MultiplicityVector::zeros(limit)?;
    for k in 1..=limit {
        let c = poisson_inversion(x / k as f64, rng);
        if c > 0 {
            mv.entries.push((k, c as u32));
        }
    }
    Ok(mv)
}

#[derive(Debug, Clone)]
pub struct PartitionEntry {
    pub cycle_type: CycleType,
    pub probability: BigRational,
    pub probability_f64: f64,
}

/// All cycle types of S_n with their exact probabilities.
#[derive(Debug, Clone)]
pub struct PartitionTable {
    pub n: usize,
    pub entries: Vec<PartitionEntry>,
}

impl PartitionTable {
    pub fn total_probability(&self) -> BigRational {
        self.entries
            .iter()
            .fold(BigRational::zero(), |acc, e| acc + &e.probability)
    }
}

pub fn enumerate_partitions(n: usize) -> Result<PartitionTable> {
    enumerate_partitions_capped(n, DEFAULT_ORACLE_CAP)
}

pub fn enumerate_partitions_capped(n: usize, cap: usize) -> Result<PartitionTable> {
    if n == 0 {
        return Err(invalid("partition table needs n >= 1"));
    }
    if n > cap {
        return Err(Error::OracleLimit {
            what: "n",
            value: n,
            cap,
        });
    }
    let mut entries = Vec::new();
    let mut parts = Vec::new();
    partitions_rec(n, n, &mut parts, &mut |parts| {
        let ct = CycleType::from_parts(parts).expect("partition parts are valid");
        let probability = ct.probability();
        let probability_f64 = probability.to_f64().unwrap_or(f64::NAN);
        entries.push(PartitionEntry {
            cycle_type: ct,
            probability,
            probability_f64,
        });
    });
    Ok(PartitionTable { n, entries })
}

fn partitions_rec(
    remaining: usize,
    max_part: usize,
    parts: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if remaining == 0 {
        emit(parts);
        return;
    }
    for k in (1..=max_part.min(remaining)).rev() {
        parts.push(k);
        partitions_rec(remaining - k, k, parts, emit);
        parts.pop();
    }
}

/// The stopping quantities of the Poisson model over a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Typicality {
    /// Largest `k` in `[2, limit]` with `Z_k >= (1 + eps) ln k`, else 0.
    pub tau_eps: usize,
    /// Largest `k` in `[3, limit]` with `W_{m(k)} >= k`, else 0.
    pub tau: usize,
    pub t: usize,
    /// `t` reached the truncation, so the true supremum may be larger.
    pub censored: bool,
}

/// Partial-sum profiles `Z_k`, `W_k` and the derived stopping quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileStats {
    /// `z[k - 1] = Z_k`
    pub z: Vec<u64>,
    /// `w[k - 1] = W_k`
    pub w: Vec<u64>,
    pub tau_eps: usize,
    pub tau: usize,
    pub t: usize,
    pub censored: bool,
}

impl ProfileStats {
    pub fn typicality(&self) -> Typicality {
        Typicality {
            tau_eps: self.tau_eps,
            tau: self.tau,
            t: self.t,
            censored: self.censored,
        }
    }
}

fn z_exceeds(z: u64, k: usize, eps: f64) -> bool {
    z as f64 >= (1.0 + eps) * (k as f64).ln()
}

/// Dense profile over `k = 1..=limit`. O(limit).
pub fn profile(mv: &MultiplicityVector, eps: f64) -> ProfileStats {
    let limit = mv.limit();
    let x = mv.to_dense();
    let mut z = Vec::with_capacity(limit);
    let mut w = Vec::with_capacity(limit);
    let (mut zs, mut ws) = (0u64, 0u64);
    for (i, &c) in x.iter().enumerate() {
        zs += c as u64;
        ws += (i as u64 + 1) * c as u64;
        z.push(zs);
        w.push(ws);
    }
    let tau_eps = (2..=limit)
        .rev()
        .find(|&k| z_exceeds(z[k - 1], k, eps))
        .unwrap_or(0);
    let tau = (3..=limit)
        .rev()
        .find(|&k| w[m_of(k).unwrap() - 1] >= k as u64)
        .unwrap_or(0);
    let t = tau_eps.max(tau);
    ProfileStats {
        z,
        w,
        tau_eps,
        tau,
        t,
        censored: t == limit,
    }
}

/// Same stopping quantities as [`profile`], computed segment by segment from
/// the sparse representation in O(#nonzero · log limit).
pub fn typicality(mv: &MultiplicityVector, eps: f64) -> Typicality {
    let limit = mv.limit();
    // Segments [start, end] on which Z and W are constant, top-down.
    let mut segments: Vec<(usize, usize, u64, u64)> = Vec::with_capacity(mv.entries.len() + 1);
    let (mut zs, mut ws) = (0u64, 0u64);
    let mut start = 1;
    for &(k, c) in &mv.entries {
        if k > start {
            segments.push((start, k - 1, zs, ws));
        }
        zs += c as u64;
        ws += k as u64 * c as u64;
        start = k;
    }
    segments.push((start, limit, zs, ws));
    let segs = segments;

    let mut tau_eps = 0;
    for &(a, b, z, _) in segs.iter().rev() {
        let lo = a.max(2);
        if b < lo {
            continue;
        }
        let kmax = (z as f64 / (1.0 + eps)).exp().floor();
        let mut cand = if kmax >= b as f64 { b } else { kmax as usize };
        while cand < b && z_exceeds(z, cand + 1, eps) {
            cand += 1;
        }
        while cand >= lo && !z_exceeds(z, cand, eps) {
            cand -= 1;
        }
        if cand >= lo {
            tau_eps = cand;
            break;
        }
    }

    let mut tau = 0;
    if limit >= 3 {
        for &(a, b, _, w) in segs.iter().rev() {
            // k in [3, limit] with a <= m(k) <= b
            let klo = first_k_with_m_at_least(a, limit);
            let khi = match first_k_with_m_at_least(b + 1, limit) {
                Some(k) => k - 1,
                None => limit,
            };
            let Some(klo) = klo else { continue };
            if khi < klo {
                continue;
            }
            let cand = (khi as u64).min(w);
            if cand >= klo as u64 {
                tau = cand as usize;
                break;
            }
        }
    }
    let t = tau_eps.max(tau);
    Typicality {
        tau_eps,
        tau,
        t,
        censored: t == limit,
    }
}

/// Smallest `k` in `[3, limit]` with `m(k) >= target`, if any.
fn first_k_with_m_at_least(target: usize, limit: usize) -> Option<usize> {
    if limit < 3 || m_of(limit).unwrap() < target {
        return None;
    }
    let (mut lo, mut hi) = (3usize, limit);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if m_of(mid).unwrap() >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use num_traits::One;
    use proptest::prelude::*;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn cycle_type_validation() {
        assert!(CycleType::from_parts(&[2, 3]).is_ok());
        assert!(CycleType::new(5, BTreeMap::from([(2, 1), (3, 0)])).is_err());
        assert!(CycleType::new(5, BTreeMap::from([(2, 1)])).is_err());
        assert!(CycleType::new(3, BTreeMap::from([(4, 1)])).is_err());
        assert!(CycleType::from_parts(&[]).is_err());
    }

    #[test]
    fn sample_rejects_zero_and_fixes_one() {
        let mut rng = trial_rng(0, 0);
        assert!(sample_cycle_type(0, &mut rng).is_err());
        for _ in 0..10 {
            assert_eq!(
                sample_cycle_type(1, &mut rng).unwrap(),
                CycleType::identity(1).unwrap()
            );
        }
    }

    #[test]
    fn parity_examples() {
        let odd = CycleType::from_parts(&[2, 3]).unwrap();
        assert_eq!(parity(&odd), Parity::Odd);
        assert_eq!(parity(&CycleType::identity(7).unwrap()), Parity::Even);
        assert_eq!(
            parity(&CycleType::from_parts(&[2, 2]).unwrap()),
            Parity::Even
        );
    }

    // Sign via explicit permutations of S_n, n <= 6.
    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn cycle_type_of(perm: &[usize]) -> CycleType {
        let mut seen = vec![false; perm.len()];
        let mut parts = Vec::new();
        for s in 0..perm.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            parts.push(len);
        }
        CycleType::from_parts(&parts).unwrap()
    }

    fn inversion_sign(perm: &[usize]) -> Parity {
        let mut inv = 0;
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if perm[i] > perm[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    #[test]
    fn parity_matches_inversion_count_up_to_six() {
        for n in 1..=6 {
            for p in all_perms(n) {
                assert_eq!(parity(&cycle_type_of(&p)), inversion_sign(&p));
            }
        }
    }

    #[test]
    fn partition_table_matches_explicit_permutations() {
        for n in 1..=6 {
            let table = enumerate_partitions(n).unwrap();
            let perms = all_perms(n);
            let total = perms.len() as i64;
            let mut counts: BTreeMap<CycleType, i64> = BTreeMap::new();
            for p in &perms {
                *counts.entry(cycle_type_of(p)).or_insert(0) += 1;
            }
            assert_eq!(counts.len(), table.entries.len());
            for e in &table.entries {
                assert_eq!(e.probability, ratio(counts[&e.cycle_type], total));
            }
        }
    }

    #[test]
    fn partition_table_n3() {
        let t = enumerate_partitions(3).unwrap();
        let get = |parts: &[usize]| {
            let ct = CycleType::from_parts(parts).unwrap();
            t.entries
                .iter()
                .find(|e| e.cycle_type == ct)
                .unwrap()
                .probability
                .clone()
        };
        assert_eq!(get(&[3]), ratio(1, 3));
        assert_eq!(get(&[2, 1]), ratio(1, 2));
        assert_eq!(get(&[1, 1, 1]), ratio(1, 6));
        let t5 = enumerate_partitions(5).unwrap();
        let five = CycleType::from_parts(&[5]).unwrap();
        assert_eq!(
            t5.entries
                .iter()
                .find(|e| e.cycle_type == five)
                .unwrap()
                .probability,
            ratio(1, 5)
        );
    }

    #[test]
    fn partition_tables_normalize_up_to_cap() {
        let counts = [1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for n in 1..=30 {
            let t = enumerate_partitions(n).unwrap();
            assert!(t.total_probability().is_one(), "n = {n}");
            if n <= 10 {
                assert_eq!(t.entries.len(), counts[n - 1]);
            }
        }
        assert_eq!(enumerate_partitions(30).unwrap().entries.len(), 5604);
        assert!(matches!(
            enumerate_partitions(31),
            Err(Error::OracleLimit { .. })
        ));
    }

    #[test]
    fn mean_two_cycles_at_eight() {
        // exact E[m_2] from the table
        let t = enumerate_partitions(8).unwrap();
        let exact = t.entries.iter().fold(BigRational::zero(), |acc, e| {
            acc + &e.probability * BigInt::from(e.cycle_type.multiplicity(2))
        });
        assert_eq!(exact, ratio(1, 2));
        let trials = 100_000;
        let mut rng = trial_rng(11, 0);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..trials {
            let m = sample_cycle_type(8, &mut rng).unwrap().multiplicity(2) as f64;
            sum += m;
            sum_sq += m * m;
        }
        let mean = sum / trials as f64;
        let se = ((sum_sq / trials as f64 - mean * mean) / trials as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn profile_examples() {
        let zero = MultiplicityVector::zeros(10).unwrap();
        let p = profile(&zero, DEFAULT_EPS);
        assert!(p.z.iter().all(|&v| v == 0) && p.w.iter().all(|&v| v == 0));
        assert_eq!((p.tau_eps, p.tau, p.t), (0, 0, 0));
        assert!(!p.censored);

        let mv = MultiplicityVector::from_dense(&[3, 0, 0]).unwrap();
        let p = profile(&mv, DEFAULT_EPS);
        assert_eq!(p.z, vec![3, 3, 3]);
        assert_eq!(p.w, vec![3, 3, 3]);
        // Z_3 = 3 >= 1.01 ln 3 and W_{m(3)} = W_2 = 3 >= 3
        assert_eq!((p.tau_eps, p.tau, p.t), (3, 3, 3));
        assert!(p.censored);
    }

    #[test]
    fn poisson_rejects_bad_input() {
        let mut rng = trial_rng(0, 0);
        assert!(sample_poisson(0, &mut rng).is_err());
        assert!(sample_poisson_tilted(5, 0.0, &mut rng).is_err());
        assert!(sample_poisson_tilted(5, -1.0, &mut rng).is_err());
    }

    #[test]
    fn poisson_first_coordinates() {
        let sampler = PoissonSampler::new(50).unwrap();
        let mut rng = trial_rng(5, 0);
        let trials = 200_000;
        let (mut x1, mut x4, mut zero1, mut z) = (0u64, 0u64, 0u64, 0u64);
        for _ in 0..trials {
            let mv = sampler.sample(&mut rng);
            x1 += mv.x(1) as u64;
            x4 += mv.x(4) as u64;
            zero1 += (mv.x(1) == 0) as u64;
            z += mv.total_count();
        }
        let n = trials as f64;
        // Poisson(mean) sample mean has se sqrt(mean/n)
        assert!((x1 as f64 / n - 1.0).abs() < 4.0 * (1.0 / n).sqrt());
        assert!((x4 as f64 / n - 0.25).abs() < 4.0 * (0.25 / n).sqrt());
        let p0 = (-1.0f64).exp();
        assert!((zero1 as f64 / n - p0).abs() < 4.0 * (p0 * (1.0 - p0) / n).sqrt());
        let h = sampler.harmonic();
        assert!((z as f64 / n - h).abs() < 4.0 * (h / n).sqrt());
    }

    #[test]
    fn tilted_mean_total() {
        let sampler = PoissonSampler::new(1000).unwrap();
        let mut rng = trial_rng(6, 0);
        let trials = 100_000;
        let x = 2.5;
        let z: u64 = (0..trials)
            .map(|_| sampler.sample_tilted(x, &mut rng).unwrap().total_count())
            .sum();
        let mean = x * sampler.harmonic();
        assert!((z as f64 / trials as f64 - mean).abs() < 4.0 * (mean / trials as f64).sqrt());
    }

    #[test]
    fn point_process_matches_direct_sampler() {
        // Compare the law of (X_1, X_2, X_3 capped at 2) between both samplers.
        let trials = 100_000u64;
        let sampler = PoissonSampler::new(30).unwrap();
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        let mut rng = trial_rng(8, 0);
        for _ in 0..trials {
            let mv = sampler.sample_tilted(1.3, &mut rng).unwrap();
            let key = (mv.x(1).min(2), mv.x(2).min(2), mv.x(3).min(2));
            *a.entry(key).or_insert(0u64) += 1;
            let mv = sample_poisson_direct(30, 1.3, &mut rng).unwrap();
            let key = (mv.x(1).min(2), mv.x(2).min(2), mv.x(3).min(2));
            *b.entry(key).or_insert(0u64) += 1;
        }
        for (key, &ca) in &a {
            let cb = *b.get(key).unwrap_or(&0);
            let pa = ca as f64 / trials as f64;
            let pb = cb as f64 / trials as f64;
            let se = ((pa * (1.0 - pa) + pb * (1.0 - pb)) / trials as f64).sqrt();
            assert!((pa - pb).abs() < 5.0 * se + 1e-4, "{key:?}: {pa} vs {pb}");
        }
    }

    proptest! {
        #[test]
        fn sampled_cycle_types_are_valid(n in 1usize..2000, seed: u64) {
            let ct = sample_cycle_type(n, &mut trial_rng(seed, 0)).unwrap();
            prop_assert_eq!(ct.counts().iter().map(|(k, m)| k * m).sum::<usize>(), n);
            prop_assert!(ct.counts().iter().all(|(&k, &m)| m >= 1 && k >= 1 && k <= n));
        }

        #[test]
        fn profiles_are_monotone_and_fast_path_agrees(
            limit in 1usize..400,
            pairs in proptest::collection::vec((1usize..400, 1u32..4), 0..12),
            eps in 0.001f64..2.0,
        ) {
            let pairs: Vec<_> = pairs.into_iter().filter(|&(k, _)| k <= limit).collect();
            let mv = MultiplicityVector::from_pairs(limit, &pairs).unwrap();
            let p = profile(&mv, eps);
            prop_assert!(p.z.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(p.w.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(p.z.iter().zip(&p.w).all(|(z, w)| w >= z));
            prop_assert_eq!(p.t, p.tau_eps.max(p.tau));
            prop_assert_eq!(typicality(&mv, eps), p.typicality());
            prop_assert_eq!(p.z[limit - 1], mv.total_count());
            prop_assert_eq!(p.w[limit - 1], mv.total_weight());
        }

        #[test]
        fn sampled_profiles_agree(seed: u64, limit in 3usize..3000) {
            let mv = PoissonSampler::new(limit).unwrap().sample_tilted(2.0, &mut trial_rng(seed, 1)).unwrap();
            prop_assert_eq!(typicality(&mv, DEFAULT_EPS), profile(&mv, DEFAULT_EPS).typicality());
        }
    }
}
