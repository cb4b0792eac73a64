//! Quantitative machinery of the Poisson model: moment generating functions
//! and Chernoff bounds for `Z_n` and `W_n`, tail verification, the large
//! deviation rate via exponential tilting, annealed and quenched membership
//! probabilities, the partial sums `A_n`, the exponent `η`, the
//! `prod exp(z^k/k)` identity and the fourfold intersection experiment.
//!
//! All logarithms are natural.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::perm_model::{typicality, MultiplicityVector, PoissonSampler};
use crate::rng::{avalanche, run_trials, run_trials_with, Accumulator};
use crate::stats::{least_squares, MeanEstimate, Moments, Proportion, Z95};
use crate::sumset::{sumset_of_multiplicities, SumsetMask};

/// Largest degree accepted by [`gf_coefficient_check`].
pub const GF_CAP: usize = 500;

/// `m(n) = floor(n / ln n)`.
pub fn m_of(n: usize) -> Result<usize> {
    if n < 3 {
        return Err(invalid(format!("m(n) needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    Ok((nf / nf.ln()).floor() as usize)
}

pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|j| 1.0 / j as f64).sum()
}

/// `ln E exp(λ Z_n) = H_n (e^λ - 1)`.
pub fn psi_z(n: usize, lambda: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("psi_z needs n >= 1"));
    }
    let v = harmonic(n) * lambda.exp_m1();
    if !v.is_finite() {
        return Err(Error::Range(format!("psi_z({n}, {lambda}) overflows")));
    }
    Ok(v)
}

/// `ln E exp(λ W_n) = sum_{j <= n} (e^{jλ} - 1) / j`.
pub fn psi_w(n: usize, lambda: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("psi_w needs n >= 1"));
    }
    if n as f64 * lambda > 700.0 {
        return Err(Error::Range(format!(
            "psi_w({n}, {lambda}): exponent {} too large",
            n as f64 * lambda
        )));
    }
    let v: f64 = (1..=n)
        .map(|j| (j as f64 * lambda).exp_m1() / j as f64)
        .sum();
    if !v.is_finite() {
        return Err(Error::Range(format!("psi_w({n}, {lambda}) overflows")));
    }
    Ok(v)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(move |i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
}

const GRID_POINTS: usize = 400;

/// Upper bound on `ln P(Z_n >= a)`: the smallest `psi_z(λ) - aλ` over a
/// λ-grid and the closed-form candidates `ln(a/H_n)` and `ln(a/ln n)`.
pub fn markov_bound_z(n: usize, a: f64) -> Result<f64> {
    let h = harmonic(n);
    if !(a > h) {
        return Err(invalid(format!("need a > H_n = {h}, got {a}")));
    }
    let mut candidates: Vec<f64> = log_grid(1e-6, 50.0, GRID_POINTS).collect();
    candidates.push((a / h).ln());
    if n > 1 && a > (n as f64).ln() {
        candidates.push((a / (n as f64).ln()).ln());
    }
    Ok(candidates
        .into_iter()
        .filter_map(|l| psi_z(n, l).ok().map(|p| p - a * l))
        .fold(f64::INFINITY, f64::min))
}

/// Upper bound on `ln P(W_n >= a)` from the same construction, with the
/// candidate `λ = ln a · ln ln a / a`.
pub fn markov_bound_w(n: usize, a: f64) -> Result<f64> {
    if !(a > n as f64) {
        return Err(invalid(format!("need a > n = {n}, got {a}")));
    }
    let nf = n as f64;
    let mut candidates: Vec<f64> = log_grid(1e-6 / nf, 700.0 / nf, GRID_POINTS).collect();
    if a > std::f64::consts::E {
        candidates.push(a.ln() * a.ln().ln() / a);
    }
    Ok(candidates
        .into_iter()
        .filter_map(|l| psi_w(n, l).ok().map(|p| p - a * l))
        .fold(f64::INFINITY, f64::min))
}

/// `β(ε) = (1+ε) ln(1+ε) - ε`.
pub fn beta(eps: f64) -> Result<f64> {
    if !(eps > -1.0) {
        return Err(invalid(format!("beta needs eps > -1, got {eps}")));
    }
    Ok((1.0 + eps) * eps.ln_1p() - eps)
}

/// `ln(e · n^{-β(ε)})`, the log of the tail bound for `Z_n >= (1+ε) ln n`.
pub fn log_tail_bound_z(n: usize, eps: f64) -> Result<f64> {
    Ok(1.0 - beta(eps)? * (n as f64).ln())
}

/// `-ln n (ln ln n - 1)`, the log of the tail bound for `W_{m(n)} >= n`.
pub fn log_tail_bound_w(n: usize) -> f64 {
    let l = (n as f64).ln();
    -l * (l.ln() - 1.0)
}

/// Monte Carlo tail probability against an analytic bound, on log scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub log_bound: f64,
    pub log_estimate: f64,
    /// Wilson 95% on log scale.
    pub log_ci: (f64, f64),
    pub satisfied: bool,
}

impl BoundReport {
    fn new(n: usize, p: Proportion, log_bound: f64) -> Self {
        let log_ci = (p.ci_low.ln(), p.ci_high.ln());
        Self {
            n,
            trials: p.trials,
            successes: p.successes,
            log_bound,
            log_estimate: p.estimate.ln(),
            log_ci,
            satisfied: log_ci.1 <= log_bound,
        }
    }

    pub fn proportion(&self) -> Proportion {
        Proportion::new(self.successes, self.trials, Z95)
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    Ok(())
}

/// Estimates `P(Z_n >= (1+ε) ln n)` and compares it with `e n^{-β(ε)}`.
pub fn verify_tail_z(n: usize, eps: f64, trials: u64, seed: u64) -> Result<BoundReport> {
    check_trials(trials)?;
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    let sampler = PoissonSampler::new(n)?;
    let threshold = (1.0 + eps) * (n as f64).ln();
    let hits: u64 = run_trials(trials, seed, |_, rng, acc: &mut u64| {
        *acc += (sampler.sample(rng).total_count() as f64 >= threshold) as u64;
    });
    Ok(BoundReport::new(
        n,
        Proportion::new(hits, trials, Z95),
        log_tail_bound_z(n, eps)?,
    ))
}

/// Estimates `P(W_{m(n)} >= n)` and compares it with `exp(-ln n (ln ln n - 1))`.
pub fn verify_tail_w(n: usize, trials: u64, seed: u64) -> Result<BoundReport> {
    check_trials(trials)?;
    let m = m_of(n)?;
    let sampler = PoissonSampler::new(m)?;
    let hits: u64 = run_trials(trials, seed, |_, rng, acc: &mut u64| {
        *acc += (sampler.sample(rng).total_weight() >= n as u64) as u64;
    });
    Ok(BoundReport::new(
        n,
        Proportion::new(hits, trials, Z95),
        log_tail_bound_w(n),
    ))
}

/// `x - 1 - x ln x`.
pub fn rate_function(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid(format!("rate function needs x > 0, got {x}")));
    }
    Ok(x - 1.0 - x * x.ln())
}

/// `ln dP/dP_x = (x - 1) H_limit - Z_limit ln x`.
pub fn tilt_log_weight(mv: &MultiplicityVector, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid(format!("tilt needs x > 0, got {x}")));
    }
    Ok((x - 1.0) * harmonic(mv.limit()) - mv.total_count() as f64 * x.ln())
}

/// Exact `P(Z_n >= a)`; `Z_n` is `Poisson(H_n)`.
pub fn exact_tail_z(n: usize, a: f64) -> f64 {
    let mean = harmonic(n);
    let k0 = a.ceil().max(0.0) as u64;
    let ln_pmf = |k: u64| -> f64 {
        k as f64 * mean.ln() - mean - (1..=k).map(|i| (i as f64).ln()).sum::<f64>()
    };
    if (k0 as f64) <= mean {
        let below: f64 = (0..k0).map(|k| ln_pmf(k).exp()).sum();
        return (1.0 - below).max(0.0);
    }
    let mut total = 0.0;
    let mut term = ln_pmf(k0).exp();
    let mut k = k0;
    while term > total * 1e-18 && term > 0.0 {
        total += term;
        k += 1;
        term *= mean / k as f64;
    }
    total
}

/// Importance-sampling estimate of `P(Z_n >= x ln n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpReport {
    pub n: usize,
    pub x: f64,
    pub tilt: f64,
    pub trials: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// `ln(estimate) / ln n`
    pub exponent: f64,
    /// Delta-method standard error of `exponent`.
    pub exponent_std_error: f64,
    /// `x - 1 - x ln x`
    pub rate: f64,
    /// `ln P(Z_n >= x ln n) / ln n` from the exact Poisson tail.
    pub exact_exponent: f64,
}

/// Estimates `P(Z_n >= x ln n)` by sampling the tilted law `Poisson(tilt/k)`
/// and weighting by `exp((tilt - 1) H_n) tilt^{-Z_n}`.
pub fn tilted_tail_estimate(
    n: usize,
    x: f64,
    tilt: f64,
    trials: u64,
    seed: u64,
) -> Result<SharpReport> {
    check_trials(trials)?;
    if n < 2 {
        return Err(invalid("need n >= 2"));
    }
    let rate = rate_function(x)?;
    if !(tilt > 0.0) {
        return Err(invalid(format!("tilt must be positive, got {tilt}")));
    }
    let sampler = PoissonSampler::new(n)?;
    let ln_n = (n as f64).ln();
    let threshold = x * ln_n;
    let h = sampler.harmonic();
    let m: Moments = run_trials(trials, seed, |_, rng, acc: &mut Moments| {
        let mv = sampler.sample_tilted(tilt, rng).expect("tilt > 0");
        let z = mv.total_count() as f64;
        let w = if z >= threshold {
            ((tilt - 1.0) * h - z * tilt.ln()).exp()
        } else {
            0.0
        };
        acc.push(w);
    });
    let estimate = m.mean();
    let std_error = m.std_error();
    Ok(SharpReport {
        n,
        x,
        tilt,
        trials,
        estimate,
        std_error,
        exponent: estimate.ln() / ln_n,
        exponent_std_error: std_error / (estimate * ln_n),
        rate,
        exact_exponent: exact_tail_z(n, threshold).ln() / ln_n,
    })
}

/// Tilted estimate at the natural tilt `x`.
pub fn verify_sharp(n: usize, x: f64, trials: u64, seed: u64) -> Result<SharpReport> {
    tilted_tail_estimate(n, x, x, trials, seed)
}

/// Plain Monte Carlo estimate of `P(Z_n >= x ln n)`.
pub fn plain_tail_estimate(n: usize, x: f64, trials: u64, seed: u64) -> Result<Proportion> {
    check_trials(trials)?;
    let sampler = PoissonSampler::new(n)?;
    let threshold = x * (n as f64).ln();
    let hits: u64 = run_trials(trials, seed, |_, rng, acc: &mut u64| {
        *acc += (sampler.sample(rng).total_count() as f64 >= threshold) as u64;
    });
    Ok(Proportion::new(hits, trials, Z95))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipEstimate {
    pub n: usize,
    pub trials: u64,
    /// `P(n ∈ S)`
    pub annealed: Proportion,
    /// `P(T < m(n) and n ∈ S)`
    pub quenched: Proportion,
    /// Trials where the truncated `T` reached the window.
    pub censored: u64,
}

#[derive(Default)]
struct MembershipAcc {
    annealed: u64,
    quenched: u64,
    censored: u64,
}

impl Accumulator for MembershipAcc {
    fn merge(&mut self, o: Self) {
        self.annealed += o.annealed;
        self.quenched += o.quenched;
        self.censored += o.censored;
    }
}

/// One trial of the membership experiment: `(n ∈ S, quenched event, censored)`.
pub fn membership_trial(
    sampler: &PoissonSampler,
    n: usize,
    m: usize,
    eps: f64,
    rng: &mut crate::rng::TrialRng,
) -> (bool, bool, bool) {
    let mv = sampler.sample(rng);
    let member = sumset_of_multiplicities(&mv, n)
        .expect("window equals truncation")
        .contains(n);
    let typ = typicality(&mv, eps);
    (member, member && typ.t < m, typ.censored)
}

pub fn estimate_membership(
    n: usize,
    trials: u64,
    seed: u64,
    eps: f64,
) -> Result<MembershipEstimate> {
    check_trials(trials)?;
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    let m = m_of(n)?;
    let sampler = PoissonSampler::new(n)?;
    let acc: MembershipAcc = run_trials(trials, seed, |_, rng, acc: &mut MembershipAcc| {
        let (a, q, c) = membership_trial(&sampler, n, m, eps, rng);
        acc.annealed += a as u64;
        acc.quenched += q as u64;
        acc.censored += c as u64;
    });
    Ok(MembershipEstimate {
        n,
        trials,
        annealed: Proportion::new(acc.annealed, trials, Z95),
        quenched: Proportion::new(acc.quenched, trials, Z95),
        censored: acc.censored,
    })
}

/// `P(n ∈ S)` alone; defined for every `n >= 1`.
pub fn estimate_annealed(n: usize, trials: u64, seed: u64) -> Result<Proportion> {
    check_trials(trials)?;
    let sampler = PoissonSampler::new(n)?;
    let hits: u64 = run_trials(trials, seed, |_, rng, acc: &mut u64| {
        let mv = sampler.sample(rng);
        *acc += sumset_of_multiplicities(&mv, n).unwrap().contains(n) as u64;
    });
    Ok(Proportion::new(hits, trials, Z95))
}

/// Monte Carlo `A_n = E|S ∩ [1, n]|`.
pub fn estimate_a(n: usize, trials: u64, seed: u64) -> Result<MeanEstimate> {
    if trials < 2 {
        return Err(invalid("estimate_a needs trials >= 2"));
    }
    let sampler = PoissonSampler::new(n)?;
    let m: Moments = run_trials(trials, seed, |_, rng, acc: &mut Moments| {
        let mask = sumset_of_multiplicities(&sampler.sample(rng), n).unwrap();
        acc.push((mask.count_ones() - 1) as f64);
    });
    Ok(m.summary(Z95))
}

/// Joint estimate of `p_n`, `A_n` and `A_{m(n)}` from the same samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub n: usize,
    pub m: usize,
    pub p_n: Proportion,
    pub a_n: MeanEstimate,
    pub a_m: MeanEstimate,
    /// `A_m / n`
    pub lower: f64,
    /// `n^{1 - ln ln n} + A_n / m`
    pub upper: f64,
}

impl SandwichReport {
    /// `p_n >= A_m / n`, `p_n <= n^{1 - ln ln n} + A_n / m` and `A_n >= n p_n`,
    /// each allowing the 95% interval of the estimates.
    pub fn consistent(&self) -> bool {
        let nf = self.n as f64;
        let lower_ok = self.p_n.ci_high >= self.a_m.ci_low / nf;
        let upper_ok =
            self.p_n.ci_low <= nf.powf(1.0 - nf.ln().ln()) + self.a_n.ci_high / self.m as f64;
        let monotone_ok = self.a_n.ci_high >= nf * self.p_n.ci_low;
        lower_ok && upper_ok && monotone_ok
    }
}

#[derive(Default)]
struct SandwichAcc {
    member: u64,
    a_n: Moments,
    a_m: Moments,
}

impl Accumulator for SandwichAcc {
    fn merge(&mut self, o: Self) {
        self.member += o.member;
        self.a_n.merge(o.a_n);
        self.a_m.merge(o.a_m);
    }
}

pub fn sandwich_check(n: usize, trials: u64, seed: u64) -> Result<SandwichReport> {
    if trials < 2 {
        return Err(invalid("sandwich_check needs trials >= 2"));
    }
    let m = m_of(n)?;
    let sampler = PoissonSampler::new(n)?;
    let acc: SandwichAcc = run_trials(trials, seed, |_, rng, acc: &mut SandwichAcc| {
        let mask = sumset_of_multiplicities(&sampler.sample(rng), n).unwrap();
        acc.member += mask.contains(n) as u64;
        acc.a_n.push((mask.count_ones() - 1) as f64);
        acc.a_m.push(mask.count_range(1, m) as f64);
    });
    let a_n = acc.a_n.summary(Z95);
    let a_m = acc.a_m.summary(Z95);
    let nf = n as f64;
    Ok(SandwichReport {
        n,
        m,
        p_n: Proportion::new(acc.member, trials, Z95),
        lower: a_m.mean / nf,
        upper: nf.powf(1.0 - nf.ln().ln()) + a_n.mean / m as f64,
        a_n,
        a_m,
    })
}

/// `η = (1 - ln 2 - ln(1/ln 2)) / ln 2`.
pub fn eta_constant() -> f64 {
    let l2 = std::f64::consts::LN_2;
    (1.0 - l2 - (1.0 / l2).ln()) / l2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaFit {
    pub points: Vec<MembershipEstimate>,
    pub annealed_slope: f64,
    pub annealed_slope_std_error: f64,
    /// `None` when some quenched estimate is zero.
    pub quenched_slope: Option<f64>,
    pub quenched_slope_std_error: Option<f64>,
    pub eta: f64,
    /// `annealed_slope - η`
    pub distance_to_eta: f64,
}

/// Per-`n` seed used by [`fit_eta`].
pub fn seed_for_n(seed: u64, n: usize) -> u64 {
    avalanche(seed ^ avalanche(n as u64))
}

/// Least-squares slopes of `ln p̂_n` and `ln p̃_n` against `ln n`.
pub fn fit_eta(ns: &[usize], trials: u64, seed: u64, eps: f64) -> Result<EtaFit> {
    if ns.len() < 2 {
        return Err(invalid("fit_eta needs at least two values of n"));
    }
    let points: Vec<MembershipEstimate> = ns
        .iter()
        .map(|&n| estimate_membership(n, trials, seed_for_n(seed, n), eps))
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ya: Vec<f64> = points.iter().map(|p| p.annealed.estimate.ln()).collect();
    let (annealed_slope, _, annealed_se) = least_squares(&xs, &ya);
    let (quenched_slope, quenched_se) = if points.iter().all(|p| p.quenched.successes > 0) {
        let yq: Vec<f64> = points.iter().map(|p| p.quenched.estimate.ln()).collect();
        let (s, _, se) = least_squares(&xs, &yq);
        (Some(s), Some(se))
    } else {
        (None, None)
    };
    let eta = eta_constant();
    Ok(EtaFit {
        points,
        annealed_slope,
        annealed_slope_std_error: annealed_se,
        quenched_slope,
        quenched_slope_std_error: quenched_se,
        eta,
        distance_to_eta: annealed_slope - eta,
    })
}

/// Dyadic `n = 2^lo, ..., 2^hi`.
pub fn dyadic(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

/// Exact coefficients of `prod_{k=1}^n exp(z^k / k)` through `z^n`.
pub fn gf_coefficient_check(n: usize) -> Result<Vec<BigRational>> {
    if n == 0 {
        return Err(invalid("gf_coefficient_check needs n >= 1"));
    }
    if n > GF_CAP {
        return Err(Error::OracleLimit {
            what: "n",
            value: n,
            cap: GF_CAP,
        });
    }
    let mut series = vec![BigRational::zero(); n + 1];
    series[0] = BigRational::one();
    for k in 1..=n {
        // exp(z^k / k) = sum_t z^{kt} / (k^t t!)
        let mut factor = Vec::new();
        let mut term = BigRational::one();
        let kk = BigInt::from(k);
        for t in 0..=n / k {
            if t > 0 {
                term /= BigRational::from_integer(&kk * BigInt::from(t));
            }
            factor.push(term.clone());
        }
        for deg in (1..=n).rev() {
            let mut acc = series[deg].clone();
            for (t, f) in factor.iter().enumerate().skip(1) {
                let shift = k * t;
                if shift > deg {
                    break;
                }
                if !series[deg - shift].is_zero() {
                    acc += &series[deg - shift] * f;
                }
            }
            series[deg] = acc;
        }
    }
    Ok(series)
}

/// Fourfold intersection statistics for `copies` independent sumsets on
/// `[1, n-1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourfoldReport {
    pub n: usize,
    pub copies: usize,
    pub trials: u64,
    /// Histogram of the largest common element (0 when the intersection is empty).
    pub max_common: BTreeMap<usize, u64>,
    /// `(L, P(no common element in [L, n-1]))`
    pub empty_beyond: Vec<(usize, Proportion)>,
    /// `P(1 lies in every copy)`
    pub one_in_all: Proportion,
    /// Mean size of the common set of the first `r` copies, `r = 1..=copies`.
    pub mean_common_size: Vec<f64>,
}

#[derive(Default)]
struct FourfoldAcc {
    max_common: BTreeMap<usize, u64>,
    empty_beyond: Vec<u64>,
    one_in_all: u64,
    sizes: Vec<u64>,
}

impl Accumulator for FourfoldAcc {
    fn merge(&mut self, o: Self) {
        Accumulator::merge(&mut self.max_common, o.max_common);
        self.empty_beyond.merge(o.empty_beyond);
        self.one_in_all += o.one_in_all;
        self.sizes.merge(o.sizes);
    }
}

fn interior_max(mask: &SumsetMask) -> usize {
    let n = mask.window();
    mask.ones().filter(|&j| j > 0 && j < n).last().unwrap_or(0)
}

pub fn fourfold_intersection_sim(
    n: usize,
    copies: usize,
    cutoffs: &[usize],
    trials: u64,
    seed: u64,
) -> Result<FourfoldReport> {
    check_trials(trials)?;
    if n < 2 || copies == 0 {
        return Err(invalid("need n >= 2 and copies >= 1"));
    }
    let sampler = PoissonSampler::new(n)?;
    let acc: FourfoldAcc = run_trials_with(
        trials,
        seed,
        || (),
        |_, _, rng, acc: &mut FourfoldAcc| {
            if acc.sizes.is_empty() {
                acc.sizes.resize(copies, 0);
                acc.empty_beyond.resize(cutoffs.len(), 0);
            }
            let mut common: Option<SumsetMask> = None;
            let mut prev_size = usize::MAX;
            for r in 0..copies {
                let mask = sumset_of_multiplicities(&sampler.sample(rng), n).unwrap();
                match common.as_mut() {
                    Some(c) => c.and_assign(&mask).unwrap(),
                    None => common = Some(mask),
                }
                let c = common.as_ref().unwrap();
                let size = c.ones().filter(|&j| j > 0 && j < n).count();
                debug_assert!(size <= prev_size);
                prev_size = size;
                acc.sizes[r] += size as u64;
            }
            let c = common.unwrap();
            let top = interior_max(&c);
            *acc.max_common.entry(top).or_insert(0) += 1;
            for (i, &l) in cutoffs.iter().enumerate() {
                acc.empty_beyond[i] += (top < l) as u64;
            }
            acc.one_in_all += (n > 1 && c.contains(1)) as u64;
        },
    );
    Ok(FourfoldReport {
        n,
        copies,
        trials,
        max_common: acc.max_common,
        empty_beyond: cutoffs
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                (
                    l,
                    Proportion::new(acc.empty_beyond.get(i).copied().unwrap_or(0), trials, Z95),
                )
            })
            .collect(),
        one_in_all: Proportion::new(acc.one_in_all, trials, Z95),
        mean_common_size: (0..copies)
            .map(|r| acc.sizes.get(r).copied().unwrap_or(0) as f64 / trials as f64)
            .collect(),
    })
}
