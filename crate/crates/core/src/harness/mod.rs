//! Experiment driver: validated configuration, deterministic execution inside
//! a sized thread pool, and CSV/JSON emission of flat result records.

pub mod cli;

use std::io::{Read, Write};
use std::time::Instant;

use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};
use crate::galois::{screen, IntPolynomial, Verdict};
use crate::invariable::{estimate_q, exact_q, tv_distance_exact, EXACT_Q_CAP, TV_CAP};
use crate::poisson_lab::{
    estimate_membership, fit_eta, fourfold_intersection_sim, gf_coefficient_check,
    log_tail_bound_w, log_tail_bound_z, seed_for_n, verify_sharp, verify_tail_w, verify_tail_z,
    GF_CAP,
};
use crate::stats::{wilson_interval, Proportion, Z95, Z99};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable consulted for the default thread count.
pub const THREADS_ENV: &str = "CYCLECERT_THREADS";

/// Allowed gap between the tilted exponent estimate and the rate function.
pub const SHARP_TOLERANCE: f64 = 0.03;

pub const CSV_HEADER: [&str; 14] = [
    "experiment",
    "n",
    "r",
    "trials",
    "successes",
    "estimate",
    "ci_low",
    "ci_high",
    "bound",
    "satisfied",
    "seed",
    "elapsed_ms",
    "params",
    "version",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SimulateQ,
    PoissonP,
    EtaFit,
    Tails,
    GfCheck,
    TvDist,
    ExactQ,
    Fourfold,
    Galois,
}

impl Experiment {
    pub fn id(&self) -> &'static str {
        match self {
            Self::SimulateQ => "simulate-q",
            Self::PoissonP => "poisson-p",
            Self::EtaFit => "eta-fit",
            Self::Tails => "tails",
            Self::GfCheck => "gf-check",
            Self::TvDist => "tv-dist",
            Self::ExactQ => "exact-q",
            Self::Fourfold => "fourfold",
            Self::Galois => "galois",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: Vec<usize>,
    /// `r_max` for simulate-q and exact-q, copies for fourfold, primes for
    /// galois, `m` for tv-dist.
    pub r: usize,
    pub trials: u64,
    pub seed: u64,
    /// 0 lets the pool pick.
    pub threads: usize,
    pub eps: f64,
    pub x: f64,
    pub cutoffs: Vec<usize>,
    pub prime_range: Option<(u64, u64)>,
    pub poly: Option<String>,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            n: Vec::new(),
            r: 4,
            trials: 10_000,
            seed: 0,
            threads: 0,
            eps: crate::perm_model::DEFAULT_EPS,
            x: 1.5,
            cutoffs: vec![64],
            prime_range: None,
            poly: None,
            format: Format::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        use Experiment::*;
        let need_n = |min: usize, max: usize| -> Result<()> {
            if self.n.is_empty() {
                return Err(invalid(format!("{} needs --n", self.experiment.id())));
            }
            for &n in &self.n {
                if n < min || n > max {
                    return Err(invalid(format!(
                        "{}: n = {n} outside [{min}, {max}]",
                        self.experiment.id()
                    )));
                }
            }
            Ok(())
        };
        let need_r = || -> Result<()> {
            if self.r == 0 {
                return Err(invalid("--r must be at least 1"));
            }
            Ok(())
        };
        let need_trials = |min: u64| -> Result<()> {
            if self.trials < min {
                return Err(invalid(format!("--trials must be at least {min}")));
            }
            Ok(())
        };
        let need_eps = || -> Result<()> {
            if !(self.eps > 0.0 && self.eps.is_finite()) {
                return Err(invalid("--eps must be positive"));
            }
            Ok(())
        };
        match self.experiment {
            SimulateQ => {
                need_n(1, usize::MAX)?;
                need_r()?;
                need_trials(1)?;
            }
            ExactQ => {
                need_n(1, EXACT_Q_CAP)?;
                need_r()?;
            }
            PoissonP => {
                need_n(3, usize::MAX)?;
                need_trials(1)?;
                need_eps()?;
            }
            EtaFit => {
                need_n(3, usize::MAX)?;
                if self.n.len() < 2 {
                    return Err(invalid("eta-fit needs at least two values of --n"));
                }
                need_trials(1)?;
                need_eps()?;
            }
            Tails => {
                need_n(3, usize::MAX)?;
                need_trials(2)?;
                need_eps()?;
                if !(self.x > 0.0 && self.x.is_finite()) {
                    return Err(invalid("--x must be positive"));
                }
            }
            GfCheck => need_n(1, GF_CAP)?,
            TvDist => {
                need_n(1, TV_CAP)?;
                need_r()?;
            }
            Fourfold => {
                need_n(2, usize::MAX)?;
                need_r()?;
                need_trials(1)?;
                if self.cutoffs.is_empty() {
                    return Err(invalid("fourfold needs at least one --L"));
                }
            }
            Galois => {
                need_r()?;
                let p = self.polynomial()?;
                if p.degree() < 2 {
                    return Err(invalid("galois needs degree at least 2"));
                }
                if let Some((lo, hi)) = self.prime_range {
                    if lo < 2 || hi <= lo {
                        return Err(invalid(format!(
                            "--prime-range needs hi > lo >= 2, got {lo}:{hi}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn polynomial(&self) -> Result<IntPolynomial> {
        match &self.poly {
            Some(s) => IntPolynomial::parse(s),
            None => Err(invalid("galois needs --poly")),
        }
    }

    /// Parameters that, with experiment, n, r, trials and seed, pin down a row.
    fn params(&self, quantity: &str) -> String {
        use Experiment::*;
        let mut p = vec![format!("quantity={quantity}")];
        match self.experiment {
            PoissonP | EtaFit => p.push(format!("eps={}", self.eps)),
            Tails => {
                p.push(format!("eps={}", self.eps));
                p.push(format!("x={}", self.x));
            }
            Fourfold => p.push(format!(
                "L={}",
                self.cutoffs
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join("|")
            )),
            Galois => {
                if let Some(s) = &self.poly {
                    p.push(format!("poly={s}"));
                }
                if let Some((lo, hi)) = self.prime_range {
                    p.push(format!("prime_range={lo}:{hi}"));
                }
            }
            _ => {}
        }
        p.join(";")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub trials: Option<u64>,
    pub successes: Option<u64>,
    pub estimate: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
    pub seed: u64,
    pub elapsed_ms: u64,
    pub params: String,
    pub version: String,
    /// Structured payload; JSON only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<Value>,
}

impl ResultRecord {
    fn blank(config: &ExperimentConfig, quantity: &str, seed: u64) -> Self {
        Self {
            experiment: config.experiment.id().to_string(),
            n: None,
            r: None,
            trials: None,
            successes: None,
            estimate: None,
            ci_low: None,
            ci_high: None,
            bound: None,
            satisfied: None,
            seed,
            elapsed_ms: 0,
            params: config.params(quantity),
            version: VERSION.to_string(),
            detail: None,
        }
    }

    fn with_proportion(mut self, p: &Proportion) -> Self {
        self.trials = Some(p.trials);
        self.successes = Some(p.successes);
        self.estimate = Some(p.estimate);
        self.ci_low = Some(p.ci_low);
        self.ci_high = Some(p.ci_high);
        self
    }

    /// Value of `key` in the `params` column.
    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .split(';')
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
    }

    fn csv_fields(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(ToString::to_string).unwrap_or_default()
        }
        vec![
            self.experiment.clone(),
            opt(&self.n),
            opt(&self.r),
            opt(&self.trials),
            opt(&self.successes),
            opt(&self.estimate),
            opt(&self.ci_low),
            opt(&self.ci_high),
            opt(&self.bound),
            opt(&self.satisfied),
            self.seed.to_string(),
            self.elapsed_ms.to_string(),
            self.params.clone(),
            self.version.clone(),
        ]
    }

    fn from_csv_fields(rec: &csv::StringRecord) -> Result<Self> {
        if rec.len() != CSV_HEADER.len() {
            return Err(invalid(format!(
                "expected {} columns, got {}",
                CSV_HEADER.len(),
                rec.len()
            )));
        }
        fn opt<T: std::str::FromStr>(s: &str, col: &str) -> Result<Option<T>> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| invalid(format!("bad value {s:?} in column {col}")))
        }
        fn req<T: std::str::FromStr>(s: &str, col: &str) -> Result<T> {
            opt(s, col)?.ok_or_else(|| invalid(format!("column {col} is empty")))
        }
        Ok(Self {
            experiment: rec[0].to_string(),
            n: opt(&rec[1], "n")?,
            r: opt(&rec[2], "r")?,
            trials: opt(&rec[3], "trials")?,
            successes: opt(&rec[4], "successes")?,
            estimate: opt(&rec[5], "estimate")?,
            ci_low: opt(&rec[6], "ci_low")?,
            ci_high: opt(&rec[7], "ci_high")?,
            bound: opt(&rec[8], "bound")?,
            satisfied: opt(&rec[9], "satisfied")?,
            seed: req(&rec[10], "seed")?,
            elapsed_ms: req(&rec[11], "elapsed_ms")?,
            params: rec[12].to_string(),
            version: rec[13].to_string(),
            detail: None,
        })
    }
}

/// Runs the experiment in a pool of `config.threads` workers.
pub fn run(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    pool.install(|| run_inner(config))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, u64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_millis() as u64))
}

fn run_inner(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    use Experiment::*;
    let mut out = Vec::new();
    match config.experiment {
        SimulateQ => {
            for &n in &config.n {
                let seed = seed_for_n(config.seed, n);
                let (est, ms) = timed(|| estimate_q(n, config.r, config.trials, seed))?;
                for e in est {
                    let mut rec = ResultRecord::blank(config, "q", seed);
                    rec.n = Some(n);
                    rec.r = Some(e.r);
                    rec.trials = Some(e.trials);
                    rec.successes = Some(e.successes);
                    rec.estimate = Some(e.estimate);
                    rec.ci_low = Some(e.ci_low);
                    rec.ci_high = Some(e.ci_high);
                    if n <= EXACT_Q_CAP {
                        let exact = rational_to_f64(&exact_q(n, e.r)?);
                        let (lo, hi) = wilson_interval(e.successes, e.trials, Z99);
                        rec.bound = Some(exact);
                        rec.satisfied = Some(lo <= exact && exact <= hi);
                    }
                    rec.elapsed_ms = ms;
                    out.push(rec);
                }
            }
        }
        ExactQ => {
            for &n in &config.n {
                for r in 1..=config.r {
                    let (q, ms) = timed(|| exact_q(n, r))?;
                    let mut rec = ResultRecord::blank(config, "q_exact", config.seed);
                    rec.n = Some(n);
                    rec.r = Some(r);
                    rec.estimate = Some(rational_to_f64(&q));
                    rec.elapsed_ms = ms;
                    rec.detail = Some(Value::String(q.to_string()));
                    out.push(rec);
                }
            }
        }
        PoissonP => {
            for &n in &config.n {
                let seed = seed_for_n(config.seed, n);
                let (m, ms) = timed(|| estimate_membership(n, config.trials, seed, config.eps))?;
                for (quantity, p) in [("annealed", &m.annealed), ("quenched", &m.quenched)] {
                    let mut rec = ResultRecord::blank(config, quantity, seed).with_proportion(p);
                    rec.n = Some(n);
                    rec.elapsed_ms = ms;
                    out.push(rec);
                }
            }
        }
        EtaFit => {
            let (fit, ms) = timed(|| fit_eta(&config.n, config.trials, config.seed, config.eps))?;
            for m in &fit.points {
                for (quantity, p) in [("annealed", &m.annealed), ("quenched", &m.quenched)] {
                    let mut rec =
                        ResultRecord::blank(config, quantity, seed_for_n(config.seed, m.n))
                            .with_proportion(p);
                    rec.n = Some(m.n);
                    out.push(rec);
                }
            }
            let lower = std::f64::consts::LN_2 - 1.0;
            let ordered = fit.quenched_slope.map(|q| q < fit.annealed_slope);
            let mut rec = ResultRecord::blank(config, "annealed_slope", config.seed);
            rec.trials = Some(config.trials);
            rec.estimate = Some(fit.annealed_slope);
            rec.ci_low = Some(fit.annealed_slope - Z95 * fit.annealed_slope_std_error);
            rec.ci_high = Some(fit.annealed_slope + Z95 * fit.annealed_slope_std_error);
            rec.bound = Some(fit.eta);
            rec.satisfied = Some(fit.annealed_slope > lower && fit.annealed_slope < 0.0);
            rec.elapsed_ms = ms;
            out.push(rec);
            let mut rec = ResultRecord::blank(config, "quenched_slope", config.seed);
            rec.trials = Some(config.trials);
            if let (Some(s), Some(se)) = (fit.quenched_slope, fit.quenched_slope_std_error) {
                rec.estimate = Some(s);
                rec.ci_low = Some(s - Z95 * se);
                rec.ci_high = Some(s + Z95 * se);
            }
            rec.bound = Some(fit.annealed_slope);
            rec.satisfied = ordered;
            rec.elapsed_ms = ms;
            out.push(rec);
        }
        Tails => {
            for &n in &config.n {
                let seed = seed_for_n(config.seed, n);
                let (z, ms) = timed(|| verify_tail_z(n, config.eps, config.trials, seed))?;
                let mut rec =
                    ResultRecord::blank(config, "tail_z", seed).with_proportion(&z.proportion());
                rec.n = Some(n);
                rec.bound = Some(log_tail_bound_z(n, config.eps)?.exp());
                rec.satisfied = Some(z.satisfied);
                rec.elapsed_ms = ms;
                out.push(rec);

                let (w, ms) = timed(|| verify_tail_w(n, config.trials, seed))?;
                let mut rec =
                    ResultRecord::blank(config, "tail_w", seed).with_proportion(&w.proportion());
                rec.n = Some(n);
                rec.bound = Some(log_tail_bound_w(n).exp());
                rec.satisfied = Some(w.satisfied);
                rec.elapsed_ms = ms;
                out.push(rec);

                let (s, ms) = timed(|| verify_sharp(n, config.x, config.trials, seed))?;
                let mut rec = ResultRecord::blank(config, "rate_exponent", seed);
                rec.n = Some(n);
                rec.trials = Some(s.trials);
                rec.estimate = Some(s.exponent);
                rec.ci_low = Some(s.exponent - Z95 * s.exponent_std_error);
                rec.ci_high = Some(s.exponent + Z95 * s.exponent_std_error);
                rec.bound = Some(s.rate);
                rec.satisfied = Some((s.exponent - s.rate).abs() <= SHARP_TOLERANCE);
                rec.elapsed_ms = ms;
                rec.detail = Some(serde_json::to_value(&s)?);
                out.push(rec);
            }
        }
        GfCheck => {
            for &n in &config.n {
                let (coeffs, ms) = timed(|| gf_coefficient_check(n))?;
                let ones = coeffs.iter().filter(|c| c.is_one()).count() as u64;
                let mut rec = ResultRecord::blank(config, "coefficients_equal_one", config.seed);
                rec.n = Some(n);
                rec.trials = Some(coeffs.len() as u64);
                rec.successes = Some(ones);
                rec.estimate = Some(ones as f64 / coeffs.len() as f64);
                rec.bound = Some(1.0);
                rec.satisfied = Some(ones == coeffs.len() as u64);
                rec.elapsed_ms = ms;
                out.push(rec);
            }
        }
        TvDist => {
            for &n in &config.n {
                let (tv, ms) = timed(|| tv_distance_exact(n, config.r))?;
                let mut rec = ResultRecord::blank(config, "tv", config.seed);
                rec.n = Some(n);
                rec.r = Some(config.r);
                rec.estimate = Some(tv);
                rec.elapsed_ms = ms;
                out.push(rec);
            }
        }
        Fourfold => {
            for &n in &config.n {
                let seed = seed_for_n(config.seed, n);
                let (f, ms) = timed(|| {
                    fourfold_intersection_sim(n, config.r, &config.cutoffs, config.trials, seed)
                })?;
                for (l, p) in &f.empty_beyond {
                    let mut rec = ResultRecord::blank(config, &format!("empty_beyond_{l}"), seed)
                        .with_proportion(p);
                    rec.n = Some(n);
                    rec.r = Some(config.r);
                    rec.elapsed_ms = ms;
                    out.push(rec);
                }
                let target = (1.0 - (-1.0f64).exp()).powi(config.r as i32);
                let p = &f.one_in_all;
                let mut rec = ResultRecord::blank(config, "one_in_all", seed).with_proportion(p);
                rec.n = Some(n);
                rec.r = Some(config.r);
                rec.bound = Some(target);
                rec.satisfied =
                    Some((p.estimate - target).abs() <= 3.0 * p.std_error().max(f64::MIN_POSITIVE));
                rec.elapsed_ms = ms;
                out.push(rec);
                for (i, mean) in f.mean_common_size.iter().enumerate() {
                    let mut rec = ResultRecord::blank(config, "mean_common_size", seed);
                    rec.n = Some(n);
                    rec.r = Some(i + 1);
                    rec.trials = Some(config.trials);
                    rec.estimate = Some(*mean);
                    rec.elapsed_ms = ms;
                    out.push(rec);
                }
                if let Some(last) = out.last_mut() {
                    last.detail = Some(serde_json::to_value(&f.max_common)?);
                }
            }
        }
        Galois => {
            let p = config.polynomial()?;
            let (v, ms) = timed(|| screen(&p, config.r, config.prime_range, config.seed))?;
            let mut rec = ResultRecord::blank(config, "screen", config.seed);
            rec.params.push_str(&format!(";verdict={}", v.verdict));
            rec.n = Some(v.n);
            rec.r = Some(v.r);
            rec.trials = Some(v.degree_lists.len() as u64);
            rec.successes = Some(v.primes_used as u64);
            rec.satisfied = Some(v.verdict == Verdict::Positive);
            rec.elapsed_ms = ms;
            rec.detail = Some(serde_json::to_value(&v)?);
            out.push(rec);
        }
    }
    Ok(out)
}

fn rational_to_f64(q: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// `true` when no row reports a failed check.
pub fn all_satisfied(records: &[ResultRecord]) -> bool {
    records.iter().all(|r| r.satisfied != Some(false))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub records: Vec<ResultRecord>,
}

pub fn write_csv<W: Write>(records: &[ResultRecord], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for r in records {
        wtr.write_record(r.csv_fields())?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ResultRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(invalid(format!("unexpected CSV header: {header:?}")));
    }
    rdr.records()
        .map(|rec| ResultRecord::from_csv_fields(&rec?))
        .collect()
}

pub fn write_json<W: Write>(
    config: &ExperimentConfig,
    records: &[ResultRecord],
    w: W,
) -> Result<()> {
    let out = RunOutput {
        config: config.clone(),
        records: records.to_vec(),
    };
    serde_json::to_writer_pretty(w, &out)?;
    Ok(())
}

/// Writes records to `path`, or to stdout when `path` is `None`.
pub fn emit(
    config: &ExperimentConfig,
    records: &[ResultRecord],
    path: Option<&std::path::Path>,
) -> Result<()> {
    if records.is_empty() {
        return Err(invalid("nothing to emit"));
    }
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match config.format {
        Format::Csv => write_csv(records, sink),
        Format::Json => {
            let mut sink = sink;
            write_json(config, records, &mut sink)?;
            writeln!(sink).map_err(Error::from)
        }
    }
}

/// JSON schema for [`RunOutput`], shipped alongside the crate.
pub const OUTPUT_SCHEMA: &str = include_str!("../../schema/run-output.schema.json");
