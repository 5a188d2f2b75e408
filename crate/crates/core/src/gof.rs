//! Monte Carlo calibrated goodness-of-fit tests of exponentiality.
//!
//! Every statistic is scale invariant, so the null law is simulated once under
//! Exp(1) and applies to any rate. Replication `i` draws from
//! [`replication_rng`]`(seed, domain, i)`; results never depend on threads.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::model::{DensityModel, Exponential};
use crate::streams::{replication_rng, run_replications, Domain};
use crate::vstat::{all_statistics, statistic, Sample, StatisticId, Theorem};

/// Outcome of testing one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TestResult {
    pub statistic_id: StatisticId,
    pub n: usize,
    pub stat_value: f64,
    pub p_value: f64,
    pub mc_reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriticalValue {
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriticalValueTable {
    pub statistic_id: StatisticId,
    pub n: usize,
    pub levels: Vec<CriticalValue>,
    pub mc_reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PowerResult {
    pub statistic_id: StatisticId,
    pub alt_model: String,
    pub n: usize,
    pub alpha: f64,
    pub rate: f64,
    pub mc_std_err: f64,
    pub mc_reps: usize,
    pub seed: u64,
}

impl PowerResult {
    pub fn csv_header() -> &'static str {
        "statisticId,altModel,n,alpha,rate,mcStdErr"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.statistic_id, self.alt_model, self.n, self.alpha, self.rate, self.mc_std_err
        )
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("alpha", alpha, "0 < alpha < 1"));
    }
    Ok(())
}

fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(domain("Monte Carlo replications", reps, "reps >= 1"));
    }
    Ok(())
}

fn min_n() -> usize {
    Theorem::ALL.iter().map(Theorem::min_sample).max().unwrap_or(Sample::MIN_SIZE)
}

fn draw_sample(dist: &dyn DensityModel, n: usize, seed: u64, domain: Domain, rep: u64) -> Result<Sample> {
    let mut rng = replication_rng(seed, domain, rep);
    Sample::new((0..n).map(|_| dist.sample(&mut rng)).collect())
}

/// All six statistics for `reps` samples of size `n` from `dist`.
fn simulate(dist: &dyn DensityModel, n: usize, reps: usize, seed: u64, domain: Domain, threads: Option<usize>) -> Result<Vec<[f64; 6]>> {
    check_reps(reps)?;
    if n < min_n() {
        return Err(Error::Arity {
            statistic: "Monte Carlo simulation",
            n,
            min: min_n(),
        });
    }
    run_replications(reps, threads, |i| draw_sample(dist, n, seed, domain, i).and_then(|s| all_statistics(&s)))?
        .into_iter()
        .collect()
}

/// Simulated null distribution of all six statistics at sample size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    sorted: Vec<Vec<f64>>,
}

impl NullDistribution {
    pub fn simulate(n: usize, reps: usize, seed: u64, threads: Option<usize>) -> Result<Self> {
        let exp1 = Exponential::new(1.0)?;
        let rows = simulate(&exp1, n, reps, seed, Domain::Null, threads)?;
        let sorted = (0..6)
            .map(|k| {
                let mut col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
                col.sort_by(f64::total_cmp);
                col
            })
            .collect();
        Ok(Self { n, reps, seed, sorted })
    }

    /// Simulated values, ascending.
    pub fn values(&self, id: StatisticId) -> &[f64] {
        &self.sorted[id.index()]
    }

    /// The `(1 − alpha)` empirical quantile: the `⌈(1−α)R⌉`-th smallest value.
    pub fn critical_value(&self, id: StatisticId, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let v = self.values(id);
        let r = v.len() as f64;
        let rank = ((1.0 - alpha) * r - 1e-9).ceil().clamp(1.0, r) as usize;
        Ok(v[rank - 1])
    }

    /// `(1 + #{simulated ≥ observed}) / (R + 1)`.
    pub fn p_value(&self, id: StatisticId, observed: f64) -> f64 {
        let v = self.values(id);
        let below = v.partition_point(|&s| s < observed);
        (1 + v.len() - below) as f64 / (v.len() + 1) as f64
    }
}

pub fn critical_value(id: StatisticId, n: usize, alpha: f64, reps: usize, seed: u64, threads: Option<usize>) -> Result<f64> {
    check_alpha(alpha)?;
    NullDistribution::simulate(n, reps, seed, threads)?.critical_value(id, alpha)
}

pub fn critical_value_table(
    id: StatisticId,
    n: usize,
    alphas: &[f64],
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CriticalValueTable> {
    alphas.iter().try_for_each(|&a| check_alpha(a))?;
    let null = NullDistribution::simulate(n, reps, seed, threads)?;
    let levels = alphas
        .iter()
        .map(|&alpha| {
            Ok(CriticalValue {
                alpha,
                value: null.critical_value(id, alpha)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CriticalValueTable {
        statistic_id: id,
        n,
        levels,
        mc_reps: reps,
        seed,
    })
}

/// Observed statistic and Monte Carlo p-value for `sample`.
pub fn p_value(id: StatisticId, sample: &Sample, reps: usize, seed: u64, threads: Option<usize>) -> Result<TestResult> {
    let observed = statistic(id, sample)?;
    let null = simulate_single(id, sample.len(), reps, seed, threads)?;
    Ok(TestResult {
        statistic_id: id,
        n: sample.len(),
        stat_value: observed,
        p_value: null.p_value(id, observed),
        mc_reps: reps,
        seed,
    })
}

/// Null distribution of one statistic only. Draws the same Exp(1) samples as
/// [`NullDistribution::simulate`], so the two agree wherever both apply.
fn simulate_single(id: StatisticId, n: usize, reps: usize, seed: u64, threads: Option<usize>) -> Result<NullDistribution> {
    check_reps(reps)?;
    let exp1 = Exponential::new(1.0)?;
    let mut col = run_replications(reps, threads, |i| {
        draw_sample(&exp1, n, seed, Domain::Null, i).and_then(|s| statistic(id, &s))
    })?
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    col.sort_by(f64::total_cmp);
    let mut sorted = vec![Vec::new(); 6];
    sorted[id.index()] = col;
    Ok(NullDistribution { n, reps, seed, sorted })
}

/// Rejection rates at level `alpha` for all six statistics against `alt`.
///
/// The null is simulated with `reps` Exp(1) samples; `reps` alternative
/// samples are drawn from a disjoint stream family. Rejection means
/// `p ≤ alpha`.
pub fn power_study_all(
    alt: &dyn DensityModel,
    n: usize,
    alpha: f64,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<PowerResult>> {
    check_alpha(alpha)?;
    let null = NullDistribution::simulate(n, reps, seed, threads)?;
    let observed = simulate(alt, n, reps, seed, Domain::Alternative, threads)?;
    Ok(StatisticId::ALL
        .iter()
        .map(|&id| {
            let rejected = observed
                .iter()
                .filter(|row| null.p_value(id, row[id.index()]) <= alpha)
                .count();
            let rate = rejected as f64 / reps as f64;
            PowerResult {
                statistic_id: id,
                alt_model: alt.name(),
                n,
                alpha,
                rate,
                mc_std_err: (rate * (1.0 - rate) / reps as f64).sqrt(),
                mc_reps: reps,
                seed,
            }
        })
        .collect())
}

pub fn power_study(
    id: StatisticId,
    alt: &dyn DensityModel,
    n: usize,
    alpha: f64,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<PowerResult> {
    let mut all = power_study_all(alt, n, alpha, reps, seed, threads)?;
    Ok(all.swap_remove(id.index()))
}
