//! Empirical V-statistic CDFs of both sides of each characterization and the
//! L2 / KS test statistics built from them.
//!
//! All counts are over index tuples drawn *with* replacement, so the median
//! and order-statistic counts reduce to closed forms in a single rank `r`:
//!
//! * median of three ≤ t: `3r²(n−r) + r³` ordered triples
//! * maximum of three ≤ t: `r³`
//! * third of four ≤ t: `4r³(n−r) + r⁴`
//!
//! Every comparison uses the same floating-point expression as exhaustive
//! enumeration would, and every such expression is monotone in the summand it
//! ranks, so the fast counts equal the brute-force counts exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::equidist::Characterization;
use crate::error::{Error, Result};

/// Which characterization a statistic compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    T1,
    T2,
    T3,
}

impl Theorem {
    pub const ALL: [Theorem; 3] = [Theorem::T1, Theorem::T2, Theorem::T3];

    /// Smallest sample the statistic accepts.
    pub fn min_sample(&self) -> usize {
        match self {
            Theorem::T1 => 3,
            Theorem::T2 | Theorem::T3 => 4,
        }
    }

    pub fn characterization(&self) -> Characterization {
        match self {
            Theorem::T1 => Characterization::T1,
            Theorem::T2 => Characterization::T2,
            Theorem::T3 => Characterization::T3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Functional {
    /// `(1/n) Σ_m (L(x_m) − R(x_m))²`
    L2,
    /// `max_m |L(x_m) − R(x_m)|`
    Ks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StatisticId {
    pub theorem: Theorem,
    pub functional: Functional,
}

impl StatisticId {
    pub const ALL: [StatisticId; 6] = [
        StatisticId::new(Theorem::T1, Functional::L2),
        StatisticId::new(Theorem::T1, Functional::Ks),
        StatisticId::new(Theorem::T2, Functional::L2),
        StatisticId::new(Theorem::T2, Functional::Ks),
        StatisticId::new(Theorem::T3, Functional::L2),
        StatisticId::new(Theorem::T3, Functional::Ks),
    ];

    pub const fn new(theorem: Theorem, functional: Functional) -> Self {
        Self { theorem, functional }
    }

    /// Position in [`StatisticId::ALL`].
    pub fn index(&self) -> usize {
        let t = match self.theorem {
            Theorem::T1 => 0,
            Theorem::T2 => 1,
            Theorem::T3 => 2,
        };
        2 * t + usize::from(self.functional == Functional::Ks)
    }
}

impl fmt::Display for StatisticId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.theorem {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
            Theorem::T3 => "T3",
        };
        let k = match self.functional {
            Functional::L2 => "L2",
            Functional::Ks => "KS",
        };
        write!(f, "{t}-{k}")
    }
}

impl FromStr for StatisticId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StatisticId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownSelector(s.to_string()))
    }
}

impl Serialize for StatisticId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Positive observations, sorted ascending on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    sorted: Vec<f64>,
}

impl Sample {
    pub const MIN_SIZE: usize = 3;

    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < Self::MIN_SIZE {
            return Err(Error::Arity {
                statistic: "any statistic",
                n: values.len(),
                min: Self::MIN_SIZE,
            });
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(crate::error::domain("observation", bad, "finite and > 0"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.sorted.iter().map(|v| v * c).collect())
    }

    fn check_arity(&self, theorem: Theorem) -> Result<()> {
        if self.len() < theorem.min_sample() {
            return Err(Error::Arity {
                statistic: match theorem {
                    Theorem::T1 => "T1",
                    Theorem::T2 => "T2",
                    Theorem::T3 => "T3",
                },
                n: self.len(),
                min: theorem.min_sample(),
            });
        }
        Ok(())
    }

    /// `#{x_j ≤ t}`
    fn rank(&self, t: f64) -> u128 {
        self.sorted.partition_point(|&x| x <= t) as u128
    }
}

/// Ordered triples out of `n` with at least two entries among the `r` lowest.
pub(crate) fn median3_count(r: u128, n: u128) -> u128 {
    3 * r * r * (n - r) + r * r * r
}

/// Ordered quadruples out of `n` with at least three among the `r` lowest.
pub(crate) fn third_of_four_count(r: u128, n: u128) -> u128 {
    4 * r * r * r * (n - r) + r * r * r * r
}

/// Exact tuple count for the right-hand CDF at `t`, with its denominator exponent.
fn rhs_count(theorem: Theorem, sample: &Sample, t: f64) -> (u128, i32) {
    let n = sample.len() as u128;
    let r = sample.rank(t);
    match theorem {
        Theorem::T1 => (median3_count(r, n), 3),
        Theorem::T2 => (r * r * r, 3),
        Theorem::T3 => (third_of_four_count(r, n), 4),
    }
}

fn lhs_count(theorem: Theorem, sample: &Sample, t: f64) -> (u128, i32) {
    let xs = sample.sorted();
    let n = xs.len() as u128;
    match theorem {
        Theorem::T1 => {
            let c = xs
                .iter()
                .map(|&xi| xs.partition_point(|&xj| xi / 3.0 + xj / 2.0 <= t) as u128)
                .sum();
            (c, 2)
        }
        Theorem::T2 => {
            let c = xs
                .iter()
                .map(|&xi| median3_count(xs.partition_point(|&xj| xi + xj <= t) as u128, n))
                .sum();
            (c, 4)
        }
        Theorem::T3 => {
            let c = xs
                .iter()
                .map(|&xi| median3_count(xs.partition_point(|&xj| xj + xi / 4.0 <= t) as u128, n))
                .sum();
            (c, 4)
        }
    }
}

fn ratio(count: u128, n: usize, power: i32) -> f64 {
    count as f64 / (n as f64).powi(power)
}

/// V-statistic estimate of the left-hand CDF at `t`:
/// * T1: `n⁻² Σ_{i,j} 1{x_i/3 + x_j/2 ≤ t}`
/// * T2: `n⁻⁴ Σ_{i,j,k,l} 1{x_i + med(x_j,x_k,x_l) ≤ t}`
/// * T3: `n⁻⁴ Σ_{i,j,k,l} 1{med(x_j,x_k,x_l) + x_i/4 ≤ t}`
pub fn empirical_lhs_cdf(theorem: Theorem, sample: &Sample, t: f64) -> Result<f64> {
    sample.check_arity(theorem)?;
    let (c, p) = lhs_count(theorem, sample, t);
    Ok(ratio(c, sample.len(), p))
}

/// V-statistic estimate of the right-hand order-statistic CDF at `t`.
pub fn empirical_rhs_cdf(theorem: Theorem, sample: &Sample, t: f64) -> Result<f64> {
    sample.check_arity(theorem)?;
    let (c, p) = rhs_count(theorem, sample, t);
    Ok(ratio(c, sample.len(), p))
}

/// Both empirical CDFs at every sample point, in ascending order.
///
/// For each `i` the rank `#{j : pred(x_i, x_j, t)}` is nondecreasing in `t`,
/// so one forward sweep over the sorted evaluation points per `i` costs
/// `O(n)` and the whole table `O(n²)`.
pub fn empirical_cdfs_at_sample(theorem: Theorem, sample: &Sample) -> Result<(Vec<f64>, Vec<f64>)> {
    sample.check_arity(theorem)?;
    let xs = sample.sorted();
    let n = xs.len();
    let nn = n as u128;
    let mut lhs = vec![0u128; n];
    for &xi in xs {
        let mut j = 0;
        for (m, &t) in xs.iter().enumerate() {
            let r = match theorem {
                Theorem::T1 => {
                    while j < n && xi / 3.0 + xs[j] / 2.0 <= t {
                        j += 1;
                    }
                    lhs[m] += j as u128;
                    continue;
                }
                Theorem::T2 => {
                    while j < n && xi + xs[j] <= t {
                        j += 1;
                    }
                    j
                }
                Theorem::T3 => {
                    while j < n && xs[j] + xi / 4.0 <= t {
                        j += 1;
                    }
                    j
                }
            };
            lhs[m] += median3_count(r as u128, nn);
        }
    }
    let lhs_power = if theorem == Theorem::T1 { 2 } else { 4 };
    let lhs = lhs.into_iter().map(|c| ratio(c, n, lhs_power)).collect();
    let rhs = xs
        .iter()
        .map(|&t| {
            let (c, p) = rhs_count(theorem, sample, t);
            ratio(c, n, p)
        })
        .collect();
    Ok((lhs, rhs))
}

/// Applies the functional to CDF values listed in ascending sample order.
pub fn apply_functional(functional: Functional, lhs: &[f64], rhs: &[f64]) -> f64 {
    match functional {
        Functional::L2 => {
            let s: f64 = lhs.iter().zip(rhs).map(|(a, b)| (a - b) * (a - b)).sum();
            s / lhs.len() as f64
        }
        Functional::Ks => lhs.iter().zip(rhs).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs())),
    }
}

pub fn statistic(id: StatisticId, sample: &Sample) -> Result<f64> {
    let (lhs, rhs) = empirical_cdfs_at_sample(id.theorem, sample)?;
    Ok(apply_functional(id.functional, &lhs, &rhs))
}

/// All six statistics, indexed as [`StatisticId::ALL`]; shares the CDF tables
/// between the two functionals of each theorem.
pub fn all_statistics(sample: &Sample) -> Result<[f64; 6]> {
    let mut out = [0.0; 6];
    for theorem in Theorem::ALL {
        let (lhs, rhs) = empirical_cdfs_at_sample(theorem, sample)?;
        for functional in [Functional::L2, Functional::Ks] {
            let id = StatisticId::new(theorem, functional);
            out[id.index()] = apply_functional(functional, &lhs, &rhs);
        }
    }
    Ok(out)
}
