//! Kolmogorov–Smirnov distances.

use crate::error::{Error, Result};

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `sup_x |Fₙ(x) − F(x)|` for a continuous reference CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted(xs);
    let n = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0, |acc: f64, (i, &x)| {
        let c = cdf(x);
        let above = (i + 1) as f64 / n - c;
        let below = c - i as f64 / n;
        acc.max(above).max(below)
    }))
}

/// Two-sample statistic: sup over the pooled points of `|ECDF_a − ECDF_b|`,
/// with ECDFs right-continuous so ties are handled exactly.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}
