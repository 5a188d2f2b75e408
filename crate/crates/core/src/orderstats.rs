//! Order statistics `X₍k;n₎` of i.i.d. samples from a [`DensityModel`].

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::DensityModel;

/// The `k`-th smallest of `n` i.i.d. draws (1-based rank).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderStatSpec {
    k: usize,
    n: usize,
}

impl OrderStatSpec {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return Err(Error::RankOutOfRange { k, n });
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n! / ((k−1)! (n−k)!)`
    pub fn density_coefficient(&self) -> f64 {
        binomial(self.n, self.k) * self.k as f64
    }
}

/// Binomial coefficient in floating point (exact while it fits in 53 bits).
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(domain("x", x, "x >= 0"));
    }
    Ok(())
}

/// Density of `X₍k;n₎` at `x`: `n!/((k−1)!(n−k)!) F^{k−1} (1−F)^{n−k} f`.
pub fn order_stat_pdf(spec: OrderStatSpec, dist: &dyn DensityModel, x: f64) -> Result<f64> {
    check_x(x)?;
    let f = dist.pdf(x);
    if f == 0.0 {
        return Ok(0.0);
    }
    let big_f = dist.cdf(x);
    let survival = 1.0 - big_f;
    Ok(spec.density_coefficient()
        * big_f.powi(spec.k as i32 - 1)
        * survival.powi((spec.n - spec.k) as i32)
        * f)
}

/// `P(X₍k;n₎ ≤ x) = Σ_{i=k}^{n} C(n,i) F^i (1−F)^{n−i}`.
pub fn order_stat_cdf(spec: OrderStatSpec, dist: &dyn DensityModel, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(binomial_upper_tail(spec, dist.cdf(x)))
}

pub(crate) fn binomial_upper_tail(spec: OrderStatSpec, p: f64) -> f64 {
    let q = 1.0 - p;
    let total: f64 = (spec.k..=spec.n)
        .map(|i| binomial(spec.n, i) * p.powi(i as i32) * q.powi((spec.n - i) as i32))
        .sum();
    total.clamp(0.0, 1.0)
}

/// Quantile of `X₍k;n₎`: inverts the binomial tail in `u = F(x)` by bisection,
/// then maps back through the parent quantile.
pub fn order_stat_quantile(spec: OrderStatSpec, dist: &dyn DensityModel, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain("probability", p, "0 <= p <= 1"));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binomial_upper_tail(spec, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(dist.quantile(0.5 * (lo + hi)))
}

/// One draw of `X₍k;n₎`, using `scratch` for the `n` parent draws.
pub(crate) fn draw_order_stat(
    spec: OrderStatSpec,
    dist: &dyn DensityModel,
    rng: &mut dyn RngCore,
    scratch: &mut Vec<f64>,
) -> f64 {
    scratch.clear();
    scratch.extend((0..spec.n).map(|_| dist.sample(rng)));
    scratch.sort_by(f64::total_cmp);
    scratch[spec.k - 1]
}

/// `m` independent draws of `X₍k;n₎`, each the `k`-th smallest of `n` fresh
/// draws from `dist`.
pub fn sample_order_stat(
    spec: OrderStatSpec,
    dist: &dyn DensityModel,
    rng: &mut dyn RngCore,
    m: usize,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(domain("sample count", m, "m >= 1"));
    }
    let mut scratch = Vec::with_capacity(spec.n);
    Ok((0..m)
        .map(|_| draw_order_stat(spec, dist, rng, &mut scratch))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, Exponential};
    use crate::stats::ks_one_sample;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exp1() -> Exponential {
        Exponential::new(1.0).unwrap()
    }

    fn spec(k: usize, n: usize) -> OrderStatSpec {
        OrderStatSpec::new(k, n).unwrap()
    }

    #[test]
    fn invalid_ranks_are_rejected() {
        assert!(matches!(OrderStatSpec::new(0, 3), Err(Error::RankOutOfRange { .. })));
        assert!(OrderStatSpec::new(4, 3).is_err());
        assert!(OrderStatSpec::new(1, 0).is_err());
        assert!(order_stat_pdf(spec(1, 1), &exp1(), -1.0).is_err());
    }

    #[test]
    fn pdf_examples() {
        let e1 = (-1f64).exp();
        assert_eq!(order_stat_pdf(spec(2, 3), &exp1(), 0.0).unwrap(), 0.0);
        let v = order_stat_pdf(spec(2, 3), &exp1(), 1.0).unwrap();
        assert_relative_eq!(v, 6.0 * (1.0 - e1) * e1 * e1, max_relative = 1e-14);
        assert!((v - 0.513289).abs() < 5e-7);
        let v = order_stat_pdf(spec(3, 3), &exp1(), 1.0).unwrap();
        assert_relative_eq!(v, 3.0 * (1.0 - e1).powi(2) * e1, max_relative = 1e-14);
        assert!((v - 0.440987).abs() < 1e-6);
        let v = order_stat_pdf(spec(3, 4), &exp1(), 1.0).unwrap();
        assert_relative_eq!(v, 12.0 * (1.0 - e1).powi(2) * e1 * e1, max_relative = 1e-14);
    }

    #[test]
    fn cdf_examples() {
        for (k, n) in [(1, 1), (2, 3), (3, 4)] {
            assert_eq!(order_stat_cdf(spec(k, n), &exp1(), 0.0).unwrap(), 0.0);
        }
        let f = 1.0 - (-1f64).exp();
        assert_relative_eq!(order_stat_cdf(spec(1, 1), &exp1(), 1.0).unwrap(), f, max_relative = 1e-15);
        let v = order_stat_cdf(spec(2, 3), &exp1(), 1.0).unwrap();
        assert!((v - 0.693568287).abs() < 1e-9, "{v}");
    }

    // Brute-force oracle: fraction of simulated triples whose middle value is ≤ 1.
    #[test]
    fn cdf_matches_monte_carlo_over_sorted_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = 200_000;
        let d = exp1();
        let hits = (0..m)
            .filter(|_| {
                let mut t = [d.sample(&mut rng), d.sample(&mut rng), d.sample(&mut rng)];
                t.sort_by(f64::total_cmp);
                t[1] <= 1.0
            })
            .count();
        let p = hits as f64 / m as f64;
        let exact = order_stat_cdf(spec(2, 3), &d, 1.0).unwrap();
        let se = (exact * (1.0 - exact) / m as f64).sqrt();
        assert!((p - exact).abs() < 4.0 * se, "{p} vs {exact}");
    }

    #[test]
    fn identity_rank_sampling_equals_plain_draws() {
        for dist in ["exp:1", "weibull:2", "uniform"] {
            let d = parse_model(dist).unwrap();
            let mut a = ChaCha8Rng::seed_from_u64(5);
            let mut b = ChaCha8Rng::seed_from_u64(5);
            let xs = sample_order_stat(spec(1, 1), d.as_ref(), &mut a, 3).unwrap();
            let ys: Vec<f64> = (0..3).map(|_| d.sample(&mut b)).collect();
            assert_eq!(xs, ys);
        }
    }

    #[test]
    fn sampling_matches_cdf_and_renyi_mean() {
        let d = exp1();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let xs = sample_order_stat(spec(2, 3), &d, &mut rng, 100_000).unwrap();
        let ks = ks_one_sample(&xs, |x| order_stat_cdf(spec(2, 3), &d, x).unwrap()).unwrap();
        assert!(ks < 0.01, "ks = {ks}");

        let m = 100_000;
        let xs = sample_order_stat(spec(3, 4), &d, &mut rng, m).unwrap();
        let mean = xs.iter().sum::<f64>() / m as f64;
        // Rényi: X₍3;4₎ = E₁/4 + E₂/3 + E₃/2, variance Σ 1/(n−j+1)².
        let exact_mean = 13.0 / 12.0;
        let var = 1.0 / 16.0 + 1.0 / 9.0 + 1.0 / 4.0;
        assert!((mean - exact_mean).abs() < 3.0 * (var / m as f64).sqrt());
    }

    #[test]
    fn sampling_is_deterministic_and_rejects_empty() {
        let d = exp1();
        let a = sample_order_stat(spec(2, 5), &d, &mut ChaCha8Rng::seed_from_u64(9), 50).unwrap();
        let b = sample_order_stat(spec(2, 5), &d, &mut ChaCha8Rng::seed_from_u64(9), 50).unwrap();
        assert_eq!(a, b);
        assert!(sample_order_stat(spec(2, 5), &d, &mut ChaCha8Rng::seed_from_u64(9), 0).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        let d = exp1();
        for (k, n) in [(1, 1), (2, 3), (3, 3), (3, 4)] {
            for &p in &[0.01, 0.5, 0.99, 1.0 - 1e-6] {
                let q = order_stat_quantile(spec(k, n), &d, p).unwrap();
                assert_relative_eq!(order_stat_cdf(spec(k, n), &d, q).unwrap(), p, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn derivative_of_cdf_matches_pdf() {
        let h = 1e-5;
        for dist in ["exp:1", "weibull:2", "halfnormal", "gamma:2"] {
            let d = parse_model(dist).unwrap();
            for (k, n) in [(1, 1), (2, 3), (3, 3), (3, 4), (4, 7)] {
                let s = spec(k, n);
                for i in 1..40 {
                    let x = i as f64 * 0.1;
                    let num = (order_stat_cdf(s, d.as_ref(), x + h).unwrap()
                        - order_stat_cdf(s, d.as_ref(), x - h).unwrap())
                        / (2.0 * h);
                    let pdf = order_stat_pdf(s, d.as_ref(), x).unwrap();
                    assert!((num - pdf).abs() < 1e-6, "{dist} ({k},{n}) x={x}: {num} vs {pdf}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn densities_sum_to_n_times_parent(n in 1usize..12, x in 0.0f64..8.0, which in 0usize..4) {
            let d = parse_model(["exp:1", "weibull:2", "halfnormal", "gamma:2"][which]).unwrap();
            let total: f64 = (1..=n).map(|k| order_stat_pdf(spec(k, n), d.as_ref(), x).unwrap()).sum();
            let target = n as f64 * d.pdf(x);
            prop_assert!((total - target).abs() <= 1e-12 * target.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn cdf_monotone_in_x_and_rank(n in 1usize..10, x in 0.0f64..6.0, dx in 0.0f64..2.0) {
            let d = exp1();
            for k in 1..=n {
                let c = order_stat_cdf(spec(k, n), &d, x).unwrap();
                prop_assert!(c <= order_stat_cdf(spec(k, n), &d, x + dx).unwrap() + 1e-15);
                if k < n {
                    prop_assert!(order_stat_cdf(spec(k + 1, n), &d, x).unwrap() <= c + 1e-15);
                }
            }
        }
    }
}
