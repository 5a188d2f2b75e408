//! Continuous distributions on `[0, ∞)` and the builtin models.
//!
//! Every model samples by inverse transform, `quantile(U)` with `U` uniform
//! on the open interval `(0, 1)`, so a degenerate generator produces a fixed
//! quantile.

use std::f64::consts::{FRAC_2_PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use rand::distributions::Open01;
use rand::{Rng, RngCore};
use statrs::function::erf::{erf, erf_inv};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{domain, Error, Result};

/// A continuous distribution supported on `[0, ∞)`.
pub trait DensityModel: Send + Sync + fmt::Debug {
    /// Canonical spec string, e.g. `exp:2`.
    fn name(&self) -> String;

    fn pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    fn quantile(&self, p: f64) -> f64;

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile(u)
    }

    /// Right-sided derivative `f⁽ᵏ⁾(0)` from a closed form, or `None` when the
    /// model has no usable expansion at the origin.
    fn pdf_deriv_at_zero(&self, k: usize) -> Option<f64>;

    /// Points in `(0, ∞)` where the density is not smooth.
    fn breakpoints(&self) -> &[f64] {
        &[]
    }
}

/// Shared handle used across workers.
pub type Model = Arc<dyn DensityModel>;

/// `k! / m!` for `m ≤ k`.
fn falling_ratio(k: usize, m: usize) -> f64 {
    ((m + 1)..=k).fold(1.0, |acc, i| acc * i as f64)
}

fn factorial(k: usize) -> f64 {
    falling_ratio(k, 0)
}

/// Exponential law with rate `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(domain("exponential rate", rate, "finite and > 0"));
        }
        Ok(Self { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl DensityModel for Exponential {
    fn name(&self) -> String {
        format!("exp:{}", self.rate)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        -(-p).ln_1p() / self.rate
    }

    fn pdf_deriv_at_zero(&self, k: usize) -> Option<f64> {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some(sign * self.rate.powi(k as i32 + 1))
    }
}

/// Weibull law with unit scale: `F(x) = 1 − exp(−x^θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weibull {
    shape: f64,
}

impl Weibull {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(domain("weibull shape", shape, "finite and > 0"));
        }
        Ok(Self { shape })
    }
}

impl DensityModel for Weibull {
    fn name(&self) -> String {
        format!("weibull:{}", self.shape)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.shape {
                s if s < 1.0 => f64::INFINITY,
                s if s == 1.0 => 1.0,
                _ => 0.0,
            };
        }
        self.shape * x.powf(self.shape - 1.0) * (-x.powf(self.shape)).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x.powf(self.shape)).exp_m1()
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        (-(-p).ln_1p()).powf(1.0 / self.shape)
    }

    // f(x) = θ Σ_m (−1)^m x^{θ(m+1)−1} / m!, so only integer shapes expand.
    fn pdf_deriv_at_zero(&self, k: usize) -> Option<f64> {
        if self.shape.fract() != 0.0 {
            return None;
        }
        let theta = self.shape as usize;
        if !(k + 1).is_multiple_of(theta) {
            return Some(0.0);
        }
        let m = (k + 1) / theta - 1;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some(sign * self.shape * falling_ratio(k, m))
    }
}

/// Half-normal law, `f(x) = √(2/π) exp(−x²/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HalfNormal;

impl DensityModel for HalfNormal {
    fn name(&self) -> String {
        "halfnormal".to_string()
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            FRAC_2_PI.sqrt() * (-0.5 * x * x).exp()
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            erf(x / SQRT_2)
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        SQRT_2 * erf_inv(p)
    }

    fn pdf_deriv_at_zero(&self, k: usize) -> Option<f64> {
        if k % 2 == 1 {
            return Some(0.0);
        }
        let half = k / 2;
        let sign = if half.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some(sign * FRAC_2_PI.sqrt() * falling_ratio(k, half) / 2f64.powi(half as i32))
    }
}

/// Gamma law with unit scale and shape `a ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma {
    shape: f64,
    ln_norm: f64,
}

impl Gamma {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape.is_finite() && shape >= 1.0) {
            return Err(domain("gamma shape", shape, "finite and >= 1"));
        }
        Ok(Self {
            shape,
            ln_norm: ln_gamma(shape),
        })
    }
}

impl DensityModel for Gamma {
    fn name(&self) -> String {
        format!("gamma:{}", self.shape)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return if self.shape == 1.0 { 1.0 } else { 0.0 };
        }
        ((self.shape - 1.0) * x.ln() - x - self.ln_norm).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            gamma_lr(self.shape, x)
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        let mut hi = self.shape.max(1.0);
        while self.cdf(hi) < p {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        let mut x = 0.5 * hi;
        for _ in 0..200 {
            let err = self.cdf(x) - p;
            if err == 0.0 {
                break;
            }
            if err > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let density = self.pdf(x);
            let newton = if density > 0.0 { x - err / density } else { f64::NAN };
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let done = (next - x).abs() <= 1e-15 * x;
            x = next;
            if done {
                break;
            }
        }
        x
    }

    // f(x) = Σ_m (−1)^m x^{m+a−1} / (m! (a−1)!) for integer a.
    fn pdf_deriv_at_zero(&self, k: usize) -> Option<f64> {
        if self.shape.fract() != 0.0 {
            return None;
        }
        let lead = self.shape as usize - 1;
        if k < lead {
            return Some(0.0);
        }
        let m = k - lead;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some(sign * falling_ratio(k, m) / factorial(lead))
    }
}

/// Uniform law on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Uniform;

impl DensityModel for Uniform {
    fn name(&self) -> String {
        "uniform".to_string()
    }

    fn pdf(&self, x: f64) -> f64 {
        if (0.0..=1.0).contains(&x) {
            1.0
        } else {
            0.0
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }

    fn quantile(&self, p: f64) -> f64 {
        p.clamp(0.0, 1.0)
    }

    fn pdf_deriv_at_zero(&self, k: usize) -> Option<f64> {
        Some(if k == 0 { 1.0 } else { 0.0 })
    }

    fn breakpoints(&self) -> &[f64] {
        &[1.0]
    }
}

/// Parses `name[:param[,param]]`.
///
/// Accepted: `exp[:rate]`, `weibull:shape`, `halfnormal`, `gamma:shape`, `uniform`.
pub fn parse_model(spec: &str) -> Result<Model> {
    let unknown = || Error::UnknownDistribution(spec.to_string());
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let params: Vec<f64> = match params {
        Some(p) => p
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| unknown()))
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    let model: Model = match (name.trim().to_ascii_lowercase().as_str(), params.as_slice()) {
        ("exp" | "exponential", []) => Arc::new(Exponential::new(1.0)?),
        ("exp" | "exponential", [rate]) => Arc::new(Exponential::new(*rate)?),
        ("weibull", [shape]) => Arc::new(Weibull::new(*shape)?),
        ("halfnormal" | "half-normal", []) => Arc::new(HalfNormal),
        ("gamma", [shape]) => Arc::new(Gamma::new(*shape)?),
        ("uniform", []) => Arc::new(Uniform),
        _ => return Err(unknown()),
    };
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn builtins() -> Vec<Model> {
        ["exp:1", "exp:2.5", "weibull:2", "weibull:0.7", "halfnormal", "gamma:2", "gamma:3.5", "uniform"]
            .iter()
            .map(|s| parse_model(s).unwrap())
            .collect()
    }

    #[test]
    fn cdf_starts_at_zero_and_inverts_quantile() {
        for m in builtins() {
            assert_eq!(m.cdf(0.0), 0.0, "{}", m.name());
            for &p in &[1e-6, 0.01, 0.3, 0.5, 0.9, 0.999] {
                let q = m.quantile(p);
                assert!((m.cdf(q) - p).abs() <= 1e-9 * p, "{} p={p}: {}", m.name(), m.cdf(q));
            }
        }
    }

    #[test]
    fn cdf_is_nondecreasing() {
        for m in builtins() {
            let mut prev = 0.0;
            for i in 0..2000 {
                let c = m.cdf(i as f64 * 0.005);
                assert!(c >= prev, "{}", m.name());
                prev = c;
            }
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        for m in builtins() {
            if m.name() == "weibull:0.7" {
                continue; // unbounded at 0
            }
            let upper = m.quantile(1.0 - 1e-9);
            let n = 200_000;
            let h = upper / n as f64;
            let mut s = 0.5 * (m.pdf(0.0) + m.pdf(upper));
            for i in 1..n {
                s += m.pdf(i as f64 * h);
            }
            assert!((s * h - 1.0).abs() < 1e-4, "{}: {}", m.name(), s * h);
        }
    }

    #[test]
    fn closed_form_derivatives_match_taylor_coefficients() {
        // Weibull(1) and Gamma(1) are Exp(1).
        for spec in ["weibull:1", "gamma:1"] {
            let m = parse_model(spec).unwrap();
            for k in 0..10 {
                assert_eq!(m.pdf_deriv_at_zero(k), Exponential::new(1.0).unwrap().pdf_deriv_at_zero(k));
            }
        }
        // weibull:2 → f = 2x − 2x³ + x⁵ − …
        let w = Weibull::new(2.0).unwrap();
        let d: Vec<f64> = (0..6).map(|k| w.pdf_deriv_at_zero(k).unwrap()).collect();
        assert_eq!(d, vec![0.0, 2.0, 0.0, -12.0, 0.0, 120.0]);
        // gamma:2 → f = x − x² + x³/2 − …
        let g = Gamma::new(2.0).unwrap();
        let d: Vec<f64> = (0..4).map(|k| g.pdf_deriv_at_zero(k).unwrap()).collect();
        assert_eq!(d, vec![0.0, 1.0, -2.0, 3.0]);
        // half-normal: √(2/π)(1 − x²/2 + x⁴/8 − …)
        let c = FRAC_2_PI.sqrt();
        assert_eq!(HalfNormal.pdf_deriv_at_zero(1), Some(0.0));
        assert_relative_eq!(HalfNormal.pdf_deriv_at_zero(2).unwrap(), -c);
        assert_relative_eq!(HalfNormal.pdf_deriv_at_zero(4).unwrap(), 3.0 * c);
        assert!(Weibull::new(1.5).unwrap().pdf_deriv_at_zero(1).is_none());
        assert!(Gamma::new(2.5).unwrap().pdf_deriv_at_zero(1).is_none());
    }

    #[test]
    fn parse_rejects_unknown_and_bad_params() {
        for bad in ["lognormal", "exp:-1", "exp:x", "weibull", "gamma:0.5", "uniform:2", "exp:1,2", ""] {
            assert!(parse_model(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_model("exp").unwrap().name(), "exp:1");
        assert_eq!(parse_model("gamma:2").unwrap().name(), "gamma:2");
    }

    #[test]
    fn degenerate_generator_yields_fixed_quantile() {
        let mut rng = rand::rngs::mock::StepRng::new(1 << 63, 0);
        let m = Exponential::new(1.0).unwrap();
        let a = m.sample(&mut rng);
        let b = m.sample(&mut rng);
        assert_eq!(a, b);
        assert_relative_eq!(a, m.quantile(0.5), max_relative = 1e-12);
    }
}
