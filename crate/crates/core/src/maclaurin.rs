//! Derivative conditions at the origin.
//!
//! `f^{k+1}(0)` is read as the `(k+1)`-th power of `f(0)` throughout. The
//! derivative condition is `f⁽ᵏ⁾(0) = (−1)ᵏ f(0)^{k+1}`, and it forces
//! `f(x) = f(0) e^{−f(0) x}`.
//!
//! Model derivatives arrive as `f64`; every `f64` is a dyadic rational, so the
//! Leibniz sums below are evaluated exactly in `BigRational` and only the
//! final values are rounded back.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::identities::pascal_row;
use crate::model::DensityModel;

/// Exact `f⁽ʲ⁾(0)` for `j = 0..=k`.
fn exact_derivs(dist: &dyn DensityModel, k: usize) -> Result<Vec<BigRational>> {
    let unsupported = || Error::UnsupportedModel {
        model: dist.name(),
        order: k,
    };
    (0..=k)
        .map(|j| {
            dist.pdf_deriv_at_zero(j)
                .and_then(BigRational::from_float)
                .ok_or_else(unsupported)
        })
        .collect()
}

fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn signed_power(base: &BigRational, exp: usize, negative: bool) -> BigRational {
    let p = num_traits::pow(base.clone(), exp);
    if negative {
        -p
    } else {
        p
    }
}

/// Per-order deviation from the derivative condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionReport {
    pub model: String,
    pub k_max: usize,
    pub tol: f64,
    /// `residuals[i]` is the residual at order `k = i + 1`.
    pub residuals: Vec<f64>,
    pub pass: bool,
}

impl ConditionReport {
    pub fn residual(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.residuals.get(i).copied())
    }
}

/// Residuals `|f⁽ᵏ⁾(0) − (−1)ᵏ f(0)^{k+1}|` for `k = 1..=k_max`.
pub fn check_maclaurin_condition(dist: &dyn DensityModel, k_max: usize, tol: f64) -> Result<ConditionReport> {
    if !(tol >= 0.0) {
        return Err(domain("tolerance", tol, "tol >= 0"));
    }
    let d = exact_derivs(dist, k_max)?;
    let f0 = &d[0];
    let residuals: Vec<f64> = (1..=k_max)
        .map(|k| to_f64(&(&d[k] - signed_power(f0, k + 1, k % 2 == 1)).abs()))
        .collect();
    let pass = residuals.iter().all(|&r| r <= tol);
    Ok(ConditionReport {
        model: dist.name(),
        k_max,
        tol,
        residuals,
        pass,
    })
}

/// `G⁽ᵏ⁾(0) = Σ_{j=1}^k C(k,j) f⁽ʲ⁻¹⁾(0) f⁽ᵏ⁻ʲ⁾(0)` where `G = F f`.
fn g_leibniz(d: &[BigRational], k: usize) -> BigRational {
    let binom = pascal_row(k as u32);
    (1..=k).fold(BigRational::zero(), |acc, j| {
        acc + BigRational::from_integer(binom[j].clone()) * &d[j - 1] * &d[k - j]
    })
}

/// Trinomial Leibniz sum for `H = F·F·f`:
/// `Σ_s Σ_j k!/(j!(s−j)!(k−s)!) F⁽ʲ⁾(0) F⁽ˢ⁻ʲ⁾(0) f⁽ᵏ⁻ˢ⁾(0)` with `F(0) = 0`
/// and `F⁽ʲ⁾ = f⁽ʲ⁻¹⁾`.
fn h_leibniz(d: &[BigRational], k: usize) -> BigRational {
    let outer = pascal_row(k as u32);
    let mut total = BigRational::zero();
    for s in 2..=k {
        let inner = pascal_row(s as u32);
        for j in 1..s {
            let coef: BigInt = &outer[s] * &inner[j];
            total += BigRational::from_integer(coef) * &d[j - 1] * &d[s - j - 1] * &d[k - s];
        }
    }
    total
}

/// `G⁽ᵏ⁾(0)` for `G(x) = F(x) f(x)`.
pub fn g_deriv_at_zero(dist: &dyn DensityModel, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    Ok(to_f64(&g_leibniz(&exact_derivs(dist, k)?, k)))
}

/// `H⁽ᵏ⁾(0)` for `H(x) = F²(x) f(x)`.
pub fn h_deriv_at_zero(dist: &dyn DensityModel, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    Ok(to_f64(&h_leibniz(&exact_derivs(dist, k)?, k)))
}

/// Closed forms valid under the derivative condition:
/// `G⁽ᵏ⁾(0) = (−1)^{k−1} f(0)^{k+1} (2ᵏ − 1)` and
/// `H⁽ᵏ⁾(0) = (−1)^{k−2} f(0)^{k+1} (3ᵏ − 2^{k+1} + 1)`.
fn g_closed(f0: &BigRational, k: usize) -> BigRational {
    let count = (BigInt::one() << k) - 1;
    signed_power(f0, k + 1, k.is_multiple_of(2)) * BigRational::from_integer(count)
}

fn h_closed(f0: &BigRational, k: usize) -> BigRational {
    let count = num_traits::pow(BigInt::from(3), k) - (BigInt::one() << (k + 1)) + 1;
    signed_power(f0, k + 1, k % 2 == 1) * BigRational::from_integer(count)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelCheck {
    pub k: usize,
    pub leibniz: f64,
    pub closed_form: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelReport {
    pub model: String,
    pub k_max: usize,
    pub tol: f64,
    pub g: Vec<KernelCheck>,
    pub h: Vec<KernelCheck>,
    pub pass: bool,
}

/// Compares the Leibniz values of `G⁽ᵏ⁾(0)` and `H⁽ᵏ⁾(0)` against their closed
/// forms for `k = 1..=k_max`.
///
/// The closed forms hold only when the derivative condition holds up to order
/// `k_max − 2`; that hypothesis is the caller's responsibility.
pub fn check_kernel_closed_forms(dist: &dyn DensityModel, k_max: usize, tol: f64) -> Result<KernelReport> {
    if !(tol >= 0.0) {
        return Err(domain("tolerance", tol, "tol >= 0"));
    }
    let d = exact_derivs(dist, k_max)?;
    let check = |k: usize, leibniz: BigRational, closed: BigRational| KernelCheck {
        k,
        leibniz: to_f64(&leibniz),
        closed_form: to_f64(&closed),
        residual: to_f64(&(leibniz - closed).abs()),
    };
    let g: Vec<KernelCheck> = (1..=k_max)
        .map(|k| check(k, g_leibniz(&d, k), g_closed(&d[0], k)))
        .collect();
    let h: Vec<KernelCheck> = (1..=k_max)
        .map(|k| check(k, h_leibniz(&d, k), h_closed(&d[0], k)))
        .collect();
    let pass = g.iter().chain(&h).all(|c| c.residual <= tol);
    Ok(KernelReport {
        model: dist.name(),
        k_max,
        tol,
        g,
        h,
        pass,
    })
}

/// Truncated Maclaurin sum `Σ_{k=0}^{K} f⁽ᵏ⁾(0) xᵏ / k!`.
pub fn reconstruct_density(dist: &dyn DensityModel, terms: usize, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(domain("x", x, "x >= 0"));
    }
    let mut sum = 0.0;
    let mut scale = 1.0; // xᵏ / k!
    for k in 0..=terms {
        let d = dist.pdf_deriv_at_zero(k).ok_or_else(|| Error::UnsupportedModel {
            model: dist.name(),
            order: k,
        })?;
        sum += d * scale;
        scale *= x / (k + 1) as f64;
    }
    Ok(sum)
}
