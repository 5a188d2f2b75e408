//! Exact verification of the combinatorial identities that close the
//! induction step for each characterization.
//!
//! Everything here is arbitrary precision: sums and binomials are `BigInt`,
//! closed forms with denominators 2 and 3 are `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, Result};

/// Default upper index for [`verify_all_identities`].
pub const DEFAULT_MAX_R: u32 = 200;

fn as_decimal<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Verdict for one identity at one index `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityVerdict {
    pub r: u32,
    #[serde(serialize_with = "as_decimal")]
    pub lhs: BigRational,
    #[serde(serialize_with = "as_decimal")]
    pub rhs: BigRational,
    #[serde(serialize_with = "as_decimal")]
    pub closed_form: BigRational,
    pub equal: bool,
}

impl IdentityVerdict {
    pub fn new(r: u32, lhs: BigRational, rhs: BigRational, closed_form: BigRational) -> Self {
        let equal = lhs == rhs && rhs == closed_form;
        Self {
            r,
            lhs,
            rhs,
            closed_form,
            equal,
        }
    }

    pub fn closed_form_is_integer(&self) -> bool {
        self.closed_form.is_integer()
    }

    pub fn lhs_is_zero(&self) -> bool {
        self.lhs.is_zero()
    }
}

/// Row `r` of Pascal's triangle, built by the additive recurrence.
pub fn pascal_row(r: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for _ in 0..r {
        row = next_pascal_row(&row);
    }
    row
}

fn next_pascal_row(row: &[BigInt]) -> Vec<BigInt> {
    let mut next = Vec::with_capacity(row.len() + 1);
    next.push(BigInt::one());
    next.extend(row.windows(2).map(|w| &w[0] + &w[1]));
    next.push(BigInt::one());
    next
}

fn pow(base: u32, exp: u32) -> BigInt {
    Pow::pow(BigInt::from(base), exp)
}

fn int(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn frac(num: BigInt, den: u32) -> BigRational {
    BigRational::new(num, BigInt::from(den))
}

/// `Σ_{j=1}^r 3^{r−j} 2^{j−1} = Σ_{j=1}^r C(r,j)(2^j − 1) = 3^r − 2^r`.
pub fn identity_t1(r: u32) -> Result<IdentityVerdict> {
    if r < 1 {
        return Err(domain("r", r, "r >= 1"));
    }
    Ok(t1_with_row(r, &pascal_row(r)))
}

fn t1_with_row(r: u32, binom: &[BigInt]) -> IdentityVerdict {
    let lhs: BigInt = (1..=r).map(|j| pow(3, r - j) * pow(2, j - 1)).sum();
    let rhs: BigInt = (1..=r)
        .map(|j| &binom[j as usize] * (pow(2, j) - 1))
        .sum();
    let closed = pow(3, r) - pow(2, r);
    IdentityVerdict::new(r, int(lhs), int(rhs), int(closed))
}

/// `Σ_{j=2}^{r−1} (2^{j−1} − 1)(C(r,j) − 1) = Σ_{j=2}^{r−1} (3^j − 2^{j+1} + 1)
/// = 3^r/2 − 2^{r+1} + r + 3/2`.
pub fn identity_t2(r: u32) -> Result<IdentityVerdict> {
    if r < 2 {
        return Err(domain("r", r, "r >= 2"));
    }
    Ok(t2_with_row(r, &pascal_row(r)))
}

fn t2_with_row(r: u32, binom: &[BigInt]) -> IdentityVerdict {
    let lhs: BigInt = (2..r)
        .map(|j| (pow(2, j - 1) - 1) * (&binom[j as usize] - 1))
        .sum();
    let rhs: BigInt = (2..r).map(|j| pow(3, j) - pow(2, j + 1) + 1).sum();
    let closed = frac(pow(3, r), 2) - int(pow(2, r + 1)) + int(BigInt::from(r)) + frac(BigInt::from(3), 2);
    IdentityVerdict::new(r, int(lhs), int(rhs), closed)
}

/// `Σ_{j=2}^{r−1} (2^j − 2)(4^{r−j} − C(r,j))
/// = Σ_{j=2}^{r−1} (3^j − 2^{j+1} + 1)(3 C(r,j+1) − 2·4^{r−j−1})
/// = 4^r/3 − 3^r + 2^r − 1/3`.
pub fn identity_t3(r: u32) -> Result<IdentityVerdict> {
    if r < 2 {
        return Err(domain("r", r, "r >= 2"));
    }
    Ok(t3_with_row(r, &pascal_row(r)))
}

fn t3_with_row(r: u32, binom: &[BigInt]) -> IdentityVerdict {
    let lhs: BigInt = (2..r)
        .map(|j| (pow(2, j) - 2) * (pow(4, r - j) - &binom[j as usize]))
        .sum();
    let rhs: BigInt = (2..r)
        .map(|j| {
            (pow(3, j) - pow(2, j + 1) + 1) * (&binom[j as usize + 1] * 3 - pow(4, r - j - 1) * 2)
        })
        .sum();
    let closed = frac(pow(4, r), 3) - int(pow(3, r)) + int(pow(2, r)) - frac(BigInt::one(), 3);
    IdentityVerdict::new(r, int(lhs), int(rhs), closed)
}

/// Verdicts for all three identities up to `max_r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityReport {
    pub max_r: u32,
    pub t1: Vec<IdentityVerdict>,
    pub t2: Vec<IdentityVerdict>,
    pub t3: Vec<IdentityVerdict>,
    pub all_equal: bool,
    pub closed_forms_integral: bool,
}

impl IdentityReport {
    pub fn from_verdicts(
        max_r: u32,
        t1: Vec<IdentityVerdict>,
        t2: Vec<IdentityVerdict>,
        t3: Vec<IdentityVerdict>,
    ) -> Self {
        let all = || t1.iter().chain(&t2).chain(&t3);
        let all_equal = all().all(|v| v.equal);
        let closed_forms_integral = all().all(IdentityVerdict::closed_form_is_integer);
        Self {
            max_r,
            t1,
            t2,
            t3,
            all_equal,
            closed_forms_integral,
        }
    }

    pub fn verdict_count(&self) -> usize {
        self.t1.len() + self.t2.len() + self.t3.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = (&'static str, &IdentityVerdict)> {
        self.t1
            .iter()
            .map(|v| ("t1", v))
            .chain(self.t2.iter().map(|v| ("t2", v)))
            .chain(self.t3.iter().map(|v| ("t3", v)))
            .filter(|(_, v)| !v.equal)
    }
}

/// T1 for `r = 1..=max_r`, T2 and T3 for `r = 2..=max_r`.
pub fn verify_all_identities(max_r: u32) -> Result<IdentityReport> {
    if max_r < 2 {
        return Err(domain("max_r", max_r, "max_r >= 2"));
    }
    let (mut t1, mut t2, mut t3) = (Vec::new(), Vec::new(), Vec::new());
    let mut row = vec![BigInt::one()];
    for r in 1..=max_r {
        row = next_pascal_row(&row);
        t1.push(t1_with_row(r, &row));
        if r >= 2 {
            t2.push(t2_with_row(r, &row));
            t3.push(t3_with_row(r, &row));
        }
    }
    Ok(IdentityReport::from_verdicts(max_r, t1, t2, t3))
}
