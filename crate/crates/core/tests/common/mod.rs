//! Exhaustive-enumeration oracles for the V-statistic CDFs. Independent of the
//! rank-counting code paths: every index tuple is visited and the order
//! statistic is found by sorting.

#![allow(dead_code)]

use expchar::vstat::Theorem;

fn mid3(a: f64, b: f64, c: f64) -> f64 {
    let mut v = [a, b, c];
    v.sort_by(f64::total_cmp);
    v[1]
}

fn third_of4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let mut v = [a, b, c, d];
    v.sort_by(f64::total_cmp);
    v[2]
}

pub fn brute_lhs_cdf(theorem: Theorem, xs: &[f64], t: f64) -> f64 {
    let n = xs.len();
    let mut count: u64 = 0;
    match theorem {
        Theorem::T1 => {
            for &a in xs {
                for &b in xs {
                    count += u64::from(a / 3.0 + b / 2.0 <= t);
                }
            }
            count as f64 / (n as f64).powi(2)
        }
        Theorem::T2 | Theorem::T3 => {
            for &x0 in xs {
                for &a in xs {
                    for &b in xs {
                        for &c in xs {
                            let m = mid3(a, b, c);
                            let v = if theorem == Theorem::T2 { x0 + m } else { m + x0 / 4.0 };
                            count += u64::from(v <= t);
                        }
                    }
                }
            }
            count as f64 / (n as f64).powi(4)
        }
    }
}

pub fn brute_rhs_cdf(theorem: Theorem, xs: &[f64], t: f64) -> f64 {
    let n = xs.len();
    let mut count: u64 = 0;
    match theorem {
        Theorem::T1 | Theorem::T2 => {
            for &a in xs {
                for &b in xs {
                    for &c in xs {
                        let v = if theorem == Theorem::T1 { mid3(a, b, c) } else { a.max(b).max(c) };
                        count += u64::from(v <= t);
                    }
                }
            }
            count as f64 / (n as f64).powi(3)
        }
        Theorem::T3 => {
            for &a in xs {
                for &b in xs {
                    for &c in xs {
                        for &d in xs {
                            count += u64::from(third_of4(a, b, c, d) <= t);
                        }
                    }
                }
            }
            count as f64 / (n as f64).powi(4)
        }
    }
}

/// L2 / KS over the sample points in ascending order.
pub fn brute_statistics(theorem: Theorem, xs: &[f64]) -> (f64, f64) {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sq = 0.0;
    let mut sup: f64 = 0.0;
    for &t in &sorted {
        let d = brute_lhs_cdf(theorem, xs, t) - brute_rhs_cdf(theorem, xs, t);
        sq += d * d;
        sup = sup.max(d.abs());
    }
    (sq / xs.len() as f64, sup)
}
