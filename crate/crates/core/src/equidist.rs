//! Numerical and Monte Carlo checks of the equidistribution identities
//!
//! * T1: `X₁/3 + X₂/2 =ᵈ X₍₂;₃₎`
//! * T2: `X₀ + X₍₂;₃₎ =ᵈ X₍₃;₃₎`
//! * T3: `X₍₂;₃₎ + X₄/4 =ᵈ X₍₃;₄₎`
//! * Conjecture(k, n): `Σ_{j=1}^{k} X_j/(n−j+1) =ᵈ X₍k;n₎`
//!
//! The left-hand densities are convolution integrals evaluated per grid point
//! by adaptive Simpson; the right-hand densities are order-statistic densities.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::model::DensityModel;
use crate::orderstats::{draw_order_stat, order_stat_pdf, order_stat_quantile, sample_order_stat, OrderStatSpec};
use crate::quadrature::{integrate, QuadConfig};

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 512;
/// Default grid upper end, as a quantile level of the right-hand law.
pub const DEFAULT_GRID_LEVEL: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Characterization {
    T1,
    T2,
    T3,
    Conjecture { k: usize, n: usize },
}

impl Characterization {
    pub const THEOREMS: [Characterization; 3] = [Self::T1, Self::T2, Self::T3];

    pub fn conjecture(k: usize, n: usize) -> Result<Self> {
        OrderStatSpec::new(k, n)?;
        Ok(Self::Conjecture { k, n })
    }

    pub fn rhs_spec(&self) -> OrderStatSpec {
        let (k, n) = match *self {
            Self::T1 => (2, 3),
            Self::T2 => (3, 3),
            Self::T3 => (3, 4),
            Self::Conjecture { k, n } => (k, n),
        };
        OrderStatSpec::new(k, n).expect("validated at construction")
    }

    /// The distributional identity this characterization asserts.
    pub fn statement(&self) -> String {
        match *self {
            Self::T1 => "X1/3 + X2/2 =d X(2;3)".to_string(),
            Self::T2 => "X0 + X(2;3) =d X(3;3)".to_string(),
            Self::T3 => "X(2;3) + X4/4 =d X(3;4)".to_string(),
            Self::Conjecture { k, n } => format!("sum_(j=1..{k}) Xj/({n}-j+1) =d X({k};{n})"),
        }
    }

    pub fn lhs_description(&self) -> String {
        match *self {
            Self::T1 => "X1/3 + X2/2".to_string(),
            Self::T2 => "X0 + median(X1, X2, X3)".to_string(),
            Self::T3 => "median(X1, X2, X3) + X4/4".to_string(),
            Self::Conjecture { k, n } => format!("sum_(j=1..{k}) Xj/({n}-j+1)"),
        }
    }

    fn is_theorem(&self) -> bool {
        !matches!(self, Self::Conjecture { .. })
    }
}

impl fmt::Display for Characterization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::T1 => write!(f, "t1"),
            Self::T2 => write!(f, "t2"),
            Self::T3 => write!(f, "t3"),
            Self::Conjecture { k, n } => write!(f, "conjecture:{k},{n}"),
        }
    }
}

impl FromStr for Characterization {
    type Err = Error;

    /// `t1`, `t2`, `t3` or `conjecture:k,n`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownSelector(s.to_string());
        match s.trim().to_ascii_lowercase().as_str() {
            "t1" => Ok(Self::T1),
            "t2" => Ok(Self::T2),
            "t3" => Ok(Self::T3),
            other => {
                let params = other.strip_prefix("conjecture:").ok_or_else(bad)?;
                let (k, n) = params.split_once(',').ok_or_else(bad)?;
                let k = k.trim().parse().map_err(|_| bad())?;
                let n = n.trim().parse().map_err(|_| bad())?;
                Self::conjecture(k, n)
            }
        }
    }
}

/// Density values tabulated on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityCurve {
    pub grid_points: Vec<f64>,
    pub values: Vec<f64>,
    /// Absolute quadrature tolerance per point; `None` for closed-form curves.
    pub quad_tol: Option<f64>,
}

impl DensityCurve {
    /// Trapezoid integral over the whole grid.
    pub fn mass(&self) -> f64 {
        self.cumulative().last().copied().unwrap_or(0.0)
    }

    /// Running trapezoid integral, starting at 0 on the first grid point.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.values.len());
        if !self.values.is_empty() {
            out.push(0.0);
        }
        for i in 1..self.values.len() {
            acc += 0.5 * (self.values[i] + self.values[i - 1]) * (self.grid_points[i] - self.grid_points[i - 1]);
            out.push(acc);
        }
        out
    }

    /// Two-column CSV with header `x,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,value\n");
        for (x, v) in self.grid_points.iter().zip(&self.values) {
            s.push_str(&format!("{x},{v}\n"));
        }
        s
    }
}

/// `points` equally spaced values on `[0, upper]`, endpoints included.
pub fn uniform_grid(points: usize, upper: f64) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(domain("grid points", points, "points >= 2"));
    }
    if !(upper.is_finite() && upper > 0.0) {
        return Err(domain("grid upper bound", upper, "finite and > 0"));
    }
    let h = upper / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { upper } else { i as f64 * h })
        .collect())
}

/// Uniform grid on `[0, Q]` where `Q` is the right-hand law's quantile at `level`.
pub fn default_grid(spec: Characterization, dist: &dyn DensityModel, points: usize, level: f64) -> Result<Vec<f64>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(domain("grid quantile level", level, "0 < level < 1"));
    }
    let upper = order_stat_quantile(spec.rhs_spec(), dist, level)?;
    uniform_grid(points, upper)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::GridMismatch("empty grid".to_string()));
    }
    if grid[0] < 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::GridMismatch(
            "grid must be nonnegative and strictly increasing".to_string(),
        ));
    }
    Ok(())
}

/// `6 F(z) (1 − F(z)) f(z)`, the density of the median of three.
fn median3_density(dist: &dyn DensityModel, z: f64) -> f64 {
    let f = dist.pdf(z);
    if f == 0.0 {
        return 0.0;
    }
    let big_f = dist.cdf(z);
    6.0 * big_f * (1.0 - big_f) * f
}

/// Convolution density of the left-hand side at one point.
fn lhs_density_at(spec: Characterization, dist: &dyn DensityModel, x: f64, cfg: &QuadConfig) -> Result<f64> {
    let kinks = dist.breakpoints();
    let (value, converged) = match spec {
        Characterization::T1 => {
            let breaks: Vec<f64> = kinks.iter().flat_map(|&b| [b / 3.0, x - b / 2.0]).collect();
            let q = integrate(
                |y| 3.0 * dist.pdf(3.0 * y) * 2.0 * dist.pdf(2.0 * (x - y)),
                0.0,
                x,
                &breaks,
                cfg,
            )?;
            (q.value, q.converged)
        }
        Characterization::T2 => {
            let breaks: Vec<f64> = kinks.iter().flat_map(|&b| [b, x - b]).collect();
            let q = integrate(|y| dist.pdf(y) * median3_density(dist, x - y), 0.0, x, &breaks, cfg)?;
            (q.value, q.converged)
        }
        Characterization::T3 => {
            let breaks: Vec<f64> = kinks.iter().flat_map(|&b| [b / 4.0, x - b]).collect();
            let q = integrate(
                |y| median3_density(dist, x - y) * 4.0 * dist.pdf(4.0 * y),
                0.0,
                x,
                &breaks,
                cfg,
            )?;
            (q.value, q.converged)
        }
        Characterization::Conjecture { .. } => {
            return Err(Error::UnknownSelector(format!("{spec} has no quadrature density")));
        }
    };
    if !converged {
        return Err(Error::QuadratureFailure { x });
    }
    Ok(value.max(0.0))
}

/// Left-hand density on `grid`, each point integrated to absolute tolerance
/// `quad_tol`. Points are evaluated in parallel; each is independent, so the
/// result does not depend on scheduling.
pub fn lhs_density(spec: Characterization, dist: &dyn DensityModel, grid: &[f64], quad_tol: f64) -> Result<DensityCurve> {
    if !spec.is_theorem() {
        return Err(Error::UnknownSelector(format!("{spec} has no quadrature density")));
    }
    if !(quad_tol > 0.0) {
        return Err(domain("quadrature tolerance", quad_tol, "tol > 0"));
    }
    check_grid(grid)?;
    let cfg = QuadConfig::with_tol(quad_tol);
    let evaluated: Vec<Result<f64>> = grid
        .par_iter()
        .map(|&x| lhs_density_at(spec, dist, x, &cfg))
        .collect();
    let values = evaluated.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(DensityCurve {
        grid_points: grid.to_vec(),
        values,
        quad_tol: Some(quad_tol),
    })
}

/// Right-hand order-statistic density on `grid`.
pub fn rhs_density(spec: Characterization, dist: &dyn DensityModel, grid: &[f64]) -> Result<DensityCurve> {
    check_grid(grid)?;
    let rhs = spec.rhs_spec();
    let values = grid
        .iter()
        .map(|&x| order_stat_pdf(rhs, dist, x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DensityCurve {
        grid_points: grid.to_vec(),
        values,
        quad_tol: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DistanceReport {
    pub sup_distance: f64,
    /// Square root of the trapezoid integral of the squared difference.
    pub l2_distance: f64,
    pub points: usize,
    pub lower: f64,
    pub upper: f64,
}

pub fn density_distance(a: &DensityCurve, b: &DensityCurve) -> Result<DistanceReport> {
    if a.grid_points != b.grid_points {
        return Err(Error::GridMismatch(format!(
            "{} points vs {} points, or differing abscissae",
            a.grid_points.len(),
            b.grid_points.len()
        )));
    }
    if a.values.len() != a.grid_points.len() || b.values.len() != b.grid_points.len() {
        return Err(Error::GridMismatch("value count differs from grid size".to_string()));
    }
    check_grid(&a.grid_points)?;
    let diff: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    let sup_distance = diff.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let g = &a.grid_points;
    let l2_sq: f64 = (1..diff.len())
        .map(|i| 0.5 * (diff[i] * diff[i] + diff[i - 1] * diff[i - 1]) * (g[i] - g[i - 1]))
        .sum();
    Ok(DistanceReport {
        sup_distance,
        l2_distance: l2_sq.sqrt(),
        points: g.len(),
        lower: g[0],
        upper: g[g.len() - 1],
    })
}

fn draw_lhs(spec: Characterization, dist: &dyn DensityModel, rng: &mut dyn RngCore, scratch: &mut Vec<f64>) -> f64 {
    let median = OrderStatSpec::new(2, 3).expect("static rank");
    match spec {
        Characterization::T1 => {
            let x1 = dist.sample(rng);
            let x2 = dist.sample(rng);
            x1 / 3.0 + x2 / 2.0
        }
        Characterization::T2 => {
            let x0 = dist.sample(rng);
            x0 + draw_order_stat(median, dist, rng, scratch)
        }
        Characterization::T3 => {
            let med = draw_order_stat(median, dist, rng, scratch);
            med + dist.sample(rng) / 4.0
        }
        Characterization::Conjecture { k, n } => (1..=k).map(|j| dist.sample(rng) / (n - j + 1) as f64).sum(),
    }
}

/// `m` independent draws of the left-hand variable.
pub fn sample_lhs(spec: Characterization, dist: &dyn DensityModel, rng: &mut dyn RngCore, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(domain("sample count", m, "m >= 1"));
    }
    let mut scratch = Vec::with_capacity(3);
    Ok((0..m).map(|_| draw_lhs(spec, dist, rng, &mut scratch)).collect())
}

/// `m` independent draws of the right-hand order statistic.
pub fn sample_rhs(spec: Characterization, dist: &dyn DensityModel, rng: &mut dyn RngCore, m: usize) -> Result<Vec<f64>> {
    sample_order_stat(spec.rhs_spec(), dist, rng, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, Exponential};
    use crate::stats::ks_two_sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exp1() -> Exponential {
        Exponential::new(1.0).unwrap()
    }

    #[test]
    fn selectors_parse() {
        assert_eq!("t2".parse::<Characterization>().unwrap(), Characterization::T2);
        assert_eq!(
            "conjecture:3,4".parse::<Characterization>().unwrap(),
            Characterization::Conjecture { k: 3, n: 4 }
        );
        for bad in ["t9", "conjecture:5,4", "conjecture:2", "conjecture:a,b", ""] {
            assert!(bad.parse::<Characterization>().is_err(), "{bad}");
        }
        assert_eq!(Characterization::T3.rhs_spec(), OrderStatSpec::new(3, 4).unwrap());
        assert_eq!(Characterization::Conjecture { k: 2, n: 3 }.to_string(), "conjecture:2,3");
    }

    #[test]
    fn lhs_density_examples() {
        let d = exp1();
        let grid = [0.0, 1.0];
        let t1 = lhs_density(Characterization::T1, &d, &grid, 1e-10).unwrap();
        assert_eq!(t1.values[0], 0.0);
        let e = |a: f64| (-a).exp();
        assert!((t1.values[1] - 6.0 * (e(2.0) - e(3.0))).abs() < 1e-9);
        assert!((t1.values[1] - 0.513289).abs() < 1e-6);
        let t2 = lhs_density(Characterization::T2, &d, &grid, 1e-10).unwrap();
        assert!((t2.values[1] - (3.0 * e(1.0) - 6.0 * e(2.0) + 3.0 * e(3.0))).abs() < 1e-9);
        assert!((t2.values[1] - 0.440987).abs() < 1e-6);
    }

    #[test]
    fn rhs_density_examples() {
        let d = exp1();
        let c = rhs_density(Characterization::T1, &d, &[0.0, 1.0]).unwrap();
        assert_eq!(c.values[0], 0.0);
        assert!((c.values[1] - 0.513289).abs() < 1e-6);
        let c = rhs_density(Characterization::T3, &d, &[0.0, 1.0]).unwrap();
        let e = |a: f64| (-a).exp();
        assert!((c.values[1] - (12.0 * e(2.0) - 24.0 * e(3.0) + 12.0 * e(4.0))).abs() < 1e-12);
        assert!((c.values[1] - 0.648921).abs() < 1e-6);
    }

    #[test]
    fn invalid_inputs() {
        let d = exp1();
        assert!(lhs_density(Characterization::T1, &d, &[1.0, 0.5], 1e-9).is_err());
        assert!(lhs_density(Characterization::T1, &d, &[0.0, 1.0], 0.0).is_err());
        assert!(lhs_density(Characterization::Conjecture { k: 1, n: 2 }, &d, &[0.0], 1e-9).is_err());
        let a = rhs_density(Characterization::T1, &d, &[0.0, 1.0]).unwrap();
        let b = rhs_density(Characterization::T1, &d, &[0.0, 2.0]).unwrap();
        assert!(matches!(density_distance(&a, &b), Err(Error::GridMismatch(_))));
        assert!(uniform_grid(1, 1.0).is_err());
        assert!(default_grid(Characterization::T1, &d, 10, 1.0).is_err());
    }

    #[test]
    fn identical_curves_have_zero_distance() {
        let d = exp1();
        let grid = uniform_grid(64, 5.0).unwrap();
        let a = rhs_density(Characterization::T2, &d, &grid).unwrap();
        let r = density_distance(&a, &a).unwrap();
        assert_eq!((r.sup_distance, r.l2_distance), (0.0, 0.0));
    }

    #[test]
    fn curves_conserve_mass() {
        for spec in ["exp:1", "weibull:2", "halfnormal", "gamma:2", "uniform"] {
            let d = parse_model(spec).unwrap();
            for ch in Characterization::THEOREMS {
                let grid = default_grid(ch, d.as_ref(), DEFAULT_GRID_POINTS, DEFAULT_GRID_LEVEL).unwrap();
                let rhs = rhs_density(ch, d.as_ref(), &grid).unwrap();
                assert!((rhs.mass() - 1.0).abs() < 2e-3, "{spec} {ch}: {}", rhs.mass());
                // Off the null the left-hand law has its own support, which the
                // right-hand grid need not cover.
                if spec == "exp:1" {
                    let lhs = lhs_density(ch, d.as_ref(), &grid, 1e-9).unwrap();
                    assert!((lhs.mass() - 1.0).abs() < 2e-3, "{spec} {ch}: {}", lhs.mass());
                }
            }
        }
    }

    #[test]
    fn scale_equivariance_under_exponential() {
        let base = exp1();
        let grid = uniform_grid(40, 8.0).unwrap();
        for rate in [0.5, 2.0] {
            let d = Exponential::new(rate).unwrap();
            let scaled: Vec<f64> = grid.iter().map(|x| x * rate).collect();
            for ch in Characterization::THEOREMS {
                let lhs = lhs_density(ch, &d, &grid, 1e-10).unwrap();
                let ref_lhs = lhs_density(ch, &base, &scaled, 1e-10).unwrap();
                let rhs = rhs_density(ch, &d, &grid).unwrap();
                let ref_rhs = rhs_density(ch, &base, &scaled).unwrap();
                for i in 0..grid.len() {
                    assert!((lhs.values[i] - rate * ref_lhs.values[i]).abs() < 1e-8);
                    assert!((rhs.values[i] - rate * ref_rhs.values[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn parallel_evaluation_matches_sequential() {
        let d = parse_model("weibull:2").unwrap();
        let grid = uniform_grid(50, 3.0).unwrap();
        let par = lhs_density(Characterization::T3, d.as_ref(), &grid, 1e-9).unwrap();
        let cfg = QuadConfig::with_tol(1e-9);
        for (i, &x) in grid.iter().enumerate() {
            let seq = lhs_density_at(Characterization::T3, d.as_ref(), x, &cfg).unwrap();
            assert_eq!(seq.to_bits(), par.values[i].to_bits());
        }
    }

    #[test]
    fn degenerate_generator_sampling() {
        let d = exp1();
        let mut rng = rand::rngs::mock::StepRng::new(1 << 62, 0);
        let xs = sample_lhs(Characterization::T1, &d, &mut rng, 3).unwrap();
        let q = d.quantile(0.25);
        for x in xs {
            assert!((x - (q / 3.0 + q / 2.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        let d = exp1();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for ch in Characterization::THEOREMS {
            let grid = default_grid(ch, &d, DEFAULT_GRID_POINTS, DEFAULT_GRID_LEVEL).unwrap();
            let curve = lhs_density(ch, &d, &grid, 1e-9).unwrap();
            let cum = curve.cumulative();
            let mut xs = sample_lhs(ch, &d, &mut rng, 100_000).unwrap();
            xs.sort_by(f64::total_cmp);
            let mut worst: f64 = 0.0;
            for (x, c) in grid.iter().zip(&cum) {
                let ecdf = xs.partition_point(|v| v <= x) as f64 / xs.len() as f64;
                worst = worst.max((ecdf - c).abs());
            }
            assert!(worst < 0.01, "{ch}: {worst}");
        }
    }

    #[test]
    fn conjecture_forward_direction() {
        let d = exp1();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = Characterization::Conjecture { k: 3, n: 4 };
        let a = sample_lhs(ch, &d, &mut rng, 100_000).unwrap();
        let b = sample_rhs(ch, &d, &mut rng, 100_000).unwrap();
        assert!(ks_two_sample(&a, &b).unwrap() < 0.01);
    }
}
