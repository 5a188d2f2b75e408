//! Adaptive Simpson quadrature with an absolute tolerance and a depth budget.

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Absolute error target for the whole integral.
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Uniform panels each interval is cut into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            max_depth: 48,
            initial_panels: 8,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

/// Integral value and whether every panel met its share of the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub converged: bool,
}

struct Panel {
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> Self {
        let m = 0.5 * (a + b);
        let fm = f(m);
        Self {
            a,
            fa,
            m,
            fm,
            b,
            fb,
            whole: (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        }
    }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, p: Panel, tol: f64, depth: u32, ok: &mut bool) -> f64 {
    let left = Panel::new(f, p.a, p.fa, p.m, p.fm);
    let right = Panel::new(f, p.m, p.fm, p.b, p.fb);
    let delta = left.whole + right.whole - p.whole;
    if delta.abs() <= 15.0 * tol || !delta.is_finite() {
        if !delta.is_finite() {
            *ok = false;
        }
        return left.whole + right.whole + delta / 15.0;
    }
    // Panel collapsed below floating-point resolution.
    if depth == 0 || p.m <= p.a || p.m >= p.b {
        *ok = false;
        return left.whole + right.whole + delta / 15.0;
    }
    adapt(f, left, 0.5 * tol, depth - 1, ok) + adapt(f, right, 0.5 * tol, depth - 1, ok)
}

/// Integrates `f` over `[a, b]`, splitting first at every `breaks` point that
/// falls strictly inside the interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], cfg: &QuadConfig) -> Result<Quadrature> {
    if !(cfg.abs_tol > 0.0) {
        return Err(domain("quadrature tolerance", cfg.abs_tol, "tol > 0"));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("integration limits", format!("[{a}, {b}]"), "finite"));
    }
    if b <= a {
        return Ok(Quadrature {
            value: 0.0,
            converged: true,
        });
    }
    let width = b - a;
    // Integrand values exactly at a jump belong to one side only; segments
    // stop this far short of each interior break.
    let gap = 1e-12 * width;
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&t| t > a + 4.0 * gap && t < b - 4.0 * gap)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup_by(|x, y| *x - *y <= 4.0 * gap);
    let mut knots = vec![a];
    knots.extend(inner);
    knots.push(b);

    let panels = cfg.initial_panels.max(1);
    let last = knots.len() - 2;
    let mut ok = true;
    let mut total = 0.0;
    for (s, seg) in knots.windows(2).enumerate() {
        let lo = if s == 0 { seg[0] } else { seg[0] + gap };
        let hi = if s == last { seg[1] } else { seg[1] - gap };
        let h = (hi - lo) / panels as f64;
        let tol = cfg.abs_tol * h / width;
        let mut x0 = lo;
        let mut f0 = f(lo);
        for i in 1..=panels {
            let x1 = if i == panels { hi } else { lo + i as f64 * h };
            let f1 = f(x1);
            let p = Panel::new(&f, x0, f0, x1, f1);
            total += adapt(&f, p, tol, cfg.max_depth, &mut ok);
            x0 = x1;
            f0 = f1;
        }
    }
    Ok(Quadrature {
        value: total,
        converged: ok && total.is_finite(),
    })
}
