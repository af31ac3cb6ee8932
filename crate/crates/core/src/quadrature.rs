//! Double-exponential quadrature with level halving.
//!
//! Integrands receive the abscissa together with its exact distances to the
//! finite endpoints, so `1/sqrt` endpoint singularities can be evaluated
//! without cancellation even where `x` itself rounds onto the endpoint.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Values that can be accumulated by the rules in this module.
pub trait QuadValue: Clone {
    fn zero_like(&self) -> Self;
    /// `self += w * x`
    fn axpy(&mut self, w: f64, x: &Self);
    fn scaled(&self, w: f64) -> Self {
        let mut out = self.zero_like();
        out.axpy(w, self);
        out
    }
    fn max_norm(&self) -> f64;
    fn max_diff(&self, other: &Self) -> f64;
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, w: f64, x: &Self) {
        *self += w * x;
    }
    fn max_norm(&self) -> f64 {
        self.abs()
    }
    fn max_diff(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl QuadValue for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn axpy(&mut self, w: f64, x: &Self) {
        *self += x * w;
    }
    fn max_norm(&self) -> f64 {
        self.norm()
    }
    fn max_diff(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl<T: QuadValue> QuadValue for Vec<T> {
    fn zero_like(&self) -> Self {
        self.iter().map(QuadValue::zero_like).collect()
    }
    fn axpy(&mut self, w: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            s.axpy(w, v);
        }
    }
    fn max_norm(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.max_norm()))
    }
    fn max_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other).fold(0.0, |m, (a, b)| m.max(a.max_diff(b)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    /// Accept when two consecutive levels differ by at most
    /// `max(rel_tol * |I|, abs_tol)` in the max norm.
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_level: usize,
    pub max_level: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            min_level: 3,
            max_level: 10,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Estimate<T> {
    pub value: T,
    /// Value at half the node count.
    pub previous: T,
    pub level: usize,
    pub evaluations: usize,
}

impl<T: QuadValue> Estimate<T> {
    pub fn error_estimate(&self) -> f64 {
        self.value.max_diff(&self.previous)
    }
}

/// `u = (pi/2) sinh t` beyond which tanh-sinh nodes are dropped; the
/// weights there are below 1e-270.
const TANH_SINH_U_MAX: f64 = 310.0;
/// Range of `u` for exp-sinh: `x - a` spans `e^-300 .. e^80`.
const EXP_SINH_U_MIN: f64 = -300.0;
const EXP_SINH_U_MAX: f64 = 80.0;

fn converged<T: QuadValue>(cur: &T, prev: &T, opts: &QuadOptions) -> bool {
    cur.max_diff(prev) <= (opts.rel_tol * cur.max_norm()).max(opts.abs_tol)
}

/// Level-halving driver over `t` in `[t_lo, t_hi]`: `node(t)` returns the
/// weighted sample at `t`.
fn drive<T, F>(mut node: F, t_lo: f64, t_hi: f64, opts: &QuadOptions, what: &str) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let mut evaluations = 0usize;
    let centre = node(0.0);
    evaluations += 1;
    let mut sum = centre.clone();
    // level 0: integer t
    let mut j = 1i64;
    loop {
        let t = j as f64;
        if t > t_hi && -t < t_lo {
            break;
        }
        if t <= t_hi {
            sum.axpy(1.0, &node(t));
            evaluations += 1;
        }
        if -t >= t_lo {
            sum.axpy(1.0, &node(-t));
            evaluations += 1;
        }
        j += 1;
    }
    let mut prev = sum.clone();
    let mut last_diff = f64::INFINITY;
    for level in 1..=opts.max_level {
        let h = 0.5f64.powi(level as i32);
        let mut k = 1i64;
        loop {
            let t = k as f64 * h;
            if t > t_hi && -t < t_lo {
                break;
            }
            if t <= t_hi {
                sum.axpy(1.0, &node(t));
                evaluations += 1;
            }
            if -t >= t_lo {
                sum.axpy(1.0, &node(-t));
                evaluations += 1;
            }
            k += 2;
        }
        let cur = sum.scaled(h);
        if !cur.max_norm().is_finite() {
            return Err(Error::QuadratureNonConvergence(format!("{what}: non-finite integrand")));
        }
        last_diff = cur.max_diff(&prev);
        if level >= opts.min_level && converged(&cur, &prev, opts) {
            return Ok(Estimate {
                value: cur,
                previous: prev,
                level,
                evaluations,
            });
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergence(format!(
        "{what}: no agreement to {:e} after {} levels (difference {last_diff:e})",
        opts.rel_tol, opts.max_level
    )))
}

/// tanh-sinh rule on `[a, b]`. The integrand is called as `f(x, x - a, b - x)`.
pub fn tanh_sinh<T, F>(a: f64, b: f64, opts: &QuadOptions, mut f: F) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64, f64, f64) -> T,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Internal(format!("tanh_sinh on invalid interval [{a}, {b}]")));
    }
    let half = 0.5 * (b - a);
    let t_max = (TANH_SINH_U_MAX / FRAC_PI_2).asinh();
    let zero = f(a + half, half, half).zero_like();
    let node = |t: f64| -> T {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // distance to the nearer endpoint, and to the farther one
        let near = 2.0 * half * e / (1.0 + e);
        let far = 2.0 * half / (1.0 + e);
        let cosh_u = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        let (x, da, db) = if t >= 0.0 {
            (b - near, far, near)
        } else {
            (a + near, near, far)
        };
        if near <= 0.0 || w == 0.0 {
            return zero.clone();
        }
        f(x, da, db).scaled(w)
    };
    drive(node, -t_max, t_max, opts, "tanh-sinh")
}

/// exp-sinh rule on `[a, inf)`. The integrand is called as `f(x, x - a)`.
pub fn exp_sinh<T, F>(a: f64, opts: &QuadOptions, mut f: F) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64, f64) -> T,
{
    let t_lo = (EXP_SINH_U_MIN / FRAC_PI_2).asinh();
    let t_hi = (EXP_SINH_U_MAX / FRAC_PI_2).asinh();
    let node = |t: f64| -> T {
        let u = FRAC_PI_2 * t.sinh();
        let d = u.exp();
        let w = FRAC_PI_2 * t.cosh() * d;
        f(a + d, d).scaled(w)
    };
    drive(node, t_lo, t_hi, opts, "exp-sinh")
}

/// exp-sinh rule on `(-inf, b]`. The integrand is called as `f(x, b - x)`.
pub fn exp_sinh_left<T, F>(b: f64, opts: &QuadOptions, mut f: F) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64, f64) -> T,
{
    exp_sinh(0.0, opts, |s, d| f(b - s, d))
}
