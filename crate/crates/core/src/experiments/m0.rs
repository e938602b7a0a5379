use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};

/// Root of the minimum equation for a given number of variables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct M0Solution<T> {
    pub vars: u32,
    pub phi_star: T,
    /// `2^(2B(1 − φ*^(1/B)))`
    pub m0: T,
    pub residual: T,
}

fn c<T: Float>(x: f64) -> T {
    T::from(x).expect("constant fits the float type")
}

/// `(1 − φ) ln(1 − φ) + φ^(1 − 1/B) / (2 ln 2)`
pub fn m0_equation<T: Float>(phi: T, vars: u32) -> T {
    let one = T::one();
    let b = c::<T>(vars as f64);
    let first = if phi == one { T::zero() } else { (one - phi) * (one - phi).ln() };
    first + phi.powf(one - one / b) / (c::<T>(2.0) * c::<T>(2.0).ln())
}

const SCAN_STEPS: usize = 1000;

/// Solves the minimum equation for `φ*`.
///
/// Besides the trivial root at 0 the expression has a tiny root near
/// `(2 ln 2)^(−B)` where it turns negative, and a second one where it turns
/// positive again on the way to 1. The latter is the minimum; it is found by
/// scanning down from 1 for the first sign change and bisecting. For
/// `B < 8` the expression never turns negative and there is no minimum.
pub fn solve_m0<T: Float>(vars: u32) -> Result<M0Solution<T>> {
    if vars < 2 {
        return Err(Error::Domain("the minimum equation needs B >= 2".into()));
    }
    let f = |x: T| m0_equation(x, vars);
    let step = c::<T>(1.0 / SCAN_STEPS as f64);
    let mut hi = T::one() - step;
    let mut trace = Vec::new();
    let mut bracket = None;
    for k in 2..SCAN_STEPS {
        let lo = c::<T>(1.0 - k as f64 / SCAN_STEPS as f64);
        let (flo, fhi) = (f(lo), f(hi));
        trace.push(format!("{:.3}:{:+.3e}", lo.to_f64().unwrap_or(f64::NAN), flo.to_f64().unwrap_or(f64::NAN)));
        if flo <= T::zero() && fhi > T::zero() {
            bracket = Some((lo, hi));
            break;
        }
        hi = lo;
    }
    let Some((mut lo, mut hi)) = bracket else {
        let tail = trace.iter().rev().take(5).cloned().collect::<Vec<_>>().join(" ");
        return Err(Error::Solver(format!("no sign change for B={vars}; last samples {tail}")));
    };
    for _ in 0..200 {
        let mid = (lo + hi) / c(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
    let b = c::<T>(vars as f64);
    let m0 = c::<T>(2.0).powf(c::<T>(2.0) * b * (T::one() - phi.powf(T::one() / b)));
    Ok(M0Solution { vars, phi_star: phi, m0, residual: f(phi) })
}
