use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// `1/phi`.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumResult {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl OptimumResult {
    pub fn x(&self) -> f64 {
        self.argmax[0]
    }
}

fn check_bracket(lo: f64, hi: f64, tol: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Precondition(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Golden-section search without the interior check. Returns the best
/// point seen; `converged` is false if the iteration cap was hit.
pub(crate) fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<OptimumResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    check_bracket(lo, hi, tol)?;
    let mut evaluations = 0;
    let mut eval = |s: f64| -> Result<f64> {
        evaluations += 1;
        let v = f(s)?;
        if !v.is_finite() {
            return Err(Error::Optimization(format!("objective is {v} at {s}")));
        }
        Ok(v)
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    let mut iterations = 0;
    while b - a > tol && iterations < 500 {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(OptimumResult {
        argmax: vec![best.0],
        value: best.1,
        evaluations,
        converged: b - a <= tol,
    })
}

/// Maximises a fallible unimodal objective on `[lo, hi]` by golden section.
/// An argmax within `2 tol` of either end is reported as a bracket error.
pub fn try_maximize_1d<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<OptimumResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let out = golden_section(f, lo, hi, tol)?;
    let s = out.x();
    if s - lo <= 2.0 * tol || hi - s <= 2.0 * tol {
        return Err(Error::Bracket { lo, hi, argmax: s });
    }
    Ok(out)
}

/// Maximises `f` on `[lo, hi]` to a bracket narrower than `tol`.
pub fn maximize_1d<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<OptimumResult>
where
    F: FnMut(f64) -> f64,
{
    try_maximize_1d(|s| Ok(f(s)), lo, hi, tol)
}

/// Evaluates `f` on `grid` concurrently; results keep the grid order.
pub fn prescan<F>(f: F, grid: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    grid.par_iter()
        .map(|&s| {
            let v = f(s)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Optimization(format!("objective is {v} at {s}")))
            }
        })
        .collect()
}
