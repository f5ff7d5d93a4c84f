use rayon::prelude::*;
use serde::Serialize;

use super::golden::{golden_section, prescan, OptimumResult};
use crate::error::{Error, Result};
use crate::mid::mid_osc_qsnr;
use crate::state::{truncation_dimension, CoherentSpec};

/// Search interval for `c = mu omega^2 t`.
pub const C_BRACKET: (f64, f64) = (0.05, 1.2);
/// Default `|alpha|` grid for the `g` fit.
pub const FIT_GRID: [f64; 10] = [0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0];

const ALPHA_RANGE: (f64, f64) = (0.05, 12.0);
const C_PRESCAN: usize = 24;
const C_TOL: f64 = 1e-5;
const TRUNCATION_EPS: f64 = 1e-12;

/// Golden section seeded by a concurrent grid scan; the refined bracket is
/// the pair of grid cells around the best grid point.
fn scan_then_refine<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Result<OptimumResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let step = (hi - lo) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();
    let values = prescan(&f, &grid)?;
    let best = (0..points).fold(0, |b, i| if values[i] > values[b] { i } else { b });
    if best == 0 || best == points - 1 {
        return Err(Error::Bracket {
            lo,
            hi,
            argmax: grid[best],
        });
    }
    let mut out = golden_section(&f, grid[best - 1], grid[best + 1], tol)?;
    out.evaluations += points;
    if values[best] > out.value {
        // grid point beats the refinement only on a flat or noisy objective
        out.argmax = vec![grid[best]];
        out.value = values[best];
    }
    Ok(out)
}

/// `c_m = argmax_c R(|alpha|, c)` at an explicit truncation.
pub fn optimal_c_with(alpha: &CoherentSpec, dim: usize, tol: f64) -> Result<OptimumResult> {
    let a = alpha.abs();
    if !(ALPHA_RANGE.0..=ALPHA_RANGE.1).contains(&a) {
        return Err(Error::Parameter {
            name: "alpha",
            reason: format!(
                "|alpha| = {a} outside the supported range [{}, {}]",
                ALPHA_RANGE.0, ALPHA_RANGE.1
            ),
        });
    }
    scan_then_refine(
        |c| Ok(mid_osc_qsnr(alpha, c, dim)?.r),
        C_BRACKET.0,
        C_BRACKET.1,
        C_PRESCAN,
        tol,
    )
}

/// `c_m = g(|alpha|)`, truncating where the discarded Poisson mass is below 1e-12.
pub fn optimal_c(alpha: &CoherentSpec) -> Result<OptimumResult> {
    let dim = truncation_dimension(alpha, TRUNCATION_EPS)?;
    optimal_c_with(alpha, dim, C_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GSample {
    pub alpha: f64,
    pub c_m: f64,
    pub r_max: f64,
    pub dim: usize,
    pub evaluations: usize,
}

/// `c_m` on each `|alpha|` of `alphas` (computed concurrently, returned in order).
pub fn g_samples(alphas: &[f64]) -> Result<Vec<GSample>> {
    alphas
        .par_iter()
        .map(|&a| {
            let spec = CoherentSpec::real(a);
            let dim = truncation_dimension(&spec, TRUNCATION_EPS)?;
            let opt = optimal_c_with(&spec, dim, C_TOL)?;
            Ok(GSample {
                alpha: a,
                c_m: opt.x(),
                r_max: opt.value,
                dim,
                evaluations: opt.evaluations,
            })
        })
        .collect()
}

/// Least-squares fit of `g(s) = a + b e^{-k s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub residual_rms: f64,
}

impl FitResult {
    pub fn eval(&self, s: f64) -> f64 {
        self.a + self.b * (-self.k * s).exp()
    }
}

const K_RANGE: (f64, f64) = (1e-3, 20.0);

/// Optimal `(a, b)` for fixed `k` and the residual sum of squares.
fn linear_part(samples: &[(f64, f64)], k: f64) -> Option<(f64, f64, f64)> {
    let n = samples.len() as f64;
    let (mut se, mut see, mut sy, mut sey) = (0.0, 0.0, 0.0, 0.0);
    for &(s, y) in samples {
        let e = (-k * s).exp();
        se += e;
        see += e * e;
        sy += y;
        sey += e * y;
    }
    let det = n * see - se * se;
    if det.abs() <= 1e-14 * n * see {
        return None;
    }
    let b = (n * sey - se * sy) / det;
    let a = (sy - b * se) / n;
    let rss = samples.iter().map(|&(s, y)| (a + b * (-k * s).exp() - y).powi(2)).sum();
    Some((a, b, rss))
}

/// Fits `a + b e^{-k s}` to `(s, c_m)` pairs. The linear coefficients are
/// eliminated exactly; `k` is found by log-grid scan and golden section.
pub fn fit_g(samples: &[(f64, f64)]) -> Result<FitResult> {
    if samples.len() < 8 {
        return Err(Error::Precondition(format!(
            "fit_g needs at least 8 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(s, y)| !s.is_finite() || !y.is_finite()) {
        return Err(Error::Precondition("fit_g samples must be finite".into()));
    }
    let objective = |u: f64| -> Result<f64> {
        linear_part(samples, u.exp())
            .map(|(_, _, rss)| -rss)
            .ok_or_else(|| Error::Fit(format!("degenerate design matrix at k = {}", u.exp())))
    };
    let (ulo, uhi) = (K_RANGE.0.ln(), K_RANGE.1.ln());
    let points = 200;
    let step = (uhi - ulo) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| ulo + step * i as f64).collect();
    let values = grid.iter().map(|&u| objective(u)).collect::<Result<Vec<_>>>()?;
    let best = (0..points).fold(0, |b, i| if values[i] > values[b] { i } else { b });
    if best == 0 || best == points - 1 {
        return Err(Error::Fit(format!(
            "decay rate pinned at the edge of [{}, {}] (k = {})",
            K_RANGE.0,
            K_RANGE.1,
            grid[best].exp()
        )));
    }
    let opt = golden_section(objective, grid[best - 1], grid[best + 1], 1e-12)?;
    if !opt.converged {
        return Err(Error::Fit(format!("golden section stalled at k = {}", opt.x().exp())));
    }
    let k = opt.x().exp();
    let (a, b, rss) = linear_part(samples, k).ok_or_else(|| Error::Fit(format!("degenerate design at k = {k}")))?;
    Ok(FitResult {
        a,
        b,
        k,
        residual_rms: (rss / samples.len() as f64).sqrt(),
    })
}
