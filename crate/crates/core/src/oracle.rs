//! Fixed-step fourth-order Runge–Kutta integration of the four evolution
//! laws, used to cross-check every closed-form solution.
//!
//! The Hamiltonian is diagonal in the computational / number basis for both
//! systems considered here, so it is passed as its diagonal.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::C64;

/// Largest accepted `dt * max|h|`.
pub const MAX_PHASE_STEP: f64 = 0.01;
const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Method {
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    /// Record every `record_every` steps (the final state is always recorded).
    pub record_every: usize,
    /// Renormalise state vectors after every step.
    pub renormalize: bool,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, record_every: usize) -> Self {
        Self {
            dt,
            t_end,
            method: Method::Rk4,
            record_every,
            renormalize: true,
        }
    }

    /// Checks the step against the spectral radius of `H` and returns the
    /// step count and the effective step `t_end / steps`.
    fn plan(&self, h_diag: &[f64]) -> Result<(usize, f64)> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::StepSize(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::StepSize(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.t_end > 0.0 && self.dt > self.t_end {
            return Err(Error::StepSize(format!(
                "dt = {} exceeds t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.record_every == 0 {
            return Err(Error::StepSize("record_every must be >= 1".into()));
        }
        let scale = h_diag.iter().fold(0.0f64, |a, h| a.max(h.abs()));
        if self.dt * scale > MAX_PHASE_STEP * (1.0 + 1e-12) {
            return Err(Error::StepSize(format!(
                "dt * max|h| = {:e} exceeds {MAX_PHASE_STEP}",
                self.dt * scale
            )));
        }
        let steps = (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize;
        let h = if steps == 0 { 0.0 } else { self.t_end / steps as f64 };
        Ok((steps, h))
    }
}

/// Sampled trajectory; state vectors are stored as single-column matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DMatrix<C64>>,
}

impl Trajectory {
    /// Projectors `|psi><psi|` of a state-vector trajectory.
    pub fn projectors(&self) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            states: self.states.iter().map(|v| v * v.adjoint()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_density(rho0: &DMatrix<C64>, h_diag: &[f64]) -> Result<()> {
    if rho0.nrows() != rho0.ncols() || rho0.nrows() != h_diag.len() {
        return Err(Error::Shape {
            expected: format!("{0}x{0} density matrix", h_diag.len()),
            got: format!("{}x{}", rho0.nrows(), rho0.ncols()),
        });
    }
    Ok(())
}

/// `[H, rho]` for diagonal `H`.
fn commutator_diag(h: &[f64], rho: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(rho.nrows(), rho.ncols(), |n, m| rho[(n, m)] * (h[n] - h[m]))
}

/// `{H, rho}` for diagonal `H`.
fn anticommutator_diag(h: &[f64], rho: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(rho.nrows(), rho.ncols(), |n, m| rho[(n, m)] * (h[n] + h[m]))
}

fn expectation(h: &[f64], rho: &DMatrix<C64>) -> f64 {
    h.iter().enumerate().map(|(n, hn)| hn * rho[(n, n)].re).sum()
}

const MINUS_I: C64 = C64 { re: 0.0, im: -1.0 };

fn rk4_step<S, F>(y: &S, h: f64, f: &F) -> S
where
    S: Clone + std::ops::Add<S, Output = S> + std::ops::Mul<C64, Output = S>,
    F: Fn(&S) -> S,
{
    let half = C64::new(0.5 * h, 0.0);
    let k1 = f(y);
    let k2 = f(&(y.clone() + k1.clone() * half));
    let k3 = f(&(y.clone() + k2.clone() * half));
    let k4 = f(&(y.clone() + k3.clone() * C64::new(h, 0.0)));
    y.clone() + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
}

fn integrate_density<F>(rho0: &DMatrix<C64>, h_diag: &[f64], cfg: &IntegratorConfig, rhs: F) -> Result<Trajectory>
where
    F: Fn(&DMatrix<C64>) -> DMatrix<C64>,
{
    check_density(rho0, h_diag)?;
    let (steps, h) = cfg.plan(h_diag)?;
    let mut rho = rho0.clone();
    let mut out = Trajectory {
        times: vec![0.0],
        states: vec![rho.clone()],
    };
    for k in 1..=steps {
        rho = rk4_step(&rho, h, &rhs);
        rho = (&rho + rho.adjoint()).unscale(2.0);
        if k % cfg.record_every == 0 || k == steps {
            out.times.push(k as f64 * h);
            out.states.push(rho.clone());
        }
    }
    Ok(out)
}

/// Milburn dephasing: `-i[H, rho] - mu [H, [H, rho]]`.
pub fn integrate_mid(rho0: &DMatrix<C64>, h_diag: &[f64], mu: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    integrate_density(rho0, h_diag, cfg, |rho| {
        let c = commutator_diag(h_diag, rho);
        let cc = commutator_diag(h_diag, &c);
        c * MINUS_I - cc * C64::new(mu, 0.0)
    })
}

/// Gisin dissipation: `-i[H, rho] - gamma [[H, rho], rho]`.
pub fn integrate_gnd_density(
    rho0: &DMatrix<C64>,
    h_diag: &[f64],
    gamma: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_density(rho0, h_diag, cfg, |rho| {
        let c = commutator_diag(h_diag, rho);
        let cc = &c * rho - rho * &c;
        c * MINUS_I - cc * C64::new(gamma, 0.0)
    })
}

/// Ensemble form `-i[H, rho] - gamma {H, rho} + 2 gamma rho Tr(H rho)`, which
/// reduces to the Gisin law on pure states.
pub fn integrate_ensemble(
    rho0: &DMatrix<C64>,
    h_diag: &[f64],
    gamma: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_density(rho0, h_diag, cfg, |rho| {
        let c = commutator_diag(h_diag, rho);
        let a = anticommutator_diag(h_diag, rho);
        let e = expectation(h_diag, rho);
        c * MINUS_I - a * C64::new(gamma, 0.0) + rho * C64::new(2.0 * gamma * e, 0.0)
    })
}

/// State-vector law `(-i H - gamma H + gamma <H> + i k) psi` with constant gauge `k`.
pub fn integrate_state_vector(
    psi0: &DVector<C64>,
    h_diag: &[f64],
    gamma: f64,
    k: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if psi0.len() != h_diag.len() {
        return Err(Error::Shape {
            expected: format!("state of length {}", h_diag.len()),
            got: format!("length {}", psi0.len()),
        });
    }
    let (steps, h) = cfg.plan(h_diag)?;
    let rhs = |psi: &DVector<C64>| {
        let norm = psi.norm_squared();
        let mean = h_diag
            .iter()
            .zip(psi.iter())
            .map(|(h, c)| h * c.norm_sqr())
            .sum::<f64>()
            / norm;
        DVector::from_fn(psi.len(), |n, _| {
            psi[n] * C64::new(-gamma * h_diag[n] + gamma * mean, -h_diag[n] + k)
        })
    };
    let as_column = |v: &DVector<C64>| DMatrix::from_column_slice(v.len(), 1, v.as_slice());
    let mut psi = psi0.clone();
    let mut out = Trajectory {
        times: vec![0.0],
        states: vec![as_column(&psi)],
    };
    for step in 1..=steps {
        let before = psi.norm();
        psi = rk4_step(&psi, h, &rhs);
        let after = psi.norm();
        if ((after - before) / before).abs() > NORM_DRIFT_LIMIT {
            return Err(Error::StepSize(format!(
                "norm drift {:e} in one step at t = {}",
                (after - before) / before,
                step as f64 * h
            )));
        }
        if cfg.renormalize {
            psi.unscale_mut(after);
        }
        if step % cfg.record_every == 0 || step == steps {
            out.times.push(step as f64 * h);
            out.states.push(as_column(&psi));
        }
    }
    Ok(out)
}

/// Largest entrywise `|a - b|` over all recorded times.
pub fn compare_trajectories(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.times.len() != b.times.len() {
        return Err(Error::Shape {
            expected: format!("{} samples", a.times.len()),
            got: format!("{} samples", b.times.len()),
        });
    }
    let mut worst = 0.0f64;
    for (i, (ta, tb)) in a.times.iter().zip(&b.times).enumerate() {
        if (ta - tb).abs() > 1e-9 * ta.abs().max(1.0) {
            return Err(Error::Shape {
                expected: format!("t = {ta} at sample {i}"),
                got: format!("t = {tb}"),
            });
        }
        let (sa, sb) = (&a.states[i], &b.states[i]);
        if sa.shape() != sb.shape() {
            return Err(Error::Shape {
                expected: format!("{:?}", sa.shape()),
                got: format!("{:?}", sb.shape()),
            });
        }
        for (x, y) in sa.iter().zip(sb.iter()) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}

/// Evaluates a closed-form solution on the time grid of `reference`.
pub fn sample_like<F>(reference: &Trajectory, mut f: F) -> Trajectory
where
    F: FnMut(f64) -> DMatrix<C64>,
{
    Trajectory {
        times: reference.times.clone(),
        states: reference.times.iter().map(|&t| f(t)).collect(),
    }
}
