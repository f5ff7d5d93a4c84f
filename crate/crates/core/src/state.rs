//! State representations shared by both decoherence models: qubit Bloch
//! vectors and density matrices, truncated Fock-space states, and the probe
//! specifications (spin angles, coherent amplitudes).

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Slack on `|r| <= 1` before a Bloch vector is rejected.
pub const BLOCH_NORM_SLACK: f64 = 1e-9;
/// Discarded probability mass above which a truncated state is flagged.
pub const TRUNCATION_WARNING: f64 = 1e-6;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn ensure_square(m: &DMatrix<C64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape {
            expected: "square matrix".into(),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

/// Real Bloch vector `r` of a qubit, `rho = (1 + r·sigma)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl BlochVector {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let r = Self { r1, r2, r3 };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r1.is_finite() && self.r2.is_finite() && self.r3.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite Bloch vector {self:?}")));
        }
        let norm = self.norm();
        if norm > 1.0 + BLOCH_NORM_SLACK {
            return Err(Error::InvalidState(format!(
                "Bloch vector outside the unit ball (|r| = {norm})"
            )));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dot(&self, v: &[f64; 3]) -> f64 {
        self.r1 * v[0] + self.r2 * v[1] + self.r3 * v[2]
    }

    /// `Tr rho^2 = (1 + |r|^2) / 2`.
    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.norm_sqr())
    }
}

/// 2×2 qubit density matrix in the `{|0>, |1>}` eigenbasis of `sigma_3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity(Matrix2<C64>);

impl QubitDensity {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(m: Matrix2<C64>) -> Result<Self> {
        for z in m.iter() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidState("non-finite density matrix entry".into()));
            }
        }
        let herm = (m[(0, 1)] - m[(1, 0)].conj())
            .norm()
            .max(m[(0, 0)].im.abs())
            .max(m[(1, 1)].im.abs());
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "qubit density matrix is not Hermitian (defect {herm:e})"
            )));
        }
        let tr = m[(0, 0)].re + m[(1, 1)].re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        // smallest eigenvalue of a unit-trace Hermitian 2x2 matrix
        let half_gap = (0.25 * (m[(0, 0)].re - m[(1, 1)].re).powi(2) + m[(0, 1)].norm_sqr()).sqrt();
        let lmin = 0.5 * tr - half_gap;
        if lmin < -1e-10 {
            return Err(Error::InvalidState(format!("negative eigenvalue {lmin:e}")));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// The same matrix as a 2-level [`FockDensity`] with no truncation.
    pub fn to_dense(&self) -> FockDensity {
        let m = DMatrix::from_fn(2, 2, |i, j| self.0[(i, j)]);
        FockDensity {
            entries: m,
            truncation_error: 0.0,
        }
    }
}

/// Truncated `N×N` density matrix in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    entries: DMatrix<C64>,
    truncation_error: f64,
}

impl FockDensity {
    pub fn new(entries: DMatrix<C64>, truncation_error: f64) -> Result<Self> {
        ensure_square(&entries)?;
        if entries.nrows() == 0 {
            return Err(Error::InvalidState("empty density matrix".into()));
        }
        let scale = max_abs(&entries).max(1.0);
        let herm = hermitian_defect(&entries);
        if !herm.is_finite() || herm > HERMITIAN_TOL * scale {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (defect {herm:e})"
            )));
        }
        let tr = entries.trace().re;
        if (tr - 1.0).abs() > 10.0 * truncation_error + TRACE_TOL * entries.nrows() as f64 {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        Ok(Self {
            entries,
            truncation_error,
        })
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    pub fn truncation_warning(&self) -> bool {
        self.truncation_error > TRUNCATION_WARNING
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.entries[(n, n)].re).collect()
    }

    pub fn purity(&self) -> f64 {
        // Tr rho^2 = sum |rho_ij|^2 for Hermitian rho
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Normalised pure state `sum_n C_n |n>` on a truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureFockState {
    amplitudes: DVector<C64>,
    truncation_error: f64,
}

impl PureFockState {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        Self::with_truncation(amplitudes, 0.0)
    }

    pub fn with_truncation(amplitudes: DVector<C64>, truncation_error: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty state vector".into()));
        }
        let norm = amplitudes.norm_squared();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "state vector norm^2 is {norm}, expected 1"
            )));
        }
        Ok(Self {
            amplitudes,
            truncation_error,
        })
    }

    /// Fock state `|n>` in a space of dimension `dim`.
    pub fn number_state(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::Precondition(format!("|{n}> does not fit in dim {dim}")));
        }
        let mut v = DVector::zeros(dim);
        v[n] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    pub fn truncation_warning(&self) -> bool {
        self.truncation_error > TRUNCATION_WARNING
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn mean_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    pub fn number_variance(&self) -> f64 {
        let mean = self.mean_number();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| (n as f64 - mean).powi(2) * c.norm_sqr())
            .sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureFockState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape {
                expected: format!("dim {}", self.dim()),
                got: format!("dim {}", other.dim()),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes).norm_sqr())
    }

    pub fn projector(&self) -> FockDensity {
        let v = &self.amplitudes;
        FockDensity {
            entries: v * v.adjoint(),
            truncation_error: self.truncation_error,
        }
    }
}

/// Coherent-state amplitude `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentSpec {
    pub alpha: C64,
}

impl CoherentSpec {
    pub fn new(re: f64, im: f64) -> Self {
        Self {
            alpha: C64::new(re, im),
        }
    }

    pub fn real(alpha: f64) -> Self {
        Self::new(alpha, 0.0)
    }

    pub fn abs(&self) -> f64 {
        self.alpha.norm()
    }

    pub fn mean_number(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

/// Polar and azimuthal angle of a pure qubit state `|theta phi>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeAngles {
    pub theta: f64,
    pub phi: f64,
}

impl ProbeAngles {
    /// `theta` must lie in `[0, pi]`; `phi` is reduced into `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::Parameter {
                name: "theta",
                reason: format!("must lie in [0, pi], got {theta}"),
            });
        }
        if !phi.is_finite() {
            return Err(Error::Parameter {
                name: "phi",
                reason: format!("must be finite, got {phi}"),
            });
        }
        Ok(Self {
            theta,
            phi: phi.rem_euclid(std::f64::consts::TAU),
        })
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn ket(&self) -> Vector2<C64> {
        let (s, c) = (0.5 * self.theta).sin_cos();
        Vector2::new(C64::new(c, 0.0), C64::from_polar(s, self.phi))
    }

    pub fn projector(&self) -> Matrix2<C64> {
        let k = self.ket();
        k * k.adjoint()
    }
}

pub fn pauli() -> [Matrix2<C64>; 3] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(one, o, o, -one),
    ]
}

/// `(1 + r·sigma)/2`.
pub fn bloch_to_density(r: &BlochVector) -> Result<QubitDensity> {
    r.validate()?;
    Ok(QubitDensity(bloch_matrix(&r.as_array(), 1.0)))
}

/// `(scale·1 + v·sigma)/2`; with `scale = 0` this maps a Bloch-vector
/// derivative onto the density-matrix derivative.
pub fn bloch_matrix(v: &[f64; 3], scale: f64) -> Matrix2<C64> {
    let half = 0.5;
    Matrix2::new(
        C64::new(half * (scale + v[2]), 0.0),
        C64::new(half * v[0], -half * v[1]),
        C64::new(half * v[0], half * v[1]),
        C64::new(half * (scale - v[2]), 0.0),
    )
}

/// `r_k = Tr(rho sigma_k)`.
pub fn density_to_bloch(rho: &QubitDensity) -> BlochVector {
    let m = rho.matrix();
    BlochVector {
        r1: 2.0 * m[(0, 1)].re,
        r2: -2.0 * m[(0, 1)].im,
        r3: m[(0, 0)].re - m[(1, 1)].re,
    }
}

/// `ln n!` for `n = 0..len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for n in 0..len {
        if n > 1 {
            acc += (n as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Poisson weights `e^{-lambda} lambda^n / n!` for `n = 0..len`, in log space.
fn poisson_weights(lambda: f64, len: usize) -> Vec<f64> {
    if lambda == 0.0 {
        let mut w = vec![0.0; len];
        if len > 0 {
            w[0] = 1.0;
        }
        return w;
    }
    let lnl = lambda.ln();
    ln_factorials(len)
        .into_iter()
        .enumerate()
        .map(|(n, lf)| (-lambda + n as f64 * lnl - lf).exp())
        .collect()
}

/// Length beyond which the Poisson weights are negligible (< 1e-300 relative).
fn poisson_support(lambda: f64) -> usize {
    (lambda + 40.0 * lambda.sqrt() + 60.0).ceil() as usize
}

/// Poisson tail `sum_{n >= dim}` of the photon-number distribution of `|alpha>`.
pub fn coherent_tail(alpha: &CoherentSpec, dim: usize) -> f64 {
    let lambda = alpha.mean_number();
    let len = poisson_support(lambda).max(dim + 1);
    let w = poisson_weights(lambda, len);
    w[dim.min(len)..].iter().rev().sum()
}

/// Truncated, renormalised coherent-state amplitudes
/// `C_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!)`, `n < dim`.
///
/// The discarded mass (computed before renormalisation) is stored as the
/// truncation error; check [`PureFockState::truncation_warning`].
pub fn coherent_amplitudes(spec: &CoherentSpec, dim: usize) -> Result<PureFockState> {
    if dim == 0 {
        return Err(Error::Precondition("dimension must be >= 1".into()));
    }
    if !(spec.alpha.re.is_finite() && spec.alpha.im.is_finite()) {
        return Err(Error::Parameter {
            name: "alpha",
            reason: "must be finite".into(),
        });
    }
    let abs = spec.abs();
    let mut amps = DVector::zeros(dim);
    if abs == 0.0 {
        amps[0] = C64::new(1.0, 0.0);
    } else {
        let ln_abs = abs.ln();
        let arg = spec.alpha.arg();
        for (n, lf) in ln_factorials(dim).into_iter().enumerate() {
            let ln_mag = -0.5 * abs * abs + n as f64 * ln_abs - 0.5 * lf;
            amps[n] = C64::from_polar(ln_mag.exp(), n as f64 * arg);
        }
    }
    let tail = coherent_tail(spec, dim);
    let norm = amps.norm();
    if norm == 0.0 {
        // every retained amplitude underflowed
        return Err(Error::Precondition(format!(
            "dimension {dim} retains no probability mass for |alpha| = {abs}"
        )));
    }
    amps.unscale_mut(norm);
    PureFockState::with_truncation(amps, tail)
}

/// Smallest `N` with Poisson tail `sum_{n >= N} e^{-|alpha|^2} |alpha|^{2n}/n! < epsilon`.
pub fn truncation_dimension(alpha: &CoherentSpec, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter {
            name: "epsilon",
            reason: format!("must lie in (0, 1), got {epsilon}"),
        });
    }
    let lambda = alpha.mean_number();
    let len = poisson_support(lambda);
    let w = poisson_weights(lambda, len);
    // suffix sums accumulated from the far tail inwards
    let mut tail = 0.0;
    let mut best = len;
    for n in (0..len).rev() {
        if tail < epsilon {
            best = n + 1;
        } else {
            break;
        }
        tail += w[n];
    }
    if tail < epsilon {
        best = 0;
    }
    Ok(best.max(1))
}
