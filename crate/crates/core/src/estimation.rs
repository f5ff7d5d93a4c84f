//! Classical and quantum Fisher information, the symmetric logarithmic
//! derivative, signal-to-noise ratios and the Cramér–Rao bound.
//!
//! Every routine here is agnostic to the model that produced the state: the
//! caller supplies the state and its exact derivative with respect to the
//! parameter being estimated.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::density_spectrum;
use crate::state::{hermitian_defect, max_abs, BlochVector, FockDensity, ProbeAngles, PureFockState, C64};

/// Outcomes with probability at or below this are dropped from the FI sum.
pub const PROBABILITY_FLOOR: f64 = 1e-14;
/// Relative eigenvalue floor for the pair sum in [`qfi_mixed`].
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// One measurement outcome: probability and its derivative in the parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outcome {
    pub p: f64,
    pub dp: f64,
}

/// Outcome distribution `p(x|lambda)` of a measurement together with
/// `dp/dlambda`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityModel {
    outcomes: Vec<Outcome>,
}

impl ProbabilityModel {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidModel("no outcomes".into()));
        }
        let mut outcomes = outcomes;
        for o in &mut outcomes {
            if !(o.p.is_finite() && o.dp.is_finite()) {
                return Err(Error::InvalidModel(format!("non-finite outcome {o:?}")));
            }
            if o.p < 0.0 {
                if o.p < -1e-12 {
                    return Err(Error::InvalidModel(format!("negative probability {}", o.p)));
                }
                o.p = 0.0;
            }
        }
        let total: f64 = outcomes.iter().map(|o| o.p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidModel(format!("probabilities sum to {total}")));
        }
        let dsum: f64 = outcomes.iter().map(|o| o.dp).sum();
        if dsum.abs() > 1e-7 {
            return Err(Error::InvalidModel(format!("derivatives sum to {dsum:e}, expected 0")));
        }
        Ok(Self { outcomes })
    }

    /// Two-outcome model `{p, 1 - p}`.
    pub fn binary(p: f64, dp: f64) -> Result<Self> {
        Self::new(vec![Outcome { p, dp }, Outcome { p: 1.0 - p, dp: -dp }])
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }
}

/// `F = sum_x (dp_x)^2 / p_x`.
pub fn fisher_information(model: &ProbabilityModel) -> f64 {
    model
        .outcomes
        .iter()
        .filter(|o| o.p > PROBABILITY_FLOOR)
        .map(|o| o.dp * o.dp / o.p)
        .sum()
}

/// Born-rule model of the projective spin measurement
/// `{|theta phi><theta phi|, 1 - |theta phi><theta phi|}` on a qubit state.
pub fn spin_measurement(rho: &Matrix2<C64>, drho: &Matrix2<C64>, meas: &ProbeAngles) -> Result<ProbabilityModel> {
    let proj = meas.projector();
    let p = (rho * proj).trace().re;
    let dp = (drho * proj).trace().re;
    ProbabilityModel::binary(p, dp)
}

fn clip_nonnegative(q: f64, tol: f64) -> f64 {
    if q < 0.0 && q >= -tol {
        0.0
    } else {
        q
    }
}

/// `Q = 4 (<dpsi|dpsi> - |<psi|dpsi>|^2)` for a pure state.
pub fn qfi_pure(psi: &PureFockState, dpsi: &DVector<C64>) -> Result<f64> {
    if dpsi.len() != psi.dim() {
        return Err(Error::Shape {
            expected: format!("derivative of length {}", psi.dim()),
            got: format!("length {}", dpsi.len()),
        });
    }
    let overlap = psi.amplitudes().dotc(dpsi);
    let q = 4.0 * (dpsi.norm_squared() - overlap.norm_sqr());
    Ok(clip_nonnegative(q, 1e-10 * dpsi.norm_squared().max(1.0)).max(0.0))
}

fn check_derivative(rho: &FockDensity, drho: &DMatrix<C64>) -> Result<()> {
    if drho.nrows() != rho.dim() || drho.ncols() != rho.dim() {
        return Err(Error::Shape {
            expected: format!("{0}x{0}", rho.dim()),
            got: format!("{}x{}", drho.nrows(), drho.ncols()),
        });
    }
    let scale = max_abs(drho).max(1.0);
    let defect = hermitian_defect(drho);
    if !defect.is_finite() || defect > 1e-10 * scale {
        return Err(Error::InvalidDerivative(format!(
            "dρ is not Hermitian (defect {defect:e})"
        )));
    }
    let tr = drho.trace();
    if tr.norm() > 1e-8 * scale {
        return Err(Error::InvalidDerivative(format!("dρ has trace {tr}, expected 0")));
    }
    Ok(())
}

/// Pairwise weights `2 / (rho_m + rho_n)` in the eigenbasis, zero where the
/// pair falls below the eigenvalue floor; also returns `V^dagger drho V`.
fn eigenbasis_terms(rho: &FockDensity, drho: &DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<f64>, DMatrix<C64>)> {
    check_derivative(rho, drho)?;
    let eig = density_spectrum(rho)?;
    let n = rho.dim();
    let floor = EIGENVALUE_FLOOR * eig.values[0].max(0.0);
    let d = eig.vectors.adjoint() * drho * &eig.vectors;
    let w = DMatrix::from_fn(n, n, |m, k| {
        let s = eig.values[m] + eig.values[k];
        if s > floor {
            2.0 / s
        } else {
            0.0
        }
    });
    Ok((d, w, eig.vectors))
}

/// `Q = 2 sum_{mn} |<psi_m| drho |psi_n>|^2 / (rho_m + rho_n)`, the sum running
/// over eigenvalue pairs above `EIGENVALUE_FLOOR * rho_max`.
pub fn qfi_mixed(rho: &FockDensity, drho: &DMatrix<C64>) -> Result<f64> {
    let (d, w, _) = eigenbasis_terms(rho, drho)?;
    let q: f64 = d.iter().zip(w.iter()).map(|(z, w)| w * z.norm_sqr()).sum();
    Ok(q.max(0.0))
}

/// Symmetric logarithmic derivative `L` with `L rho + rho L = 2 drho` on the
/// support of `rho`.
pub fn sld(rho: &FockDensity, drho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (d, w, v) = eigenbasis_terms(rho, drho)?;
    let l_eig = d.zip_map(&w, |z, w| z * w);
    let l = &v * l_eig * v.adjoint();
    Ok((&l + l.adjoint()).unscale(2.0))
}

/// QFI of a qubit from its Bloch vector and derivative,
/// `|dr|^2 + (r·dr)^2 / (1 - |r|^2)`, with the pure-state limit `|dr|^2`.
pub fn qfi_bloch(r: &BlochVector, dr: &[f64; 3]) -> Result<f64> {
    r.validate()?;
    let dr_sq = dr.iter().map(|v| v * v).sum::<f64>();
    let r_dot = r.dot(dr);
    let norm = r.norm();
    if (norm - 1.0).abs() <= 1e-9 {
        if r_dot.abs() > 1e-7 {
            return Err(Error::InconsistentDerivative(r_dot));
        }
        return Ok(dr_sq);
    }
    Ok(dr_sq + r_dot * r_dot / (1.0 - r.norm_sqr()))
}

/// Quantum signal-to-noise ratio `R = lambda^2 Q`.
pub fn qsnr(lambda: f64, q: f64) -> f64 {
    lambda * lambda * q
}

/// Lower bound on the estimator variance after `M` repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "variance", rename_all = "lowercase")]
pub enum CramerRao {
    Finite(f64),
    /// Zero information: the parameter cannot be estimated.
    Unbounded,
}

impl CramerRao {
    pub fn variance(&self) -> Option<f64> {
        match self {
            CramerRao::Finite(v) => Some(*v),
            CramerRao::Unbounded => None,
        }
    }
}

/// `V >= 1 / (M Q)`.
pub fn cramer_rao_variance(q: f64, shots: u64) -> CramerRao {
    if q > 0.0 && shots > 0 {
        CramerRao::Finite(1.0 / (shots as f64 * q))
    } else {
        CramerRao::Unbounded
    }
}

/// Summary of the attainable precision for one parameter value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationReport {
    pub lambda: f64,
    pub q: f64,
    /// FI of the named measurement, if one was evaluated.
    pub f: Option<f64>,
    pub r: f64,
    pub shots: u64,
    pub cr_variance: CramerRao,
}

impl EstimationReport {
    pub fn new(lambda: f64, q: f64, f: Option<f64>, shots: u64) -> Self {
        Self {
            lambda,
            q,
            f,
            r: qsnr(lambda, q),
            shots,
            cr_variance: cramer_rao_variance(q, shots),
        }
    }

    /// `F <= Q` within relative slack `1e-6`.
    pub fn respects_quantum_bound(&self) -> bool {
        self.f.is_none_or(|f| f <= self.q * (1.0 + 1e-6) + 1e-300)
    }
}
