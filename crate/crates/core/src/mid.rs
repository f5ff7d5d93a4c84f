//! Milburn intrinsic dephasing, `drho/dt = -i[H, rho] - mu [H, [H, rho]]`,
//! for the qubit `H = omega sigma_3` and the oscillator `H = omega a^dagger a`.
//!
//! All derivatives are taken with respect to `mu` analytically.

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::error::{check_nonneg, check_positive, Error, Result};
use crate::estimation::{qfi_mixed, spin_measurement, ProbabilityModel};
use crate::state::{
    bloch_matrix, coherent_amplitudes, BlochVector, CoherentSpec, FockDensity, ProbeAngles, QubitDensity, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MidParams {
    pub omega: f64,
    pub mu: f64,
    pub t: f64,
}

impl MidParams {
    pub fn new(omega: f64, mu: f64, t: f64) -> Result<Self> {
        Ok(Self {
            omega: check_positive("omega", omega)?,
            mu: check_nonneg("mu", mu)?,
            t: check_nonneg("t", t)?,
        })
    }

    /// `x = mu omega^2 t` (also called `c` for the oscillator).
    pub fn x(&self) -> f64 {
        self.mu * self.omega * self.omega * self.t
    }

    /// `y = mu omega`.
    pub fn y(&self) -> f64 {
        self.mu * self.omega
    }

    /// `x2 = omega t`.
    pub fn x2(&self) -> f64 {
        self.omega * self.t
    }
}

/// Closed-form Bloch vector: the transverse components precess at `2 omega`
/// and decay as `e^{-4 mu omega^2 t}`; `r3` is frozen.
pub fn mid_qubit_bloch(angles: &ProbeAngles, p: &MidParams) -> BlochVector {
    let damp = (-4.0 * p.x()).exp();
    let phase = 2.0 * p.omega * p.t + angles.phi;
    let st = angles.theta.sin();
    BlochVector {
        r1: damp * phase.cos() * st,
        r2: damp * phase.sin() * st,
        r3: angles.theta.cos(),
    }
}

/// `d r / d mu`.
pub fn mid_qubit_bloch_derivative(angles: &ProbeAngles, p: &MidParams) -> [f64; 3] {
    let r = mid_qubit_bloch(angles, p);
    let k = -4.0 * p.omega * p.omega * p.t;
    [k * r.r1, k * r.r2, 0.0]
}

pub fn mid_qubit_density(angles: &ProbeAngles, p: &MidParams) -> QubitDensity {
    let (s, c) = (0.5 * angles.theta).sin_cos();
    // eta_m = exp(-2i omega t - 4 mu omega^2 t)
    let eta = C64::from_polar((-4.0 * p.x()).exp(), -2.0 * p.omega * p.t);
    let off = eta * C64::from_polar(0.5 * angles.theta.sin(), -angles.phi);
    let m = Matrix2::new(C64::new(c * c, 0.0), off, off.conj(), C64::new(s * s, 0.0));
    QubitDensity::from_matrix(m).expect("closed-form MID qubit state is a valid density matrix")
}

/// `d rho / d mu`.
pub fn mid_qubit_density_derivative(angles: &ProbeAngles, p: &MidParams) -> Matrix2<C64> {
    bloch_matrix(&mid_qubit_bloch_derivative(angles, p), 0.0)
}

/// QFI of the MID qubit with respect to `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MidQubitQfi {
    Value(f64),
    /// At `mu = 0` the state is pure while the purity decreases linearly in
    /// `mu`, so `Q` diverges; `mu_times_q = lim mu Q = 2 omega^2 t sin^2 theta`.
    ZeroMuLimit {
        mu_times_q: f64,
    },
}

impl MidQubitQfi {
    pub fn value(&self) -> f64 {
        match *self {
            MidQubitQfi::Value(q) => q,
            MidQubitQfi::ZeroMuLimit { .. } => f64::INFINITY,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self, MidQubitQfi::ZeroMuLimit { .. })
    }
}

/// `Q = 16 omega^4 t^2 sin^2 theta / (e^{8 mu omega^2 t} - 1)`.
pub fn mid_qubit_qfi(theta: f64, p: &MidParams) -> MidQubitQfi {
    let s2 = sin_sq(theta);
    if s2 == 0.0 || p.t == 0.0 {
        return MidQubitQfi::Value(0.0);
    }
    if p.mu == 0.0 {
        return MidQubitQfi::ZeroMuLimit {
            mu_times_q: 2.0 * p.omega * p.omega * p.t * s2,
        };
    }
    let w2 = p.omega * p.omega;
    MidQubitQfi::Value(16.0 * w2 * w2 * p.t * p.t * s2 / (8.0 * p.x()).exp_m1())
}

/// `sin^2`, exactly zero at the poles.
pub(crate) fn sin_sq(theta: f64) -> f64 {
    if theta == 0.0 || theta == std::f64::consts::PI {
        0.0
    } else {
        theta.sin().powi(2)
    }
}

/// `R = 16 x^2 sin^2 theta / (e^{8x} - 1)` with `x = mu omega^2 t`.
pub fn mid_qubit_qsnr(x: f64, theta: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    16.0 * x * x * sin_sq(theta) / (8.0 * x).exp_m1()
}

/// Spin measurement `|theta_m phi_m>` on the evolved MID qubit.
pub fn mid_spin_probabilities(state: &ProbeAngles, meas: &ProbeAngles, p: &MidParams) -> Result<ProbabilityModel> {
    let rho = mid_qubit_density(state, p);
    let drho = mid_qubit_density_derivative(state, p);
    spin_measurement(rho.matrix(), &drho, meas)
}

/// `F/Q` of the spin measurement at `theta_meas = pi/2, phi_meas = phi` for a
/// state with polar angle `theta`, in terms of `x2 = omega t` and `y = mu omega`:
/// `(e^{8 x2 y} - 1) cos^2(2 x2) / (e^{8 x2 y} - sin^2 theta cos^2(2 x2))`.
pub fn mid_fid_ratio(x2: f64, y: f64, theta: f64) -> Result<f64> {
    check_positive("x2", x2)?;
    check_positive("y", y)?;
    let em1 = (8.0 * x2 * y).exp_m1();
    let c2 = (2.0 * x2).cos().powi(2);
    let denom = em1 + (1.0 - sin_sq(theta) * c2);
    if denom.abs() < 1e-14 || !denom.is_finite() {
        return Err(Error::IndeterminateRatio(denom));
    }
    Ok(em1 * c2 / denom)
}

/// Truncated MID oscillator state
/// `rho_nm = C_n C_m^* e^{-i omega (n-m) t} e^{-mu omega^2 (n-m)^2 t}`.
pub fn mid_fock_density(alpha: &CoherentSpec, p: &MidParams, dim: usize) -> Result<FockDensity> {
    let psi = coherent_amplitudes(alpha, dim)?;
    let c = psi.amplitudes();
    let mut rho = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        rho[(n, n)] = C64::new(c[n].norm_sqr(), 0.0);
        for m in (n + 1)..dim {
            let d = n as f64 - m as f64;
            let factor = C64::from_polar((-p.x() * d * d).exp(), -p.omega * d * p.t);
            let v = c[n] * c[m].conj() * factor;
            rho[(n, m)] = v;
            rho[(m, n)] = v.conj();
        }
    }
    FockDensity::new(rho, psi.truncation_error())
}

/// `(d rho / d mu)_nm = -omega^2 (n-m)^2 t rho_nm`.
pub fn mid_fock_density_derivative(alpha: &CoherentSpec, p: &MidParams, dim: usize) -> Result<DMatrix<C64>> {
    let rho = mid_fock_density(alpha, p, dim)?;
    let k = -p.omega * p.omega * p.t;
    Ok(DMatrix::from_fn(dim, dim, |n, m| {
        let d = n as f64 - m as f64;
        rho.entries()[(n, m)] * (k * d * d)
    }))
}

/// QSNR of the MID oscillator together with the truncation it was computed at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscQsnr {
    pub r: f64,
    pub q: f64,
    pub dim: usize,
    pub truncation_error: f64,
    pub truncation_warning: bool,
}

/// `R = mu^2 Q(mu)` for the MID oscillator at arbitrary `(omega, mu, t)`.
pub fn mid_osc_qsnr_at(alpha: &CoherentSpec, p: &MidParams, dim: usize) -> Result<OscQsnr> {
    let rho = mid_fock_density(alpha, p, dim)?;
    let drho = mid_fock_density_derivative(alpha, p, dim)?;
    let q = qfi_mixed(&rho, &drho)?;
    Ok(OscQsnr {
        r: p.mu * p.mu * q,
        q,
        dim,
        truncation_error: rho.truncation_error(),
        truncation_warning: rho.truncation_warning(),
    })
}

/// `R(|alpha|, c)` evaluated in the gauge `omega = 1, t = 1, mu = c`.
pub fn mid_osc_qsnr(alpha: &CoherentSpec, c: f64, dim: usize) -> Result<OscQsnr> {
    let c = check_nonneg("c", c)?;
    mid_osc_qsnr_at(
        alpha,
        &MidParams {
            omega: 1.0,
            mu: c,
            t: 1.0,
        },
        dim,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{fisher_information, qfi_bloch};
    use crate::state::{bloch_to_density, truncation_dimension};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn angles(theta: f64, phi: f64) -> ProbeAngles {
        ProbeAngles::new(theta, phi).unwrap()
    }

    #[test]
    fn bloch_examples() {
        let a = angles(1.1, 0.4);
        let r = mid_qubit_bloch(&a, &MidParams::new(1.3, 0.2, 0.0).unwrap());
        let u = a.unit_vector();
        assert_abs_diff_eq!(r.r1, u[0], epsilon = 1e-15);
        assert_abs_diff_eq!(r.r2, u[1], epsilon = 1e-15);
        assert_abs_diff_eq!(r.r3, u[2], epsilon = 1e-15);

        let r = mid_qubit_bloch(&angles(FRAC_PI_2, 0.0), &MidParams::new(1.0, 0.0, PI).unwrap());
        assert_abs_diff_eq!(r.r1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.r2, 0.0, epsilon = 1e-14);

        let r = mid_qubit_bloch(&angles(FRAC_PI_2, 0.0), &MidParams::new(1.0, 0.1, 1.0).unwrap());
        assert_abs_diff_eq!(r.r1, (-0.4f64).exp() * 2f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.r1, -0.278952, epsilon = 1e-6);
        assert_abs_diff_eq!(r.r2, 0.609520, epsilon = 1e-6);
        assert_abs_diff_eq!(r.r3, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn density_examples() {
        let rho = mid_qubit_density(&angles(0.0, 0.3), &MidParams::new(1.0, 0.1, 7.0).unwrap());
        assert_eq!(rho.matrix()[(0, 0)].re, 1.0);
        assert_eq!(rho.matrix()[(0, 1)].norm(), 0.0);
        let a = angles(1.0, 2.0);
        let rho = mid_qubit_density(&a, &MidParams::new(1.0, 1.0, 11.0).unwrap());
        assert!(rho.matrix()[(0, 1)].norm() < 1e-12);
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5f64.cos().powi(2), epsilon = 1e-15);
    }

    #[test]
    fn density_matches_bloch_form() {
        let mut k = 0.0f64;
        for i in 0..100 {
            k += 0.731;
            let a = angles((k * 1.3) % PI, (k * 2.9) % (2.0 * PI));
            let p = MidParams::new(0.2 + (i as f64 * 0.37) % 3.0, (k * 0.11) % 0.5, (k * 0.7) % 6.0).unwrap();
            let from_bloch = bloch_to_density(&mid_qubit_bloch(&a, &p)).unwrap();
            let direct = mid_qubit_density(&a, &p);
            for (x, y) in from_bloch.matrix().iter().zip(direct.matrix().iter()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qfi_values() {
        let p = MidParams::new(1.0, 0.05, 1.0).unwrap();
        assert_eq!(mid_qubit_qfi(0.0, &p).value(), 0.0);
        assert_eq!(mid_qubit_qfi(PI, &p).value(), 0.0);
        let q = mid_qubit_qfi(FRAC_PI_2, &p).value();
        assert_relative_eq!(q, 16.0 / (0.4f64.exp() - 1.0), max_relative = 1e-14);
        assert_abs_diff_eq!(q, 32.5319, epsilon = 1e-4);
        let a = angles(FRAC_PI_2, 0.0);
        let via_bloch = qfi_bloch(&mid_qubit_bloch(&a, &p), &mid_qubit_bloch_derivative(&a, &p)).unwrap();
        assert_relative_eq!(q, via_bloch, max_relative = 1e-12);
    }

    #[test]
    fn qfi_zero_mu_limit_flagged() {
        let p = MidParams::new(2.0, 0.0, 3.0).unwrap();
        let q = mid_qubit_qfi(FRAC_PI_2, &p);
        assert!(q.is_limit());
        assert_eq!(q, MidQubitQfi::ZeroMuLimit { mu_times_q: 24.0 });
        // the flagged coefficient is the small-mu behaviour of mu Q
        let tiny = MidParams::new(2.0, 1e-9, 3.0).unwrap();
        assert_relative_eq!(
            1e-9 * mid_qubit_qfi(FRAC_PI_2, &tiny).value(),
            24.0,
            max_relative = 1e-6
        );
    }

    #[test]
    fn qsnr_values() {
        assert_abs_diff_eq!(mid_qubit_qsnr(0.199, FRAC_PI_2), 0.162, epsilon = 1e-3);
        assert_eq!(mid_qubit_qsnr(0.0, 1.0), 0.0);
        assert_relative_eq!(
            mid_qubit_qsnr(0.199, FRAC_PI_4),
            0.5 * mid_qubit_qsnr(0.199, FRAC_PI_2),
            max_relative = 1e-14
        );
        assert_abs_diff_eq!(mid_qubit_qsnr(0.199, FRAC_PI_4), 0.081, epsilon = 1e-3);
    }

    #[test]
    fn qsnr_scaling_invariance() {
        let x = 0.37;
        let base = mid_qubit_qsnr(x, 1.2);
        let mut omega = 0.3;
        for i in 0..20 {
            omega *= 1.31;
            let t = 0.5 + i as f64 * 0.9;
            let mu = x / (omega * omega * t);
            let p = MidParams::new(omega, mu, t).unwrap();
            let r = mu * mu * mid_qubit_qfi(1.2, &p).value();
            assert!((r - base).abs() < 1e-10, "spread {}", (r - base).abs());
        }
    }

    #[test]
    fn spin_measurement_examples() {
        let p = MidParams::new(1.0, 0.2, 2.3).unwrap();
        let state = angles(1.0, 0.5);
        let m = mid_spin_probabilities(&state, &angles(0.0, 0.0), &p).unwrap();
        assert_abs_diff_eq!(m.outcomes()[0].p, 0.5f64.cos().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(m.outcomes()[0].dp, 0.0, epsilon = 1e-15);

        let meas = angles(2.0, 1.0);
        let m = mid_spin_probabilities(&state, &meas, &MidParams::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        let born = meas.ket().dotc(&state.ket()).norm_sqr();
        assert_abs_diff_eq!(m.outcomes()[0].p, born, epsilon = 1e-15);

        let y = 0.127;
        let p = MidParams::new(1.0, y, FRAC_PI_2).unwrap();
        let eq = angles(FRAC_PI_2, 0.0);
        let f = fisher_information(&mid_spin_probabilities(&eq, &eq, &p).unwrap());
        assert_relative_eq!(f / mid_qubit_qfi(FRAC_PI_2, &p).value(), 1.0, max_relative = 1e-6);
    }

    #[test]
    fn fid_ratio_examples() {
        for y in [0.01, 0.127, 1.5] {
            assert_relative_eq!(
                mid_fid_ratio(FRAC_PI_2, y, FRAC_PI_2).unwrap(),
                1.0,
                max_relative = 1e-12
            );
        }
        assert_abs_diff_eq!(mid_fid_ratio(FRAC_PI_4, 0.3, FRAC_PI_2).unwrap(), 0.0, epsilon = 1e-15);
        assert!(mid_fid_ratio(1.0, 0.0, FRAC_PI_2).is_err());
    }

    #[test]
    fn fid_ratio_matches_generic_fisher() {
        for (x2, y, theta, phi) in [(1.0, 0.1, FRAC_PI_2, 0.0), (0.7, 0.05, 1.1, 0.6), (2.3, 0.4, 0.3, 5.0)] {
            let ratio = mid_fid_ratio(x2, y, theta).unwrap();
            assert!(ratio > 0.0 && ratio < 1.0 + 1e-9);
            let p = MidParams::new(1.0, y, x2).unwrap();
            let m = mid_spin_probabilities(&angles(theta, phi), &angles(FRAC_PI_2, phi), &p).unwrap();
            let generic = fisher_information(&m) / mid_qubit_qfi(theta, &p).value();
            assert_relative_eq!(ratio, generic, max_relative = 1e-8);
        }
    }

    #[test]
    fn fock_density_examples() {
        let vac = mid_fock_density(&CoherentSpec::real(0.0), &MidParams::new(1.0, 0.3, 2.0).unwrap(), 5).unwrap();
        assert_eq!(vac.entries()[(0, 0)].re, 1.0);
        assert_eq!(vac.purity(), 1.0);

        let alpha = CoherentSpec::real(1.0);
        let pure = mid_fock_density(&alpha, &MidParams::new(1.0, 0.0, 0.0).unwrap(), 20).unwrap();
        assert_abs_diff_eq!(pure.purity(), 1.0, epsilon = 1e-14);

        let rho = mid_fock_density(&alpha, &MidParams::new(1.0, 0.1, 1.0).unwrap(), 20).unwrap();
        assert_abs_diff_eq!(rho.entries()[(0, 1)].norm(), (-1.1f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(rho.entries()[(0, 1)].norm(), 0.33287, epsilon = 1e-5);
        assert!(!rho.truncation_warning());
        assert!(
            mid_fock_density(&CoherentSpec::real(3.0), &MidParams::new(1.0, 0.1, 1.0).unwrap(), 4)
                .unwrap()
                .truncation_warning()
        );
    }

    #[test]
    fn populations_and_trace_frozen() {
        let alpha = CoherentSpec::new(1.2, -0.4);
        let dim = 24;
        let p0 = mid_fock_density(&alpha, &MidParams::new(1.5, 0.2, 0.0).unwrap(), dim).unwrap();
        for t in [0.3, 1.7, 9.0] {
            let rho = mid_fock_density(&alpha, &MidParams::new(1.5, 0.2, t).unwrap(), dim).unwrap();
            for n in 0..dim {
                assert!((rho.entries()[(n, n)] - p0.entries()[(n, n)]).norm() < 1e-14);
            }
            assert!((rho.entries().trace().re - p0.entries().trace().re).abs() < 1e-12);
        }
    }

    #[test]
    fn fock_derivative_matches_finite_difference() {
        let alpha = CoherentSpec::new(1.0, 0.5);
        let dim = 18;
        let p = MidParams::new(1.2, 0.15, 1.4).unwrap();
        let d = mid_fock_density_derivative(&alpha, &p, dim).unwrap();
        for n in 0..dim {
            assert_eq!(d[(n, n)].norm(), 0.0);
        }
        let h = 1e-5;
        let plus = mid_fock_density(&alpha, &MidParams { mu: p.mu + h, ..p }, dim).unwrap();
        let minus = mid_fock_density(&alpha, &MidParams { mu: p.mu - h, ..p }, dim).unwrap();
        let fd = (plus.entries() - minus.entries()).unscale(2.0 * h);
        let err = (fd - &d).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        assert!(err < 1e-7, "finite-difference mismatch {err}");

        let zero_t = mid_fock_density_derivative(&alpha, &MidParams { t: 0.0, ..p }, dim).unwrap();
        assert_eq!(zero_t.iter().fold(0.0f64, |a, z| a.max(z.norm())), 0.0);
    }

    #[test]
    fn osc_qsnr_vacuum_and_fixture() {
        for c in [0.05, 0.3, 1.0] {
            assert_eq!(mid_osc_qsnr(&CoherentSpec::real(0.0), c, 4).unwrap().r, 0.0);
        }
        let alpha = CoherentSpec::real(1.0);
        let dim = truncation_dimension(&alpha, 1e-12).unwrap();
        let r = mid_osc_qsnr(&alpha, 0.3, dim).unwrap();
        // independent numpy eigh evaluation of the pair sum
        assert_abs_diff_eq!(r.r, 0.24372664432419433, epsilon = 1e-9);
    }

    #[test]
    fn osc_qsnr_gauge_invariance() {
        let alpha = CoherentSpec::new(1.5, 0.7);
        let dim = truncation_dimension(&alpha, 1e-12).unwrap();
        let c = 0.4;
        let base = mid_osc_qsnr(&alpha, c, dim).unwrap().r;
        for (omega, t) in [(0.5, 3.0), (2.0, 0.25), (3.3, 1.9)] {
            let p = MidParams::new(omega, c / (omega * omega * t), t).unwrap();
            let r = mid_osc_qsnr_at(&alpha, &p, dim).unwrap().r;
            assert!((r - base).abs() < 1e-8);
        }
    }
}
