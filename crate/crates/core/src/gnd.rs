//! Gisin nonlinear dissipation, `drho/dt = -i[H, rho] - gamma [[H, rho], rho]`,
//! for the qubit `H = omega sigma_3` and the oscillator `H = omega a^dagger a`.
//!
//! Pure states stay pure. For the qubit everything is expressed through
//! `l = ln(tan^2(theta/2)) + 4 gamma omega t`, the log-ratio of the two
//! populations, which keeps the formulas finite for any `x = gamma omega t`.

use nalgebra::{DVector, Matrix2};
use serde::Serialize;

use crate::error::{check_nonneg, check_positive, Error, Result};
use crate::estimation::{spin_measurement, ProbabilityModel};
use crate::state::{bloch_matrix, BlochVector, CoherentSpec, ProbeAngles, PureFockState, QubitDensity, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GndParams {
    pub omega: f64,
    pub gamma: f64,
    pub t: f64,
}

impl GndParams {
    pub fn new(omega: f64, gamma: f64, t: f64) -> Result<Self> {
        Ok(Self {
            omega: check_positive("omega", omega)?,
            gamma: check_nonneg("gamma", gamma)?,
            t: check_nonneg("t", t)?,
        })
    }

    /// `x = gamma omega t`.
    pub fn x(&self) -> f64 {
        self.gamma * self.omega * self.t
    }
}

/// Where the evolved qubit sits between the stationary poles.
enum Pole {
    /// theta = 0: excited eigenstate, stationary.
    Excited,
    /// theta = pi: ground state, stationary.
    Ground,
    /// Log population ratio `ln(rho_11 / rho_00)`.
    Mixed(f64),
}

fn pole(theta: f64, x: f64) -> Pole {
    let half = 0.5 * theta;
    if theta == 0.0 {
        Pole::Excited
    } else if theta == std::f64::consts::PI {
        Pole::Ground
    } else {
        Pole::Mixed(2.0 * half.tan().ln() + 4.0 * x)
    }
}

pub fn gnd_qubit_bloch(angles: &ProbeAngles, p: &GndParams) -> BlochVector {
    let (r_perp, r3) = match pole(angles.theta, p.x()) {
        Pole::Excited => (0.0, 1.0),
        Pole::Ground => (0.0, -1.0),
        Pole::Mixed(l) => (1.0 / (0.5 * l).cosh(), -(0.5 * l).tanh()),
    };
    let phase = angles.phi + 2.0 * p.omega * p.t;
    BlochVector {
        r1: r_perp * phase.cos(),
        r2: r_perp * phase.sin(),
        r3,
    }
}

/// `d r / d gamma`.
pub fn gnd_qubit_bloch_derivative(angles: &ProbeAngles, p: &GndParams) -> [f64; 3] {
    match pole(angles.theta, p.x()) {
        Pole::Excited | Pole::Ground => [0.0; 3],
        Pole::Mixed(l) => {
            // dl/dgamma = 4 omega t
            let dl = 4.0 * p.omega * p.t;
            let sech = 1.0 / (0.5 * l).cosh();
            let th = (0.5 * l).tanh();
            let d_perp = -0.5 * dl * sech * th;
            let d3 = -0.5 * dl * sech * sech;
            let phase = angles.phi + 2.0 * p.omega * p.t;
            [d_perp * phase.cos(), d_perp * phase.sin(), d3]
        }
    }
}

/// `rho_00 = [1 + e^{4 gamma omega t} tan^2(theta/2)]^{-1}`, off-diagonal
/// `eta_g D^{-1} sin(theta) e^{-i phi}`.
pub fn gnd_qubit_density(angles: &ProbeAngles, p: &GndParams) -> QubitDensity {
    let m = bloch_matrix(&gnd_qubit_bloch(angles, p).as_array(), 1.0);
    QubitDensity::from_matrix(m).expect("closed-form GND qubit state is a valid density matrix")
}

/// `d rho / d gamma`.
pub fn gnd_qubit_density_derivative(angles: &ProbeAngles, p: &GndParams) -> Matrix2<C64> {
    bloch_matrix(&gnd_qubit_bloch_derivative(angles, p), 0.0)
}

/// `Q = 16 omega^2 t^2 e^{4x} sin^2 theta / D^2`, written as
/// `4 omega^2 t^2 / cosh^2(l/2)`.
pub fn gnd_qubit_qfi(theta: f64, p: &GndParams) -> f64 {
    match pole(theta, p.x()) {
        Pole::Excited | Pole::Ground => 0.0,
        Pole::Mixed(l) => {
            let wt = p.omega * p.t;
            4.0 * wt * wt / (0.5 * l).cosh().powi(2)
        }
    }
}

/// `R(x, theta) = gamma^2 Q = 16 x^2 e^{4x} sin^2 theta / D^2`.
pub fn gnd_qubit_qsnr(x: f64, theta: f64) -> f64 {
    match pole(theta, x) {
        Pole::Excited | Pole::Ground => 0.0,
        Pole::Mixed(l) => 4.0 * x * x / (0.5 * l).cosh().powi(2),
    }
}

/// Probe angle maximising `R(x, theta)`: `cos theta_m = tanh(2x)`, i.e.
/// `theta_m = 2 atan(e^{-2x})`, where `R = 4 x^2`.
pub fn gnd_theta_opt(x: f64) -> Result<f64> {
    let x = check_nonneg("x", x)?;
    Ok(2.0 * (-2.0 * x).exp().atan())
}

/// Spin measurement `|theta_m phi_m>` on the evolved GND qubit.
pub fn gnd_spin_probabilities(state: &ProbeAngles, meas: &ProbeAngles, p: &GndParams) -> Result<ProbabilityModel> {
    let rho = gnd_qubit_density(state, p);
    let drho = gnd_qubit_density_derivative(state, p);
    spin_measurement(rho.matrix(), &drho, meas)
}

/// Unnormalised weights `e^{-gamma omega n t}` shifted so the first occupied
/// level carries weight 1.
fn damped(initial: &PureFockState, p: &GndParams) -> DVector<C64> {
    let c = initial.amplitudes();
    let first = c.iter().position(|z| z.norm_sqr() > 0.0).unwrap_or(0) as f64;
    let x = p.x();
    DVector::from_fn(c.len(), |n, _| {
        let nf = n as f64;
        if c[n].norm_sqr() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        c[n] * C64::from_polar((-x * (nf - first)).exp(), -p.omega * nf * p.t)
    })
}

/// `C_n(t) = e^{-(i + gamma) omega n t} C_n(0) / sqrt(sum_m |C_m(0)|^2 e^{-2 gamma omega m t})`.
pub fn gnd_fock_state(initial: &PureFockState, p: &GndParams) -> Result<PureFockState> {
    let mut v = damped(initial, p);
    let norm = v.norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidState("evolved state has zero norm".into()));
    }
    v.unscale_mut(norm);
    PureFockState::with_truncation(v, initial.truncation_error())
}

/// `d C_n(t) / d gamma = omega t (<n>_t - n) C_n(t)`.
pub fn gnd_fock_state_derivative(initial: &PureFockState, p: &GndParams) -> Result<DVector<C64>> {
    let psi = gnd_fock_state(initial, p)?;
    let mean = psi.mean_number();
    let wt = p.omega * p.t;
    Ok(DVector::from_fn(psi.dim(), |n, _| {
        psi.amplitudes()[n] * (wt * (mean - n as f64))
    }))
}

/// `Q = 4 omega^2 t^2 |alpha|^2 e^{-2 gamma omega t}`.
pub fn gnd_osc_qfi(alpha: &CoherentSpec, p: &GndParams) -> f64 {
    let wt = p.omega * p.t;
    4.0 * wt * wt * alpha.mean_number() * (-2.0 * p.x()).exp()
}

/// `R = 4 x^2 |alpha|^2 e^{-2x}`, maximal at `x = 1` where it equals `4 |alpha|^2 e^{-2}`.
pub fn gnd_osc_qsnr(alpha: &CoherentSpec, x: f64) -> f64 {
    4.0 * x * x * alpha.mean_number() * (-2.0 * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{fisher_information, qfi_bloch, qfi_pure};
    use crate::state::{coherent_amplitudes, density_to_bloch, truncation_dimension};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn angles(theta: f64, phi: f64) -> ProbeAngles {
        ProbeAngles::new(theta, phi).unwrap()
    }

    #[test]
    fn unitary_limit() {
        let a = angles(1.2, 0.3);
        for t in [0.0, 0.7, 3.1] {
            let r = gnd_qubit_bloch(&a, &GndParams::new(1.4, 0.0, t).unwrap());
            assert_abs_diff_eq!(r.r3, 1.2f64.cos(), epsilon = 1e-14);
            let phase = 0.3 + 2.0 * 1.4 * t;
            assert_abs_diff_eq!(r.r1, 1.2f64.sin() * phase.cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn relaxes_to_ground() {
        for theta in [0.2, FRAC_PI_2, 3.0, PI] {
            let r = gnd_qubit_bloch(&angles(theta, 1.0), &GndParams::new(1.0, 1.0, 12.0).unwrap());
            assert!((r.r3 + 1.0).abs() < 1e-8 && r.r1.abs() < 1e-4);
        }
    }

    #[test]
    fn matches_printed_solution() {
        // r3 = -1 + 2(1 + cos theta)/D, D = 1 - e^{4x}(cos theta - 1) + cos theta
        for (theta, x) in [(FRAC_PI_2, 0.25), (0.4, 0.8), (2.5, 0.1)] {
            let p = GndParams::new(1.0, x, 1.0).unwrap();
            let r = gnd_qubit_bloch(&angles(theta, 0.7), &p);
            let ct = f64::cos(theta);
            let d = 1.0 - (4.0 * x).exp() * (ct - 1.0) + ct;
            assert_relative_eq!(r.r3, -1.0 + 2.0 * (1.0 + ct) / d, max_relative = 1e-13);
            let r1 = 2.0 / d * (2.0 * x).exp() * (0.7f64 + 2.0).cos() * theta.sin();
            assert_relative_eq!(r.r1, r1, max_relative = 1e-12);
            assert!((r.norm() - 1.0).abs() < 1e-9);
        }
        let r = gnd_qubit_bloch(&angles(FRAC_PI_2, 0.0), &GndParams::new(1.0, 0.25, 1.0).unwrap());
        assert_abs_diff_eq!(r.r3, -1.0 + 2.0 / (1.0 + 1f64.exp()), epsilon = 1e-15);
        assert_abs_diff_eq!(r.r3, -0.46212, epsilon = 1e-5);
    }

    #[test]
    fn density_examples() {
        let p = GndParams::new(1.0, 0.3, 4.0).unwrap();
        let rho = gnd_qubit_density(&angles(0.0, 0.0), &p);
        assert_eq!(rho.matrix()[(0, 0)].re, 1.0);
        let rho = gnd_qubit_density(&angles(PI, 0.0), &p);
        assert_eq!(rho.matrix()[(1, 1)].re, 1.0);
        let rho = gnd_qubit_density(&angles(FRAC_PI_2, 0.0), &GndParams::new(1.0, 1.0, 1.0).unwrap());
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 1.0 / (1.0 + 4f64.exp()), epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.017986, epsilon = 1e-6);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn density_matches_printed_matrix() {
        let (theta, phi) = (1.1, 0.4);
        let p = GndParams::new(1.3, 0.2, 0.9).unwrap();
        let rho = gnd_qubit_density(&angles(theta, phi), &p);
        let e4x = (4.0 * p.x()).exp();
        let rho00 = 1.0 / (1.0 + e4x * (0.5 * theta).tan().powi(2));
        let d = 1.0 - e4x * (theta.cos() - 1.0) + theta.cos();
        let eta = C64::from_polar((2.0 * p.x()).exp(), -2.0 * p.omega * p.t);
        let off = eta / d * theta.sin() * C64::from_polar(1.0, -phi);
        assert!((rho.matrix()[(0, 0)].re - rho00).abs() < 1e-12);
        assert!((rho.matrix()[(0, 1)] - off).norm() < 1e-12);
        let r = density_to_bloch(&rho);
        assert!((r.r3 - gnd_qubit_bloch(&angles(theta, phi), &p).r3).abs() < 1e-12);
    }

    #[test]
    fn bloch_derivative_matches_finite_difference() {
        for (theta, phi, gamma) in [(0.9, 0.2, 0.3), (2.2, 4.0, 0.0), (1.5, 1.0, 1.7)] {
            let a = angles(theta, phi);
            let p = GndParams::new(1.1, gamma, 1.3).unwrap();
            let d = gnd_qubit_bloch_derivative(&a, &p);
            let h = 1e-6 * gamma.max(1.0);
            let plus = gnd_qubit_bloch(&a, &GndParams { gamma: gamma + h, ..p }).as_array();
            let minus = gnd_qubit_bloch(&a, &GndParams { gamma: gamma - h, ..p }).as_array();
            for k in 0..3 {
                assert!((d[k] - (plus[k] - minus[k]) / (2.0 * h)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn qfi_examples() {
        let p = GndParams::new(1.0, 0.25, 1.0).unwrap();
        assert_eq!(gnd_qubit_qfi(0.0, &p), 0.0);
        let q = gnd_qubit_qfi(FRAC_PI_2, &p);
        let e = 1f64.exp();
        assert_relative_eq!(q, 16.0 * e / (1.0 + e).powi(2), max_relative = 1e-14);
        assert_abs_diff_eq!(q, 3.1458, epsilon = 1e-4);
        let a = angles(FRAC_PI_2, 0.3);
        let via_bloch = qfi_bloch(&gnd_qubit_bloch(&a, &p), &gnd_qubit_bloch_derivative(&a, &p)).unwrap();
        assert_relative_eq!(q, via_bloch, max_relative = 1e-12);
    }

    #[test]
    fn printed_qfi_formula_agrees() {
        for (theta, x) in [(0.3, 0.1), (1.0, 0.6), (2.8, 1.5)] {
            let p = GndParams::new(2.0, x / 2.0, 1.0).unwrap();
            let ct = f64::cos(theta);
            let d = 1.0 - (4.0 * x).exp() * (ct - 1.0) + ct;
            let printed = 16.0 * 4.0 * (4.0 * x).exp() * theta.sin().powi(2) / (d * d);
            assert_relative_eq!(gnd_qubit_qfi(theta, &p), printed, max_relative = 1e-12);
        }
    }

    #[test]
    fn theta_opt_values() {
        assert_relative_eq!(gnd_theta_opt(0.0).unwrap(), FRAC_PI_2, max_relative = 1e-15);
        assert_relative_eq!(gnd_theta_opt(1e-9).unwrap(), FRAC_PI_2, max_relative = 1e-8);
        let t1 = gnd_theta_opt(1.0).unwrap();
        assert_relative_eq!(t1, (2f64).tanh().acos(), max_relative = 1e-12);
        assert_abs_diff_eq!(t1, 0.269036, epsilon = 1e-6);
        let t5 = gnd_theta_opt(5.0).unwrap();
        assert_relative_eq!(t5, 2.0 * (-10f64).exp(), max_relative = 1e-8);
        assert_relative_eq!(gnd_qubit_qsnr(5.0, t5), 100.0, max_relative = 1e-10);
    }

    #[test]
    fn theta_opt_is_scan_maximum() {
        for x in [0.05, 0.5, 2.0] {
            let tm = gnd_theta_opt(x).unwrap();
            let best = gnd_qubit_qsnr(x, tm);
            for k in 0..=2000 {
                let th = PI * k as f64 / 2000.0;
                assert!(gnd_qubit_qsnr(x, th) <= best * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn spin_measurement_properties() {
        let p = GndParams::new(1.0, 0.4, 2.0).unwrap();
        let m = gnd_spin_probabilities(&angles(0.0, 0.0), &angles(0.0, 0.0), &p).unwrap();
        assert_eq!(m.outcomes()[0].dp, 0.0);

        let gamma = 0.05;
        let k = 40.0;
        let t = k * FRAC_PI_2;
        let p = GndParams::new(1.0, gamma, t).unwrap();
        let tm = gnd_theta_opt(p.x()).unwrap();
        for mt in [FRAC_PI_4, 1.0, 2.0] {
            let f = fisher_information(&gnd_spin_probabilities(&angles(tm, 0.0), &angles(mt, 0.0), &p).unwrap());
            assert_relative_eq!(f / gnd_qubit_qfi(tm, &p), 1.0, max_relative = 1e-6);
        }
    }

    #[test]
    fn fock_state_examples() {
        let alpha = CoherentSpec::new(1.1, 0.4);
        let dim = truncation_dimension(&alpha, 1e-14).unwrap();
        let psi0 = coherent_amplitudes(&alpha, dim).unwrap();
        let psi = gnd_fock_state(&psi0, &GndParams::new(1.0, 0.0, 2.0).unwrap()).unwrap();
        for n in 0..dim {
            assert_abs_diff_eq!(psi.amplitudes()[n].norm(), psi0.amplitudes()[n].norm(), epsilon = 1e-15);
        }

        let p = GndParams::new(1.3, 0.2, 1.5).unwrap();
        let psi = gnd_fock_state(&psi0, &p).unwrap();
        let beta = CoherentSpec {
            alpha: alpha.alpha * C64::new(-p.x(), -p.omega * p.t).exp(),
        };
        let target = coherent_amplitudes(&beta, dim).unwrap();
        assert_abs_diff_eq!(psi.fidelity(&target).unwrap(), 1.0, epsilon = 1e-8);

        let fock = PureFockState::number_state(3, 6).unwrap();
        let evolved = gnd_fock_state(&fock, &p).unwrap();
        assert_abs_diff_eq!(evolved.amplitudes()[3].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fock_state_survives_long_times() {
        let psi0 = PureFockState::number_state(2, 4).unwrap();
        let mixed = PureFockState::new(DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.8),
            C64::new(0.0, 0.0),
        ]))
        .unwrap();
        let p = GndParams::new(1.0, 50.0, 30.0).unwrap();
        assert!(gnd_fock_state(&psi0, &p).is_ok());
        let late = gnd_fock_state(&mixed, &p).unwrap();
        assert_abs_diff_eq!(late.amplitudes()[1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn osc_qfi_forms_agree() {
        let alpha = CoherentSpec::real(1.0);
        let p = GndParams::new(1.0, 0.1, 1.0).unwrap();
        let dim = truncation_dimension(&alpha, 1e-14).unwrap();
        let psi0 = coherent_amplitudes(&alpha, dim).unwrap();
        let psi = gnd_fock_state(&psi0, &p).unwrap();
        let dpsi = gnd_fock_state_derivative(&psi0, &p).unwrap();
        let closed = gnd_osc_qfi(&alpha, &p);
        assert_relative_eq!(closed, 4.0 * (-0.2f64).exp(), max_relative = 1e-14);
        assert_abs_diff_eq!(closed, 3.2749, epsilon = 1e-4);
        assert_relative_eq!(qfi_pure(&psi, &dpsi).unwrap(), closed, max_relative = 1e-8);
        let var_form = 4.0 * p.t * p.t * p.omega * p.omega * psi.number_variance();
        assert_relative_eq!(var_form, closed, max_relative = 1e-8);

        assert_eq!(gnd_osc_qfi(&CoherentSpec::real(0.0), &p), 0.0);
        assert_relative_eq!(
            gnd_osc_qfi(&alpha, &GndParams::new(1.0, 0.0, 1.0).unwrap()),
            4.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn fock_derivative_matches_finite_difference() {
        let alpha = CoherentSpec::new(0.8, -0.6);
        let dim = truncation_dimension(&alpha, 1e-14).unwrap();
        let psi0 = coherent_amplitudes(&alpha, dim).unwrap();
        let p = GndParams::new(1.2, 0.3, 0.8).unwrap();
        let d = gnd_fock_state_derivative(&psi0, &p).unwrap();
        let h = 1e-6;
        let plus = gnd_fock_state(
            &psi0,
            &GndParams {
                gamma: p.gamma + h,
                ..p
            },
        )
        .unwrap();
        let minus = gnd_fock_state(
            &psi0,
            &GndParams {
                gamma: p.gamma - h,
                ..p
            },
        )
        .unwrap();
        let fd = (plus.amplitudes() - minus.amplitudes()).unscale(2.0 * h);
        assert!((fd - d).iter().all(|z| z.norm() < 1e-7));
    }

    #[test]
    fn osc_qsnr_values() {
        let one = CoherentSpec::real(1.0);
        assert_eq!(gnd_osc_qsnr(&one, 0.0), 0.0);
        assert_relative_eq!(gnd_osc_qsnr(&one, 1.0), 4.0 * (-2f64).exp(), max_relative = 1e-15);
        assert_abs_diff_eq!(gnd_osc_qsnr(&one, 1.0), 0.54134, epsilon = 1e-5);
        assert_abs_diff_eq!(gnd_osc_qsnr(&CoherentSpec::real(10.0), 1.0), 54.134, epsilon = 1e-3);
    }
}
