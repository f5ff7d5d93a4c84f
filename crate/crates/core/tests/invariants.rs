//! Property checks across modules through the public API.

use std::f64::consts::{PI, TAU};

use idm_core::estimation::{fisher_information, qfi_bloch, qfi_mixed, qfi_pure, sld, EstimationReport};
use idm_core::gnd::{
    gnd_fock_state, gnd_fock_state_derivative, gnd_qubit_bloch, gnd_qubit_bloch_derivative, gnd_qubit_density,
    gnd_qubit_density_derivative, gnd_spin_probabilities, GndParams,
};
use idm_core::mid::{
    mid_fock_density, mid_fock_density_derivative, mid_qubit_bloch, mid_qubit_bloch_derivative, mid_qubit_density,
    mid_qubit_density_derivative, mid_spin_probabilities, MidParams,
};
use idm_core::state::{coherent_amplitudes, CoherentSpec, FockDensity, ProbeAngles, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn step(lambda: f64) -> f64 {
    1e-5 * lambda.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn qubit_qfi_routes_agree(theta in 0.05..3.09f64, phi in 0.0..TAU, w in 0.3..3.0f64, lam in 0.01..0.5f64, t in 0.05..4.0f64) {
        let a = ProbeAngles::new(theta, phi).unwrap();
        let pm = MidParams::new(w, lam, t).unwrap();
        let bloch = qfi_bloch(&mid_qubit_bloch(&a, &pm), &mid_qubit_bloch_derivative(&a, &pm)).unwrap();
        let rho = mid_qubit_density(&a, &pm).to_dense();
        let drho = DMatrix::from_column_slice(2, 2, mid_qubit_density_derivative(&a, &pm).as_slice());
        let mixed = qfi_mixed(&rho, &drho).unwrap();
        prop_assert!((bloch - mixed).abs() <= 1e-8 * bloch.max(1.0));

        let l = sld(&rho, &drho).unwrap();
        let tr = (rho.entries() * &l * &l).trace().re;
        prop_assert!((tr - mixed).abs() <= 1e-8 * mixed.max(1.0));

        let pg = GndParams::new(w, lam, t).unwrap();
        let bloch = qfi_bloch(&gnd_qubit_bloch(&a, &pg), &gnd_qubit_bloch_derivative(&a, &pg)).unwrap();
        let rho = gnd_qubit_density(&a, &pg);
        prop_assert!(rho.purity() > 1.0 - 1e-10);
        let drho = DMatrix::from_column_slice(2, 2, gnd_qubit_density_derivative(&a, &pg).as_slice());
        let mixed = qfi_mixed(&rho.to_dense(), &drho).unwrap();
        prop_assert!((bloch - mixed).abs() <= 1e-6 * bloch.max(1.0));
    }

    #[test]
    fn spin_fi_bounded_by_qfi(theta in 0.0..PI, phi in 0.0..TAU, mt in 0.0..PI, mp in 0.0..TAU,
                              w in 0.3..3.0f64, lam in 0.01..0.5f64, t in 0.0..4.0f64) {
        let a = ProbeAngles::new(theta, phi).unwrap();
        let m = ProbeAngles::new(mt, mp).unwrap();
        let pm = MidParams::new(w, lam, t).unwrap();
        let f = fisher_information(&mid_spin_probabilities(&a, &m, &pm).unwrap());
        let q = qfi_bloch(&mid_qubit_bloch(&a, &pm), &mid_qubit_bloch_derivative(&a, &pm)).unwrap();
        prop_assert!(EstimationReport::new(lam, q, Some(f), 1).respects_quantum_bound());
        let pg = GndParams::new(w, lam, t).unwrap();
        let f = fisher_information(&gnd_spin_probabilities(&a, &m, &pg).unwrap());
        let q = qfi_bloch(&gnd_qubit_bloch(&a, &pg), &gnd_qubit_bloch_derivative(&a, &pg)).unwrap();
        prop_assert!(EstimationReport::new(lam, q, Some(f), 1).respects_quantum_bound());
    }

    #[test]
    fn qubit_derivatives_match_finite_differences(theta in 0.05..3.09f64, phi in 0.0..TAU, w in 0.3..3.0f64,
                                                   lam in 0.01..0.5f64, t in 0.0..4.0f64) {
        let a = ProbeAngles::new(theta, phi).unwrap();
        let h = step(lam);
        let fd = |f: &dyn Fn(f64) -> nalgebra::Matrix2<C64>| (f(lam + h) - f(lam - h)) / C64::new(2.0 * h, 0.0);
        let mid = fd(&|l| *mid_qubit_density(&a, &MidParams { omega: w, mu: l, t }).matrix());
        let d = mid - mid_qubit_density_derivative(&a, &MidParams { omega: w, mu: lam, t });
        prop_assert!(d.iter().all(|z| z.norm() < 1e-6));
        let gnd = fd(&|l| *gnd_qubit_density(&a, &GndParams { omega: w, gamma: l, t }).matrix());
        let d = gnd - gnd_qubit_density_derivative(&a, &GndParams { omega: w, gamma: lam, t });
        prop_assert!(d.iter().all(|z| z.norm() < 1e-6));
    }

    #[test]
    fn fock_derivatives_match_finite_differences(re in -2.0..2.0f64, im in -2.0..2.0f64, lam in 0.01..0.3f64, t in 0.0..2.0f64) {
        let spec = CoherentSpec::new(re, im);
        let dim = 25;
        let h = step(lam);
        let p = |l| MidParams { omega: 1.0, mu: l, t };
        let fd = (mid_fock_density(&spec, &p(lam + h), dim).unwrap().entries()
            - mid_fock_density(&spec, &p(lam - h), dim).unwrap().entries()) / C64::new(2.0 * h, 0.0);
        prop_assert!(max_abs(&(fd - mid_fock_density_derivative(&spec, &p(lam), dim).unwrap())) < 1e-6);

        let psi0 = coherent_amplitudes(&spec, dim).unwrap();
        let g = |l| GndParams { omega: 1.0, gamma: l, t };
        let fd = (gnd_fock_state(&psi0, &g(lam + h)).unwrap().amplitudes()
            - gnd_fock_state(&psi0, &g(lam - h)).unwrap().amplitudes()) / C64::new(2.0 * h, 0.0);
        let an = gnd_fock_state_derivative(&psi0, &g(lam)).unwrap();
        prop_assert!((fd - &an).iter().all(|z| z.norm() < 1e-6));

        let psi = gnd_fock_state(&psi0, &g(lam)).unwrap();
        let pure = qfi_pure(&psi, &an).unwrap();
        let rho: FockDensity = psi.projector();
        let drho = an.clone() * psi.amplitudes().adjoint() + psi.amplitudes() * an.adjoint();
        let mixed = qfi_mixed(&rho, &drho).unwrap();
        prop_assert!((pure - mixed).abs() <= 1e-8 * pure.max(1.0));
    }

    #[test]
    fn unitary_invariance(theta in 0.1..3.0f64, lam in 0.01..0.5f64, t in 0.1..3.0f64, u_angle in 0.0..TAU) {
        let a = ProbeAngles::new(theta, 0.4).unwrap();
        let p = MidParams::new(1.0, lam, t).unwrap();
        let rho = mid_qubit_density(&a, &p).to_dense();
        let drho = DMatrix::from_column_slice(2, 2, mid_qubit_density_derivative(&a, &p).as_slice());
        let (s, c) = u_angle.sin_cos();
        let u = DMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), C64::new(0.0, s), C64::new(0.0, s), C64::new(c, 0.0)]);
        let rot = |m: &DMatrix<C64>| &u * m * u.adjoint();
        let base = qfi_mixed(&rho, &drho).unwrap();
        let rotated = qfi_mixed(&FockDensity::new(rot(rho.entries()), 0.0).unwrap(), &rot(&drho)).unwrap();
        prop_assert!((base - rotated).abs() <= 1e-8 * base.max(1.0));
    }
}
