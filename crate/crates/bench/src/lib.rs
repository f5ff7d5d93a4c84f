//! Shared fixtures for the criterion benches.

use idm_core::gnd::{gnd_fock_state, gnd_fock_state_derivative};
use idm_core::mid::{mid_fock_density, mid_fock_density_derivative, MidParams};
use idm_core::state::{coherent_amplitudes, truncation_dimension, CoherentSpec, FockDensity, PureFockState, C64};
use idm_core::GndParams;
use nalgebra::{DMatrix, DVector};

pub const TRUNCATION_EPS: f64 = 1e-12;

/// Dephased coherent state and its `mu`-derivative in the `c` gauge.
pub struct MidOscFixture {
    pub rho: FockDensity,
    pub drho: DMatrix<C64>,
}

pub fn mid_osc(alpha: f64, c: f64) -> MidOscFixture {
    let spec = CoherentSpec::real(alpha);
    let dim = truncation_dimension(&spec, TRUNCATION_EPS).expect("dimension");
    let p = MidParams::new(1.0, c, 1.0).expect("params");
    MidOscFixture {
        rho: mid_fock_density(&spec, &p, dim).expect("density"),
        drho: mid_fock_density_derivative(&spec, &p, dim).expect("derivative"),
    }
}

/// Damped coherent state and its `gamma`-derivative at `x = gamma omega t`.
pub struct GndOscFixture {
    pub psi: PureFockState,
    pub dpsi: DVector<C64>,
}

pub fn gnd_osc(alpha: f64, x: f64) -> GndOscFixture {
    let spec = CoherentSpec::real(alpha);
    let dim = truncation_dimension(&spec, TRUNCATION_EPS).expect("dimension");
    let psi0 = coherent_amplitudes(&spec, dim).expect("coherent state");
    let p = GndParams::new(1.0, 0.1, x / 0.1).expect("params");
    GndOscFixture {
        psi: gnd_fock_state(&psi0, &p).expect("state"),
        dpsi: gnd_fock_state_derivative(&psi0, &p).expect("derivative"),
    }
}

/// `H = omega n` on `dim` levels.
pub fn number_hamiltonian(dim: usize, omega: f64) -> Vec<f64> {
    (0..dim).map(|n| omega * n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let m = mid_osc(2.0, 0.4);
        assert_eq!(m.rho.dim(), m.drho.nrows());
        let g = gnd_osc(2.0, 1.0);
        assert_eq!(g.psi.dim(), g.dpsi.len());
        assert_eq!(number_hamiltonian(3, 2.0), vec![0.0, 2.0, 4.0]);
    }
}
