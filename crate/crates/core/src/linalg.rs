//! Dense Hermitian eigendecomposition with deterministic ordering and phases.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::state::{hermitian_defect, max_abs, FockDensity, C64};

/// Eigenvalues below zero but above this are treated as round-off.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Descending.
    pub values: DVector<f64>,
    /// Orthonormal columns; the largest-magnitude component of each is real positive.
    pub vectors: DMatrix<C64>,
    /// Number of tiny negative eigenvalues clipped to zero (density spectra only).
    pub clipped: usize,
}

impl HermitianEigen {
    /// `max |m - V diag(values) V^dagger|`.
    pub fn residual(&self, m: &DMatrix<C64>) -> f64 {
        let lambda = DMatrix::from_diagonal(&self.values.map(|v| C64::new(v, 0.0)));
        let rebuilt = &self.vectors * lambda * self.vectors.adjoint();
        max_abs(&(m - rebuilt))
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eigendecomposition(m: &DMatrix<C64>) -> Result<HermitianEigen> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape {
            expected: "square matrix".into(),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let scale = max_abs(m).max(1.0);
    let defect = hermitian_defect(m);
    if !defect.is_finite() || defect > 1e-12 * scale {
        return Err(Error::InvalidState(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    // exact Hermitian part so the solver sees a symmetric input
    let sym = (m + m.adjoint()).unscale(2.0);
    let eig = sym.symmetric_eigen();

    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let mut pivot = 0;
        let mut best = -1.0;
        for (i, z) in v.iter().enumerate() {
            // ties resolved towards the lowest index
            if z.norm() > best + 1e-14 {
                best = z.norm();
                pivot = i;
            }
        }
        let phase = if best > 0.0 {
            v[pivot].conj() / v[pivot].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        vectors.set_column(col, &(v * phase));
    }
    Ok(HermitianEigen {
        values,
        vectors,
        clipped: 0,
    })
}

/// Spectrum of a density matrix; eigenvalues in `(-POSITIVITY_TOL, 0)` are
/// clipped to zero and counted, anything more negative is an invalid state.
pub fn density_spectrum(rho: &FockDensity) -> Result<HermitianEigen> {
    let mut eig = hermitian_eigendecomposition(rho.entries())?;
    let min = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -POSITIVITY_TOL {
        return Err(Error::InvalidState(format!(
            "density matrix has eigenvalue {min:e} below -{POSITIVITY_TOL:e}"
        )));
    }
    for v in eig.values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
            eig.clipped += 1;
        }
    }
    Ok(eig)
}
