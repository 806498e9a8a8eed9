use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::DenseOperator;
use crate::error::{Error, Result};

/// Tolerance on `H - H†` accepted by the propagator.
pub const PROPAGATOR_HERMITIAN_TOL: f64 = 1e-10;

/// `H = V diag(e) V†` for a Hermitian `H`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<Complex64>,
    sites: usize,
}

impl SpectralDecomposition {
    pub fn new(h: &DenseOperator) -> Result<Self> {
        let deviation = h.hermiticity_deviation();
        if deviation > PROPAGATOR_HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let sym = (h.matrix() + h.matrix().adjoint()) * Complex64::new(0.5, 0.0);
        let eig = sym.symmetric_eigen();
        Ok(SpectralDecomposition {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            sites: h.sites(),
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn reconstruct(&self) -> DenseOperator {
        let v = &self.eigenvectors;
        let d = DMatrix::from_diagonal(&self.eigenvalues.map(|e| Complex64::new(e, 0.0)));
        DenseOperator::from_matrix(self.sites, v * d * v.adjoint()).expect("dimension preserved")
    }

    /// `‖V diag(e) V† − H‖_max`.
    pub fn reconstruction_error(&self, h: &DenseOperator) -> f64 {
        self.reconstruct().max_abs_diff(h)
    }

    /// `‖V†V − I‖_max`.
    pub fn orthonormality_error(&self) -> f64 {
        let v = &self.eigenvectors;
        let g = v.adjoint() * v;
        let n = g.nrows();
        let mut err: f64 = 0.0;
        for c in 0..n {
            for r in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                err = err.max((g[(r, c)] - Complex64::new(target, 0.0)).norm());
            }
        }
        err
    }

    /// `exp(-iHt) = V diag(exp(-i e_j t)) V†`.
    pub fn unitary(&self, t: f64) -> DenseOperator {
        let v = &self.eigenvectors;
        let phases = self.eigenvalues.map(|e| Complex64::new(0.0, -e * t).exp());
        let mut vd = v.clone();
        for (j, mut col) in vd.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        DenseOperator::from_matrix(self.sites, vd * v.adjoint()).expect("dimension preserved")
    }
}

/// Reusable `ρ ↦ e^{-iHt} ρ e^{iHt}` for one Hamiltonian.
///
/// The eigendecomposition is computed once; each time point then costs two
/// matrix products in the eigenbasis.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectral: SpectralDecomposition,
}

impl Propagator {
    pub fn new(h: &DenseOperator) -> Result<Self> {
        Ok(Propagator { spectral: SpectralDecomposition::new(h)? })
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// Moves `op` into the eigenbasis once, for repeated [`at`](EigenbasisOperator::at).
    pub fn prepare(&self, op: &DenseOperator) -> Result<EigenbasisOperator<'_>> {
        if op.sites() != self.spectral.sites {
            return Err(Error::SiteCountMismatch { left: self.spectral.sites, right: op.sites() });
        }
        let v = &self.spectral.eigenvectors;
        Ok(EigenbasisOperator { prop: self, inner: v.adjoint() * op.matrix() * v })
    }

    pub fn evolve(&self, op: &DenseOperator, t: f64) -> Result<DenseOperator> {
        Ok(self.prepare(op)?.at(t))
    }
}

/// An operator expressed as `V† ρ V` in the eigenbasis of a [`Propagator`].
pub struct EigenbasisOperator<'a> {
    prop: &'a Propagator,
    inner: DMatrix<Complex64>,
}

impl EigenbasisOperator<'_> {
    pub fn at(&self, t: f64) -> DenseOperator {
        let sp = &self.prop.spectral;
        let e = &sp.eigenvalues;
        let phases: Vec<Complex64> = e.iter().map(|&x| Complex64::new(0.0, -x * t).exp()).collect();
        let n = self.inner.nrows();
        let w = DMatrix::from_fn(n, n, |j, l| self.inner[(j, l)] * phases[j] * phases[l].conj());
        let v = &sp.eigenvectors;
        DenseOperator::from_matrix(sp.sites, v * w * v.adjoint()).expect("dimension preserved")
    }
}

/// `e^{-iHt} ρ e^{iHt}` via the spectral decomposition of `H`.
pub fn evolve(h: &DenseOperator, rho: &DenseOperator, t: f64) -> Result<DenseOperator> {
    Propagator::new(h)?.evolve(rho, t)
}
