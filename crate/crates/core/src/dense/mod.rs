//! Dense `2^N × 2^N` operators.
//!
//! Site 1 is the most significant Kronecker factor: the computational basis
//! index `b` has site `j` in bit `N - j`. Every dense routine in the crate,
//! and every oracle in the tests, uses this ordering.

mod io;
mod spectral;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::QuantumChannel;
use crate::pauli::SiteSet;

pub use spectral::{evolve, Propagator, SpectralDecomposition};

/// Refuse to allocate dense operators beyond this many sites by default.
pub const DEFAULT_MAX_DENSE_SITES: usize = 12;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const MIN_EIGENVALUE_TOL: f64 = -1e-10;

pub(crate) fn check_dense_sites(sites: usize, limit: usize) -> Result<()> {
    if sites > limit {
        return Err(Error::DenseLimit { sites, limit });
    }
    Ok(())
}

/// Dense bit (from the least significant end) that carries `site`.
#[inline]
pub(crate) fn site_bit(sites: usize, site: usize) -> usize {
    sites - site
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    sites: usize,
    mat: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(sites: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << sites;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix cannot act on {sites} sites",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(DenseOperator { sites, mat })
    }

    pub fn zeros(sites: usize) -> Result<Self> {
        check_dense_sites(sites, DEFAULT_MAX_DENSE_SITES)?;
        let dim = 1usize << sites;
        Ok(DenseOperator { sites, mat: DMatrix::zeros(dim, dim) })
    }

    pub fn identity(sites: usize) -> Result<Self> {
        check_dense_sites(sites, DEFAULT_MAX_DENSE_SITES)?;
        let dim = 1usize << sites;
        Ok(DenseOperator { sites, mat: DMatrix::identity(dim, dim) })
    }

    /// `|ψ⟩⟨ψ|` for an amplitude vector of length `2^N`.
    pub fn pure(sites: usize, amplitudes: &[Complex64]) -> Result<Self> {
        let dim = 1usize << sites;
        if amplitudes.len() != dim {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for {sites} sites",
                amplitudes.len()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        DenseOperator::from_matrix(sites, &v * v.adjoint())
    }

    pub fn qubit(m: Matrix2<Complex64>) -> Self {
        DenseOperator { sites: 1, mat: DMatrix::from_iterator(2, 2, m.iter().copied()) }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator { sites: self.sites, mat: self.mat.adjoint() }
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for c in 0..n {
            for r in c..n {
                dev = dev.max((self.mat[(r, c)] - self.mat[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.sites, other.sites, "site count mismatch");
        self.mat.iter().zip(other.mat.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Checks the density-operator invariants: Hermitian, unit trace, and
    /// positive semidefinite.
    pub fn validate_state(&self) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
        if min < MIN_EIGENVALUE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn kron(&self, other: &DenseOperator) -> Result<DenseOperator> {
        let sites = self.sites + other.sites;
        check_dense_sites(sites, DEFAULT_MAX_DENSE_SITES)?;
        Ok(DenseOperator { sites, mat: self.mat.kronecker(&other.mat) })
    }

    pub fn commutator(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.sites, other.sites, "site count mismatch");
        DenseOperator { sites: self.sites, mat: &self.mat * &other.mat - &other.mat * &self.mat }
    }

    pub fn mul(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.sites, other.sites, "site count mismatch");
        DenseOperator { sites: self.sites, mat: &self.mat * &other.mat }
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.sites, other.sites, "site count mismatch");
        DenseOperator { sites: self.sites, mat: &self.mat + &other.mat }
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.sites, other.sites, "site count mismatch");
        DenseOperator { sites: self.sites, mat: &self.mat - &other.mat }
    }

    pub fn scale(&self, factor: Complex64) -> DenseOperator {
        DenseOperator { sites: self.sites, mat: &self.mat * factor }
    }

    /// Inserts a one-site factor at `site`, shifting later sites up:
    /// the result acts on `N + 1` sites.
    pub fn insert_site(&self, factor: &DenseOperator, site: usize) -> Result<DenseOperator> {
        if factor.sites != 1 {
            return Err(Error::SiteCountMismatch { left: 1, right: factor.sites });
        }
        let sites = self.sites + 1;
        if site == 0 || site > sites {
            return Err(Error::SiteOutOfRange { site, sites });
        }
        check_dense_sites(sites, DEFAULT_MAX_DENSE_SITES)?;
        let bit = site_bit(sites, site);
        let low = (1usize << bit) - 1;
        let squeeze = |i: usize| ((i >> (bit + 1)) << bit) | (i & low);
        let dim = 1usize << sites;
        let mat = DMatrix::from_fn(dim, dim, |r, c| {
            let f = factor.mat[((r >> bit) & 1, (c >> bit) & 1)];
            if f == Complex64::default() {
                return f;
            }
            self.mat[(squeeze(r), squeeze(c))] * f
        });
        Ok(DenseOperator { sites, mat })
    }

    /// Left-multiplies by a single-site operator acting on `site`.
    pub(crate) fn apply_left(&mut self, k: &Matrix2<Complex64>, site: usize) {
        let step = 1usize << site_bit(self.sites, site);
        let dim = self.dim();
        for c in 0..dim {
            for r0 in (0..dim).filter(|r| r & step == 0) {
                let r1 = r0 | step;
                let (a, b) = (self.mat[(r0, c)], self.mat[(r1, c)]);
                self.mat[(r0, c)] = k[(0, 0)] * a + k[(0, 1)] * b;
                self.mat[(r1, c)] = k[(1, 0)] * a + k[(1, 1)] * b;
            }
        }
    }

    /// Right-multiplies by `k†` acting on `site`.
    pub(crate) fn apply_right_adjoint(&mut self, k: &Matrix2<Complex64>, site: usize) {
        let step = 1usize << site_bit(self.sites, site);
        let dim = self.dim();
        for c0 in (0..dim).filter(|c| c & step == 0) {
            let c1 = c0 | step;
            for r in 0..dim {
                let (a, b) = (self.mat[(r, c0)], self.mat[(r, c1)]);
                self.mat[(r, c0)] = a * k[(0, 0)].conj() + b * k[(0, 1)].conj();
                self.mat[(r, c1)] = a * k[(1, 0)].conj() + b * k[(1, 1)].conj();
            }
        }
    }
}

/// Embeds `op`, whose Kronecker factors sit on `positions` in order, into an
/// `N`-site operator that is the identity elsewhere.
pub fn embed(op: &DenseOperator, positions: &[usize], sites: usize) -> Result<DenseOperator> {
    embed_capped(op, positions, sites, DEFAULT_MAX_DENSE_SITES)
}

pub fn embed_capped(
    op: &DenseOperator,
    positions: &[usize],
    sites: usize,
    max_sites: usize,
) -> Result<DenseOperator> {
    check_dense_sites(sites, max_sites)?;
    if positions.len() != op.sites {
        return Err(Error::SiteCountMismatch { left: op.sites, right: positions.len() });
    }
    let mut seen = 0u64;
    for &p in positions {
        if p == 0 || p > sites {
            return Err(Error::SiteOutOfRange { site: p, sites });
        }
        if seen & (1 << p) != 0 {
            return Err(Error::Precondition(format!("site {p} listed twice")));
        }
        seen |= 1 << p;
    }
    let k = op.sites;
    // Local bit (k - 1 - i) is the i-th listed position.
    let bits: Vec<usize> = positions.iter().map(|&p| site_bit(sites, p)).collect();
    let scatter = |local: usize| -> usize {
        let mut full = 0;
        for (i, &b) in bits.iter().enumerate() {
            if local & (1 << (k - 1 - i)) != 0 {
                full |= 1 << b;
            }
        }
        full
    };
    let pos_mask = scatter((1 << k) - 1);
    let offsets: Vec<usize> = (0..1usize << k).map(scatter).collect();
    let dim = 1usize << sites;
    let mut mat = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let rest = c & !pos_mask;
        let lc = offsets.iter().position(|&o| o == c & pos_mask).expect("offset table");
        for (lr, &o) in offsets.iter().enumerate() {
            mat[(rest | o, c)] = op.mat[(lr, lc)];
        }
    }
    Ok(DenseOperator { sites, mat })
}

/// Traces out `traced`; the result keeps the remaining sites in order.
pub fn partial_trace(rho: &DenseOperator, traced: &SiteSet) -> Result<DenseOperator> {
    if traced.sites() != rho.sites {
        return Err(Error::SiteCountMismatch { left: rho.sites, right: traced.sites() });
    }
    let n = rho.sites;
    let kept: Vec<usize> = traced.complement().iter().collect();
    let gone: Vec<usize> = traced.iter().collect();
    let offsets = |list: &[usize]| -> Vec<usize> {
        let k = list.len();
        (0..1usize << k)
            .map(|local| {
                list.iter()
                    .enumerate()
                    .filter(|(i, _)| local & (1 << (k - 1 - i)) != 0)
                    .fold(0, |acc, (_, &s)| acc | (1 << site_bit(n, s)))
            })
            .collect()
    };
    let ko = offsets(&kept);
    let to = offsets(&gone);
    let dk = ko.len();
    let mat = DMatrix::from_fn(dk, dk, |r, c| {
        to.iter().map(|&e| rho.mat[(ko[r] | e, ko[c] | e)]).sum()
    });
    Ok(DenseOperator { sites: kept.len(), mat })
}

/// `Σ_i K_i ρ K_i†` with every Kraus operator acting on `site`.
pub fn apply_channel(
    channel: &QuantumChannel,
    rho: &DenseOperator,
    site: usize,
) -> Result<DenseOperator> {
    if site == 0 || site > rho.sites {
        return Err(Error::SiteOutOfRange { site, sites: rho.sites });
    }
    let mut out = DenseOperator { sites: rho.sites, mat: DMatrix::zeros(rho.dim(), rho.dim()) };
    for k in channel.kraus() {
        let mut term = rho.clone();
        term.apply_left(k, site);
        term.apply_right_adjoint(k, site);
        out.mat += term.mat;
    }
    Ok(out)
}

/// `½ Σ |λ_i(a - b)|`.
pub fn trace_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    if a.sites != b.sites {
        return Err(Error::SiteCountMismatch { left: a.sites, right: b.sites });
    }
    for op in [a, b] {
        let dev = op.hermiticity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian { deviation: dev });
        }
    }
    let diff = a.sub(b);
    Ok(0.5 * diff.hermitian_eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
}
