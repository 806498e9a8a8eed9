//! Seeded random objects: Haar unitaries, states, and Pauli sums.
//!
//! Every generator takes an explicit RNG; [`rng`] builds the crate's standard
//! ChaCha stream from a `u64` seed so runs are reproducible from the seed alone.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dense::DenseOperator;
use crate::error::Result;
use crate::pauli::{full_mask, PauliLabel, PauliSum};

pub type SimRng = ChaCha8Rng;

/// Mixing weight toward `I/d` used for default random states.
pub const DEFAULT_MIX_WEIGHT: f64 = 0.3;

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` divided out.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        col *= phase;
    }
    q
}

pub fn haar_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| gaussian_complex(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// `(1 − w)|ψ⟩⟨ψ| + w I/d` with `ψ` Haar-random; `w = 0` gives a pure state.
pub fn random_density<R: Rng + ?Sized>(
    sites: usize,
    mix_weight: f64,
    rng: &mut R,
) -> Result<DenseOperator> {
    let dim = 1usize << sites;
    let psi = haar_pure_state(dim, rng);
    let pure = DenseOperator::pure(sites, psi.as_slice())?;
    let mixed = DenseOperator::identity(sites)?.scale(Complex64::new(mix_weight / dim as f64, 0.0));
    Ok(pure.scale(Complex64::new(1.0 - mix_weight, 0.0)).add(&mixed))
}

/// Uniform point of the unit disk, as `(r_x, r_y)`.
pub fn random_bloch_xy<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let r = rng.random::<f64>().sqrt();
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    (r * phi.cos(), r * phi.sin())
}

/// Uniform point of the Bloch ball.
pub fn random_bloch_ball<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let r = rng.random::<f64>().cbrt();
    let cos_theta = 2.0 * rng.random::<f64>() - 1.0;
    let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    [r * sin_theta * phi.cos(), r * sin_theta * phi.sin(), r * cos_theta]
}

/// Product of independent single-qubit states drawn from the Bloch ball.
pub fn random_product_state<R: Rng + ?Sized>(sites: usize, rng: &mut R) -> Result<DenseOperator> {
    let mut out = DenseOperator::identity(0)?;
    for _ in 0..sites {
        let [x, y, z] = random_bloch_ball(rng);
        out = out.kron(&crate::model::bloch_state(x, y, z))?;
    }
    Ok(out)
}

/// How coefficients of [`random_pauli_sum`] are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    /// Complex, both parts standard normal.
    Gaussian,
    /// Real standard normal, so the sum is Hermitian.
    RealGaussian,
    /// Complex with both parts in `{-4, -3.5, ..., 4}`. Products and sums of
    /// these stay exact in `f64`, so coefficient comparisons are bit-exact.
    Dyadic,
}

fn draw_coeff<R: Rng + ?Sized>(kind: CoeffKind, rng: &mut R) -> Complex64 {
    match kind {
        CoeffKind::Gaussian => {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        }
        CoeffKind::RealGaussian => Complex64::new(rng.sample(StandardNormal), 0.0),
        CoeffKind::Dyadic => {
            let mut part = || {
                let k: i32 = rng.random_range(-8..=8);
                f64::from(k) * 0.5
            };
            Complex64::new(part(), part())
        }
    }
}

/// Random sum of up to `terms` strings on `sites` sites whose labels satisfy
/// `accept`. Labels are drawn uniformly and rejected until accepted, so
/// `accept` must admit a reasonable fraction of all `4^N` labels.
pub fn random_pauli_sum<R, F>(
    sites: usize,
    terms: usize,
    kind: CoeffKind,
    rng: &mut R,
    accept: F,
) -> Result<PauliSum>
where
    R: Rng + ?Sized,
    F: Fn(PauliLabel) -> bool,
{
    let mask = full_mask(sites);
    let mut out = Vec::with_capacity(terms);
    let mut attempts = 0usize;
    while out.len() < terms && attempts < 1000 * (terms + 1) {
        attempts += 1;
        let label = PauliLabel::from_masks(rng.random::<u64>() & mask, rng.random::<u64>() & mask);
        if accept(label) {
            out.push((label, draw_coeff(kind, rng)));
        }
    }
    PauliSum::from_terms(sites, out)
}
