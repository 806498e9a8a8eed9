use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{full_mask, i_pow, PauliLabel, PauliSum, PRUNE_EPS};
use crate::dense::{check_dense_sites, DenseOperator, DEFAULT_MAX_DENSE_SITES};
use crate::error::Result;

/// Label masks re-indexed to dense basis bits (site `j` ↦ bit `N - j`).
fn dense_masks(label: PauliLabel, sites: usize) -> (usize, usize) {
    if sites == 0 {
        return (0, 0);
    }
    let flip = |m: u64| (m.reverse_bits() >> (64 - sites)) as usize;
    (flip(label.x_mask()), flip(label.z_mask()))
}

impl PauliSum {
    pub fn to_dense(&self) -> Result<DenseOperator> {
        self.to_dense_capped(DEFAULT_MAX_DENSE_SITES)
    }

    /// `Σ c · ⊗σ(label)`. A string maps basis column `b` to row `b ⊕ x` with
    /// amplitude `i^{|x∧z|} (-1)^{|z∧b|}`.
    pub fn to_dense_capped(&self, max_sites: usize) -> Result<DenseOperator> {
        check_dense_sites(self.sites, max_sites)?;
        let dim = 1usize << self.sites;
        let mut mat = DMatrix::zeros(dim, dim);
        for (label, coeff) in self.iter() {
            let (x, z) = dense_masks(label, self.sites);
            let base = coeff * i_pow((x & z).count_ones());
            for col in 0..dim {
                let sign = if (z & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                mat[(col ^ x, col)] += base * sign;
            }
        }
        DenseOperator::from_matrix(self.sites, mat)
    }

    /// Pauli-basis projection: the coefficient of `P` is `Tr(P A) / 2^N`.
    pub fn from_dense(op: &DenseOperator) -> Result<PauliSum> {
        let sites = op.sites();
        let dim = 1usize << sites;
        let norm = 1.0 / dim as f64;
        let mut terms = Vec::new();
        let full = full_mask(sites);
        for x in 0..=full {
            for z in 0..=full {
                let label = PauliLabel::from_masks(x, z);
                let (dx, dz) = dense_masks(label, sites);
                // Tr(P A) = Σ_b P[b⊕x, b] A[b, b⊕x].
                let mut acc = Complex64::default();
                for col in 0..dim {
                    let sign = if (dz & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    acc += op.get(col, col ^ dx) * sign;
                }
                let coeff = acc * i_pow((dx & dz).count_ones()) * norm;
                if coeff.norm() >= PRUNE_EPS {
                    terms.push((label, coeff));
                }
            }
        }
        PauliSum::from_terms(sites, terms)
    }
}
