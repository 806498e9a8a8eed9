use nalgebra::Matrix2;
use num_complex::Complex64;

use super::ChainConfig;
use crate::dense::DenseOperator;
use crate::error::{Error, Result};

/// `½ (I + r_x X + r_y Y + r_z Z)`.
pub fn bloch_state(rx: f64, ry: f64, rz: f64) -> DenseOperator {
    let h = |v: f64| v * 0.5;
    DenseOperator::qubit(Matrix2::new(
        Complex64::new(h(1.0 + rz), 0.0),
        Complex64::new(h(rx), -h(ry)),
        Complex64::new(h(rx), h(ry)),
        Complex64::new(h(1.0 - rz), 0.0),
    ))
}

/// A state on `S ∪ Ẽ` together with the Bloch vector of spin `n`.
///
/// Conforming specs keep spin `n` in the xy-plane (`r_z = 0`); a nonzero
/// `r_z` is only admitted through [`with_rz`](Self::with_rz).
#[derive(Debug, Clone, PartialEq)]
pub struct InitialStateSpec {
    rho_s_tilde_e: DenseOperator,
    bloch: [f64; 3],
}

impl InitialStateSpec {
    pub fn conforming(rho_s_tilde_e: DenseOperator, rx: f64, ry: f64) -> Result<Self> {
        InitialStateSpec::with_rz(rho_s_tilde_e, rx, ry, 0.0)
    }

    pub fn with_rz(rho_s_tilde_e: DenseOperator, rx: f64, ry: f64, rz: f64) -> Result<Self> {
        let norm2 = rx * rx + ry * ry + rz * rz;
        if !norm2.is_finite() || norm2 > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!(
                "Bloch vector ({rx}, {ry}, {rz}) lies outside the unit ball"
            )));
        }
        rho_s_tilde_e.validate_state()?;
        Ok(InitialStateSpec { rho_s_tilde_e, bloch: [rx, ry, rz] })
    }

    pub fn rho_s_tilde_e(&self) -> &DenseOperator {
        &self.rho_s_tilde_e
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn is_conforming(&self) -> bool {
        self.bloch[2] == 0.0
    }

    pub fn spin_state(&self) -> DenseOperator {
        let [x, y, z] = self.bloch;
        bloch_state(x, y, z)
    }
}

/// `ρ_SE = ρ_{SẼ} ⊗ ρ_n` with the spin-`n` factor placed at site `n`, between
/// `S` and `Ẽ`.
pub fn build_initial_state(spec: &InitialStateSpec, cfg: &ChainConfig) -> Result<DenseOperator> {
    let expected = cfg.sites() - 1;
    if spec.rho_s_tilde_e.sites() != expected {
        return Err(Error::InvalidState(format!(
            "ρ_SẼ acts on {} sites, expected N - 1 = {expected}",
            spec.rho_s_tilde_e.sites()
        )));
    }
    spec.rho_s_tilde_e.insert_site(&spec.spin_state(), cfg.cut())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliSum;
    use crate::random::{random_density, rng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pure_product_example() {
        let cfg = ChainConfig::new(3, 2).unwrap();
        let mut zz = DenseOperator::zeros(2).unwrap();
        let mut m = zz.clone().into_matrix();
        m[(0, 0)] = c(1.0);
        zz = DenseOperator::from_matrix(2, m).unwrap();
        let spec = InitialStateSpec::conforming(zz, 1.0, 0.0).unwrap();
        let rho = build_initial_state(&spec, &cfg).unwrap();
        // |0⟩ ⊗ |+⟩ ⊗ |0⟩: amplitude 1/√2 on |000⟩ and |010⟩.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = [c(s), c(0.0), c(s), c(0.0), c(0.0), c(0.0), c(0.0), c(0.0)];
        let expected = DenseOperator::pure(3, &amps).unwrap();
        assert!(rho.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn zero_bloch_vector_is_maximally_mixed() {
        let half = bloch_state(0.0, 0.0, 0.0);
        assert!(half.max_abs_diff(&DenseOperator::identity(1).unwrap().scale(c(0.5))) == 0.0);
    }

    #[test]
    fn conforming_states_have_no_z_at_spin_n() {
        let mut r = rng(21);
        for (n_sites, cut) in [(3, 2), (4, 2), (4, 3), (5, 3)] {
            let cfg = ChainConfig::new(n_sites, cut).unwrap();
            let rho_ste = random_density(n_sites - 1, 0.0, &mut r).unwrap();
            let spec = InitialStateSpec::conforming(rho_ste, 0.3, -0.5).unwrap();
            let rho = build_initial_state(&spec, &cfg).unwrap();
            rho.validate_state().unwrap();
            let parts = PauliSum::from_dense(&rho).unwrap().decompose_at_site(cut).unwrap();
            assert!(parts[3].is_zero(), "N={n_sites} n={cut}: {}", parts[3]);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let rho = random_density(2, 0.3, &mut rng(0)).unwrap();
        assert!(InitialStateSpec::conforming(rho.clone(), 0.8, 0.8).is_err());
        assert!(InitialStateSpec::with_rz(rho.clone(), 0.0, 0.0, 1.01).is_err());
        let bad = rho.scale(c(2.0));
        assert!(InitialStateSpec::conforming(bad, 0.0, 0.0).is_err());
        let spec = InitialStateSpec::conforming(rho, 0.0, 0.0).unwrap();
        assert!(build_initial_state(&spec, &ChainConfig::new(4, 2).unwrap()).is_err());
        let rz = InitialStateSpec::with_rz(random_density(2, 0.3, &mut rng(0)).unwrap(), 0.0, 0.0, 0.8).unwrap();
        assert!(!rz.is_conforming());
    }
}
