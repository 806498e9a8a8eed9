use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::random::{haar_unitary, rng};

/// Completeness tolerance for `Σ K†K = I`.
pub const KRAUS_TOL: f64 = 1e-10;

/// A trace-preserving single-qubit channel in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    label: String,
    kraus: Vec<Matrix2<Complex64>>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn m(a: [[Complex64; 2]; 2]) -> Matrix2<Complex64> {
    Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1])
}

impl QuantumChannel {
    pub fn new(label: impl Into<String>, kraus: Vec<Matrix2<Complex64>>) -> Result<Self> {
        let ch = QuantumChannel { label: label.into(), kraus };
        if ch.kraus.is_empty() {
            return Err(Error::InvalidChannel { label: ch.label, reason: "no Kraus operators".into() });
        }
        let err = ch.completeness_error();
        if err.is_nan() || err > KRAUS_TOL {
            return Err(Error::InvalidChannel {
                label: ch.label,
                reason: format!("Σ K†K deviates from I by {err:.3e}"),
            });
        }
        Ok(ch)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kraus(&self) -> &[Matrix2<Complex64>] {
        &self.kraus
    }

    /// `‖Σ K†K − I‖_max`.
    pub fn completeness_error(&self) -> f64 {
        let s: Matrix2<Complex64> = self.kraus.iter().map(|k| k.adjoint() * k).sum();
        (s - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Applies the channel to a single-qubit operator.
    pub fn apply_qubit(&self, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        self.kraus.iter().map(|k| k * rho * k.adjoint()).sum()
    }

    pub fn identity() -> Self {
        QuantumChannel { label: "identity".into(), kraus: vec![Matrix2::identity()] }
    }

    /// `{|0⟩⟨0|, |1⟩⟨1|}`.
    pub fn projective_z() -> Self {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        QuantumChannel {
            label: "projective_z".into(),
            kraus: vec![m([[o, z], [z, z]]), m([[z, z], [z, o]])],
        }
    }

    /// `{|+⟩⟨+|, |−⟩⟨−|}`.
    pub fn projective_x() -> Self {
        let h = c(0.5, 0.0);
        QuantumChannel {
            label: "projective_x".into(),
            kraus: vec![m([[h, h], [h, h]]), m([[h, -h], [-h, h]])],
        }
    }

    /// `ρ ↦ I/2`, Kraus `{I, X, Y, Z}/2`.
    pub fn depolarizing() -> Self {
        let z = c(0.0, 0.0);
        let h = c(0.5, 0.0);
        let ih = c(0.0, 0.5);
        QuantumChannel {
            label: "depolarizing".into(),
            kraus: vec![
                m([[h, z], [z, h]]),
                m([[z, h], [h, z]]),
                m([[z, -ih], [ih, z]]),
                m([[h, z], [z, -h]]),
            ],
        }
    }

    /// `ρ ↦ (1 − p) ρ + p Z ρ Z`.
    pub fn phase_flip(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel {
                label: format!("phase_flip:{p}"),
                reason: "p must lie in [0, 1]".into(),
            });
        }
        let z = c(0.0, 0.0);
        let a = c((1.0 - p).sqrt(), 0.0);
        let b = c(p.sqrt(), 0.0);
        QuantumChannel::new(format!("phase_flip:{p}"), vec![m([[a, z], [z, a]]), m([[b, z], [z, -b]])])
    }

    /// Random channel from a Stinespring dilation: a Haar unitary `U` on
    /// qubit ⊗ ancilla with the ancilla prepared in `|0⟩`, so
    /// `K_i = (I ⊗ ⟨i|) U (I ⊗ |0⟩)`. Trace preservation follows from the
    /// orthonormal columns of `U`.
    pub fn random(seed: u64, ancilla_dim: usize) -> Result<Self> {
        let label = format!("random:{seed}:{ancilla_dim}");
        if ancilla_dim == 0 {
            return Err(Error::InvalidChannel { label, reason: "ancilla dimension must be positive".into() });
        }
        let u = haar_unitary(2 * ancilla_dim, &mut rng(seed));
        let kraus = (0..ancilla_dim)
            .map(|i| Matrix2::from_fn(|s_out, s_in| u[(s_out * ancilla_dim + i, s_in * ancilla_dim)]))
            .collect();
        QuantumChannel::new(label, kraus)
    }

    /// Parses `identity`, `projective_z`, `projective_x`, `depolarizing`,
    /// `phase_flip:P` and `random:SEED[:ANCILLA]` (ancilla dimension 2 by
    /// default).
    pub fn by_name(name: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidChannel { label: name.to_string(), reason: reason.into() };
        let mut parts = name.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        match (head, args.as_slice()) {
            ("identity", []) => Ok(QuantumChannel::identity()),
            ("projective_z", []) => Ok(QuantumChannel::projective_z()),
            ("projective_x", []) => Ok(QuantumChannel::projective_x()),
            ("depolarizing", []) => Ok(QuantumChannel::depolarizing()),
            ("phase_flip", [p]) => QuantumChannel::phase_flip(p.parse().map_err(|_| bad("bad probability"))?),
            ("random", [seed]) => QuantumChannel::random(seed.parse().map_err(|_| bad("bad seed"))?, 2),
            ("random", [seed, anc]) => QuantumChannel::random(
                seed.parse().map_err(|_| bad("bad seed"))?,
                anc.parse().map_err(|_| bad("bad ancilla dimension"))?,
            ),
            _ => Err(bad("unknown channel name")),
        }
    }
}

/// The fixed catalog; random channels come from [`QuantumChannel::random`].
pub fn standard_channels() -> Vec<QuantumChannel> {
    vec![
        QuantumChannel::identity(),
        QuantumChannel::projective_z(),
        QuantumChannel::projective_x(),
        QuantumChannel::depolarizing(),
        QuantumChannel::phase_flip(0.25).expect("valid probability"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bloch_state;

    fn qubit(op: &crate::dense::DenseOperator) -> Matrix2<Complex64> {
        Matrix2::from_fn(|r, c| op.get(r, c))
    }

    #[test]
    fn catalog_is_trace_preserving() {
        for ch in standard_channels() {
            assert!(ch.completeness_error() <= KRAUS_TOL, "{}", ch.label());
        }
        assert_eq!(QuantumChannel::identity().kraus(), &[Matrix2::identity()]);
    }

    #[test]
    fn random_channels_are_trace_preserving() {
        let ch = QuantumChannel::random(42, 2).unwrap();
        assert!(ch.completeness_error() <= 1e-12);
        assert_eq!(ch.kraus().len(), 2);
        let ch4 = QuantumChannel::random(42, 4).unwrap();
        assert!(ch4.completeness_error() <= 1e-12);
        assert_eq!(QuantumChannel::random(42, 2).unwrap(), ch);
        assert!(QuantumChannel::random(1, 0).is_err());
    }

    #[test]
    fn dephasing_an_x_state() {
        // Kraus-sum oracle: P0 ρ P0 + P1 ρ P1 keeps the diagonal of
        // ½(I + 0.8X) = [[.5, .4], [.4, .5]] and drops the rest.
        let rho = qubit(&bloch_state(0.8, 0.0, 0.0));
        let out = QuantumChannel::projective_z().apply_qubit(&rho);
        let half = Matrix2::identity() * c(0.5, 0.0);
        assert!((out - half).iter().all(|z| z.norm() < 1e-16));
    }

    #[test]
    fn depolarizing_erases_everything() {
        let rho = qubit(&bloch_state(0.3, -0.4, 0.5));
        let out = QuantumChannel::depolarizing().apply_qubit(&rho);
        assert!((out - Matrix2::identity() * c(0.5, 0.0)).iter().all(|z| z.norm() < 1e-16));
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let k = Matrix2::identity() * c(0.9, 0.0);
        assert!(matches!(QuantumChannel::new("shrink", vec![k]), Err(Error::InvalidChannel { .. })));
        assert!(QuantumChannel::new("empty", vec![]).is_err());
        assert!(QuantumChannel::phase_flip(1.5).is_err());
    }

    #[test]
    fn names_parse() {
        for name in ["identity", "projective_z", "projective_x", "depolarizing"] {
            assert_eq!(QuantumChannel::by_name(name).unwrap().label(), name);
        }
        assert_eq!(QuantumChannel::by_name("phase_flip:0.5").unwrap().kraus().len(), 2);
        assert_eq!(QuantumChannel::by_name("random:7").unwrap(), QuantumChannel::random(7, 2).unwrap());
        assert_eq!(QuantumChannel::by_name("random:7:4").unwrap().kraus().len(), 4);
        assert!(QuantumChannel::by_name("projective_y").is_err());
        assert!(QuantumChannel::by_name("random:x").is_err());
    }
}
