//! The measured chain: Hamiltonian, bipartition, initial states, channels.
//!
//! The chain Hamiltonian is
//!
//! ```text
//! H = Σ_{j=1}^{N-1} J_j Z_j Z_{j+1} + Σ_{j=1}^{N} b_j X_j
//! ```
//!
//! with `J_j = 1` and `b_j = 0` by default. Cutting at spin `n` gives the
//! system `S = 1..n-1` and environment `E = n..N`; `Ẽ = n+1..N`.

mod channel;
mod state;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliLabel, PauliSum, SiteSet};

pub use channel::{standard_channels, QuantumChannel};
pub use state::{bloch_state, build_initial_state, InitialStateSpec};

/// Ordered, nonnegative sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub const DEFAULT_STOP: f64 = 10.0;
    pub const DEFAULT_STEPS: usize = 101;

    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidConfig("time grid is empty".into()));
        }
        if points.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidConfig("time grid must be finite and nonnegative".into()));
        }
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidConfig("time grid must be ordered".into()));
        }
        Ok(TimeGrid(points))
    }

    /// `steps` evenly spaced points from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidConfig("time grid needs at least one step".into()));
        }
        if steps == 1 {
            return TimeGrid::new(vec![start]);
        }
        if stop < start {
            return Err(Error::InvalidConfig(format!("grid stop {stop} precedes start {start}")));
        }
        let dt = (stop - start) / (steps - 1) as f64;
        let mut pts: Vec<f64> = (0..steps).map(|k| start + dt * k as f64).collect();
        pts[steps - 1] = stop;
        TimeGrid::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid::linspace(0.0, Self::DEFAULT_STOP, Self::DEFAULT_STEPS).expect("valid default grid")
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        TimeGrid::new(v)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(g: TimeGrid) -> Self {
        g.0
    }
}

/// Chain geometry, couplings, fields, and the cut at spin `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainConfig {
    sites: usize,
    cut: usize,
    couplings: Vec<f64>,
    fields: Vec<f64>,
    time_grid: TimeGrid,
}

impl ChainConfig {
    /// Uniform unit couplings, no fields, default time grid.
    pub fn new(sites: usize, cut: usize) -> Result<Self> {
        let cfg = ChainConfig {
            sites,
            cut,
            couplings: vec![1.0; sites.saturating_sub(1)],
            fields: vec![0.0; sites],
            time_grid: TimeGrid::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_couplings(mut self, couplings: Vec<f64>) -> Result<Self> {
        self.couplings = couplings;
        self.validate()?;
        Ok(self)
    }

    pub fn with_fields(mut self, fields: Vec<f64>) -> Result<Self> {
        self.fields = fields;
        self.validate()?;
        Ok(self)
    }

    /// Sets `b_site`, 1-based.
    pub fn with_field(mut self, site: usize, b: f64) -> Result<Self> {
        if site == 0 || site > self.sites {
            return Err(Error::SiteOutOfRange { site, sites: self.sites });
        }
        self.fields[site - 1] = b;
        self.validate()?;
        Ok(self)
    }

    pub fn with_time_grid(mut self, grid: TimeGrid) -> Self {
        self.time_grid = grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::InvalidConfig(format!("N = {} but a chain needs N >= 2", self.sites)));
        }
        if self.sites > crate::pauli::MAX_SYMBOLIC_SITES {
            return Err(Error::SymbolicLimit { sites: self.sites, limit: crate::pauli::MAX_SYMBOLIC_SITES });
        }
        if self.cut < 2 || self.cut > self.sites {
            return Err(Error::InvalidConfig(format!(
                "cut n = {} must satisfy 2 <= n <= N = {}",
                self.cut, self.sites
            )));
        }
        if self.couplings.len() != self.sites - 1 {
            return Err(Error::InvalidConfig(format!(
                "{} couplings given for {} bonds",
                self.couplings.len(),
                self.sites - 1
            )));
        }
        if self.fields.len() != self.sites {
            return Err(Error::InvalidConfig(format!(
                "{} fields given for {} sites",
                self.fields.len(),
                self.sites
            )));
        }
        if self.couplings.iter().chain(&self.fields).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("couplings and fields must be finite".into()));
        }
        Ok(())
    }

    /// The setting in which the no-signaling result is claimed: `N >= 3`,
    /// `n <= N - 1` so the measured spin lies in `Ẽ`, and no local fields.
    pub fn check_theorem_scope(&self) -> Result<()> {
        if self.sites < 3 {
            return Err(Error::InvalidConfig(format!(
                "N = {} but the measured-chain setting needs N >= 3 (S, spin n and Ẽ all nonempty)",
                self.sites
            )));
        }
        if self.cut > self.sites - 1 {
            return Err(Error::InvalidConfig(format!(
                "cut n = {} must leave spin N = {} inside Ẽ (n <= N - 1)",
                self.cut, self.sites
            )));
        }
        if let Some(j) = self.fields.iter().position(|&b| b != 0.0) {
            return Err(Error::InvalidConfig(format!("field b_{} = {} must be zero", j + 1, self.fields[j])));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    pub fn system(&self) -> SiteSet {
        SiteSet::system(self.sites, self.cut).expect("validated cut")
    }

    pub fn environment(&self) -> SiteSet {
        SiteSet::environment(self.sites, self.cut).expect("validated cut")
    }

    pub fn environment_tilde(&self) -> SiteSet {
        SiteSet::environment_tilde(self.sites, self.cut).expect("validated cut")
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn zz(j: usize) -> PauliLabel {
    PauliLabel::single(j, Pauli::Z).with(j + 1, Pauli::Z)
}

/// `Σ J_j Z_j Z_{j+1} + Σ b_j X_j` as a canonical, Hermitian sum.
pub fn build_hamiltonian(cfg: &ChainConfig) -> PauliSum {
    let bonds = cfg.couplings.iter().enumerate().map(|(i, &j)| (zz(i + 1), real(j)));
    let fields = cfg
        .fields
        .iter()
        .enumerate()
        .map(|(i, &b)| (PauliLabel::single(i + 1, Pauli::X), real(b)));
    PauliSum::from_terms(cfg.sites, bonds.chain(fields)).expect("labels within the chain")
}

/// `H = H_S ⊗ I_E + I_S ⊗ H_E + H_SE`, every part on all `N` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSplit {
    pub system: PauliSum,
    pub environment: PauliSum,
    pub interaction: PauliSum,
}

/// Assigns each term by its support: inside `S`, inside `E`, or straddling.
pub fn split_hamiltonian(h: &PauliSum, cut: usize) -> Result<HamiltonianSplit> {
    let sites = h.sites();
    let s = SiteSet::system(sites, cut)?.mask();
    let e = SiteSet::environment(sites, cut)?.mask();
    let (mut hs, mut he, mut hse) = (Vec::new(), Vec::new(), Vec::new());
    for (l, c) in h.iter() {
        let sup = l.support_mask();
        if sup & e == 0 {
            hs.push((l, c));
        } else if sup & s == 0 {
            he.push((l, c));
        } else {
            hse.push((l, c));
        }
    }
    Ok(HamiltonianSplit {
        system: PauliSum::from_terms(sites, hs)?,
        environment: PauliSum::from_terms(sites, he)?,
        interaction: PauliSum::from_terms(sites, hse)?,
    })
}

/// `H = J_{n-1} Z_{n-1} Z_n + J_n Z_n Z_{n+1} + I_n ⊗ H̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSplit {
    pub cut: usize,
    /// `J_{n-1} Z_{n-1} Z_n` on all `N` sites.
    pub left: PauliSum,
    /// `J_n Z_n Z_{n+1}` on all `N` sites.
    pub right: PauliSum,
    /// `I_n ⊗ H̃` on all `N` sites.
    pub rest: PauliSum,
    pub left_coupling: Complex64,
    pub right_coupling: Complex64,
}

impl SpinSplit {
    /// `H̃` with spin `n` deleted, on `N - 1` sites.
    pub fn h_tilde(&self) -> PauliSum {
        self.rest.decompose_at_site(self.cut).expect("cut in range")[0].clone()
    }

    /// `J_{n-1} Z_{n-1} + J_n Z_{n+1}` on the `N - 1` sites left after deleting
    /// spin `n` (where `Z_{n+1}` now sits at position `n`).
    pub fn neighbour_field(&self) -> PauliSum {
        let sites = self.rest.sites() - 1;
        let n = self.cut;
        let terms = [
            (PauliLabel::single(n - 1, Pauli::Z), self.left_coupling),
            (PauliLabel::single(n, Pauli::Z), self.right_coupling),
        ];
        PauliSum::from_terms(sites, terms).expect("sites in range")
    }
}

/// Splits off the two bonds touching spin `n`. Any other term acting on spin
/// `n` puts the Hamiltonian outside the supported structure.
pub fn split_at_spin(h: &PauliSum, cut: usize) -> Result<SpinSplit> {
    let sites = h.sites();
    if cut < 2 || cut + 1 > sites {
        return Err(Error::Structure(format!("spin n = {cut} needs neighbours on both sides in N = {sites}")));
    }
    let (left_label, right_label) = (zz(cut - 1), zz(cut));
    let site_bit = 1u64 << (cut - 1);
    let mut rest = Vec::new();
    let (mut jl, mut jr) = (Complex64::default(), Complex64::default());
    for (l, c) in h.iter() {
        if l == left_label {
            jl = c;
        } else if l == right_label {
            jr = c;
        } else if l.support_mask() & site_bit != 0 {
            return Err(Error::Structure(format!(
                "term {} acts on spin {cut} but is neither Z_{}Z_{cut} nor Z_{cut}Z_{}",
                l.render(sites),
                cut - 1,
                cut + 1
            )));
        } else {
            rest.push((l, c));
        }
    }
    Ok(SpinSplit {
        cut,
        left: PauliSum::from_terms(sites, [(left_label, jl)])?,
        right: PauliSum::from_terms(sites, [(right_label, jr)])?,
        rest: PauliSum::from_terms(sites, rest)?,
        left_coupling: jl,
        right_coupling: jr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(terms: &[(f64, &str)]) -> PauliSum {
        let t: Vec<(Complex64, &str)> = terms.iter().map(|&(c, s)| (real(c), s)).collect();
        PauliSum::from_labels(&t).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let h2 = build_hamiltonian(&ChainConfig::new(2, 2).unwrap());
        assert_eq!(h2, sum(&[(1.0, "ZZ")]));
        let h3 = build_hamiltonian(&ChainConfig::new(3, 2).unwrap());
        assert_eq!(h3, sum(&[(1.0, "ZZI"), (1.0, "IZZ")]));
        let cfg = ChainConfig::new(3, 2).unwrap().with_field(3, 0.7).unwrap();
        let h = build_hamiltonian(&cfg);
        assert_eq!(h, sum(&[(1.0, "ZZI"), (1.0, "IZZ"), (0.7, "IIX")]));
        assert!(h.is_hermitian());
    }

    #[test]
    fn support_split_examples() {
        let h3 = build_hamiltonian(&ChainConfig::new(3, 2).unwrap());
        let sp = split_hamiltonian(&h3, 2).unwrap();
        assert!(sp.system.is_zero());
        assert_eq!(sp.environment, sum(&[(1.0, "IZZ")]));
        assert_eq!(sp.interaction, sum(&[(1.0, "ZZI")]));

        let h4 = build_hamiltonian(&ChainConfig::new(4, 3).unwrap());
        let sp = split_hamiltonian(&h4, 3).unwrap();
        assert_eq!(sp.system, sum(&[(1.0, "ZZII")]));
        assert_eq!(sp.environment, sum(&[(1.0, "IIZZ")]));
        assert_eq!(sp.interaction, sum(&[(1.0, "IZZI")]));

        let hb = build_hamiltonian(&ChainConfig::new(3, 2).unwrap().with_field(2, 0.4).unwrap());
        let sp = split_hamiltonian(&hb, 2).unwrap();
        assert_eq!(sp.environment.coeff(PauliLabel::single(2, Pauli::X)), real(0.4));
        let total = sp.system.add(&sp.environment).unwrap().add(&sp.interaction).unwrap();
        assert_eq!(total, hb);
    }

    #[test]
    fn spin_split_examples() {
        let h3 = build_hamiltonian(&ChainConfig::new(3, 2).unwrap());
        let sp = split_at_spin(&h3, 2).unwrap();
        assert_eq!(sp.left, sum(&[(1.0, "ZZI")]));
        assert_eq!(sp.right, sum(&[(1.0, "IZZ")]));
        assert!(sp.rest.is_zero());

        let h5 = build_hamiltonian(&ChainConfig::new(5, 3).unwrap());
        let sp = split_at_spin(&h5, 3).unwrap();
        assert_eq!(sp.left, sum(&[(1.0, "IZZII")]));
        assert_eq!(sp.right, sum(&[(1.0, "IIZZI")]));
        assert_eq!(sp.rest, sum(&[(1.0, "ZZIII"), (1.0, "IIIZZ")]));
        assert_eq!(sp.h_tilde(), sum(&[(1.0, "ZZII"), (1.0, "IIZZ")]));
        assert_eq!(sp.neighbour_field(), sum(&[(1.0, "IZII"), (1.0, "IIZI")]));

        let hb = build_hamiltonian(&ChainConfig::new(4, 2).unwrap().with_field(4, 0.9).unwrap());
        let sp = split_at_spin(&hb, 2).unwrap();
        assert_eq!(sp.rest, sum(&[(1.0, "IIZZ"), (0.9, "IIIX")]));
    }

    #[test]
    fn spin_split_rejects_foreign_terms() {
        let hb = build_hamiltonian(&ChainConfig::new(4, 2).unwrap().with_field(2, 0.9).unwrap());
        assert!(matches!(split_at_spin(&hb, 2), Err(Error::Structure(_))));
        let xx = sum(&[(1.0, "XXI"), (1.0, "IZZ")]);
        assert!(matches!(split_at_spin(&xx, 2), Err(Error::Structure(_))));
        let h3 = build_hamiltonian(&ChainConfig::new(3, 3).unwrap());
        assert!(matches!(split_at_spin(&h3, 3), Err(Error::Structure(_))));
    }

    #[test]
    fn config_validation() {
        assert!(ChainConfig::new(1, 2).is_err());
        assert!(ChainConfig::new(3, 1).is_err());
        assert!(ChainConfig::new(3, 4).is_err());
        assert!(ChainConfig::new(3, 2).unwrap().with_couplings(vec![1.0]).is_err());
        assert!(ChainConfig::new(3, 2).unwrap().with_fields(vec![0.0; 2]).is_err());
        let n2 = ChainConfig::new(2, 2).unwrap();
        let err = n2.check_theorem_scope().unwrap_err();
        assert!(err.to_string().contains("N >= 3"), "{err}");
        assert!(ChainConfig::new(3, 3).unwrap().check_theorem_scope().is_err());
        let field = ChainConfig::new(3, 2).unwrap().with_field(3, 1.0).unwrap();
        assert!(field.check_theorem_scope().is_err());
        assert!(ChainConfig::new(3, 2).unwrap().check_theorem_scope().is_ok());
    }

    #[test]
    fn time_grid() {
        let g = TimeGrid::default();
        assert_eq!(g.len(), 101);
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(g.points()[100], 10.0);
        assert!((g.points()[1] - 0.1).abs() < 1e-15);
        assert_eq!(TimeGrid::linspace(2.0, 5.0, 1).unwrap().points(), &[2.0]);
        assert!(TimeGrid::new(vec![1.0, 0.5]).is_err());
        assert!(TimeGrid::new(vec![-1.0]).is_err());
        assert!(TimeGrid::linspace(0.0, 1.0, 0).is_err());
    }
}
