//! End-to-end protocols on the dense engine: the measured/unmeasured
//! comparison on the system block, the hypothesis-breaking scenarios, the
//! isolated two-qubit baseline and the finite-duration measurement.

use serde::{Deserialize, Serialize};

use crate::dense::{apply_channel, partial_trace, DenseOperator, Propagator};
use crate::error::{Error, Result};
use crate::model::{
    build_hamiltonian, build_initial_state, ChainConfig, InitialStateSpec, QuantumChannel, TimeGrid,
};
use crate::pauli::{PauliSum, SiteSet};
use crate::random::{random_bloch_xy, random_density, random_product_state, rng, DEFAULT_MIX_WEIGHT};

/// Verdict of a [`SignalReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoSignal,
    Signal,
    /// Between the two thresholds.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::NoSignal => "no-signal",
            Verdict::Signal => "signal",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Verdict thresholds on the maximal trace distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub no_signal_tol: f64,
    pub signal_threshold: f64,
}

impl Thresholds {
    pub const BASELINE: Thresholds = Thresholds { no_signal_tol: 1e-12, signal_threshold: 1e-3 };

    pub fn classify(&self, max_distance: f64) -> Verdict {
        if max_distance <= self.no_signal_tol {
            Verdict::NoSignal
        } else if max_distance > self.signal_threshold {
            Verdict::Signal
        } else {
            Verdict::Inconclusive
        }
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { no_signal_tol: 1e-9, signal_threshold: 1e-3 }
    }
}

/// Trace distance between two reduced states over a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalReport {
    pub label: String,
    pub seed: Option<u64>,
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub verdict: Verdict,
    /// Earliest grid time whose distance exceeds the signal threshold.
    pub first_signal_time: Option<f64>,
    pub thresholds: Thresholds,
}

impl SignalReport {
    pub fn new(
        label: impl Into<String>,
        seed: Option<u64>,
        times: Vec<f64>,
        distances: Vec<f64>,
        thresholds: Thresholds,
    ) -> Self {
        let max_distance = distances.iter().copied().fold(0.0, f64::max);
        let first_signal_time = times
            .iter()
            .zip(&distances)
            .find(|(_, &d)| d > thresholds.signal_threshold)
            .map(|(&t, _)| t);
        SignalReport {
            label: label.into(),
            seed,
            times,
            distances,
            max_distance,
            verdict: thresholds.classify(max_distance),
            first_signal_time,
            thresholds,
        }
    }

    /// `t,distance` rows under a one-line header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,distance\n");
        for (t, d) in self.times.iter().zip(&self.distances) {
            out.push_str(&format!("{t:e},{d:e}\n"));
        }
        out
    }
}

/// `½ ‖Δ‖₁` for Hermitian `Δ`.
pub fn half_trace_norm(delta: &DenseOperator) -> f64 {
    0.5 * delta.hermitian_eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
}

/// `½ ‖Tr_traced(U (σ − ρ) U†)‖₁` at each grid time, `U = e^{-iHt}`.
pub fn reduced_distances(
    h: &PauliSum,
    rho: &DenseOperator,
    sigma: &DenseOperator,
    traced: &SiteSet,
    grid: &TimeGrid,
) -> Result<Vec<f64>> {
    let prop = Propagator::new(&h.to_dense()?)?;
    let diff = prop.prepare(&sigma.sub(rho))?;
    grid.points()
        .iter()
        .map(|&t| Ok(half_trace_norm(&partial_trace(&diff.at(t), traced)?)))
        .collect()
}

/// `(ρ_SE, σ_SE)` with `σ_SE = id ⊗ M_N(ρ_SE)`.
pub fn measurement_pair(
    cfg: &ChainConfig,
    spec: &InitialStateSpec,
    channel: &QuantumChannel,
) -> Result<(DenseOperator, DenseOperator)> {
    let rho = build_initial_state(spec, cfg)?;
    let sigma = apply_channel(channel, &rho, cfg.sites())?;
    Ok((rho, sigma))
}

/// The perturbation `R = σ_SE − ρ_SE` as a Pauli sum.
pub fn perturbation(rho: &DenseOperator, sigma: &DenseOperator) -> Result<PauliSum> {
    PauliSum::from_dense(&sigma.sub(rho))
}

/// The measured/unmeasured comparison on `S` with the theorem's hypotheses
/// enforced: `N ≥ 3`, `2 ≤ n ≤ N - 1`, no fields and `r_z = 0`.
pub fn run_no_signaling(
    cfg: &ChainConfig,
    spec: &InitialStateSpec,
    channel: &QuantumChannel,
    thresholds: Thresholds,
) -> Result<SignalReport> {
    cfg.check_theorem_scope()?;
    if !spec.is_conforming() {
        return Err(Error::Precondition(format!(
            "spin n must lie in the Bloch xy-plane, got r_z = {}",
            spec.bloch()[2]
        )));
    }
    run_measurement(cfg, spec, channel, thresholds, "conforming", None)
}

/// The measured/unmeasured comparison on `S` without hypothesis checks.
pub fn run_measurement(
    cfg: &ChainConfig,
    spec: &InitialStateSpec,
    channel: &QuantumChannel,
    thresholds: Thresholds,
    label: &str,
    seed: Option<u64>,
) -> Result<SignalReport> {
    cfg.validate()?;
    let (rho, sigma) = measurement_pair(cfg, spec, channel)?;
    let h = build_hamiltonian(cfg);
    let distances = reduced_distances(&h, &rho, &sigma, &cfg.environment(), cfg.time_grid())?;
    Ok(SignalReport::new(label, seed, cfg.time_grid().points().to_vec(), distances, thresholds))
}

/// A seeded conforming draw: `ρ_{SẼ}` mixed toward `I/d` with weight `w`,
/// `(r_x, r_y)` uniform in the disk, and a random Stinespring channel.
#[derive(Debug, Clone)]
pub struct ConformingDraw {
    pub spec: InitialStateSpec,
    pub channel: QuantumChannel,
}

impl ConformingDraw {
    pub fn sample(sites: usize, seed: u64, mix_weight: f64) -> Result<Self> {
        let mut r = rng(seed);
        let rho = random_density(sites - 1, mix_weight, &mut r)?;
        let (rx, ry) = random_bloch_xy(&mut r);
        let spec = InitialStateSpec::conforming(rho, rx, ry)?;
        let channel = QuantumChannel::random(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 1, 2)?;
        Ok(ConformingDraw { spec, channel })
    }
}

/// Which hypothesis a [`ScenarioSpec`] breaks, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Scenario {
    /// All hypotheses hold.
    Conforming,
    /// Spin `n` gets a Bloch `z` component `rz`.
    RzViolation { rz: f64 },
    /// No channel; spin-1 reduced state under `H` versus `H + b_N X_N`,
    /// starting from a random product state.
    BnField { b_n: f64 },
    /// Transverse field `field` on every site, with the channel on spin `N`.
    WrongHamiltonian { field: f64 },
    /// The channel acts at `t = δ` on a generic conforming `ω` evolved from
    /// `t = 0`.
    FiniteDelta { delta: f64 },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Conforming => "conforming",
            Scenario::RzViolation { .. } => "rz_violation",
            Scenario::BnField { .. } => "bN_field",
            Scenario::WrongHamiltonian { .. } => "wrong_hamiltonian",
            Scenario::FiniteDelta { .. } => "finite_delta",
        }
    }

    /// What a faithful run is expected to report.
    pub fn expected_verdict(&self) -> Verdict {
        match self {
            Scenario::Conforming => Verdict::NoSignal,
            Scenario::FiniteDelta { .. } => Verdict::NoSignal,
            _ => Verdict::Signal,
        }
    }
}

/// A fully specified scenario run; everything random derives from `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub sites: usize,
    pub cut: usize,
    pub channel: QuantumChannel,
    pub seed: u64,
    pub mix_weight: f64,
    pub grid: TimeGrid,
    pub thresholds: Thresholds,
}

impl ScenarioSpec {
    /// Defaults: projective-X channel, default mixing weight, time grid and
    /// thresholds.
    pub fn new(scenario: Scenario, sites: usize, cut: usize, seed: u64) -> Self {
        ScenarioSpec {
            scenario,
            sites,
            cut,
            channel: QuantumChannel::projective_x(),
            seed,
            mix_weight: DEFAULT_MIX_WEIGHT,
            grid: TimeGrid::default(),
            thresholds: Thresholds::default(),
        }
    }

    pub fn with_channel(mut self, channel: QuantumChannel) -> Self {
        self.channel = channel;
        self
    }

    pub fn with_grid(mut self, grid: TimeGrid) -> Self {
        self.grid = grid;
        self
    }

    fn chain(&self) -> Result<ChainConfig> {
        Ok(ChainConfig::new(self.sites, self.cut)?.with_time_grid(self.grid.clone()))
    }
}

/// Runs `spec` with its hypothesis broken as designated; the caller compares
/// the verdict against [`Scenario::expected_verdict`].
pub fn run_counterexample(spec: &ScenarioSpec) -> Result<SignalReport> {
    let name = spec.scenario.name();
    let seed = Some(spec.seed);
    let mut r = rng(spec.seed);
    let cfg = spec.chain()?;
    let n = spec.sites;
    match spec.scenario {
        Scenario::Conforming => {
            let rho = random_density(n - 1, spec.mix_weight, &mut r)?;
            let (rx, ry) = random_bloch_xy(&mut r);
            let state = InitialStateSpec::conforming(rho, rx, ry)?;
            run_measurement(&cfg, &state, &spec.channel, spec.thresholds, name, seed)
        }
        Scenario::RzViolation { rz } => {
            let rho = random_density(n - 1, spec.mix_weight, &mut r)?;
            let (rx, ry) = random_bloch_xy(&mut r);
            let shrink = (1.0 - rz * rz).max(0.0).sqrt();
            let state = InitialStateSpec::with_rz(rho, rx * shrink, ry * shrink, rz)?;
            run_measurement(&cfg, &state, &spec.channel, spec.thresholds, name, seed)
        }
        Scenario::WrongHamiltonian { field } => {
            let cfg = cfg.with_fields(vec![field; n])?;
            let rho = random_density(n - 1, spec.mix_weight, &mut r)?;
            let (rx, ry) = random_bloch_xy(&mut r);
            let state = InitialStateSpec::conforming(rho, rx, ry)?;
            run_measurement(&cfg, &state, &spec.channel, spec.thresholds, name, seed)
        }
        Scenario::BnField { b_n } => {
            let rho = random_product_state(n, &mut r)?;
            let h0 = build_hamiltonian(&cfg);
            let h1 = build_hamiltonian(&cfg.clone().with_field(n, b_n)?);
            let traced = SiteSet::range(n, 2, n)?;
            let (p0, p1) = (Propagator::new(&h0.to_dense()?)?, Propagator::new(&h1.to_dense()?)?);
            let (e0, e1) = (p0.prepare(&rho)?, p1.prepare(&rho)?);
            let distances = spec
                .grid
                .points()
                .iter()
                .map(|&t| {
                    let a = partial_trace(&e0.at(t), &traced)?;
                    let b = partial_trace(&e1.at(t), &traced)?;
                    Ok(half_trace_norm(&a.sub(&b)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SignalReport::new(name, seed, spec.grid.points().to_vec(), distances, spec.thresholds))
        }
        Scenario::FiniteDelta { delta } => {
            let rho = random_density(n - 1, spec.mix_weight, &mut r)?;
            let (rx, ry) = random_bloch_xy(&mut r);
            let omega = build_initial_state(&InitialStateSpec::conforming(rho, rx, ry)?, &cfg)?;
            let rep = run_finite_duration(&cfg, &omega, &spec.channel, delta, spec.thresholds)?;
            Ok(SignalReport { label: name.into(), seed, ..rep.signal })
        }
    }
}

/// `Tr_N(ρ'_{1N})` against `Tr_N(ρ_{1N})` for `ρ' = id ⊗ M_N(ρ)` on an
/// isolated pair; a single-point report at `t = 0`.
pub fn run_two_qubit_baseline(rho_1n: &DenseOperator, channel: &QuantumChannel) -> Result<SignalReport> {
    if rho_1n.sites() != 2 {
        return Err(Error::InvalidState(format!("expected a two-qubit state, got {} sites", rho_1n.sites())));
    }
    rho_1n.validate_state()?;
    let measured = apply_channel(channel, rho_1n, 2)?;
    let traced = SiteSet::from_sites(2, &[2])?;
    let d = half_trace_norm(&partial_trace(&measured.sub(rho_1n), &traced)?);
    Ok(SignalReport::new("baseline", None, vec![0.0], vec![d], Thresholds::BASELINE))
}

/// A measurement of duration `δ`, modelled as evolution of `ω` up to `δ`
/// followed by the instantaneous channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDurationReport {
    /// Distances at `t = δ + s` for each grid point `s`.
    pub signal: SignalReport,
    pub delta: f64,
    /// `ρ_SE(δ)` is a product `ρ_{SẼ} ⊗ ρ_n` with `ρ_n` in the Bloch xy-plane,
    /// within [`STRUCTURE_TOL`].
    pub conforming_at_delta: bool,
    /// `‖e^{-iHδ} − I‖_max`.
    pub unitary_deviation: f64,
}

/// Tolerance of the product-structure check in [`run_finite_duration`].
pub const STRUCTURE_TOL: f64 = 1e-10;

/// `ω = e^{iHδ} ρ e^{-iHδ}`, so that evolving `ω` for `δ` returns `ρ`.
pub fn back_evolve(cfg: &ChainConfig, rho: &DenseOperator, delta: f64) -> Result<DenseOperator> {
    let prop = Propagator::new(&build_hamiltonian(cfg).to_dense()?)?;
    prop.evolve(rho, -delta)
}

/// Checks whether `rho` factors as `ρ_{SẼ} ⊗ ρ_n` with `r_z = 0` at `cut`.
pub fn has_conforming_structure(rho: &DenseOperator, cut: usize) -> Result<bool> {
    let sites = rho.sites();
    let at_n = SiteSet::from_sites(sites, &[cut])?;
    let rest = at_n.complement();
    let rho_rest = partial_trace(rho, &at_n)?;
    let rho_n = partial_trace(rho, &rest)?;
    let product = rho_rest.insert_site(&rho_n, cut)?;
    let rz = (rho_n.get(0, 0) - rho_n.get(1, 1)).re;
    Ok(product.max_abs_diff(rho) <= STRUCTURE_TOL && rz.abs() <= STRUCTURE_TOL)
}

/// Evolves `ω` to `δ`, applies the channel on spin `N`, and compares
/// evolved-then-measured with evolved-only on `S` for `t = δ + s`.
pub fn run_finite_duration(
    cfg: &ChainConfig,
    omega: &DenseOperator,
    channel: &QuantumChannel,
    delta: f64,
    thresholds: Thresholds,
) -> Result<FiniteDurationReport> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidConfig(format!("δ must be finite and non-negative, got {delta}")));
    }
    cfg.check_theorem_scope()?;
    omega.validate_state()?;
    let h = build_hamiltonian(cfg);
    let prop = Propagator::new(&h.to_dense()?)?;
    let rho = prop.evolve(omega, delta)?;
    let sigma = apply_channel(channel, &rho, cfg.sites())?;
    let diff = prop.prepare(&sigma.sub(&rho))?;
    let env = cfg.environment();
    let grid = cfg.time_grid().points();
    let distances = grid
        .iter()
        .map(|&s| Ok(half_trace_norm(&partial_trace(&diff.at(s), &env)?)))
        .collect::<Result<Vec<_>>>()?;
    let times = grid.iter().map(|s| s + delta).collect();
    let u = prop.spectral().unitary(delta);
    let unitary_deviation = u.sub(&DenseOperator::identity(cfg.sites())?).max_abs();
    Ok(FiniteDurationReport {
        signal: SignalReport::new("finite_duration", None, times, distances, thresholds),
        delta,
        conforming_at_delta: has_conforming_structure(&rho, cfg.cut())?,
        unitary_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn cfg(sites: usize, cut: usize) -> ChainConfig {
        ChainConfig::new(sites, cut).unwrap()
    }

    #[test]
    fn classify_thresholds() {
        let th = Thresholds::default();
        assert_eq!(th.classify(0.0), Verdict::NoSignal);
        assert_eq!(th.classify(1e-9), Verdict::NoSignal);
        assert_eq!(th.classify(1e-6), Verdict::Inconclusive);
        assert_eq!(th.classify(2e-3), Verdict::Signal);
    }

    #[test]
    fn report_bookkeeping() {
        let rep = SignalReport::new("x", Some(3), vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 0.2], Thresholds::default());
        assert_eq!(rep.max_distance, 0.5);
        assert_eq!(rep.first_signal_time, Some(1.0));
        assert_eq!(rep.verdict, Verdict::Signal);
        assert_eq!(rep.to_csv().lines().next(), Some("t,distance"));
        assert_eq!(rep.to_csv().lines().count(), 4);
    }

    #[test]
    fn projective_z_example() {
        let c = cfg(3, 2);
        let rho = random_density(2, DEFAULT_MIX_WEIGHT, &mut rng(4)).unwrap();
        let spec = InitialStateSpec::conforming(rho, 0.6, -0.2).unwrap();
        let rep = run_no_signaling(&c, &spec, &QuantumChannel::projective_z(), Thresholds::default()).unwrap();
        assert_eq!(rep.times.len(), 101);
        assert!(rep.max_distance <= 1e-10, "{}", rep.max_distance);
        assert_eq!(rep.verdict, Verdict::NoSignal);
    }

    #[test]
    fn identity_channel_gives_exact_zero() {
        let c = cfg(4, 2);
        let draw = ConformingDraw::sample(4, 9, DEFAULT_MIX_WEIGHT).unwrap();
        let rep = run_no_signaling(&c, &draw.spec, &QuantumChannel::identity(), Thresholds::default()).unwrap();
        assert!(rep.distances.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn time_zero_only() {
        let c = cfg(3, 2).with_time_grid(TimeGrid::new(vec![0.0]).unwrap());
        let draw = ConformingDraw::sample(3, 1, DEFAULT_MIX_WEIGHT).unwrap();
        let rep = run_no_signaling(&c, &draw.spec, &draw.channel, Thresholds::default()).unwrap();
        assert!(rep.max_distance < 1e-14);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let rho = random_density(2, 0.3, &mut rng(0)).unwrap();
        let rz = InitialStateSpec::with_rz(rho.clone(), 0.0, 0.0, 0.5).unwrap();
        let ch = QuantumChannel::projective_x();
        assert!(matches!(
            run_no_signaling(&cfg(3, 2), &rz, &ch, Thresholds::default()),
            Err(Error::Precondition(_))
        ));
        let spec = InitialStateSpec::conforming(rho, 0.0, 0.0).unwrap();
        let fielded = cfg(3, 2).with_field(3, 1.0).unwrap();
        assert!(run_no_signaling(&fielded, &spec, &ch, Thresholds::default()).is_err());
    }

    #[test]
    fn transverse_field_everywhere_signals() {
        let spec = ScenarioSpec::new(Scenario::WrongHamiltonian { field: 0.8 }, 3, 2, 5);
        let rep = run_counterexample(&spec).unwrap();
        assert_eq!(rep.verdict, Verdict::Signal, "{}", rep.max_distance);
        assert!(rep.first_signal_time.unwrap() > 0.0);
    }

    #[test]
    fn bn_field_control_arm() {
        // b_N = 0: both arms share one Hamiltonian.
        let spec = ScenarioSpec::new(Scenario::BnField { b_n: 0.0 }, 3, 2, 2);
        let rep = run_counterexample(&spec).unwrap();
        assert_eq!(rep.max_distance, 0.0);
    }

    #[test]
    fn baseline_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let phi = DenseOperator::pure(2, &[real(s), z, z, real(s)]).unwrap();
        let rep = run_two_qubit_baseline(&phi, &QuantumChannel::projective_z()).unwrap();
        assert!(rep.max_distance <= 1e-15);
        assert_eq!(rep.verdict, Verdict::NoSignal);
        let traced = SiteSet::from_sites(2, &[2]).unwrap();
        let before = partial_trace(&phi, &traced).unwrap();
        assert!(before.max_abs_diff(&DenseOperator::identity(1).unwrap().scale(real(0.5))) < 1e-15);
        assert!(run_two_qubit_baseline(&DenseOperator::identity(3).unwrap(), &QuantumChannel::identity()).is_err());
    }

    #[test]
    fn finite_duration_at_zero_matches_instantaneous() {
        let c = cfg(3, 2);
        let draw = ConformingDraw::sample(3, 12, DEFAULT_MIX_WEIGHT).unwrap();
        let rho = build_initial_state(&draw.spec, &c).unwrap();
        let rep = run_finite_duration(&c, &rho, &draw.channel, 0.0, Thresholds::default()).unwrap();
        let direct = run_no_signaling(&c, &draw.spec, &draw.channel, Thresholds::default()).unwrap();
        assert_eq!(rep.signal.distances, direct.distances);
        assert!(rep.conforming_at_delta);
        assert_eq!(rep.unitary_deviation, 0.0);
    }

    #[test]
    fn back_evolved_states_conform_at_delta() {
        let c = cfg(4, 2);
        let draw = ConformingDraw::sample(4, 3, DEFAULT_MIX_WEIGHT).unwrap();
        let rho = build_initial_state(&draw.spec, &c).unwrap();
        let omega = back_evolve(&c, &rho, 0.7).unwrap();
        let rep = run_finite_duration(&c, &omega, &draw.channel, 0.7, Thresholds::default()).unwrap();
        assert!(rep.conforming_at_delta);
        assert_eq!(rep.signal.verdict, Verdict::NoSignal);
        assert!(rep.unitary_deviation > 0.1);
    }

    #[test]
    fn perturbation_is_traceless_on_the_measured_spin() {
        let c = cfg(3, 2);
        let draw = ConformingDraw::sample(3, 8, DEFAULT_MIX_WEIGHT).unwrap();
        let (rho, sigma) = measurement_pair(&c, &draw.spec, &draw.channel).unwrap();
        let r = perturbation(&rho, &sigma).unwrap();
        assert!(r.partial_trace(&SiteSet::from_sites(3, &[3]).unwrap()).unwrap().is_zero());
    }
}
