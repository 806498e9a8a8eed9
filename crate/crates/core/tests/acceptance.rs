//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p nosignal --test acceptance`.

use std::process::ExitCode;

use nalgebra::Matrix2;
use num_complex::Complex64;
use nosignal::dense::{embed, partial_trace, DenseOperator};
use nosignal::experiments::{
    back_evolve, measurement_pair, perturbation, run_counterexample, run_finite_duration,
    run_no_signaling, run_two_qubit_baseline, ConformingDraw, Scenario, ScenarioSpec, Thresholds,
    Verdict,
};
use nosignal::model::{build_hamiltonian, build_initial_state, ChainConfig, QuantumChannel};
use nosignal::pauli::{Pauli, PauliLabel, PauliSum, SiteSet};
use nosignal::random::{random_density, random_pauli_sum, rng, CoeffKind, DEFAULT_MIX_WEIGHT};
use nosignal::series::{
    bch_partial_sum, check_lemma2_step, check_traceless_series, compute_a_series, verify_lemma1,
    DEFAULT_DEPTH,
};
use nosignal::Result;

const NO_SIGNAL_TOL: f64 = 1e-9;
const SIGNAL_THRESHOLD: f64 = 1e-3;
const LEMMA1_TOL: f64 = 1e-12;
const BCH_TOL: f64 = 1e-8;
const BASELINE_TOL: f64 = 1e-12;
const CROSS_ENGINE_TOL: f64 = 1e-12;
const SEPARATION_FRACTION: f64 = 0.9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn thresholds() -> Thresholds {
    Thresholds { no_signal_tol: NO_SIGNAL_TOL, signal_threshold: SIGNAL_THRESHOLD }
}

fn not_identity_on(mask: u64) -> impl Fn(PauliLabel) -> bool {
    move |l: PauliLabel| l.support_mask() & mask != 0
}

fn dense_no_signalling() -> Result<Outcome> {
    let (mut cells, mut worst) = (0, 0.0f64);
    let mut failures = 0;
    for sites in 3..=6 {
        for cut in 2..sites {
            let cfg = ChainConfig::new(sites, cut)?;
            for draw in 0..25u64 {
                let seed = 1000 * sites as u64 + 100 * cut as u64 + draw;
                let d = ConformingDraw::sample(sites, seed, DEFAULT_MIX_WEIGHT)?;
                let rep = run_no_signaling(&cfg, &d.spec, &d.channel, thresholds())?;
                worst = worst.max(rep.max_distance);
                failures += usize::from(rep.verdict != Verdict::NoSignal);
                cells += 1;
            }
        }
    }
    outcome(failures == 0, format!("{cells} runs, {failures} failing, max distance {worst:.2e}"))
}

fn symbolic_no_signalling() -> Result<Outcome> {
    let mut runs = 0;
    let mut failures = Vec::new();
    for sites in 3..=5 {
        for cut in 2..sites {
            let cfg = ChainConfig::new(sites, cut)?;
            let h = build_hamiltonian(&cfg);
            for draw in 0..3u64 {
                let seed = 2000 + 100 * sites as u64 + 10 * cut as u64 + draw;
                let d = ConformingDraw::sample(sites, seed, DEFAULT_MIX_WEIGHT)?;
                let (rho, sigma) = measurement_pair(&cfg, &d.spec, &d.channel)?;
                let series = compute_a_series(&perturbation(&rho, &sigma)?, &h, DEFAULT_DEPTH)?;
                let rep = check_traceless_series(&series, cut)?;
                if !(rep.all_traceless() && rep.all_graded_traceless()) {
                    failures.push(format!("N={sites} n={cut} seed={seed}"));
                }
                runs += 1;
            }
        }
    }
    outcome(failures.is_empty(), format!("{runs} series to K={DEFAULT_DEPTH}, failing: {failures:?}"))
}

fn dual_route_equality() -> Result<Outcome> {
    let sites = 4;
    let mut r = rng(3000);
    let (mut equal, mut carried) = (0, 0);
    for i in 0..100 {
        let cut = 2 + i % 2;
        let h = build_hamiltonian(&ChainConfig::new(sites, cut)?);
        let tilde = SiteSet::environment_tilde(sites, cut)?.without_site(cut)?;
        let traceless = not_identity_on(tilde.mask());
        let c0 = random_pauli_sum(sites - 1, 6, CoeffKind::Dyadic, &mut r, &traceless)?;
        let c3 = random_pauli_sum(sites - 1, 6, CoeffKind::Dyadic, &mut r, &traceless)?;
        let c1 = random_pauli_sum(sites - 1, 4, CoeffKind::Dyadic, &mut r, |_| true)?;
        let c2 = random_pauli_sum(sites - 1, 4, CoeffKind::Dyadic, &mut r, |_| true)?;
        let a = PauliSum::compose_at_site([&c0, &c1, &c2, &c3], cut)?;
        let step = check_lemma2_step(&a, &h, cut)?;
        equal += usize::from(step.d3_routes_equal && step.d3_max_deviation == 0.0);
        carried += usize::from(step.c0_traceless && step.c3_traceless && step.induction_holds());
    }
    outcome(equal == 100 && carried == 100, format!("exact D3 equality {equal}/100, tracelessness carried {carried}/100"))
}

fn trace_identities() -> Result<Outcome> {
    let mut r = rng(4000);
    let (mut held, mut worst) = (0, 0.0f64);
    for i in 0..50 {
        let sites = 3 + i % 2;
        let cut = 2 + (i / 2) % (sites - 1);
        let env = SiteSet::environment(sites, cut)?;
        let sys_mask = env.complement().mask();
        let a = random_pauli_sum(sites, 8, CoeffKind::Gaussian, &mut r, not_identity_on(env.mask()))?;
        let h_s = random_pauli_sum(sites, 4, CoeffKind::RealGaussian, &mut r, |l| {
            l.support_mask() & env.mask() == 0
        })?;
        let h_e = random_pauli_sum(sites, 4, CoeffKind::RealGaussian, &mut r, |l| {
            l.support_mask() & sys_mask == 0
        })?;
        let rep = verify_lemma1(&a, &h_s, &h_e, &env)?;
        worst = rep.dense.iter().copied().fold(worst, f64::max);
        held += usize::from(rep.symbolic.iter().all(|&b| b) && rep.dense.iter().all(|&d| d <= LEMMA1_TOL));
    }
    outcome(held == 50, format!("{held}/50 hold, worst dense residual {worst:.2e}"))
}

fn bch_consistency() -> Result<Outcome> {
    let cfg = ChainConfig::new(3, 2)?;
    let h = build_hamiltonian(&cfg);
    let hd = h.to_dense()?;
    let mut r = rng(5000);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let op = random_pauli_sum(3, 12, CoeffKind::Gaussian, &mut r, |_| true)?;
        let exact = nosignal::dense::evolve(&hd, &op.to_dense()?, 0.1)?;
        worst = worst.max(bch_partial_sum(&op, &h, 0.1, 20)?.max_abs_diff(&exact));
    }
    outcome(worst <= BCH_TOL, format!("max-entry error {worst:.2e} at K=20, t=0.1"))
}

fn two_qubit_baseline() -> Result<Outcome> {
    let mut r = rng(6000);
    let channels: Vec<QuantumChannel> =
        (0..10).map(|i| QuantumChannel::random(6100 + i, 2 + 2 * (i as usize % 2))).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let rho = random_density(2, DEFAULT_MIX_WEIGHT, &mut r)?;
        for ch in &channels {
            worst = worst.max(run_two_qubit_baseline(&rho, ch)?.max_distance);
        }
    }
    outcome(worst <= BASELINE_TOL, format!("500 pairs, max distance {worst:.2e}"))
}

fn counterexample_separation() -> Result<Outcome> {
    let (mut rz_hits, mut bn_hits) = (0, 0);
    let (mut rz_worst, mut bn_worst) = (0.0f64, 0.0f64);
    for draw in 0..50u64 {
        let rz = ScenarioSpec::new(Scenario::RzViolation { rz: 0.8 }, 3, 2, 7000 + draw)
            .with_channel(QuantumChannel::projective_x());
        let rep = run_counterexample(&rz)?;
        rz_worst = rz_worst.max(rep.max_distance);
        rz_hits += usize::from(rep.max_distance > SIGNAL_THRESHOLD);

        let bn = ScenarioSpec::new(Scenario::BnField { b_n: 1.0 }, 3, 2, 7100 + draw);
        let rep = run_counterexample(&bn)?;
        bn_worst = bn_worst.max(rep.max_distance);
        bn_hits += usize::from(rep.max_distance > SIGNAL_THRESHOLD);
    }
    let need = (SEPARATION_FRACTION * 50.0).ceil() as usize;
    outcome(
        rz_hits >= need && bn_hits >= need,
        format!(
            "r_z arm {rz_hits}/50 (max {rz_worst:.2e}), b_N arm {bn_hits}/50 (max {bn_worst:.2e}), need {need}/50 each"
        ),
    )
}

fn dense_site_component(a: &DenseOperator, site: usize, p: Pauli) -> Result<DenseOperator> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    let sigma = match p {
        Pauli::I => Matrix2::new(o, z, z, o),
        Pauli::X => Matrix2::new(z, o, o, z),
        Pauli::Y => Matrix2::new(z, c(0.0, -1.0), c(0.0, 1.0), z),
        Pauli::Z => Matrix2::new(o, z, z, -o),
    };
    let local = embed(&DenseOperator::qubit(sigma), &[site], a.sites())?;
    let traced = SiteSet::from_sites(a.sites(), &[site])?;
    Ok(partial_trace(&local.mul(a), &traced)?.scale(c(0.5, 0.0)))
}

fn cross_engine() -> Result<Outcome> {
    let sites = 4;
    let mut r = rng(8000);
    let mut worst = 0.0f64;
    for i in 0..25 {
        let a = random_pauli_sum(sites, 10, CoeffKind::Gaussian, &mut r, |_| true)?;
        let b = random_pauli_sum(sites, 10, CoeffKind::Gaussian, &mut r, |_| true)?;
        let (ad, bd) = (a.to_dense()?, b.to_dense()?);
        let traced = SiteSet::from_sites(sites, &[1 + i % 4, 1 + (i + 2) % 4])?;
        worst = worst.max(a.partial_trace(&traced)?.to_dense()?.max_abs_diff(&partial_trace(&ad, &traced)?));
        worst = worst.max(a.commutator(&b)?.to_dense()?.max_abs_diff(&ad.commutator(&bd)));
        let site = 1 + i % sites;
        let parts = a.decompose_at_site(site)?;
        for (p, part) in Pauli::ALL.into_iter().zip(&parts) {
            worst = worst.max(part.to_dense()?.max_abs_diff(&dense_site_component(&ad, site, p)?));
        }
    }
    outcome(worst <= CROSS_ENGINE_TOL, format!("25 operators, max-entry disagreement {worst:.2e}"))
}

fn finite_delta() -> Result<Outcome> {
    let sites = 4;
    let (mut ok, mut runs, mut worst) = (0, 0, 0.0f64);
    for delta in [0.1, 1.0] {
        for cut in 2..sites {
            let cfg = ChainConfig::new(sites, cut)?;
            for draw in 0..5u64 {
                let d = ConformingDraw::sample(sites, 9000 + 10 * cut as u64 + draw, DEFAULT_MIX_WEIGHT)?;
                let rho = build_initial_state(&d.spec, &cfg)?;
                let omega = back_evolve(&cfg, &rho, delta)?;
                let rep = run_finite_duration(&cfg, &omega, &d.channel, delta, thresholds())?;
                worst = worst.max(rep.signal.max_distance);
                ok += usize::from(rep.conforming_at_delta && rep.signal.verdict == Verdict::NoSignal);
                runs += 1;
            }
        }
    }
    outcome(ok == runs, format!("{ok}/{runs} no-signal with conforming structure at δ, max distance {worst:.2e}"))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("no-signalling, dense, N=3..6", dense_no_signalling),
        ("no-signalling, symbolic series", symbolic_no_signalling),
        ("D3 dual-route equality", dual_route_equality),
        ("trace identities audit", trace_identities),
        ("commutator-series conjugation", bch_consistency),
        ("two-qubit baseline", two_qubit_baseline),
        ("counterexample separation", counterexample_separation),
        ("cross-engine agreement", cross_engine),
        ("finite-duration construction", finite_delta),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("[{}] criterion {}: {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
