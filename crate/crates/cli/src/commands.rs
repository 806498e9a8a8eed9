use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use rayon::prelude::*;
use serde::Serialize;

use nosignal::dense::apply_channel;
use nosignal::experiments::{
    perturbation, run_counterexample, run_measurement, run_two_qubit_baseline, ConformingDraw,
    ScenarioSpec, SignalReport, Verdict,
};
use nosignal::model::{build_hamiltonian, build_initial_state, ChainConfig, QuantumChannel};
use nosignal::random::{random_density, rng};
use nosignal::series::{check_traceless_series, compute_a_series_capped, SeriesReport};
use nosignal::Error;

use crate::config::{Overrides, RunConfig};
use crate::manifest::{OutputSink, RunManifest};
use crate::Common;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const MISMATCH: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const RESOURCE: u8 = 3;
    pub const OTHER: u8 = 4;
}

/// A completed run: its verdict line and the files it wrote.
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn report(&self) -> ExitCode {
        for f in &self.files {
            println!("wrote {}", f.display());
        }
        if self.passed {
            println!("ok: {}", self.summary);
            ExitCode::from(exit::OK)
        } else {
            eprintln!("error[verdict]: verdict mismatch: {}", self.summary);
            ExitCode::from(exit::MISMATCH)
        }
    }
}

/// A run that could not complete.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Resource(String),
    Io(String),
    Other(String),
}

impl Failure {
    pub fn report(&self) -> ExitCode {
        let (kind, msg, code) = match self {
            Failure::Config(m) => ("config", m, exit::CONFIG),
            Failure::Resource(m) => ("resource", m, exit::RESOURCE),
            Failure::Io(m) => ("io", m, exit::OTHER),
            Failure::Other(m) => ("internal", m, exit::OTHER),
        };
        eprintln!("error[{kind}]: {msg}");
        ExitCode::from(code)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::TermCap { .. } | Error::DenseLimit { .. } | Error::SymbolicLimit { .. } => {
                Failure::Resource(msg)
            }
            Error::InvalidConfig(_)
            | Error::Parse { .. }
            | Error::InvalidState(_)
            | Error::InvalidChannel { .. }
            | Error::Precondition(_)
            | Error::Structure(_)
            | Error::SiteOutOfRange { .. } => Failure::Config(msg),
            _ => Failure::Other(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<Outcome, Failure>;

struct Setup {
    cfg: RunConfig,
    sink: OutputSink,
    manifest: RunManifest,
}

fn setup(command: &str, common: &Common, optional: bool) -> Result<Setup, Failure> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?.0,
        None if optional => RunConfig::baseline_default(),
        None => return Err(Failure::Config(format!("`{command}` requires --config PATH"))),
    };
    cfg.apply(&Overrides { seed: common.seed, grid: common.grid.clone(), depth: common.depth });
    let manifest = RunManifest::new(command, common.config.as_deref(), &cfg, &common.out);
    let sink = OutputSink::new(&manifest);
    Ok(Setup { cfg, sink, manifest })
}

#[derive(Serialize)]
struct SignalSummary<'a> {
    manifest_hash: &'a str,
    config_hash: &'a str,
    seed: u64,
    label: &'a str,
    verdict: Verdict,
    expected_verdict: Verdict,
    max_distance: f64,
    first_signal_time: Option<f64>,
    no_signal_tol: f64,
    signal_threshold: f64,
}

fn signal_summary<'a>(m: &'a RunManifest, rep: &'a SignalReport, expected: Verdict) -> SignalSummary<'a> {
    SignalSummary {
        manifest_hash: &m.manifest_hash,
        config_hash: &m.config_hash,
        seed: m.seed,
        label: &rep.label,
        verdict: rep.verdict,
        expected_verdict: expected,
        max_distance: rep.max_distance,
        first_signal_time: rep.first_signal_time,
        no_signal_tol: rep.thresholds.no_signal_tol,
        signal_threshold: rep.thresholds.signal_threshold,
    }
}

#[derive(Serialize)]
struct SeriesExport<'a> {
    manifest_hash: &'a str,
    config_hash: &'a str,
    all_traceless: bool,
    graded_traceless: bool,
    induction_holds: bool,
    first_failure: Option<usize>,
    report: &'a SeriesReport,
}

fn series_report(cfg: &RunConfig, chain: &ChainConfig, channel: &QuantumChannel) -> Result<SeriesReport, Failure> {
    let spec = cfg.initial_state()?;
    let rho = build_initial_state(&spec, chain)?;
    let sigma = apply_channel(channel, &rho, chain.sites())?;
    let r = perturbation(&rho, &sigma)?;
    let series = compute_a_series_capped(&r, &build_hamiltonian(chain), cfg.series.depth, cfg.series.term_cap)?;
    Ok(check_traceless_series(&series, chain.cut())?)
}

fn write_series(s: &mut Setup, rep: &SeriesReport) -> Result<(), Failure> {
    s.sink.text("series", "txt", &rep.to_text())?;
    s.sink.json(
        "series",
        &SeriesExport {
            manifest_hash: &s.manifest.manifest_hash,
            config_hash: &s.manifest.config_hash,
            all_traceless: rep.all_traceless(),
            graded_traceless: rep.all_graded_traceless(),
            induction_holds: rep.induction_holds(),
            first_failure: rep.first_failure(),
            report: rep,
        },
    )?;
    Ok(())
}

/// Hypotheses the theorem needs beyond structural validity; each entry is a
/// human-readable breach.
fn hypothesis_breaches(cfg: &RunConfig, chain: &ChainConfig) -> Vec<String> {
    let mut out = Vec::new();
    if let Some([_, _, rz]) = cfg.bloch {
        if rz != 0.0 {
            out.push(format!("spin n has r_z = {rz}, outside the Bloch xy-plane"));
        }
    }
    if let Some(j) = chain.fields().iter().position(|&b| b != 0.0) {
        out.push(format!("field b_{} = {} is nonzero", j + 1, chain.fields()[j]));
    }
    out
}

pub fn verify(common: &Common) -> CmdResult {
    let mut s = setup("verify", common, false)?;
    let chain = s.cfg.chain()?;
    if chain.sites() < 3 || chain.cut() > chain.sites() - 1 {
        chain.check_theorem_scope()?;
    }
    let channel = s.cfg.channel()?;
    let spec = s.cfg.initial_state()?;
    let breaches = hypothesis_breaches(&s.cfg, &chain);
    let dense = run_measurement(&chain, &spec, &channel, s.cfg.thresholds(), "verify", Some(s.cfg.seed))?;
    let series = series_report(&s.cfg, &chain, &channel)?;

    s.sink.text("verify", "csv", &dense.to_csv())?;
    #[derive(Serialize)]
    struct VerifySummary<'a> {
        #[serde(flatten)]
        signal: SignalSummary<'a>,
        hypotheses_hold: bool,
        hypothesis_breaches: &'a [String],
        series_all_traceless: bool,
        series_graded_traceless: bool,
        series_depth: usize,
    }
    let summary = VerifySummary {
        signal: signal_summary(&s.manifest, &dense, Verdict::NoSignal),
        hypotheses_hold: breaches.is_empty(),
        hypothesis_breaches: &breaches,
        series_all_traceless: series.all_traceless(),
        series_graded_traceless: series.all_graded_traceless(),
        series_depth: series.depth,
    };
    s.sink.json("verify", &summary)?;
    write_series(&mut s, &series)?;

    let passed = breaches.is_empty() && dense.verdict == Verdict::NoSignal && series.all_traceless();
    let text = if !breaches.is_empty() {
        format!("hypotheses violated: {}", breaches.join("; "))
    } else {
        format!(
            "dense verdict {} (max distance {:.3e}), series traceless through K = {}: {}",
            dense.verdict,
            dense.max_distance,
            series.depth,
            series.all_traceless()
        )
    };
    Ok(Outcome { passed, summary: text, files: s.sink.written })
}

pub fn series(common: &Common) -> CmdResult {
    let mut s = setup("series", common, false)?;
    let chain = s.cfg.chain()?;
    let channel = s.cfg.channel()?;
    let rep = series_report(&s.cfg, &chain, &channel)?;
    write_series(&mut s, &rep)?;
    let summary = match rep.first_failure() {
        None => format!("{} orders, Tr_E(A_k) = 0 at every order", rep.orders.len()),
        Some(k) => format!("Tr_E(A_k) first survives at k = {k}"),
    };
    Ok(Outcome { passed: rep.all_traceless(), summary, files: s.sink.written })
}

pub fn counterexample(common: &Common) -> CmdResult {
    let mut s = setup("counterexample", common, false)?;
    let scenario = s
        .cfg
        .scenario
        .clone()
        .ok_or_else(|| Failure::Config("`counterexample` needs a [scenario] table".into()))?;
    let spec = ScenarioSpec {
        scenario: scenario.clone(),
        sites: s.cfg.sites,
        cut: s.cfg.cut,
        channel: s.cfg.channel()?,
        seed: s.cfg.seed,
        mix_weight: s.cfg.mix_weight,
        grid: s.cfg.grid()?,
        thresholds: s.cfg.thresholds(),
    };
    let rep = run_counterexample(&spec)?;
    let expected = scenario.expected_verdict();
    s.sink.text("counterexample", "csv", &rep.to_csv())?;
    s.sink.json("counterexample", &signal_summary(&s.manifest, &rep, expected))?;
    let summary = format!(
        "{}: expected {expected}, got {} (max distance {:.3e})",
        scenario.name(),
        rep.verdict,
        rep.max_distance
    );
    Ok(Outcome { passed: rep.verdict == expected, summary, files: s.sink.written })
}

pub fn baseline(common: &Common) -> CmdResult {
    let mut s = setup("baseline", common, true)?;
    let rho = random_density(2, s.cfg.mix_weight, &mut rng(s.cfg.seed))?;
    let channel = s.cfg.channel()?;
    let rep = run_two_qubit_baseline(&rho, &channel)?;
    s.sink.json("baseline", &signal_summary(&s.manifest, &rep, Verdict::NoSignal))?;
    let summary = format!("channel {}: reduced-state change {:.3e}", channel.label(), rep.max_distance);
    Ok(Outcome { passed: rep.verdict == Verdict::NoSignal, summary, files: s.sink.written })
}

#[derive(Debug, Clone, Serialize)]
struct SweepCell {
    sites: usize,
    cut: usize,
    draws: u64,
    no_signal: u64,
    max_distance: f64,
}

fn draw_seed(base: u64, sites: usize, cut: usize, draw: u64) -> u64 {
    base ^ ((sites as u64) << 48) ^ ((cut as u64) << 40) ^ draw
}

pub fn sweep(common: &Common) -> CmdResult {
    let mut s = setup("sweep", common, false)?;
    let sw = s.cfg.sweep.clone().unwrap_or_default();
    let fixed_channel = match sw.channel.as_str() {
        "random" => None,
        name => Some(QuantumChannel::by_name(name)?),
    };
    let mut jobs = Vec::new();
    for &sites in &sw.sites {
        let cuts: Vec<usize> = match &sw.cuts {
            Some(c) => c.iter().copied().filter(|&n| n >= 2 && n < sites).collect(),
            None => (2..sites).collect(),
        };
        if cuts.is_empty() {
            return Err(Failure::Config(format!("no admissible cut 2 <= n <= N - 1 for N = {sites}")));
        }
        for cut in cuts {
            for draw in 0..sw.draws {
                jobs.push((sites, cut, draw));
            }
        }
    }
    let grid = s.cfg.grid()?;
    let thresholds = s.cfg.thresholds();
    let mix = s.cfg.mix_weight;
    let base = s.cfg.seed;
    let run = |&(sites, cut, draw): &(usize, usize, u64)| -> Result<(usize, usize, f64, bool), Error> {
        let chain = ChainConfig::new(sites, cut)?.with_time_grid(grid.clone());
        let d = ConformingDraw::sample(sites, draw_seed(base, sites, cut, draw), mix)?;
        let channel = fixed_channel.as_ref().unwrap_or(&d.channel);
        let rep = nosignal::experiments::run_no_signaling(&chain, &d.spec, channel, thresholds)?;
        Ok((sites, cut, rep.max_distance, rep.verdict == Verdict::NoSignal))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Other(e.to_string()))?;
    let results: Vec<_> = pool.install(|| jobs.par_iter().map(run).collect::<Result<Vec<_>, _>>())?;

    let mut cells: Vec<SweepCell> = Vec::new();
    for (sites, cut, d, ok) in results {
        match cells.last_mut() {
            Some(c) if c.sites == sites && c.cut == cut => {
                c.draws += 1;
                c.no_signal += u64::from(ok);
                c.max_distance = c.max_distance.max(d);
            }
            _ => cells.push(SweepCell { sites, cut, draws: 1, no_signal: u64::from(ok), max_distance: d }),
        }
    }
    let mut csv = String::from("sites,cut,draws,no_signal,max_distance\n");
    for c in &cells {
        writeln!(csv, "{},{},{},{},{:e}", c.sites, c.cut, c.draws, c.no_signal, c.max_distance).expect("string");
    }
    s.sink.text("sweep", "csv", &csv)?;
    let all = cells.iter().all(|c| c.no_signal == c.draws);
    #[derive(Serialize)]
    struct SweepSummary<'a> {
        manifest_hash: &'a str,
        config_hash: &'a str,
        seed: u64,
        all_no_signal: bool,
        cells: &'a [SweepCell],
    }
    s.sink.json(
        "sweep",
        &SweepSummary {
            manifest_hash: &s.manifest.manifest_hash,
            config_hash: &s.manifest.config_hash,
            seed: base,
            all_no_signal: all,
            cells: &cells,
        },
    )?;
    let total: u64 = cells.iter().map(|c| c.draws).sum();
    let ok: u64 = cells.iter().map(|c| c.no_signal).sum();
    let summary = format!("{ok}/{total} conforming draws without signal across {} cells", cells.len());
    Ok(Outcome { passed: all, summary, files: s.sink.written })
}
