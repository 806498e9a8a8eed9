use std::path::Path;

use serde::{Deserialize, Serialize};

use nosignal::experiments::{Scenario, Thresholds};
use nosignal::model::{ChainConfig, InitialStateSpec, QuantumChannel, TimeGrid};
use nosignal::random::{random_bloch_xy, random_density, rng, DEFAULT_MIX_WEIGHT};
use nosignal::series::{DEFAULT_DEPTH, DEFAULT_TERM_CAP};
use nosignal::{Error, Result};

/// A channel given by catalog name or by the seed of a random channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Seed(u64),
    Name(String),
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec::Name("projective_x".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { start: 0.0, stop: TimeGrid::DEFAULT_STOP, steps: TimeGrid::DEFAULT_STEPS }
    }
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, steps] = parts.as_slice() else {
            return Err(format!("expected START:STOP:STEPS, got `{s}`"));
        };
        Ok(GridSpec {
            start: start.parse().map_err(|e| format!("start: {e}"))?,
            stop: stop.parse().map_err(|e| format!("stop: {e}"))?,
            steps: steps.parse().map_err(|e| format!("steps: {e}"))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_term_cap")]
    pub term_cap: usize,
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

fn default_term_cap() -> usize {
    DEFAULT_TERM_CAP
}

impl Default for SeriesSpec {
    fn default() -> Self {
        SeriesSpec { depth: DEFAULT_DEPTH, term_cap: DEFAULT_TERM_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_sweep_sites")]
    pub sites: Vec<usize>,
    /// Cuts to visit; all of `2..=N-1` when absent.
    #[serde(default)]
    pub cuts: Option<Vec<usize>>,
    #[serde(default = "default_draws")]
    pub draws: u64,
    /// `"random"` draws a fresh random channel per draw.
    #[serde(default = "default_sweep_channel")]
    pub channel: String,
}

fn default_sweep_sites() -> Vec<usize> {
    vec![3, 4, 5, 6]
}

fn default_draws() -> u64 {
    25
}

fn default_sweep_channel() -> String {
    "random".into()
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { sites: default_sweep_sites(), cuts: None, draws: default_draws(), channel: default_sweep_channel() }
    }
}

fn default_mix_weight() -> f64 {
    DEFAULT_MIX_WEIGHT
}

fn default_ancilla() -> usize {
    2
}

/// The configuration file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub sites: usize,
    pub cut: usize,
    #[serde(default)]
    pub couplings: Option<Vec<f64>>,
    #[serde(default)]
    pub fields: Option<Vec<f64>>,
    /// Bloch vector of spin `n`; `(r_x, r_y)` drawn from the seed when absent.
    #[serde(default)]
    pub bloch: Option<[f64; 3]>,
    #[serde(default)]
    pub channel: ChannelSpec,
    #[serde(default = "default_ancilla")]
    pub ancilla_dim: usize,
    #[serde(default = "default_mix_weight")]
    pub mix_weight: f64,
    #[serde(default)]
    pub time_grid: GridSpec,
    #[serde(default)]
    pub series: SeriesSpec,
    #[serde(default)]
    pub thresholds: Option<Thresholds>,
    #[serde(default)]
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

/// Command-line overrides applied on top of a file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid: Option<GridSpec>,
    pub depth: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Ok((RunConfig::parse(&text)?, text))
    }

    /// Defaults used by commands that accept running without a file.
    pub fn baseline_default() -> Self {
        RunConfig {
            seed: 0,
            sites: 2,
            cut: 2,
            couplings: None,
            fields: None,
            bloch: None,
            channel: ChannelSpec::Seed(0),
            ancilla_dim: 2,
            mix_weight: DEFAULT_MIX_WEIGHT,
            time_grid: GridSpec::default(),
            series: SeriesSpec::default(),
            thresholds: None,
            scenario: None,
            sweep: None,
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(grid) = &o.grid {
            self.time_grid = grid.clone();
        }
        if let Some(depth) = o.depth {
            self.series.depth = depth;
        }
    }

    pub fn thresholds(&self) -> Thresholds {
        self.thresholds.unwrap_or_default()
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        let g = &self.time_grid;
        TimeGrid::linspace(g.start, g.stop, g.steps)
    }

    pub fn chain(&self) -> Result<ChainConfig> {
        let mut cfg = ChainConfig::new(self.sites, self.cut)?.with_time_grid(self.grid()?);
        if let Some(j) = &self.couplings {
            cfg = cfg.with_couplings(j.clone())?;
        }
        if let Some(b) = &self.fields {
            cfg = cfg.with_fields(b.clone())?;
        }
        Ok(cfg)
    }

    pub fn channel(&self) -> Result<QuantumChannel> {
        match &self.channel {
            ChannelSpec::Seed(seed) => QuantumChannel::random(*seed, self.ancilla_dim),
            ChannelSpec::Name(name) => QuantumChannel::by_name(name),
        }
    }

    /// `ρ_{SẼ}` mixed toward `I/d` with `mix_weight`, and spin `n` from
    /// `bloch` or a seeded draw in the xy-plane.
    pub fn initial_state(&self) -> Result<InitialStateSpec> {
        if self.sites < 2 {
            return Err(Error::InvalidConfig(format!("N = {} is too small for a state on S ∪ Ẽ", self.sites)));
        }
        let mut r = rng(self.seed);
        let rho = random_density(self.sites - 1, self.mix_weight, &mut r)?;
        let [x, y, z] = match self.bloch {
            Some(b) => b,
            None => {
                let (x, y) = random_bloch_xy(&mut r);
                [x, y, 0.0]
            }
        };
        InitialStateSpec::with_rz(rho, x, y, z)
    }
}
