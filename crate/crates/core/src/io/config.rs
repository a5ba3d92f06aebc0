//! Flat `key = value` run configuration.
//!
//! One pair per line; `#` starts a comment. Keys accept a descriptive name
//! and the usual model symbol (`rate` or `r`, `participation_cost` or `g`,
//! and so on). Command-line overrides are applied after the file, then the
//! whole configuration is validated.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::agent::{LearningParams, PayoffComparison};
use crate::dynamics::DynamicsMode;
use crate::network::{DensityConvention, GraphParams};
use crate::payoffs::{GameRule, ParamError, PggParams, PoolSharing, SimplexState};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("override {key}: {msg}")]
    Override { key: String, msg: String },
    #[error("unknown configuration keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<ParamError> for ConfigError {
    fn from(e: ParamError) -> Self {
        let ParamError::Invalid { field, reason } = e;
        ConfigError::Invalid {
            field: field.to_string(),
            reason,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Replicator,
    Mutator,
    Network,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensitySource {
    /// Use the `density` value directly.
    Fixed,
    /// Generate G(n, p) from `nodes`, `edge_prob` and `seed`.
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Ode,
    Abm,
}

/// Parameter axes of a sweep. An empty axis keeps the base value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepAxes {
    pub rate: Vec<f64>,
    pub participation_cost: Vec<f64>,
    pub mutation: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pgg: PggParams,
    pub learning: LearningParams,
    pub nodes: usize,
    pub edge_prob: f64,
    pub mode: ModeKind,
    pub density: f64,
    pub density_source: DensitySource,
    pub density_convention: DensityConvention,
    pub initial: [f64; 3],
    pub dt: f64,
    pub steps: usize,
    pub generations: usize,
    pub seed: u64,
    /// Frequency floor for the integrator; 0 disables it.
    pub floor: f64,
    /// Trailing fraction of a run summarized by `sweep`.
    pub window: f64,
    pub sweep: SweepAxes,
    pub sweep_kind: SweepKind,
    pub replicates: usize,
    /// `(a, b, c)` levels of the 2x2 game solved by `equilibrium`.
    pub game: [f64; 3],
    pub out: Option<PathBuf>,
    pub plot: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pgg: PggParams::default(),
            learning: LearningParams::default(),
            nodes: 100,
            edge_prob: 0.1,
            mode: ModeKind::Mutator,
            density: 1.0,
            density_source: DensitySource::Fixed,
            density_convention: DensityConvention::StandardDensity,
            initial: [0.9, 0.05, 0.05],
            dt: 0.01,
            steps: 100_000,
            generations: 10_000,
            seed: 1,
            floor: 0.0,
            window: 0.5,
            sweep: SweepAxes::default(),
            sweep_kind: SweepKind::Ode,
            replicates: 1,
            game: [2.0, 1.0, 0.0],
            out: None,
            plot: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("cannot parse {v:?}: {e}"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("expected a boolean, got {v:?}")),
    }
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_num::<f64>)
        .collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Outcome of assigning one key.
enum Assign {
    Done,
    Unknown,
}

impl RunConfig {
    fn assign(&mut self, key: &str, v: &str) -> Result<Assign, String> {
        match key {
            "population" | "M" => self.pgg.population = parse_num(v)?,
            "sample" | "N" => self.pgg.sample = parse_num(v)?,
            "rounds" | "tt" => self.learning.rounds = parse_num(v)?,
            "generations" | "t" => self.generations = parse_num(v)?,
            "participation_cost" | "g" => self.pgg.participation_cost = parse_num(v)?,
            "cost" | "c" => self.pgg.cost = parse_num(v)?,
            "rate" | "r" => self.pgg.rate = parse_num(v)?,
            "mutation" | "u" => self.pgg.mutation = parse_num(v)?,
            "beta" | "s" | "w" => self.learning.beta = parse_num(v)?,
            "imitation" | "pr" => self.learning.imitation = parse_num(v)?,
            "exploration" | "pe" => self.learning.exploration = parse_num(v)?,
            "increment_mean" | "mu" => self.learning.increment_mean = parse_num(v)?,
            "increment_sd" | "sigma" => self.learning.increment_sd = parse_num(v)?,
            "comparison" => {
                self.learning.comparison = match v {
                    "realized" => PayoffComparison::Realized,
                    "expected" => PayoffComparison::Expected,
                    _ => return Err(format!("expected realized|expected, got {v:?}")),
                }
            }
            "charge_participation" => self.pgg.charge_participation = parse_bool(v)?,
            "pool" => {
                self.pgg.pool = match v {
                    "coplayers" => PoolSharing::Coplayers,
                    "sample" => PoolSharing::Sample,
                    _ => return Err(format!("expected coplayers|sample, got {v:?}")),
                }
            }
            "game_rule" => {
                self.pgg.rule = match v {
                    "any_two" => GameRule::AnyTwo,
                    "cooperator_and_defector" => GameRule::CooperatorAndDefector,
                    _ => return Err(format!("expected any_two|cooperator_and_defector, got {v:?}")),
                }
            }
            "nodes" | "n" => self.nodes = parse_num(v)?,
            "edge_prob" | "p" => self.edge_prob = parse_num(v)?,
            "mode" => {
                self.mode = match v {
                    "replicator" => ModeKind::Replicator,
                    "mutator" => ModeKind::Mutator,
                    "network" => ModeKind::Network,
                    _ => return Err(format!("expected replicator|mutator|network, got {v:?}")),
                }
            }
            "density" | "ND" => self.density = parse_num(v)?,
            "density_source" => {
                self.density_source = match v {
                    "fixed" => DensitySource::Fixed,
                    "graph" => DensitySource::Graph,
                    _ => return Err(format!("expected fixed|graph, got {v:?}")),
                }
            }
            "density_convention" => {
                self.density_convention = match v {
                    "standard" => DensityConvention::StandardDensity,
                    "ties" => DensityConvention::TieFactor,
                    _ => return Err(format!("expected standard|ties, got {v:?}")),
                }
            }
            "initial" => {
                let xs = parse_list(v)?;
                self.initial = xs
                    .try_into()
                    .map_err(|_| "initial needs three comma-separated frequencies".to_string())?;
            }
            "dt" => self.dt = parse_num(v)?,
            "steps" => self.steps = parse_num(v)?,
            "seed" => self.seed = parse_num(v)?,
            "floor" => self.floor = parse_num(v)?,
            "window" => self.window = parse_num(v)?,
            "sweep_r" => self.sweep.rate = parse_list(v)?,
            "sweep_g" => self.sweep.participation_cost = parse_list(v)?,
            "sweep_u" => self.sweep.mutation = parse_list(v)?,
            "sweep_density" => self.sweep.density = parse_list(v)?,
            "sweep_kind" => {
                self.sweep_kind = match v {
                    "ode" => SweepKind::Ode,
                    "abm" => SweepKind::Abm,
                    _ => return Err(format!("expected ode|abm, got {v:?}")),
                }
            }
            "replicates" => self.replicates = parse_num(v)?,
            "game_a" => self.game[0] = parse_num(v)?,
            "game_b" => self.game[1] = parse_num(v)?,
            "game_c" => self.game[2] = parse_num(v)?,
            "out" => self.out = (!v.is_empty()).then(|| PathBuf::from(v)),
            "plot" => self.plot = parse_bool(v)?,
            _ => return Ok(Assign::Unknown),
        }
        Ok(Assign::Done)
    }

    /// Parses file text on top of the defaults, without validating.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut unknown = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: idx + 1,
                msg: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            match cfg.assign(key, value.trim()) {
                Ok(Assign::Done) => {}
                Ok(Assign::Unknown) => {
                    unknown.insert(key.to_string());
                }
                Err(msg) => return Err(ConfigError::Parse { line: idx + 1, msg: format!("{key}: {msg}") }),
            }
        }
        if !unknown.is_empty() {
            return Err(ConfigError::UnknownKeys(unknown.into_iter().collect()));
        }
        Ok(cfg)
    }

    pub fn apply_overrides(&mut self, overrides: &[(String, String)]) -> Result<(), ConfigError> {
        let mut unknown = Vec::new();
        for (key, value) in overrides {
            match self.assign(key, value.trim()) {
                Ok(Assign::Done) => {}
                Ok(Assign::Unknown) => unknown.push(key.clone()),
                Err(msg) => return Err(ConfigError::Override { key: key.clone(), msg }),
            }
        }
        if !unknown.is_empty() {
            return Err(ConfigError::UnknownKeys(unknown));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field: &str, reason: String| {
            Err(ConfigError::Invalid {
                field: field.to_string(),
                reason,
            })
        };
        self.pgg.validate()?;
        self.learning.validate()?;
        self.graph_params().validate().map_err(|e| ConfigError::Invalid {
            field: "edge_prob".into(),
            reason: e.to_string(),
        })?;
        if !(0.0..=1.0).contains(&self.density) {
            return invalid("density", format!("{} must lie in [0, 1]", self.density));
        }
        let [x, y, z] = self.initial;
        SimplexState::new(x, y, z).map_err(|e| ConfigError::Invalid {
            field: "initial".into(),
            reason: e.to_string(),
        })?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return invalid("dt", format!("{} must be > 0", self.dt));
        }
        if self.steps == 0 {
            return invalid("steps", "at least one step is required".into());
        }
        if !(0.0..1.0 / 3.0).contains(&self.floor) {
            return invalid("floor", format!("{} must lie in [0, 1/3)", self.floor));
        }
        if !(self.window > 0.0 && self.window <= 1.0) {
            return invalid("window", format!("{} must lie in (0, 1]", self.window));
        }
        if self.replicates == 0 {
            return invalid("replicates", "must be >= 1".into());
        }
        if let Some(d) = self.sweep.density.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return invalid("sweep_density", format!("{d} must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> SimplexState {
        let [x, y, z] = self.initial;
        SimplexState::new(x, y, z).expect("validated initial state")
    }

    pub fn graph_params(&self) -> GraphParams {
        GraphParams {
            nodes: self.nodes,
            edge_prob: self.edge_prob,
            seed: self.seed,
        }
    }

    /// Dynamics mode with an explicit density; the graph-derived density is
    /// resolved by the command layer.
    pub fn dynamics_mode(&self, density: f64) -> DynamicsMode {
        match self.mode {
            ModeKind::Replicator => DynamicsMode::Replicator,
            ModeKind::Mutator => DynamicsMode::ReplicatorMutator,
            ModeKind::Network => DynamicsMode::NetworkScaled { density },
        }
    }

    /// Serializes every key in canonical form.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let p = &self.pgg;
        let l = &self.learning;
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("population", p.population.to_string());
        kv("sample", p.sample.to_string());
        kv("rounds", l.rounds.to_string());
        kv("generations", self.generations.to_string());
        kv("participation_cost", p.participation_cost.to_string());
        kv("cost", p.cost.to_string());
        kv("rate", p.rate.to_string());
        kv("mutation", p.mutation.to_string());
        kv("beta", l.beta.to_string());
        kv("imitation", l.imitation.to_string());
        kv("exploration", l.exploration.to_string());
        kv("increment_mean", l.increment_mean.to_string());
        kv("increment_sd", l.increment_sd.to_string());
        kv(
            "comparison",
            match l.comparison {
                PayoffComparison::Realized => "realized",
                PayoffComparison::Expected => "expected",
            }
            .into(),
        );
        kv("charge_participation", p.charge_participation.to_string());
        kv(
            "pool",
            match p.pool {
                PoolSharing::Coplayers => "coplayers",
                PoolSharing::Sample => "sample",
            }
            .into(),
        );
        kv(
            "game_rule",
            match p.rule {
                GameRule::AnyTwo => "any_two",
                GameRule::CooperatorAndDefector => "cooperator_and_defector",
            }
            .into(),
        );
        kv("nodes", self.nodes.to_string());
        kv("edge_prob", self.edge_prob.to_string());
        kv(
            "mode",
            match self.mode {
                ModeKind::Replicator => "replicator",
                ModeKind::Mutator => "mutator",
                ModeKind::Network => "network",
            }
            .into(),
        );
        kv("density", self.density.to_string());
        kv(
            "density_source",
            match self.density_source {
                DensitySource::Fixed => "fixed",
                DensitySource::Graph => "graph",
            }
            .into(),
        );
        kv(
            "density_convention",
            match self.density_convention {
                DensityConvention::StandardDensity => "standard",
                DensityConvention::TieFactor => "ties",
            }
            .into(),
        );
        kv("initial", join(&self.initial));
        kv("dt", self.dt.to_string());
        kv("steps", self.steps.to_string());
        kv("seed", self.seed.to_string());
        kv("floor", self.floor.to_string());
        kv("window", self.window.to_string());
        kv("sweep_r", join(&self.sweep.rate));
        kv("sweep_g", join(&self.sweep.participation_cost));
        kv("sweep_u", join(&self.sweep.mutation));
        kv("sweep_density", join(&self.sweep.density));
        kv(
            "sweep_kind",
            match self.sweep_kind {
                SweepKind::Ode => "ode",
                SweepKind::Abm => "abm",
            }
            .into(),
        );
        kv("replicates", self.replicates.to_string());
        kv("game_a", self.game[0].to_string());
        kv("game_b", self.game[1].to_string());
        kv("game_c", self.game[2].to_string());
        kv(
            "out",
            self.out
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
        );
        kv("plot", self.plot.to_string());
        s
    }
}

/// Reads `path` (if any), applies `overrides` and validates.
pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            RunConfig::parse_str(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.apply_overrides(overrides)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_text(text: &str) -> Result<RunConfig, ConfigError> {
        let cfg = RunConfig::parse_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = load_text("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.pgg.rate, 3.0);
        assert_eq!(cfg.pgg.participation_cost, 0.5);
        assert_eq!(cfg.pgg.mutation, 1e-10);
        assert_eq!(cfg.pgg.population, 100);
        assert_eq!(cfg.pgg.sample, 5);
        assert_eq!(cfg.pgg.cost, 1.0);
        assert_eq!(cfg.generations, 10_000);
        assert_eq!(cfg.learning.rounds, 1);
        assert_eq!(cfg.learning.beta, 1.0);
        assert_eq!(cfg.nodes, 100);
    }

    #[test]
    fn single_override_in_file() {
        let cfg = load_text("# interest rate\nr = 1.8\n").unwrap();
        assert_eq!(cfg.pgg.rate, 1.8);
        assert_eq!(cfg, RunConfig { pgg: PggParams { rate: 1.8, ..PggParams::default() }, ..RunConfig::default() });
    }

    #[test]
    fn mutation_out_of_range_names_u() {
        match load_text("u = 2") {
            Err(ConfigError::Invalid { field, reason }) => {
                assert_eq!(field, "u");
                assert!(reason.contains("[0, 1]"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_listed() {
        match load_text("bogus = 1\nr = 2\nzzz = 3\n") {
            Err(ConfigError::UnknownKeys(keys)) => assert_eq!(keys, vec!["bogus", "zzz"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load_text("r = 2\n\ng = abc\n") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match load_text("r 2\n") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn selection_aliases() {
        assert_eq!(load_text("s = 0.4").unwrap().learning.beta, 0.4);
        assert_eq!(load_text("w = 0.7").unwrap().learning.beta, 0.7);
    }

    #[test]
    fn overrides_beat_file() {
        let mut cfg = RunConfig::parse_str("r = 2\n").unwrap();
        cfg.apply_overrides(&[("r".into(), "4".into())]).unwrap();
        assert_eq!(cfg.pgg.rate, 4.0);
        assert!(cfg.apply_overrides(&[("nope".into(), "1".into())]).is_err());
    }

    #[test]
    fn roundtrip_nondefault() {
        let mut cfg = RunConfig::default();
        cfg.pgg.rate = 1.8;
        cfg.pgg.pool = PoolSharing::Sample;
        cfg.learning.comparison = PayoffComparison::Expected;
        cfg.mode = ModeKind::Network;
        cfg.density = 0.9;
        cfg.sweep.mutation = vec![1e-10, 0.1];
        cfg.out = Some(PathBuf::from("runs/a.csv"));
        cfg.initial = [0.2, 0.3, 0.5];
        let back = load_text(&cfg.to_config_string()).unwrap();
        assert_eq!(back, cfg);
    }
}
