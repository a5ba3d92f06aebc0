//! The five subcommands: `ode`, `abm`, `graph`, `sweep`, `equilibrium`.
//!
//! Primary output goes to `cfg.out` when set, otherwise to the supplied
//! writer. With `plot` enabled, `ode` and `abm` also write a ternary SVG
//! next to the output (`<out>.svg`, or `<command>.svg` without `out`).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use super::config::{ConfigError, DensitySource, ModeKind, RunConfig, SweepKind};
use super::csv::{abm_csv, ode_csv, sig};
use super::svg::{plot_simplex, PlotError};
use crate::agent::{run_abm_stream, Population, SimError};
use crate::analysis::{stats, AnalysisError, FrequencySeries, TrajectoryStats};
use crate::dynamics::{integrate, DynamicsError, DynamicsMode, IntegrateOptions, Trajectory};
use crate::game::{solve_abc, GameError};
use crate::network::{degree_sum, density_factor, generate_er, is_connected, NetworkError};
use crate::payoffs::PggParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ode,
    Abm,
    Graph,
    Sweep,
    Equilibrium,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ode => "ode",
            Command::Abm => "abm",
            Command::Graph => "graph",
            Command::Sweep => "sweep",
            Command::Equilibrium => "equilibrium",
        }
    }
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Files written and human-readable notes for stderr.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

fn write_file(path: &Path, content: &str) -> Result<(), CommandError> {
    std::fs::write(path, content).map_err(|source| CommandError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(cfg: &RunConfig, content: &str, stdout: &mut dyn Write, report: &mut Report) -> Result<(), CommandError> {
    match &cfg.out {
        Some(path) => {
            write_file(path, content)?;
            report.files.push(path.clone());
        }
        None => stdout
            .write_all(content.as_bytes())
            .map_err(|source| CommandError::Io {
                path: "<stdout>".into(),
                source,
            })?,
    }
    Ok(())
}

fn plot_path(cfg: &RunConfig, cmd: Command) -> PathBuf {
    match &cfg.out {
        Some(p) => p.with_extension("svg"),
        None => PathBuf::from(format!("{}.svg", cmd.name())),
    }
}

fn maybe_plot<T: FrequencySeries + ?Sized>(
    cfg: &RunConfig,
    cmd: Command,
    traj: &T,
    report: &mut Report,
) -> Result<(), CommandError> {
    if cfg.plot {
        let path = plot_path(cfg, cmd);
        plot_simplex(traj, &path)?;
        report.files.push(path);
    }
    Ok(())
}

/// The dynamics mode of `cfg`, generating a graph first when the density
/// comes from one.
pub fn resolve_mode(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<DynamicsMode, CommandError> {
    let density = match (cfg.mode, cfg.density_source) {
        (ModeKind::Network, DensitySource::Graph) => {
            let g = generate_er(&cfg.graph_params())?;
            let d = density_factor(&g, cfg.density_convention)?;
            notes.push(format!(
                "graph n={} edges={} density={}{}",
                g.node_count(),
                g.edge_count(),
                sig(d.value),
                if d.clipped { " (clipped to 1)" } else { "" }
            ));
            d.value
        }
        _ => cfg.density,
    };
    let mode = cfg.dynamics_mode(density);
    if let DynamicsMode::NetworkScaled { density } = mode {
        DynamicsMode::network(density)?;
    }
    Ok(mode)
}

fn integrate_opts(cfg: &RunConfig) -> IntegrateOptions {
    IntegrateOptions {
        dt: cfg.dt,
        steps: cfg.steps,
        floor: (cfg.floor > 0.0).then_some(cfg.floor),
    }
}

pub fn run_ode(cfg: &RunConfig, mode: DynamicsMode) -> Result<Trajectory, CommandError> {
    cfg.pgg.validate().map_err(ConfigError::from)?;
    Ok(integrate(cfg.initial_state(), &cfg.pgg, mode, integrate_opts(cfg))?)
}

fn ode(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Report, CommandError> {
    let mut report = Report::default();
    let mode = resolve_mode(cfg, &mut report.notes)?;
    let traj = run_ode(cfg, mode)?;
    emit(cfg, &ode_csv(&traj), stdout, &mut report)?;
    maybe_plot(cfg, Command::Ode, &traj, &mut report)?;
    Ok(report)
}

fn abm(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Report, CommandError> {
    let mut report = Report::default();
    let initial = Population::from_state(&cfg.initial_state(), cfg.pgg.population);
    let traj = run_abm_stream(&initial, &cfg.pgg, &cfg.learning, cfg.generations, cfg.seed, 0)?;
    if let Some(g) = traj.first_fixation() {
        report.notes.push(format!("fixation first reached at generation {g}"));
    }
    emit(cfg, &abm_csv(&traj), stdout, &mut report)?;
    maybe_plot(cfg, Command::Abm, &traj, &mut report)?;
    Ok(report)
}

fn graph(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Report, CommandError> {
    let mut report = Report::default();
    let g = generate_er(&cfg.graph_params())?;
    report.notes.push(format!(
        "nodes={} edges={} degree_sum={} connected={}",
        g.node_count(),
        g.edge_count(),
        degree_sum(&g),
        is_connected(&g)
    ));
    if g.node_count() >= 2 {
        let d = density_factor(&g, cfg.density_convention)?;
        report.notes.push(format!("density={}", sig(d.value)));
    }
    emit(cfg, &g.to_edge_list(), stdout, &mut report)?;
    Ok(report)
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub params: PggParams,
    pub mode: DynamicsMode,
    pub replicate: usize,
    pub stream: u64,
}

pub fn sweep_points(cfg: &RunConfig, base_mode: DynamicsMode) -> Vec<SweepPoint> {
    let axis = |v: &Vec<f64>, base: f64| if v.is_empty() { vec![base] } else { v.clone() };
    let rates = axis(&cfg.sweep.rate, cfg.pgg.rate);
    let costs = axis(&cfg.sweep.participation_cost, cfg.pgg.participation_cost);
    let mutations = axis(&cfg.sweep.mutation, cfg.pgg.mutation);
    let modes: Vec<DynamicsMode> = if cfg.sweep.density.is_empty() {
        vec![base_mode]
    } else {
        cfg.sweep
            .density
            .iter()
            .map(|&density| DynamicsMode::NetworkScaled { density })
            .collect()
    };
    let replicates = match cfg.sweep_kind {
        SweepKind::Ode => 1,
        SweepKind::Abm => cfg.replicates,
    };
    let mut points = Vec::new();
    for &rate in &rates {
        for &g in &costs {
            for &u in &mutations {
                for &mode in &modes {
                    for replicate in 0..replicates {
                        let stream = points.len() as u64;
                        points.push(SweepPoint {
                            params: PggParams {
                                rate,
                                participation_cost: g,
                                mutation: u,
                                ..cfg.pgg.clone()
                            },
                            mode,
                            replicate,
                            stream,
                        });
                    }
                }
            }
        }
    }
    points
}

fn run_point(cfg: &RunConfig, point: &SweepPoint) -> Result<TrajectoryStats, CommandError> {
    point.params.validate().map_err(ConfigError::from)?;
    let st = match cfg.sweep_kind {
        SweepKind::Ode => {
            let traj = integrate(cfg.initial_state(), &point.params, point.mode, integrate_opts(cfg))?;
            stats(&traj, cfg.window)?
        }
        SweepKind::Abm => {
            let initial = Population::from_state(&cfg.initial_state(), point.params.population);
            let traj = run_abm_stream(
                &initial,
                &point.params,
                &cfg.learning,
                cfg.generations,
                cfg.seed,
                point.stream,
            )?;
            stats(&traj, cfg.window)?
        }
    };
    Ok(st)
}

pub const SWEEP_HEADER: &str = "kind,M,N,c,r,g,u,mode,density,beta,pr,pe,seed,stream,\
mean_c,mean_d,mean_l,osc_c,osc_d,osc_l,amp_c,amp_d,amp_l,fixated";

fn sweep_row(cfg: &RunConfig, p: &SweepPoint, st: &TrajectoryStats) -> String {
    let kind = match cfg.sweep_kind {
        SweepKind::Ode => "ode",
        SweepKind::Abm => "abm",
    };
    let l = &cfg.learning;
    let mut row = format!(
        "{kind},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        p.params.population,
        p.params.sample,
        sig(p.params.cost),
        sig(p.params.rate),
        sig(p.params.participation_cost),
        sig(p.params.mutation),
        p.mode.name(),
        sig(p.mode.density()),
        sig(l.beta),
        sig(l.imitation),
        sig(l.exploration),
        cfg.seed,
        p.stream
    );
    for v in st.time_means {
        let _ = write!(row, ",{}", sig(v));
    }
    for v in st.oscillation_counts {
        let _ = write!(row, ",{v}");
    }
    for v in st.amplitude {
        let _ = write!(row, ",{}", sig(v));
    }
    let fix = st.fixated.map(|i| ["C", "D", "L"][i]).unwrap_or("");
    let _ = write!(row, ",{fix}");
    row
}

fn sweep(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Report, CommandError> {
    let mut report = Report::default();
    let base_mode = resolve_mode(cfg, &mut report.notes)?;
    let points = sweep_points(cfg, base_mode);
    let results: Vec<Result<String, CommandError>> = points
        .par_iter()
        .map(|p| run_point(cfg, p).map(|st| sweep_row(cfg, p, &st)))
        .collect();
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in results {
        out.push_str(&row?);
        out.push('\n');
    }
    report.notes.push(format!("{} grid points", points.len()));
    emit(cfg, &out, stdout, &mut report)?;
    Ok(report)
}

pub fn equilibrium_text(a: f64, b: f64, c: f64) -> Result<String, CommandError> {
    let eq = solve_abc(a, b, c)?;
    let mut s = String::new();
    let _ = writeln!(s, "sigma = {}", sig(eq.sigma));
    let _ = writeln!(s, "row Up = {} Down = {}", sig(eq.row.first()), sig(eq.row.second()));
    let _ = writeln!(s, "column Left = {} Right = {}", sig(eq.col.first()), sig(eq.col.second()));
    let o = eq.outcome;
    let _ = writeln!(
        s,
        "outcome = {} {} {} {}",
        sig(o[0][0]),
        sig(o[0][1]),
        sig(o[1][0]),
        sig(o[1][1])
    );
    let _ = writeln!(s, "payoff row = {} column = {}", sig(eq.payoffs.0), sig(eq.payoffs.1));
    Ok(s)
}

fn equilibrium(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Report, CommandError> {
    let mut report = Report::default();
    let [a, b, c] = cfg.game;
    let text = equilibrium_text(a, b, c)?;
    emit(cfg, &text, stdout, &mut report)?;
    Ok(report)
}

/// Runs `cmd` with an already validated configuration.
pub fn execute(cmd: Command, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Report, CommandError> {
    match cmd {
        Command::Ode => ode(cfg, stdout),
        Command::Abm => abm(cfg, stdout),
        Command::Graph => graph(cfg, stdout),
        Command::Sweep => sweep(cfg, stdout),
        Command::Equilibrium => equilibrium(cfg, stdout),
    }
}
