use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pgg_core::io::{execute, load_config, Command};

#[derive(Parser)]
#[command(name = "pgg", version, about = "Optional public goods game simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random stream of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a ternary SVG plot next to the output.
    #[arg(long, global = true)]
    plot: bool,
    /// Override a configuration key, e.g. `--set r=1.8`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the deterministic dynamics; CSV `t,x,y,z`.
    Ode(Common),
    /// Run the finite-population simulator; CSV `gen,frac_c,frac_d,frac_l,mean_payoff`.
    Abm(Common),
    /// Generate an Erdős–Rényi graph; edge-list text.
    Graph(Common),
    /// Summary statistics over a parameter grid, one CSV row per point.
    Sweep(Common),
    /// Mixed equilibrium of the a > b > c coordination game.
    Equilibrium {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
    },
}

fn overrides(common: &Common) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for kv in &common.set {
        let Some((k, v)) = kv.split_once('=') else {
            bail!("--set expects KEY=VALUE, got {kv:?}");
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(seed) = common.seed {
        out.push(("seed".into(), seed.to_string()));
    }
    if let Some(path) = &common.out {
        out.push(("out".into(), path.display().to_string()));
    }
    if common.plot {
        out.push(("plot".into(), "true".into()));
    }
    Ok(out)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (cmd, common, mut extra) = match cli.command {
        Cmd::Ode(c) => (Command::Ode, c, Vec::new()),
        Cmd::Abm(c) => (Command::Abm, c, Vec::new()),
        Cmd::Graph(c) => (Command::Graph, c, Vec::new()),
        Cmd::Sweep(c) => (Command::Sweep, c, Vec::new()),
        Cmd::Equilibrium { common, a, b, c } => {
            let levels = [("game_a", a), ("game_b", b), ("game_c", c)];
            let extra = levels
                .into_iter()
                .filter_map(|(k, v)| v.map(|v| (k.to_string(), v.to_string())))
                .collect();
            (Command::Equilibrium, common, extra)
        }
    };
    let mut ov = overrides(&common)?;
    ov.append(&mut extra);
    let cfg = load_config(common.config.as_deref(), &ov).context("invalid configuration")?;
    let mut stdout = std::io::stdout().lock();
    let report = execute(cmd, &cfg, &mut stdout).with_context(|| format!("{} failed", cmd.name()))?;
    for note in &report.notes {
        eprintln!("{note}");
    }
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}
