//! Command-line front end: train a learner, evaluate a policy over a seed
//! range, or sweep a scenario parameter, writing deterministic CSV and JSON
//! artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::info;

use isac_core::baselines::{by_name, Policy};
use isac_core::env::{EnvAction, EnvState, ScenarioConfig};
use isac_core::harness::{
    episodes_csv, monte_carlo, summarize, sweep, sweep_csv, SweepAxis,
};
use isac_core::learner::{train, Checkpoint, SacAgent, SacConfig};

#[derive(Parser)]
#[command(name = "isac", about = "UAV ISAC simulator with an AoI-minimizing SAC agent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the SAC agent and write a checkpoint plus per-episode returns.
    Train {
        /// Scenario JSON; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Learner hyperparameter JSON; defaults apply when omitted.
        #[arg(long)]
        sac_config: Option<PathBuf>,
        /// Number of training episodes.
        #[arg(long)]
        episodes: u32,
        /// Agent initialization seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// First environment seed; episode e uses seed base + e.
        #[arg(long, default_value_t = 1000)]
        env_seed_base: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a policy (baseline name or checkpoint path) over a seed range.
    Eval {
        /// `sags`, `kf-rand`, `random`, or a checkpoint JSON path.
        #[arg(long)]
        policy: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inclusive seed range `a..b` or comma-separated list.
        #[arg(long, default_value = "100..199")]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a policy across a scenario-parameter grid.
    Sweep {
        /// One of `gamma_th`, `sigma_req`, `upa`, `users`.
        #[arg(long)]
        axis: String,
        /// Comma-separated grid values; the axis default grid when omitted.
        #[arg(long)]
        values: Option<String>,
        #[arg(long)]
        policy: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "100..199")]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_scenario(path: &Option<PathBuf>) -> Result<ScenarioConfig> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.trim().parse().context("seed range start")?;
        let b: u64 = b.trim().parse().context("seed range end")?;
        if b < a {
            bail!("seed range end {b} precedes start {a}");
        }
        return Ok((a..=b).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().context("seed list entry"))
        .collect()
}

fn parse_values(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().context("grid value"))
        .collect()
}

/// Owning greedy wrapper so a restored agent fits the `Policy` trait.
struct CheckpointPolicy {
    agent: SacAgent,
}

impl Policy for CheckpointPolicy {
    fn name(&self) -> &'static str {
        "sac"
    }

    fn act(&mut self, state: &EnvState, _rng: &mut rand_chacha::ChaCha8Rng) -> EnvAction {
        self.agent.act_greedy(state)
    }
}

/// Resolves `--policy` to a factory over scenarios. A checkpoint path loads
/// the trained agent; anything else must be a baseline name.
fn policy_factory(spec: &str) -> Result<Box<dyn FnMut(&ScenarioConfig) -> Box<dyn Policy>>> {
    let probe = ScenarioConfig::default();
    if by_name(spec, &probe).is_some() {
        let name = spec.to_string();
        return Ok(Box::new(move |c| by_name(&name, c).expect("known baseline")));
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!("policy {spec:?} is neither a baseline (sags, kf-rand, random) nor a checkpoint file");
    }
    let ckpt = Checkpoint::load(path)?;
    Ok(Box::new(move |c| {
        let agent = ckpt.clone().into_agent().expect("checkpoint validated at load");
        assert_eq!(
            agent.state_dim,
            c.state_dim(),
            "checkpoint was trained for a different state dimension"
        );
        Box::new(CheckpointPolicy { agent })
    }))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Train { config, sac_config, episodes, seed, env_seed_base, out } => {
            let scenario = load_scenario(&config)?;
            let sac: SacConfig = match &sac_config {
                None => SacConfig::default(),
                Some(p) => serde_json::from_str(&fs::read_to_string(p)?)
                    .with_context(|| format!("parsing {}", p.display()))?,
            };
            fs::create_dir_all(&out)?;
            info!("training {episodes} episodes (agent seed {seed}, env base {env_seed_base})");
            let (agent, report) = train(&scenario, &sac, episodes, seed, env_seed_base);
            Checkpoint::from_agent(&agent, &scenario).save(&out.join("checkpoint.json"))?;
            info!("wrote {}", out.join("checkpoint.json").display());
            let mut csv = String::from("episode,return\n");
            for (e, r) in report.episode_returns.iter().enumerate() {
                csv.push_str(&format!("{e},{r:.8e}\n"));
            }
            write(&out.join("training_returns.csv"), &csv)?;
            let last = report.episode_returns.last().copied().unwrap_or(f64::NAN);
            println!("trained {episodes} episodes; final return {last:.3}");
        }
        Command::Eval { policy, config, seeds, out } => {
            let scenario = load_scenario(&config)?;
            let seeds = parse_seeds(&seeds)?;
            let mut factory = policy_factory(&policy)?;
            fs::create_dir_all(&out)?;
            let rows = monte_carlo(&scenario, factory.as_mut(), &seeds);
            write(&out.join("episodes.csv"), &episodes_csv(&rows))?;
            let s = summarize(&rows);
            println!(
                "policy {policy}: {} episodes, mean age {:.4} (std {:.4}), mean return {:.3}, \
                 sense rate {:.3}, decode rate {:.3}",
                s.episodes, s.mean_age, s.std_age, s.mean_return, s.sense_rate, s.decode_rate
            );
        }
        Command::Sweep { axis, values, policy, config, seeds, out } => {
            let scenario = load_scenario(&config)?;
            let axis = SweepAxis::parse(&axis)?;
            let values = match &values {
                Some(v) => parse_values(v)?,
                None => axis.default_values(),
            };
            let seeds = parse_seeds(&seeds)?;
            let mut factory = policy_factory(&policy)?;
            fs::create_dir_all(&out)?;
            let rows = sweep(&scenario, axis, &values, factory.as_mut(), &seeds)?;
            let name = format!("sweep_{}.csv", axis.name());
            write(&out.join(&name), &sweep_csv(axis, &rows))?;
            for r in &rows {
                println!(
                    "{} = {:>8}: mean age {:.4}, sense rate {:.3}, decode rate {:.3}",
                    axis.name(),
                    r.axis_value,
                    r.summary.mean_age,
                    r.summary.sense_rate,
                    r.summary.decode_rate
                );
            }
        }
    }
    Ok(())
}

fn main() {
    env_logger::init();
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
