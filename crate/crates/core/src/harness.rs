//! Seeded Monte-Carlo evaluation: per-episode metrics, aggregation over seed
//! ranges, parameter sweeps with paired layouts, and deterministic CSV
//! emission. Rates and powers are accumulated in linear units; decibel
//! conversion happens only when a CSV cell is written.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::Policy;
use crate::constants::linear_to_db;
use crate::env::{Environment, ScenarioConfig};
use crate::error::{Error, Result};
use crate::learner::SacAgent;

/// Metrics accumulated over one evaluation episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeMetrics {
    pub seed: u64,
    /// Undiscounted return Σ(-Δ̄).
    pub episode_return: f64,
    /// Time-average of the mean age over the horizon.
    pub mean_age: f64,
    /// Fraction of slots whose radar SNR cleared the gate.
    pub sense_rate: f64,
    /// Fraction of user-slots decoded successfully.
    pub decode_rate: f64,
    /// Slot-average radar pulse SNR, linear.
    pub snr_mean: f64,
    /// User-slot-average downlink SINR, linear.
    pub sinr_mean: f64,
    /// Slot-average distance between the KF position estimate and the truth.
    pub track_err: f64,
}

/// Seed-range aggregate of [`EpisodeMetrics`].
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub episodes: usize,
    pub mean_return: f64,
    pub mean_age: f64,
    pub std_age: f64,
    pub sense_rate: f64,
    pub decode_rate: f64,
    pub snr_mean: f64,
    pub sinr_mean: f64,
    pub track_err: f64,
}

/// Greedy wrapper exposing a trained agent through the [`Policy`] trait.
pub struct GreedyAgent<'a> {
    pub agent: &'a SacAgent,
}

impl Policy for GreedyAgent<'_> {
    fn name(&self) -> &'static str {
        "sac"
    }

    fn act(&mut self, state: &crate::env::EnvState, _rng: &mut ChaCha8Rng) -> crate::env::EnvAction {
        self.agent.act_greedy(state)
    }
}

/// Rolls one full episode under `policy`; the same seed drives both the
/// environment layout and the policy's randomness.
pub fn run_episode(config: &ScenarioConfig, policy: &mut dyn Policy, seed: u64) -> EpisodeMetrics {
    let mut env = Environment::reset(config, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gate = config.radar_budget().snr_gate;
    let k = config.num_users as f64;
    let n = config.horizon as f64;
    let mut ret = 0.0;
    let mut age_sum = 0.0;
    let mut sense = 0.0;
    let mut decode = 0.0;
    let mut snr_sum = 0.0;
    let mut sinr_sum = 0.0;
    let mut err_sum = 0.0;
    loop {
        let state = env.state();
        let action = policy.act(&state, &mut rng);
        let (next, reward, done) = env.step(&action).expect("episode still live");
        ret += reward;
        age_sum += next.mean_age();
        let snr = next.pulse_snr();
        snr_sum += snr;
        if snr >= gate {
            sense += 1.0;
        }
        for i in 0..config.num_users {
            let g = next.user_sinr(i);
            sinr_sum += g;
            if g >= config.sinr_threshold {
                decode += 1.0;
            }
        }
        let est = env.kf_state().position();
        let truth = env.target_position();
        err_sum += ((est[0] - truth[0]).powi(2) + (est[1] - truth[1]).powi(2)).sqrt();
        if done {
            break;
        }
    }
    EpisodeMetrics {
        seed,
        episode_return: ret,
        mean_age: age_sum / n,
        sense_rate: sense / n,
        decode_rate: decode / (n * k),
        snr_mean: snr_sum / n,
        sinr_mean: sinr_sum / (n * k),
        track_err: err_sum / n,
    }
}

/// Runs one episode per seed with a fresh policy instance each time, in seed
/// order, so output is reproducible byte for byte.
pub fn monte_carlo(
    config: &ScenarioConfig,
    make_policy: &mut dyn FnMut(&ScenarioConfig) -> Box<dyn Policy>,
    seeds: &[u64],
) -> Vec<EpisodeMetrics> {
    seeds
        .iter()
        .map(|&seed| {
            let mut policy = make_policy(config);
            run_episode(config, policy.as_mut(), seed)
        })
        .collect()
}

/// Aggregates a batch of episode metrics.
pub fn summarize(rows: &[EpisodeMetrics]) -> Summary {
    assert!(!rows.is_empty());
    let n = rows.len() as f64;
    let mean = |f: &dyn Fn(&EpisodeMetrics) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
    let mean_age = mean(&|r| r.mean_age);
    let var = rows.iter().map(|r| (r.mean_age - mean_age).powi(2)).sum::<f64>() / n;
    Summary {
        episodes: rows.len(),
        mean_return: mean(&|r| r.episode_return),
        mean_age,
        std_age: var.sqrt(),
        sense_rate: mean(&|r| r.sense_rate),
        decode_rate: mean(&|r| r.decode_rate),
        snr_mean: mean(&|r| r.snr_mean),
        sinr_mean: mean(&|r| r.sinr_mean),
        track_err: mean(&|r| r.track_err),
    }
}

/// Sweepable scenario parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// SINR decoding threshold, value given in dB.
    GammaThDb,
    /// Tracking accuracy requirement, meters.
    SigmaReq,
    /// Square UPA side (M_x = M_y).
    Upa,
    /// Number of ground users.
    Users,
}

impl SweepAxis {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "gamma_th" => Ok(Self::GammaThDb),
            "sigma_req" => Ok(Self::SigmaReq),
            "upa" => Ok(Self::Upa),
            "users" => Ok(Self::Users),
            other => Err(Error::Contract(format!(
                "unknown sweep axis {other:?}; expected gamma_th, sigma_req, upa, or users"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::GammaThDb => "gamma_th",
            Self::SigmaReq => "sigma_req",
            Self::Upa => "upa",
            Self::Users => "users",
        }
    }

    /// Conventional sweep grid for this axis.
    pub fn default_values(&self) -> Vec<f64> {
        match self {
            Self::GammaThDb => vec![0.0, 5.0, 10.0, 15.0, 20.0],
            Self::SigmaReq => vec![0.1, 0.5, 1.0, 2.0, 4.0],
            Self::Upa => vec![2.0, 3.0, 4.0, 5.0, 6.0],
            Self::Users => vec![3.0, 6.0, 9.0, 12.0, 15.0],
        }
    }

    /// Applies one axis value to a copy of the base scenario.
    pub fn apply(&self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut c = base.clone();
        match self {
            Self::GammaThDb => c.sinr_threshold = crate::constants::db_to_linear(value),
            Self::SigmaReq => {
                if value <= 0.0 {
                    return Err(Error::Contract("sigma_req must be positive".into()));
                }
                c.accuracy_req = value;
            }
            Self::Upa => {
                let side = value as usize;
                if side < 1 || (side as f64 - value).abs() > 0.0 {
                    return Err(Error::Contract("upa side must be a positive integer".into()));
                }
                c.upa_x = side;
                c.upa_y = side;
            }
            Self::Users => {
                let k = value as usize;
                if k < 1 || (k as f64 - value).abs() > 0.0 {
                    return Err(Error::Contract("user count must be a positive integer".into()));
                }
                c.num_users = k;
                c.user_layout = None;
            }
        }
        Ok(c)
    }
}

/// One sweep grid point with its aggregate.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: f64,
    pub summary: Summary,
}

/// Evaluates the same seed list at every grid point. Layouts are paired
/// across points: the reset draws depend only on the seed, never on the
/// swept parameter (except the user count itself).
pub fn sweep(
    base: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    make_policy: &mut dyn FnMut(&ScenarioConfig) -> Box<dyn Policy>,
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&v| {
            let config = axis.apply(base, v)?;
            let rows = monte_carlo(&config, make_policy, seeds);
            Ok(SweepRow { axis_value: v, summary: summarize(&rows) })
        })
        .collect()
}

fn fmt(x: f64) -> String {
    format!("{x:.8e}")
}

/// Per-episode CSV with SNR/SINR converted to dB in place.
pub fn episodes_csv(rows: &[EpisodeMetrics]) -> String {
    let mut out = String::from(
        "seed,episode_return,mean_age,sense_rate,decode_rate,snr_db,sinr_db,track_err\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.seed,
            fmt(r.episode_return),
            fmt(r.mean_age),
            fmt(r.sense_rate),
            fmt(r.decode_rate),
            fmt(linear_to_db(r.snr_mean)),
            fmt(linear_to_db(r.sinr_mean)),
            fmt(r.track_err),
        ));
    }
    out
}

/// Sweep CSV, one aggregate row per grid point.
pub fn sweep_csv(axis: SweepAxis, rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{},episodes,mean_return,mean_age,std_age,sense_rate,decode_rate,snr_db,sinr_db,track_err\n",
        axis.name()
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt(r.axis_value),
            r.summary.episodes,
            fmt(r.summary.mean_return),
            fmt(r.summary.mean_age),
            fmt(r.summary.std_age),
            fmt(r.summary.sense_rate),
            fmt(r.summary.decode_rate),
            fmt(linear_to_db(r.summary.snr_mean)),
            fmt(linear_to_db(r.summary.sinr_mean)),
            fmt(r.summary.track_err),
        ));
    }
    out
}
