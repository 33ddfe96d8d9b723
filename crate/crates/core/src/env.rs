//! The finite-horizon MDP: episode lifecycle, per-slot physics pipeline,
//! state-vector assembly, action decoding, target trajectory generation, and
//! reward.
//!
//! Per-slot pipeline: decode action and move the UAV, KF predict, steer the
//! sensing beam from the prior, schedule/split/RZF at the new UAV position,
//! advance the true target, evaluate the radar return at the true angles,
//! gate the measurement into the KF, compute user SINRs and decode flags,
//! advance the AoI recursion, and emit reward `-Δ̄`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::aoi::AoiState;
use crate::array::{compute_aod, ArrayConfig};
use crate::beam::{assemble, power_split, rzf_directions, schedule_users, sensing_direction, BeamPlan};
use crate::constants::{db_to_linear, dbm_to_watts};
use crate::error::{Error, Result};
use crate::link::{
    array_factor_gain, channel_vector, measurement_covariance, pulse_snr, radar_received_power,
    reliability_gate, sample_measurement, ChannelVector, LinkBudget, RadarBudget,
};
use crate::tracking::{gated_step, KfModel, KfState};

/// Full scenario parameterization. Defaults mirror the simulation defaults:
/// K = 6 users, N = 60 slots, 4×4 half-wave UPA at 2 GHz, 20 dBm power
/// budget, 10 dB SINR threshold, 1 m accuracy requirement.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub num_users: usize,
    pub horizon: u32,
    pub dt: f64,
    /// Side of the square user-spawn region, meters.
    pub arena_side: f64,
    pub uav_alt: f64,
    pub uav_vmax: f64,
    pub target_vmax: f64,
    pub target_start: [f64; 2],
    pub target_end: [f64; 2],
    /// Std of the Gaussian UAV spawn perturbation around the target start.
    pub spawn_std: f64,
    /// Per-slot transmit power budget, watts.
    pub p_max: f64,
    pub carrier_freq: f64,
    pub upa_x: usize,
    pub upa_y: usize,
    /// Per-element antenna gain, linear.
    pub elem_gain: f64,
    pub user_gain: f64,
    /// Receiver noise power ξ², watts.
    pub noise_power: f64,
    /// SINR decoding threshold, linear.
    pub sinr_threshold: f64,
    pub rcs: f64,
    pub bandwidth: f64,
    pub noise_temp: f64,
    pub noise_figure: f64,
    pub pulses_per_slot: u32,
    pub accuracy_req: f64,
    pub process_var: f64,
    pub gamma: f64,
    /// Affine scale mapping raw logit/threshold outputs to [-L, L].
    pub logit_scale: f64,
    /// Fixed sensing-beam logit; the action vector carries user logits only.
    pub target_logit: f64,
    /// Optional fixed user layout; overrides the uniform draw when present.
    pub user_layout: Option<Vec<[f64; 2]>>,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_users: 6,
            horizon: 60,
            dt: 1.0,
            arena_side: 1600.0,
            uav_alt: 50.0,
            uav_vmax: 20.0,
            target_vmax: 15.0,
            target_start: [350.0, 350.0],
            target_end: [1150.0, 1150.0],
            spawn_std: 10.0,
            p_max: dbm_to_watts(20.0),
            carrier_freq: 2e9,
            upa_x: 4,
            upa_y: 4,
            elem_gain: db_to_linear(3.0),
            user_gain: 1.0,
            noise_power: dbm_to_watts(-90.0),
            sinr_threshold: db_to_linear(10.0),
            rcs: 1.0,
            bandwidth: 1e8,
            noise_temp: 290.0,
            noise_figure: db_to_linear(20.0),
            pulses_per_slot: 32,
            accuracy_req: 1.0,
            process_var: 0.25,
            gamma: 0.99,
            logit_scale: 5.0,
            target_logit: 0.0,
            user_layout: None,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// Reduced scenario for fast CPU-only experiments: 2 users, 20 slots,
    /// 2×2 UPA, 600 m arena with a feasible short target track.
    pub fn desk_scale() -> Self {
        Self {
            num_users: 2,
            horizon: 20,
            arena_side: 600.0,
            target_start: [150.0, 150.0],
            target_end: [350.0, 350.0],
            upa_x: 2,
            upa_y: 2,
            ..Self::default()
        }
    }

    pub fn array_config(&self) -> ArrayConfig {
        ArrayConfig::half_wave(self.upa_x, self.upa_y, self.carrier_freq, self.elem_gain)
    }

    pub fn link_budget(&self) -> LinkBudget {
        LinkBudget {
            elem_gain: self.elem_gain,
            user_gain: self.user_gain,
            wavelength: crate::constants::SPEED_OF_LIGHT / self.carrier_freq,
            noise_power: self.noise_power,
            sinr_threshold: self.sinr_threshold,
        }
    }

    pub fn radar_budget(&self) -> RadarBudget {
        RadarBudget::new(
            self.rcs,
            self.bandwidth,
            self.noise_temp,
            self.noise_figure,
            self.pulses_per_slot,
            self.accuracy_req,
        )
    }

    pub fn kf_model(&self) -> KfModel {
        KfModel::new(self.dt, self.process_var)
    }

    /// State dimension 5K + 14.
    pub fn state_dim(&self) -> usize {
        5 * self.num_users + 14
    }

    /// Action dimension K + 3: displacement (2), user logits (K), threshold.
    pub fn action_dim(&self) -> usize {
        self.num_users + 3
    }
}

/// Flat observation vector of dimension 5K + 14, grouped as
/// UAV (2) | per-user distance, azimuth, elevation, SINR, AoI (5K) |
/// KF mean (4) + pulse SNR (1) | cov diagonal (4) + trace (1) |
/// mean AoI (1) + progress (1).
#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    pub vector: Vec<f64>,
}

impl EnvState {
    pub fn num_users(&self) -> usize {
        (self.vector.len() - 14) / 5
    }

    pub fn uav(&self) -> [f64; 2] {
        [self.vector[0], self.vector[1]]
    }

    pub fn user_distance(&self, k: usize) -> f64 {
        self.vector[2 + 5 * k]
    }

    pub fn user_azimuth(&self, k: usize) -> f64 {
        self.vector[2 + 5 * k + 1]
    }

    pub fn user_elevation(&self, k: usize) -> f64 {
        self.vector[2 + 5 * k + 2]
    }

    pub fn user_sinr(&self, k: usize) -> f64 {
        self.vector[2 + 5 * k + 3]
    }

    pub fn user_age(&self, k: usize) -> f64 {
        self.vector[2 + 5 * k + 4]
    }

    /// KF posterior mean (x, y, v_x, v_y).
    pub fn kf_mean(&self) -> [f64; 4] {
        let t = 2 + 5 * self.num_users();
        [self.vector[t], self.vector[t + 1], self.vector[t + 2], self.vector[t + 3]]
    }

    pub fn pulse_snr(&self) -> f64 {
        self.vector[2 + 5 * self.num_users() + 4]
    }

    pub fn mean_age(&self) -> f64 {
        self.vector[self.vector.len() - 2]
    }

    pub fn progress(&self) -> f64 {
        self.vector[self.vector.len() - 1]
    }
}

/// Raw policy output in [-1, 1]^(K+3).
#[derive(Debug, Clone, PartialEq)]
pub struct EnvAction {
    pub raw: Vec<f64>,
}

/// Action after clamping, velocity clipping, and affine logit scaling.
#[derive(Debug, Clone)]
pub struct DecodedAction {
    pub displacement: [f64; 2],
    pub target_logit: f64,
    pub user_logits: Vec<f64>,
    pub threshold: f64,
}

/// One replay-buffer record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
}

/// Decodes a raw action: displacement scaled to the velocity budget and
/// norm-clipped, logits and threshold affinely scaled to [-L, L]. Raw entries
/// outside [-1, 1] are clamped, never rejected.
pub fn decode_action(raw: &EnvAction, config: &ScenarioConfig) -> DecodedAction {
    let k = config.num_users;
    assert_eq!(raw.raw.len(), k + 3, "action dimension must be K + 3");
    let clamp = |x: f64| x.clamp(-1.0, 1.0);
    let vstep = config.uav_vmax * config.dt;
    let mut dx = clamp(raw.raw[0]) * vstep;
    let mut dy = clamp(raw.raw[1]) * vstep;
    let norm = (dx * dx + dy * dy).sqrt();
    if norm > vstep {
        dx *= vstep / norm;
        dy *= vstep / norm;
    }
    let user_logits = (0..k).map(|i| clamp(raw.raw[2 + i]) * config.logit_scale).collect();
    let threshold = clamp(raw.raw[k + 2]) * config.logit_scale;
    DecodedAction {
        displacement: [dx, dy],
        target_logit: config.target_logit,
        user_logits,
        threshold,
    }
}

/// One trajectory step of the ground target: deterministic drift toward the
/// endpoint plus a speed-capped random perturbation.
///
/// `slot` is the 0-based index of the current position; the drift denominator
/// is `N - 1 - slot`, so the step at `slot = N - 2` lands exactly on
/// `target_end`. Past that point the target holds its endpoint.
pub fn target_next<R: Rng + ?Sized>(
    current: [f64; 2],
    slot: u32,
    config: &ScenarioConfig,
    rng: &mut R,
) -> [f64; 2] {
    let n = config.horizon;
    // Always consume the perturbation draws so trajectories stay paired
    // across configs at equal seed.
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let unit: f64 = rng.gen_range(0.0..1.0);
    if slot + 1 >= n {
        return config.target_end;
    }
    let denom = (n - 1 - slot) as f64;
    let drift = [
        (config.target_end[0] - current[0]) / denom,
        (config.target_end[1] - current[1]) / denom,
    ];
    let drift_norm = (drift[0] * drift[0] + drift[1] * drift[1]).sqrt();
    let vstep = config.target_vmax * config.dt;
    // Triangle inequality: ‖drift‖ + ‖ω‖ ≤ V_max·δ_t keeps the speed capped.
    let radius = vstep - drift_norm;
    let (wx, wy) = if radius > 0.0 {
        let r = radius * unit.sqrt();
        (r * angle.cos(), r * angle.sin())
    } else {
        (0.0, 0.0)
    };
    [current[0] + drift[0] + wx, current[1] + drift[1] + wy]
}

/// Single-owner mutable environment instance. Run many in parallel with
/// independent seeds for Monte-Carlo evaluation.
#[derive(Debug, Clone)]
pub struct Environment {
    pub config: ScenarioConfig,
    array: ArrayConfig,
    budget: LinkBudget,
    radar: RadarBudget,
    kf_model: KfModel,
    rng: ChaCha8Rng,
    pub users: Vec<[f64; 2]>,
    uav: [f64; 2],
    target: [f64; 2],
    kf: KfState,
    aoi: AoiState,
    last_sinr: Vec<f64>,
    last_snr_p: f64,
    /// Paper slot index of the current state (1-based).
    slot: u32,
    done: bool,
}

impl Environment {
    /// Resets to the slot-1 state: users drawn uniformly in the arena (or
    /// loaded from the configured layout), target at its start, UAV spawned
    /// at a Gaussian perturbation of the target start, KF initialized at the
    /// true start with zero velocity.
    pub fn reset(config: &ScenarioConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let users = match &config.user_layout {
            Some(layout) => {
                assert_eq!(layout.len(), config.num_users, "layout size must match num_users");
                layout.clone()
            }
            None => (0..config.num_users)
                .map(|_| {
                    [
                        rng.gen_range(0.0..config.arena_side),
                        rng.gen_range(0.0..config.arena_side),
                    ]
                })
                .collect(),
        };
        let nx: f64 = StandardNormal.sample(&mut rng);
        let ny: f64 = StandardNormal.sample(&mut rng);
        let uav = [
            config.target_start[0] + config.spawn_std * nx,
            config.target_start[1] + config.spawn_std * ny,
        ];
        Self {
            array: config.array_config(),
            budget: config.link_budget(),
            radar: config.radar_budget(),
            kf_model: config.kf_model(),
            rng,
            users,
            uav,
            target: config.target_start,
            kf: KfState::at_position(config.target_start),
            aoi: AoiState::initial(config.num_users),
            last_sinr: vec![0.0; config.num_users],
            last_snr_p: 0.0,
            slot: 1,
            done: false,
            config: config.clone(),
        }
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Current paper slot index.
    pub fn slot(&self) -> u32 {
        self.slot
    }

    pub fn uav_position(&self) -> [f64; 3] {
        [self.uav[0], self.uav[1], self.config.uav_alt]
    }

    pub fn target_position(&self) -> [f64; 2] {
        self.target
    }

    pub fn kf_state(&self) -> &KfState {
        &self.kf
    }

    pub fn aoi_state(&self) -> &AoiState {
        &self.aoi
    }

    /// Assembles the observation vector from the internal components.
    pub fn state(&self) -> EnvState {
        let k = self.config.num_users;
        let mut v = Vec::with_capacity(self.config.state_dim());
        v.push(self.uav[0]);
        v.push(self.uav[1]);
        let uav3 = self.uav_position();
        for i in 0..k {
            let user = [self.users[i][0], self.users[i][1], 0.0];
            let d = dist3(uav3, user);
            let aod = compute_aod(uav3, user);
            v.push(d);
            v.push(aod.azimuth);
            v.push(aod.elevation);
            v.push(self.last_sinr[i]);
            v.push(self.aoi.ages[i] as f64);
        }
        for i in 0..4 {
            v.push(self.kf.mean[i]);
        }
        v.push(self.last_snr_p);
        for i in 0..4 {
            v.push(self.kf.cov[(i, i)]);
        }
        v.push(self.kf.cov.trace());
        v.push(self.aoi.average_age());
        v.push((self.slot.min(self.config.horizon) as f64) / self.config.horizon as f64);
        EnvState { vector: v }
    }

    /// Channel rows to every user from the current UAV position.
    fn channels(&self) -> Vec<ChannelVector> {
        let uav3 = self.uav_position();
        self.users
            .iter()
            .map(|u| {
                channel_vector(&self.budget, &self.array, uav3, [u[0], u[1], 0.0])
                    .expect("user cannot be co-located with the UAV")
            })
            .collect()
    }

    /// Builds the slot's beam plan from a decoded action and the KF prior.
    fn plan_beams(&self, decoded: &DecodedAction, prior: &KfState) -> (BeamPlan, Vec<ChannelVector>) {
        let k = self.config.num_users;
        let channels = self.channels();
        let scheduled = schedule_users(&decoded.user_logits, decoded.threshold);
        let ratios = power_split(&decoded.user_logits, decoded.target_logit, &scheduled);
        let v_t = sensing_direction(&self.array, self.uav_position(), prior.position());
        let sched_channels: Vec<&ChannelVector> = scheduled.iter().map(|&i| &channels[i]).collect();
        let powers: Vec<f64> = scheduled.iter().map(|&i| ratios[i + 1] * self.config.p_max).collect();
        let user_dirs = rzf_directions(&sched_channels, &powers, self.budget.noise_power);
        let m = self.array.num_elements();
        let zero = nalgebra::DVector::from_element(m, num_complex::Complex64::new(0.0, 0.0));
        let mut directions = vec![zero; k + 1];
        directions[0] = v_t;
        for (slot_idx, &user) in scheduled.iter().enumerate() {
            directions[user + 1] = user_dirs[slot_idx].clone();
        }
        let plan = assemble(&scheduled, &ratios, &directions, self.config.p_max)
            .expect("softmax ratios lie on the simplex");
        (plan, channels)
    }

    /// Advances one slot. Returns (next state, reward, done).
    pub fn step(&mut self, action: &EnvAction) -> Result<(EnvState, f64, bool)> {
        if self.done {
            return Err(Error::EpisodeDone);
        }
        let decoded = decode_action(action, &self.config);

        // (1) Move the UAV; only the velocity constraint bounds the position.
        self.uav[0] += decoded.displacement[0];
        self.uav[1] += decoded.displacement[1];

        // (2) KF time update; (3)-(4) beams from the prior at the new position.
        let prior = crate::tracking::predict(&self.kf_model, &self.kf);
        let (plan, channels) = self.plan_beams(&decoded, &prior);

        // (5) True target advances one trajectory step.
        self.target = target_next(self.target, self.slot - 1, &self.config, &mut self.rng);

        // (6) Radar return at the true target angles.
        let uav3 = self.uav_position();
        let target3 = [self.target[0], self.target[1], 0.0];
        let true_aod = compute_aod(uav3, target3);
        let gain = array_factor_gain(&self.array, &true_aod, &plan.directions[0])?;
        let range = dist3(uav3, target3);
        let p_r = radar_received_power(&self.radar, &self.array, plan.sensing_power(), gain, range)?;
        let snr_p = pulse_snr(&self.radar, p_r);

        // (7) Gate: admit a measurement only when the SNR clears the gate.
        let sensing_ok = reliability_gate(&self.radar, snr_p);
        let measurement = if sensing_ok {
            let cov = measurement_covariance(&self.radar, snr_p);
            let z = sample_measurement(&mut self.rng, self.target, &cov);
            Some((z, cov))
        } else {
            None
        };
        self.kf = gated_step(&self.kf_model, &self.kf, measurement)?;

        // (8) Downlink SINRs and decode flags.
        let sinr = crate::link::sinr_all_users(&channels, plan.user_beams(), self.budget.noise_power);
        let decode_ok: Vec<bool> =
            sinr.iter().map(|&g| g >= self.budget.sinr_threshold).collect();

        // (9) AoI recursion; (10) reward.
        self.aoi = self.aoi.step(sensing_ok, &decode_ok);
        self.last_sinr = sinr;
        self.last_snr_p = snr_p;
        let reward = -self.aoi.average_age();

        // (11) Next state.
        self.done = self.slot >= self.config.horizon;
        self.slot += 1;
        Ok((self.state(), reward, self.done))
    }
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
