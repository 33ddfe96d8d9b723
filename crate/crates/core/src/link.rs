//! Downlink channel model, multi-user SINR, radar return power, pulse SNR,
//! measurement covariance, the SNR reliability gate, and noisy measurement
//! sampling.
//!
//! Everything is carried in linear units; dB enters only at the harness
//! boundary.

use nalgebra::{DVector, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::array::{compute_aod, steering_vector, Aod, ArrayConfig};
use crate::constants::{BOLTZMANN, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Downlink link-budget parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Per-element antenna gain, linear.
    pub elem_gain: f64,
    /// User antenna gain, linear.
    pub user_gain: f64,
    /// Carrier wavelength, meters.
    pub wavelength: f64,
    /// Receiver noise power ξ², watts (identical across users).
    pub noise_power: f64,
    /// SINR decoding threshold Γ_th, linear.
    pub sinr_threshold: f64,
}

/// Radar receive-chain parameters plus the derived accuracy gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadarBudget {
    /// Target radar cross-section, m².
    pub rcs: f64,
    /// Matched-filter bandwidth, Hz.
    pub bandwidth: f64,
    /// Noise temperature, kelvin.
    pub noise_temp: f64,
    /// Receiver noise figure, linear.
    pub noise_figure: f64,
    /// Coherently integrated pulses per slot.
    pub pulses_per_slot: u32,
    /// Single-pulse range accuracy bound σ₀ = c/(√8·π·B), meters.
    pub sigma0: f64,
    /// Required 1-σ horizontal accuracy σ_req, meters.
    pub accuracy_req: f64,
    /// SNR gate (σ₀/σ_req)², linear.
    pub snr_gate: f64,
    /// Small positive constant keeping the covariance finite at zero SNR.
    pub epsilon: f64,
}

impl RadarBudget {
    /// Derives `sigma0` and `snr_gate` from the primitive parameters.
    pub fn new(
        rcs: f64,
        bandwidth: f64,
        noise_temp: f64,
        noise_figure: f64,
        pulses_per_slot: u32,
        accuracy_req: f64,
    ) -> Self {
        let sigma0 = SPEED_OF_LIGHT / (8f64.sqrt() * std::f64::consts::PI * bandwidth);
        Self {
            rcs,
            bandwidth,
            noise_temp,
            noise_figure,
            pulses_per_slot,
            sigma0,
            accuracy_req,
            snr_gate: (sigma0 / accuracy_req).powi(2),
            epsilon: 1e-12,
        }
    }

    /// Rebuilds the derived gate after changing `accuracy_req`.
    pub fn with_accuracy_req(mut self, accuracy_req: f64) -> Self {
        self.accuracy_req = accuracy_req;
        self.snr_gate = (self.sigma0 / accuracy_req).powi(2);
        self
    }

    /// Thermal noise power k_B·T₀·B·F, watts.
    pub fn noise_power(&self) -> f64 {
        BOLTZMANN * self.noise_temp * self.bandwidth * self.noise_figure
    }
}

/// Downlink channel row h_kᴴ: entries are `√β·e^{-j2πd/λ}·conj(a_i)`, so the
/// SINR numerator is the plain dot product of `entries` with a beam vector.
#[derive(Debug, Clone)]
pub struct ChannelVector {
    pub entries: DVector<Complex64>,
    /// Large-scale amplitude √β_k.
    pub amplitude: f64,
}

impl ChannelVector {
    /// h_kᴴ·w without further conjugation.
    pub fn dot(&self, beam: &DVector<Complex64>) -> Complex64 {
        self.entries.iter().zip(beam.iter()).map(|(h, w)| h * w).sum()
    }
}

/// Friis free-space gain `G_elem·G_user·λ²/(4π·d)²`.
pub fn path_loss(budget: &LinkBudget, distance: f64) -> Result<f64> {
    if distance <= 0.0 {
        return Err(Error::Domain(format!("path_loss distance must be > 0, got {distance}")));
    }
    let denom = 4.0 * std::f64::consts::PI * distance;
    Ok(budget.elem_gain * budget.user_gain * budget.wavelength.powi(2) / (denom * denom))
}

/// Channel row from the UAV at `uav_pos` to a ground user at `user_pos`.
pub fn channel_vector(
    budget: &LinkBudget,
    cfg: &ArrayConfig,
    uav_pos: [f64; 3],
    user_pos: [f64; 3],
) -> Result<ChannelVector> {
    let d = distance(uav_pos, user_pos);
    let beta = path_loss(budget, d)?;
    let amplitude = beta.sqrt();
    let aod = compute_aod(uav_pos, user_pos);
    let sv = steering_vector(cfg, &aod);
    let carrier = Complex64::from_polar(amplitude, -2.0 * std::f64::consts::PI * d / budget.wavelength);
    let entries = sv.entries.map(|a| carrier * a.conj());
    Ok(ChannelVector { entries, amplitude })
}

/// Per-user linear SINR Γ_k for the given user beams.
///
/// `user_beams[k]` is w_k (the zero vector for unscheduled users); the sensing
/// beam is excluded from interference by construction and must not be passed
/// here. A zero own-beam yields Γ_k = 0.
pub fn sinr_all_users(
    channels: &[ChannelVector],
    user_beams: &[DVector<Complex64>],
    noise_power: f64,
) -> Vec<f64> {
    assert_eq!(channels.len(), user_beams.len(), "one beam per user required");
    channels
        .iter()
        .enumerate()
        .map(|(k, h)| {
            let signal = h.dot(&user_beams[k]).norm_sqr();
            let interference: f64 = user_beams
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, w)| h.dot(w).norm_sqr())
                .sum();
            signal / (interference + noise_power)
        })
        .collect()
}

/// One-way array factor gain `|aᴴ(true angles)·v_T|²` toward the true target
/// angles for a unit-norm sensing direction.
pub fn array_factor_gain(
    cfg: &ArrayConfig,
    true_aod: &Aod,
    sensing_dir: &DVector<Complex64>,
) -> Result<f64> {
    let norm = sensing_dir.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "sensing direction must be unit norm, got ‖v‖ = {norm}"
        )));
    }
    let a = steering_vector(cfg, true_aod);
    let inner: Complex64 = a.entries.iter().zip(sensing_dir.iter()).map(|(ai, vi)| ai.conj() * vi).sum();
    Ok(inner.norm_sqr())
}

/// Radar equation: received echo power in watts.
pub fn radar_received_power(
    radar: &RadarBudget,
    cfg: &ArrayConfig,
    sensing_power: f64,
    gain: f64,
    range: f64,
) -> Result<f64> {
    if range <= 0.0 {
        return Err(Error::Domain(format!("radar range must be > 0, got {range}")));
    }
    let g = cfg.elem_gain * gain;
    Ok(sensing_power * g * g * cfg.wavelength.powi(2) * radar.rcs
        / ((4.0 * std::f64::consts::PI).powi(3) * range.powi(4)))
}

/// Post-detection SNR per coherent processing interval.
pub fn pulse_snr(radar: &RadarBudget, received_power: f64) -> f64 {
    received_power / radar.noise_power() * radar.pulses_per_slot as f64
}

/// CRLB-style measurement covariance `(σ₀²/(SNR+ε))·I₂`.
pub fn measurement_covariance(radar: &RadarBudget, snr: f64) -> Matrix2<f64> {
    Matrix2::identity() * (radar.sigma0 * radar.sigma0 / (snr + radar.epsilon))
}

/// True iff the pulse SNR clears the accuracy gate (inclusive).
pub fn reliability_gate(radar: &RadarBudget, snr: f64) -> bool {
    snr >= radar.snr_gate
}

/// Noisy Cartesian measurement: truth plus a zero-mean Gaussian draw with the
/// given (diagonal PSD) covariance.
pub fn sample_measurement<R: Rng + ?Sized>(
    rng: &mut R,
    true_horizontal_pos: [f64; 2],
    cov: &Matrix2<f64>,
) -> [f64; 2] {
    let sx = cov[(0, 0)].max(0.0).sqrt();
    let sy = cov[(1, 1)].max(0.0).sqrt();
    let nx: f64 = StandardNormal.sample(rng);
    let ny: f64 = StandardNormal.sample(rng);
    [true_horizontal_pos[0] + sx * nx, true_horizontal_pos[1] + sy * ny]
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
