//! Mapping from agent priority logits and threshold to a scheduled user set,
//! softmax power-split ratios, RZF user beam directions, a KF-steered sensing
//! direction, and assembled beamforming vectors.
//!
//! Beam index 0 is always the sensing beam; users follow in order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::array::{compute_aod, steering_vector, ArrayConfig};
use crate::error::{Error, Result};
use crate::link::ChannelVector;

/// Regularization floor for the RZF diagonal loading.
pub const ALPHA_FLOOR: f64 = 1e-9;

/// Scheduled set, power-split ratios, unit directions, and assembled beams.
///
/// All per-beam vectors are laid out as `{target} ∪ users`: index 0 is the
/// sensing beam, index `k + 1` is user `k`. Unscheduled users carry
/// exactly-zero direction and beam vectors.
#[derive(Debug, Clone)]
pub struct BeamPlan {
    /// Scheduled user indices (0-based), ascending.
    pub scheduled: Vec<usize>,
    /// Power-split ratios ρ_i on the simplex, length K+1.
    pub ratios: Vec<f64>,
    /// Unit-norm direction vectors (zero for unscheduled users), length K+1.
    pub directions: Vec<DVector<Complex64>>,
    /// Assembled beams w_i = √(ρ_i·P_max)·v_i, length K+1.
    pub beams: Vec<DVector<Complex64>>,
}

impl BeamPlan {
    /// Sensing beam w_T.
    pub fn sensing_beam(&self) -> &DVector<Complex64> {
        &self.beams[0]
    }

    /// Per-user beams w_1..w_K (zero vectors where unscheduled).
    pub fn user_beams(&self) -> &[DVector<Complex64>] {
        &self.beams[1..]
    }

    /// Sensing power ρ_T·P_max.
    pub fn sensing_power(&self) -> f64 {
        self.beams[0].norm_squared()
    }

    /// Total transmit power Σ‖w_i‖².
    pub fn total_power(&self) -> f64 {
        self.beams.iter().map(|w| w.norm_squared()).sum()
    }
}

/// Users whose logit clears the threshold; falls back to the single argmax
/// (lowest index on ties) when the set would be empty.
pub fn schedule_users(logits: &[f64], threshold: f64) -> Vec<usize> {
    assert!(!logits.is_empty());
    let selected: Vec<usize> = (0..logits.len()).filter(|&k| logits[k] >= threshold).collect();
    if selected.is_empty() {
        let argmax = logits
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |best, (k, &l)| if l > best.1 { (k, l) } else { best })
            .0;
        vec![argmax]
    } else {
        selected
    }
}

/// Softmax power split over {target} ∪ scheduled; zeros elsewhere.
///
/// Returns length K+1 with the target share at index 0.
pub fn power_split(user_logits: &[f64], target_logit: f64, scheduled: &[usize]) -> Vec<f64> {
    let mut ratios = vec![0.0; user_logits.len() + 1];
    // Shift by the participating max for numeric stability; the softmax is
    // invariant to a common constant.
    let max_logit = scheduled
        .iter()
        .map(|&k| user_logits[k])
        .fold(target_logit, f64::max);
    let target_exp = (target_logit - max_logit).exp();
    let mut denom = target_exp;
    for &k in scheduled {
        denom += (user_logits[k] - max_logit).exp();
    }
    ratios[0] = target_exp / denom;
    for &k in scheduled {
        ratios[k + 1] = (user_logits[k] - max_logit).exp() / denom;
    }
    ratios
}

/// Unit-norm steering direction toward the KF-predicted horizontal position.
pub fn sensing_direction(
    cfg: &ArrayConfig,
    uav_pos: [f64; 3],
    predicted_target_pos: [f64; 2],
) -> DVector<Complex64> {
    let aod = compute_aod(uav_pos, [predicted_target_pos[0], predicted_target_pos[1], 0.0]);
    steering_vector(cfg, &aod).normalized()
}

/// RZF direction synthesis for the scheduled users.
///
/// `channels` and `powers` are parallel over the scheduled set. The adaptive
/// regularization is `α = max(1e-9, |U|·ξ²/ΣP_k)`; `HHᴴ + αI` is positive
/// definite for any α > 0, so the solve cannot fail.
pub fn rzf_directions(
    channels: &[&ChannelVector],
    powers: &[f64],
    noise_power: f64,
) -> Vec<DVector<Complex64>> {
    assert!(!channels.is_empty());
    assert_eq!(channels.len(), powers.len());
    let u = channels.len();
    let m = channels[0].entries.len();
    let total_power: f64 = powers.iter().sum();
    let alpha = if total_power > 0.0 {
        (u as f64 * noise_power / total_power).max(ALPHA_FLOOR)
    } else {
        ALPHA_FLOOR
    };
    // Rows of H are the conjugate-transposed channels h_kᴴ.
    let h = DMatrix::from_fn(u, m, |i, j| channels[i].entries[j]);
    let gram = &h * h.adjoint() + DMatrix::identity(u, u) * Complex64::new(alpha, 0.0);
    let gram_inv = gram.lu().try_inverse().expect("HHᴴ + αI is positive definite");
    let v_tilde = h.adjoint() * gram_inv;
    (0..u)
        .map(|i| {
            let col = v_tilde.column(i).into_owned();
            let norm = col.norm();
            col / Complex64::new(norm, 0.0)
        })
        .collect()
}

/// Assembles `w_i = √(ρ_i·P_max)·v_i` from simplex ratios and unit-or-zero
/// directions.
pub fn assemble(
    scheduled: &[usize],
    ratios: &[f64],
    directions: &[DVector<Complex64>],
    p_max: f64,
) -> Result<BeamPlan> {
    assert_eq!(ratios.len(), directions.len());
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::Contract(format!("power ratios must sum to 1, got {sum}")));
    }
    let beams = ratios
        .iter()
        .zip(directions.iter())
        .map(|(&rho, v)| v * Complex64::new((rho * p_max).sqrt(), 0.0))
        .collect();
    Ok(BeamPlan {
        scheduled: scheduled.to_vec(),
        ratios: ratios.to_vec(),
        directions: directions.to_vec(),
        beams,
    })
}
