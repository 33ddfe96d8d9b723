//! Discrete-time Kalman filter over the 4-state constant-velocity model with
//! SNR-gated updates.
//!
//! State ordering is `(x, y, v_x, v_y)`; the radar measures position only and
//! velocity is inferred through the motion model.

use nalgebra::{Matrix2, Matrix2x4, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constant-velocity process model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KfModel {
    /// Slot duration δ_t, seconds.
    pub dt: f64,
    /// Process-noise variance q₀².
    pub process_var: f64,
}

impl KfModel {
    pub fn new(dt: f64, process_var: f64) -> Self {
        Self { dt, process_var }
    }

    /// Transition matrix with the identity-plus-δ_t block form.
    pub fn transition(&self) -> Matrix4<f64> {
        let mut f = Matrix4::identity();
        f[(0, 2)] = self.dt;
        f[(1, 3)] = self.dt;
        f
    }

    /// Process-noise covariance q₀²·I₄.
    pub fn process_noise(&self) -> Matrix4<f64> {
        Matrix4::identity() * self.process_var
    }

    /// Position selector H.
    pub fn measurement_matrix(&self) -> Matrix2x4<f64> {
        Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    }
}

/// Filter mean and covariance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KfState {
    /// Estimate (x, y, v_x, v_y).
    pub mean: Vector4<f64>,
    /// Error covariance, symmetric PSD.
    pub cov: Matrix4<f64>,
}

impl KfState {
    /// Initial state at a known start position with zero velocity and the
    /// default uncertainty diag(100, 100, 25, 25): 10 m position std, 5 m/s
    /// velocity std, wide enough to absorb the UAV spawn perturbation.
    pub fn at_position(pos: [f64; 2]) -> Self {
        Self {
            mean: Vector4::new(pos[0], pos[1], 0.0, 0.0),
            cov: Matrix4::from_diagonal(&Vector4::new(100.0, 100.0, 25.0, 25.0)),
        }
    }

    /// Horizontal position component of the mean.
    pub fn position(&self) -> [f64; 2] {
        [self.mean[0], self.mean[1]]
    }
}

/// Time update: mean ← F·mean, cov ← F·cov·Fᵀ + Q, symmetry re-enforced.
pub fn predict(model: &KfModel, state: &KfState) -> KfState {
    let f = model.transition();
    let mean = f * state.mean;
    let cov = f * state.cov * f.transpose() + model.process_noise();
    KfState { mean, cov: symmetrize(&cov) }
}

/// Measurement update with position measurement `z` and covariance `R`.
///
/// The innovation system is solved through a Cholesky factorization; failure
/// signals an ill-conditioned input.
pub fn update(model: &KfModel, prior: &KfState, z: [f64; 2], r: &Matrix2<f64>) -> Result<KfState> {
    let h = model.measurement_matrix();
    let s = h * prior.cov * h.transpose() + r;
    let chol = s
        .cholesky()
        .ok_or_else(|| Error::Domain("innovation covariance is not positive definite".into()))?;
    // K = C⁻ Hᵀ S⁻¹, via S Kᵀ = H C⁻.
    let gain = (chol.solve(&(h * prior.cov))).transpose();
    let innovation = Vector2::new(z[0], z[1]) - h * prior.mean;
    let mean = prior.mean + gain * innovation;
    let cov = (Matrix4::identity() - gain * h) * prior.cov;
    Ok(KfState { mean, cov: symmetrize(&cov) })
}

/// Predict always; update only when a gated measurement is supplied.
pub fn gated_step(
    model: &KfModel,
    state: &KfState,
    maybe_measurement: Option<([f64; 2], Matrix2<f64>)>,
) -> Result<KfState> {
    let prior = predict(model, state);
    match maybe_measurement {
        Some((z, r)) => update(model, &prior, z, &r),
        None => Ok(prior),
    }
}

fn symmetrize(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m + m.transpose()) * 0.5
}
