//! Uniform planar array geometry, angle-of-departure computation, and
//! steering-vector synthesis.
//!
//! The array lies in the horizontal plane under the UAV. An element at grid
//! index `(ix, iy)` contributes the phase
//! `-(2π/λ)·sin(ϑ)·(d_x·ix·cos(ψ) + d_y·iy·sin(ψ))` toward azimuth `ψ` and
//! elevation `ϑ`, and entries are flattened y-major so the full vector is the
//! Kronecker product of the per-axis steering vectors (y ⊗ x).

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::SPEED_OF_LIGHT;

/// Uniform planar array geometry and per-element gain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrayConfig {
    /// Element count along x.
    pub mx: usize,
    /// Element count along y.
    pub my: usize,
    /// Element spacing along x, meters.
    pub spacing_x: f64,
    /// Element spacing along y, meters.
    pub spacing_y: f64,
    /// Carrier wavelength, meters.
    pub wavelength: f64,
    /// Per-element antenna gain, linear.
    pub elem_gain: f64,
}

impl ArrayConfig {
    /// Half-wavelength-spaced `mx × my` array at carrier frequency `fc` (Hz).
    pub fn half_wave(mx: usize, my: usize, fc: f64, elem_gain: f64) -> Self {
        let wavelength = SPEED_OF_LIGHT / fc;
        Self {
            mx,
            my,
            spacing_x: wavelength / 2.0,
            spacing_y: wavelength / 2.0,
            wavelength,
            elem_gain,
        }
    }

    /// Total element count `M = mx · my`.
    pub fn num_elements(&self) -> usize {
        self.mx * self.my
    }
}

/// Angle of departure from the UAV toward a ground point.
///
/// Elevation is measured from the downward vertical: `0` means directly below
/// the UAV, `π/2` the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aod {
    /// Azimuth in `[-π, π]`.
    pub azimuth: f64,
    /// Elevation in `[0, π/2]`.
    pub elevation: f64,
}

/// Complex per-element phase vector, unit modulus per entry, flattened
/// y-major (entry `iy·mx + ix`).
#[derive(Debug, Clone)]
pub struct SteeringVector {
    pub entries: DVector<Complex64>,
}

impl SteeringVector {
    /// Euclidean norm; equals `√M` since every entry has unit modulus.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Unit-norm copy of this vector.
    pub fn normalized(&self) -> DVector<Complex64> {
        &self.entries / Complex64::new(self.norm(), 0.0)
    }
}

/// Angle of departure from `uav_pos` (altitude > 0) to `ground_pos` (z = 0).
///
/// The overhead degeneracy (ground point directly beneath the UAV) returns
/// azimuth `atan2(0, 0) = 0` and elevation `0`; the steering vector is
/// angle-continuous there.
pub fn compute_aod(uav_pos: [f64; 3], ground_pos: [f64; 3]) -> Aod {
    let dx = ground_pos[0] - uav_pos[0];
    let dy = ground_pos[1] - uav_pos[1];
    let dz = uav_pos[2] - ground_pos[2];
    let dist = (dx * dx + dy * dy + dz * dz).sqrt();
    let azimuth = dy.atan2(dx);
    // Clamp guards floating-point overshoot when dist ≈ altitude.
    let elevation = if dist > 0.0 {
        (dz / dist).clamp(-1.0, 1.0).acos()
    } else {
        0.0
    };
    Aod { azimuth, elevation }
}

/// Steering vector of `cfg` toward `aod`.
pub fn steering_vector(cfg: &ArrayConfig, aod: &Aod) -> SteeringVector {
    let m = cfg.num_elements();
    let sin_t = aod.elevation.sin();
    let kx = -2.0 * std::f64::consts::PI / cfg.wavelength * sin_t * aod.azimuth.cos() * cfg.spacing_x;
    let ky = -2.0 * std::f64::consts::PI / cfg.wavelength * sin_t * aod.azimuth.sin() * cfg.spacing_y;
    let mut entries = DVector::from_element(m, Complex64::new(0.0, 0.0));
    for iy in 0..cfg.my {
        for ix in 0..cfg.mx {
            let phase = kx * ix as f64 + ky * iy as f64;
            entries[iy * cfg.mx + ix] = Complex64::from_polar(1.0, phase);
        }
    }
    SteeringVector { entries }
}
