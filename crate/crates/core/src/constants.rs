//! Frozen physical constants and unit conversions.
//!
//! All gains, powers, and SNRs are carried in linear units internally; dB
//! appears only at I/O boundaries.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Power ratio from decibels.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Decibels from a linear power ratio. Clamped away from zero so that a
/// zero-valued metric prints as a large negative number instead of `-inf`.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.max(1e-30).log10()
}

/// Watts from dBm.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}
