//! Error type shared across the simulator.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SimError {
    /// A physical or numerical parameter violates its constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Requested operation does not support the given configuration
    /// (e.g. lab-frame build with dissipation).
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// State dimension does not match the operator or basis.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Adaptive integration failed (step-size underflow), with the time
    /// at which it gave up.
    #[error("integration failure at t = {t_us} us: {reason}")]
    IntegrationFailure { t_us: f64, reason: String },

    /// Adiabatic elimination invalid: the parameters sit too close to
    /// the 1 - 2s = 0 pole of the reduced model.
    #[error("resonance proximity: |1 - 2s| = {magnitude} <= 0.05, adiabatic elimination invalid")]
    ResonanceProximity { magnitude: f64 },

    /// The effective 4-photon coupling vanishes; no gate exists.
    #[error("no gate: effective coupling is zero ({0})")]
    NoGate(String),

    /// Requested basis state is outside the truncated basis.
    #[error("unknown basis state: {0}")]
    UnknownState(String),

    /// Sweep grid exceeds the configured cap.
    #[error("sweep grid of {points} points exceeds cap {cap}")]
    SweepTooLarge { points: usize, cap: usize },

    /// Configuration document is syntactically or semantically invalid.
    #[error("config error: {0}")]
    Config(String),

    /// File I/O failure.
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
