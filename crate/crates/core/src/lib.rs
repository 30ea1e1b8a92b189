//! Simulator for a cavity-mediated conditional phase gate between two
//! 4-state atoms sharing a single cavity mode.
//!
//! The crate integrates the truncated-basis Schrodinger dynamics generated
//! by the (generally non-Hermitian) effective Hamiltonian, implements the
//! adiabatic-elimination reduced models for the 4-photon 2-atom resonance,
//! and orchestrates the full conditional-phase-gate protocol with
//! dissipative success-rate and fidelity metrics.
//!
//! All frequency inputs are ordinary frequencies in MHz, matching the
//! conventional "(2pi) X MHz" notation; conversion to angular rad/us
//! happens once, inside [`model::ParameterSet`]. Times are in us.
//!
//! Core math is generic over the floating-point scalar via [`Real`];
//! `f64` aliases are exported at the crate root.

pub mod dynamics;
pub mod error;
pub mod gate;
pub mod hamiltonian;
pub mod matrix;
pub mod model;
pub mod reduction;

pub mod cli;

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

pub use error::SimError;

/// Scalar type the simulator is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
}

/// Complex number over the generic scalar.
pub type C<T> = Complex<T>;

/// Two pi, in the scalar type.
pub fn tau<T: Real>() -> T {
    T::PI() + T::PI()
}

// Concrete f64 aliases for the common case.
pub type ParameterSet64 = model::ParameterSet<f64>;
pub type BasisState64 = model::BasisState;
pub type StateVector64 = model::StateVector<f64>;
pub type PulseEnvelope64 = model::PulseEnvelope<f64>;
pub type GeneratorMatrix64 = hamiltonian::GeneratorMatrix<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type ReducedParameters64 = reduction::ReducedParameters<f64>;
pub type GateReport64 = gate::GateReport<f64>;
