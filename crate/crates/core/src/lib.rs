//! One-dimensional Dirac particle in a square well.
//!
//! Bound states, phase shifts, threshold behaviour, vacuum charge and the positron
//! spectrum emitted when the well is switched past criticality. Natural units, `ħ = c = 1`.

pub mod acceptance;
pub mod boxmodes;
pub mod continuation;
pub mod delta;
pub mod emission;
pub mod error;
pub mod kinematics;
pub mod levinson;
pub mod params;
pub mod roots;
pub mod scattering;
pub mod spectrum;
pub mod spinor;
pub mod wavefunction;

pub use error::{Error, Result};
pub use params::{EnergySign, Parity, WellParams};
