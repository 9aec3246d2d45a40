//! Photon transmission through a coupled-resonator optical waveguide doped
//! with three-level Lambda atoms: polariton band structures, group
//! velocities, EIT susceptibility, and adiabatic storage and retrieval of
//! light pulses.
//!
//! The crate is organized along the physics:
//!
//! - [`model`]: parameters, the Brillouin-zone grid, the bare dispersion and
//!   the per-mode 3x3 coupling matrix;
//! - [`spectra`]: closed-form diagonalization into polariton branches, band
//!   structures and group velocities;
//! - [`response`]: steady-state susceptibility and transparency windows;
//! - [`dynamics`]: time-domain pulse evolution, ramp schedules, storage
//!   protocols and the real-space ring oracle.

pub mod dynamics;
pub mod model;
pub mod response;
pub mod spectra;

pub use dynamics::{PulseState, RampControl, RampSchedule, StorageReport};
pub use model::{KGrid, ModeMatrix, ModelParams};
pub use response::{SusceptibilityPoint, TransparencyWindow};
pub use spectra::{BandStructure, PolaritonBranch};
