//! Phase and angle distributions of truncated one- and two-mode oscillator
//! states: canonical single-mode phase, Pegg-Barnett convergence,
//! auxiliary-mode moment calculus, two-oscillator angular momentum and the
//! relative-phase (polarization) distributions built on it.

pub mod angular_momentum;
pub mod error;
pub mod fock;
pub mod grid;
pub mod io;
pub mod measurement;
pub mod naimark;
pub mod pegg_barnett;
pub mod phase_repr;
pub mod polarization;
pub mod relphase;

pub use error::{Error, Result};
pub use fock::{
    evolve, from_jm, to_jm, JmKey, JmState, PrimitiveConvention, SingleModeState, TwoModeKet, TwoModeState,
};
pub use grid::{AngularGrid, AngularPdf, PhaseWavefunction};
pub use measurement::{MeasureOptions, MeasurementRegistry, PhaseMeasurement, StateInput};
pub use polarization::LinearPolSpec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
