//! Phase-measurement schemes behind one trait, registered by name so the CLI
//! (or any caller) can pick one at runtime.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{to_jm, PrimitiveConvention, SingleModeState, TwoModeState};
use crate::grid::{AngularGrid, AngularPdf};
use crate::naimark::generalized_phase_pdf;
use crate::pegg_barnett::pb_pmf;
use crate::phase_repr::{ml_phase_pdf, phase_pdf};
use crate::relphase::{marginal_pdf, snapshot_pdf};

/// Either a single oscillator or a system-plus-auxiliary / R-L pair.
#[derive(Clone, Debug, PartialEq)]
pub enum StateInput {
    Single(SingleModeState),
    Two(TwoModeState),
}

impl StateInput {
    pub fn n_max(&self) -> u32 {
        match self {
            Self::Single(s) => s.n_max(),
            Self::Two(s) => s.n_max(),
        }
    }

    fn single(&self, scheme: &str) -> Result<SingleModeState> {
        match self {
            Self::Single(s) => Ok(s.clone()),
            Self::Two(s) => s.system_mode().ok_or_else(|| Error::UnsupportedInput {
                scheme: scheme.to_string(),
                reason: "a two-mode state with auxiliary excitations".into(),
            }),
        }
    }

    /// Single-mode inputs are embedded with the auxiliary mode in vacuum.
    pub fn two(&self) -> TwoModeState {
        match self {
            Self::Single(s) => s.with_auxiliary_vacuum(),
            Self::Two(s) => s.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureOptions {
    pub k: usize,
    /// Absolute time for conditioned schemes.
    pub t: f64,
    pub convention: PrimitiveConvention,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self { k: crate::phase_repr::DEFAULT_GRID, t: 0.0, convention: PrimitiveConvention::Photonic }
    }
}

pub trait PhaseMeasurement: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Density per radian on a `opts.k`-point grid over `[-pi, pi)`.
    fn distribution(&self, input: &StateInput, opts: &MeasureOptions) -> Result<AngularPdf>;
}

/// Canonical single-mode phase density.
pub struct Canonical;

impl PhaseMeasurement for Canonical {
    fn name(&self) -> &'static str {
        "single"
    }
    fn summary(&self) -> &'static str {
        "canonical single-mode phase density |psi(phi)|^2 / 2pi"
    }
    fn distribution(&self, input: &StateInput, opts: &MeasureOptions) -> Result<AngularPdf> {
        phase_pdf(&input.single(self.name())?, opts.k)
    }
}

/// Phase density after stripping number-amplitude phases.
pub struct MaxLikelihood;

impl PhaseMeasurement for MaxLikelihood {
    fn name(&self) -> &'static str {
        "ml"
    }
    fn summary(&self) -> &'static str {
        "phase density of the state with every amplitude replaced by its modulus"
    }
    fn distribution(&self, input: &StateInput, opts: &MeasureOptions) -> Result<AngularPdf> {
        ml_phase_pdf(&input.single(self.name())?, opts.k)
    }
}

/// Pegg-Barnett statistics at `s = k - 1`, reported as a density (mass times `k / 2 pi`).
pub struct PeggBarnett;

impl PhaseMeasurement for PeggBarnett {
    fn name(&self) -> &'static str {
        "pegg-barnett"
    }
    fn summary(&self) -> &'static str {
        "discrete phase-state statistics with s + 1 = k angles, as a density"
    }
    fn distribution(&self, input: &StateInput, opts: &MeasureOptions) -> Result<AngularPdf> {
        let state = input.single(self.name())?;
        let s = opts.k.checked_sub(1).ok_or(Error::Aliasing { k: 0, span: 0 })? as u32;
        if s < state.n_max() {
            return Err(Error::TruncationBelowSupport { s, n_max: state.n_max() });
        }
        let pmf = pb_pmf(&state, s)?;
        let scale = opts.k as f64 / (2.0 * PI);
        Ok(AngularPdf { grid: AngularGrid::new(opts.k)?, values: pmf.masses.iter().map(|m| m * scale).collect() })
    }
}

/// Two-sided phase of the auxiliary-mode extension, on states with `n_s n_a = 0`.
pub struct Generalized;

impl PhaseMeasurement for Generalized {
    fn name(&self) -> &'static str {
        "generalized"
    }
    fn summary(&self) -> &'static str {
        "two-sided phase density on the n_s * n_a = 0 subspace"
    }
    fn distribution(&self, input: &StateInput, opts: &MeasureOptions) -> Result<AngularPdf> {
        generalized_phase_pdf(&input.two(), opts.k)
    }
}

/// Time-averaged relative phase between the two modes.
pub struct Marginal;

impl PhaseMeasurement for Marginal {
    fn name(&self) -> &'static str {
        "marginal"
    }
    fn summary(&self) -> &'static str {
        "time-averaged relative-phase density (sum of branch probabilities)"
    }
    fn distribution(&self, input: &StateInput, opts: &MeasureOptions) -> Result<AngularPdf> {
        marginal_pdf(&to_jm(&input.two(), opts.convention), opts.k)
    }
}

/// Relative phase conditioned on absolute time `opts.t`.
pub struct Snapshot;

impl PhaseMeasurement for Snapshot {
    fn name(&self) -> &'static str {
        "snapshot"
    }
    fn summary(&self) -> &'static str {
        "relative-phase density conditioned on absolute time t (sum of branch amplitudes)"
    }
    fn distribution(&self, input: &StateInput, opts: &MeasureOptions) -> Result<AngularPdf> {
        snapshot_pdf(&to_jm(&input.two(), opts.convention), opts.t, opts.k)
    }
}

pub struct MeasurementRegistry {
    schemes: BTreeMap<&'static str, Box<dyn PhaseMeasurement>>,
}

impl MeasurementRegistry {
    pub fn empty() -> Self {
        Self { schemes: BTreeMap::new() }
    }

    /// Registry holding every scheme shipped with the crate.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Canonical));
        r.register(Box::new(MaxLikelihood));
        r.register(Box::new(PeggBarnett));
        r.register(Box::new(Generalized));
        r.register(Box::new(Marginal));
        r.register(Box::new(Snapshot));
        r
    }

    /// Adds a scheme, replacing any existing one of the same name.
    pub fn register(&mut self, scheme: Box<dyn PhaseMeasurement>) {
        self.schemes.insert(scheme.name(), scheme);
    }

    pub fn get(&self, name: &str) -> Result<&dyn PhaseMeasurement> {
        self.schemes.get(name).map(|b| b.as_ref()).ok_or_else(|| Error::UnknownScheme(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.schemes.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn PhaseMeasurement> + '_ {
        self.schemes.values().map(|b| b.as_ref())
    }
}

impl Default for MeasurementRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
