//! Single-mode continuous phase representation.
//!
//! The number amplitudes `psi_n` are the Fourier coefficients of the phase
//! wavefunction `psi(phi) = sum_n psi_n exp(-i n phi)`, and the phase density
//! is `|psi(phi)|^2 / 2 pi`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::SingleModeState;
use crate::grid::{AngularGrid, AngularPdf, PhaseWavefunction};

pub const DEFAULT_GRID: usize = 1024;

/// Default grid for a truncation: 1024 points, or the next power of two
/// holding `4 (n_max + 1)`.
pub fn default_grid(n_max: u32) -> usize {
    DEFAULT_GRID.max((4 * (n_max as usize + 1)).next_power_of_two())
}

fn check_nyquist(k: usize, n_max: u32) -> Result<AngularGrid> {
    let span = 2 * n_max as usize;
    if k <= span {
        return Err(Error::Aliasing { k, span });
    }
    AngularGrid::new(k)
}

pub fn phase_wavefunction(state: &SingleModeState, k: usize) -> Result<PhaseWavefunction> {
    let grid = check_nyquist(k, state.n_max())?;
    let terms = state.amplitudes().iter().enumerate().map(|(n, &a)| (2 * n as i32, a));
    Ok(PhaseWavefunction { grid, values: grid.eval_series(terms)? })
}

pub fn phase_pdf(state: &SingleModeState, k: usize) -> Result<AngularPdf> {
    Ok(phase_wavefunction(state, k)?.density())
}

/// Phase density after the maximum-likelihood phase-stripping step: every
/// `psi_n` replaced by `|psi_n|`.
pub fn ml_phase_pdf(state: &SingleModeState, k: usize) -> Result<AngularPdf> {
    phase_pdf(&state.phase_stripped(), k)
}

/// `<n^order>` from the phase wavefunction alone, by spectral differentiation
/// on the grid.
///
/// With `psi(phi) = sum psi_n exp(-i n phi)` the number operator acts as
/// `i d/dphi`, so this returns `sum_n n^order |psi_n|^2` up to round-off.
pub fn number_moment_spectral(state: &SingleModeState, order: u32, k: usize) -> Result<f64> {
    let wf = phase_wavefunction(state, k)?;
    let mut planner = FftPlanner::new();
    let mut coeffs = wf.values.clone();
    planner.plan_fft_inverse(k).process(&mut coeffs);
    for (b, c) in coeffs.iter_mut().enumerate() {
        let freq = if b <= k / 2 { b as f64 } else { b as f64 - k as f64 };
        *c *= freq.powi(order as i32) / k as f64;
    }
    planner.plan_fft_forward(k).process(&mut coeffs);
    let acc: C64 = wf.values.iter().zip(&coeffs).map(|(p, d)| p.conj() * d).sum();
    Ok(acc.re / k as f64)
}

/// Qualitative check of the log-integrability condition on `|psi(phi)|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PaleyWienerReport {
    /// Grid estimate of `(1/2 pi) int |log |psi(phi)|| dphi`.
    pub integral_log_abs: f64,
    pub min_density: f64,
    /// Share of grid points with density below the caller's epsilon.
    pub fraction_below: f64,
    /// Number of grid points whose `|psi|^2` was floored at machine epsilon.
    pub floored: usize,
}

pub fn paley_wiener_diagnostics(pdf: &AngularPdf, eps: f64) -> PaleyWienerReport {
    let k = pdf.values.len();
    let mut floored = 0;
    let logs: Vec<f64> = pdf
        .values
        .iter()
        .map(|&p| {
            let mut abs_sq = 2.0 * PI * p;
            if abs_sq < f64::EPSILON {
                floored += 1;
                abs_sq = f64::EPSILON;
            }
            0.5 * abs_sq.ln().abs()
        })
        .collect();
    PaleyWienerReport {
        integral_log_abs: pdf.grid.integrate(&logs) / (2.0 * PI),
        min_density: pdf.min(),
        fraction_below: pdf.values.iter().filter(|&&p| p < eps).count() as f64 / k as f64,
        floored,
    }
}
