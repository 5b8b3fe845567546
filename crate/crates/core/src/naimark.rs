//! Moment calculus for the two auxiliary-mode extensions of single-mode
//! operators: the heterodyne extension of `a` and the phase extension of the
//! Susskind-Glogower lowering operator `A = sum |n><n+1|`, plus the two-sided
//! phase statistics of the phase extension on `H'` (states with `n_s n_a = 0`).
//!
//! Quadratures follow `chi = (a + a^dag)/2`, `rho = (a - a^dag)/2i`, and the
//! phase parts `C = (A + A^dag)/2`, `S = (A - A^dag)/2i`. Amplitudes beyond
//! `n_max` are taken as zero, so every moment below is the untruncated one.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{SingleModeState, TwoModeState};
use crate::grid::{AngularGrid, AngularPdf, PhaseWavefunction};

/// Zero-point contribution of the auxiliary vacuum to each heterodyne second moment.
pub const ZERO_POINT: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMoments {
    #[serde(rename = "mean_X")]
    pub mean_x: f64,
    #[serde(rename = "mean_P")]
    pub mean_p: f64,
    #[serde(rename = "second_X")]
    pub second_x: f64,
    #[serde(rename = "second_P")]
    pub second_p: f64,
    #[serde(rename = "var_X")]
    pub var_x: f64,
    #[serde(rename = "var_P")]
    pub var_p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YMoments {
    #[serde(rename = "mean_Y1")]
    pub mean_y1: f64,
    #[serde(rename = "mean_Y2")]
    pub mean_y2: f64,
    #[serde(rename = "second_Y1")]
    pub second_y1: f64,
    #[serde(rename = "second_Y2")]
    pub second_y2: f64,
    pub vac_prob: f64,
}

/// `sum_n w(n) conj(psi_n) psi_{n+shift}`
fn band(state: &SingleModeState, shift: usize, w: impl Fn(usize) -> f64) -> C64 {
    let a = state.amplitudes();
    (0..a.len().saturating_sub(shift)).map(|n| a[n].conj() * a[n + shift] * w(n)).sum()
}

/// Single-mode `<chi>, <rho>, <chi^2>, <rho^2>` without any auxiliary noise.
pub fn intrinsic_quadratures(state: &SingleModeState) -> [f64; 4] {
    let norm = state.norm_sqr();
    let a1 = band(state, 1, |n| ((n + 1) as f64).sqrt());
    let a2 = band(state, 2, |n| (((n + 1) * (n + 2)) as f64).sqrt());
    let num = band(state, 0, |n| n as f64).re;
    [a1.re, a1.im, (2.0 * a2.re + 2.0 * num + norm) / 4.0, (-2.0 * a2.re + 2.0 * num + norm) / 4.0]
}

/// Intrinsic variances `<Delta chi^2>`, `<Delta rho^2>` of the system mode alone.
pub fn intrinsic_variances(state: &SingleModeState) -> (f64, f64) {
    let [mx, mp, sx, sp] = intrinsic_quadratures(state);
    (sx - mx * mx, sp - mp * mp)
}

/// Moments of the commuting pair `X`, `P` in heterodyne detection with the image mode in vacuum.
pub fn heterodyne_moments(state: &SingleModeState) -> QuadratureMoments {
    let [mean_x, mean_p, chi2, rho2] = intrinsic_quadratures(state);
    let second_x = chi2 + ZERO_POINT;
    let second_p = rho2 + ZERO_POINT;
    QuadratureMoments {
        mean_x,
        mean_p,
        second_x,
        second_p,
        var_x: second_x - mean_x * mean_x,
        var_p: second_p - mean_p * mean_p,
    }
}

/// `<C^2>` and `<S^2>` on the system mode alone.
pub fn phase_quadrature_squares(state: &SingleModeState) -> (f64, f64) {
    let norm = state.norm_sqr();
    let a2 = band(state, 2, |_| 1.0).re;
    let vac = state.vacuum_probability();
    ((2.0 * a2 + 2.0 * norm - vac) / 4.0, (-2.0 * a2 + 2.0 * norm - vac) / 4.0)
}

/// Moments of `Y1`, `Y2` for the phase extension with the auxiliary mode in vacuum.
pub fn y_moments(state: &SingleModeState) -> YMoments {
    let a1 = band(state, 1, |_| 1.0);
    let (c2, s2) = phase_quadrature_squares(state);
    let vac_prob = state.vacuum_probability();
    YMoments {
        mean_y1: a1.re,
        mean_y2: a1.im,
        second_y1: c2 + vac_prob / 4.0,
        second_y2: s2 + vac_prob / 4.0,
        vac_prob,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutatorResiduals {
    /// `|<C^2> + <S^2> + |psi_0|^2/2 - 1|`
    pub sum_rule: f64,
    /// `|<[C, S]> - i |psi_0|^2 / 2|`
    pub commutator: f64,
}

/// Residuals of the unit-magnitude sum rule and of `[C, S] = i V / 2`, by
/// explicit matrices on the truncated space padded with `pad` empty levels.
///
/// One level of padding is enough for every product of two ladder operators;
/// with `pad = 0` a state touching `n_max` sees `A A^dag != I` at the edge.
pub fn commutator_check_padded(state: &SingleModeState, pad: usize) -> CommutatorResiduals {
    let dim = state.amplitudes().len() + pad;
    let lower = DMatrix::<C64>::from_fn(dim, dim, |r, c| if c == r + 1 { C64::new(1.0, 0.0) } else { C64::default() });
    let raise = lower.adjoint();
    let cos = (&lower + &raise) * C64::new(0.5, 0.0);
    let sin = (&lower - &raise) * C64::new(0.0, -0.5);
    let psi = nalgebra::DVector::from_iterator(dim, (0..dim).map(|n| state.amplitude(n)));
    let expect = |m: &DMatrix<C64>| psi.dotc(&(m * &psi));
    let vac = state.vacuum_probability();
    let c2 = expect(&(&cos * &cos)).re;
    let s2 = expect(&(&sin * &sin)).re;
    let comm = expect(&(&cos * &sin - &sin * &cos));
    CommutatorResiduals {
        sum_rule: (c2 + s2 + vac / 2.0 - state.norm_sqr()).abs(),
        commutator: (comm - C64::new(0.0, vac / 2.0)).norm(),
    }
}

pub fn commutator_check(state: &SingleModeState) -> CommutatorResiduals {
    commutator_check_padded(state, 1)
}

/// True when every non-zero amplitude sits on `n_s n_a = 0`.
pub fn in_h_prime(state: &TwoModeState) -> bool {
    h_prime_violation(state).is_none()
}

fn h_prime_violation(state: &TwoModeState) -> Option<(u32, u32)> {
    state.iter().find(|&((s, a), v)| s > 0 && a > 0 && v.norm_sqr() > 0.0).map(|(k, _)| k)
}

/// `psi'(phi) = sum_m psi_m exp(-i m phi)` with `psi_m = psi_{m,0}` for `m >= 0`
/// and `psi_{0,-m}` for `m < 0`.
pub fn generalized_phase_wavefunction(state: &TwoModeState, k: usize) -> Result<PhaseWavefunction> {
    if let Some((n_s, n_a)) = h_prime_violation(state) {
        return Err(Error::OffHPrime { n_s, n_a });
    }
    let terms: Vec<(i32, C64)> = state.iter().map(|((s, a), v)| (2 * (s as i32 - a as i32), v)).collect();
    let max_m = terms.iter().map(|t| t.0.unsigned_abs() / 2).max().unwrap_or(0) as usize;
    if k <= 2 * max_m {
        return Err(Error::Aliasing { k, span: 2 * max_m });
    }
    let grid = AngularGrid::new(k)?;
    Ok(PhaseWavefunction { grid, values: grid.eval_series(terms)? })
}

pub fn generalized_phase_pdf(state: &TwoModeState, k: usize) -> Result<AngularPdf> {
    Ok(generalized_phase_wavefunction(state, k)?.density())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    #[test]
    fn heterodyne_vacuum() {
        let m = heterodyne_moments(&SingleModeState::vacuum());
        assert_eq!((m.mean_x, m.mean_p), (0.0, 0.0));
        assert!((m.var_x - 0.5).abs() < 1e-15 && (m.var_p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn heterodyne_coherent_and_number() {
        let coh = SingleModeState::coherent_auto(C64::new(1.5, 0.0), 1e-14).unwrap();
        let m = heterodyne_moments(&coh);
        assert!((m.mean_x - 1.5).abs() < 1e-8);
        assert!((m.var_x - 0.5).abs() < 1e-8 && (m.var_p - 0.5).abs() < 1e-8);

        let one = SingleModeState::number(1, 1).unwrap();
        let m = heterodyne_moments(&one);
        assert_eq!(m.mean_x, 0.0);
        assert!((m.second_x - 1.0).abs() < 1e-15);
        assert!((intrinsic_quadratures(&one)[2] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn y_moment_examples() {
        let v = y_moments(&SingleModeState::vacuum());
        assert_eq!((v.mean_y1, v.mean_y2), (0.0, 0.0));
        assert_eq!(phase_quadrature_squares(&SingleModeState::vacuum()), (0.25, 0.25));
        assert_eq!((v.second_y1, v.second_y2), (0.5, 0.5));

        let five = y_moments(&SingleModeState::number(5, 5).unwrap());
        assert_eq!((five.mean_y1, five.mean_y2), (0.0, 0.0));
        assert!((five.second_y1 - 0.5).abs() < 1e-15 && (five.second_y2 - 0.5).abs() < 1e-15);

        let two = y_moments(&SingleModeState::from_real(&[1.0, 1.0]).unwrap());
        assert!((two.mean_y1 - 0.5).abs() < 1e-15 && two.mean_y2.abs() < 1e-15);
    }

    #[test]
    fn commutator_edge_needs_padding() {
        let top = SingleModeState::number(4, 4).unwrap();
        assert!(commutator_check(&top).sum_rule < 1e-12);
        // without padding the truncated A A^dag drops the top level
        assert!((commutator_check_padded(&top, 0).sum_rule - 0.5).abs() < 1e-12);
        let vac = commutator_check(&SingleModeState::vacuum());
        assert!(vac.sum_rule < 1e-15 && vac.commutator < 1e-15);
    }

    #[test]
    fn generalized_pdf_examples() {
        let single = SingleModeState::from_real(&[1.0, 2.0, -0.5]).unwrap();
        let lifted = generalized_phase_pdf(&single.with_auxiliary_vacuum(), 64).unwrap();
        let direct = crate::phase_repr::phase_pdf(&single, 64).unwrap();
        assert!(lifted.max_abs_diff(&direct) < 1e-14);

        let mut amps = BTreeMap::new();
        for m in -2i32..=2 {
            let key = if m >= 0 { (m as u32, 0) } else { (0, (-m) as u32) };
            amps.insert(key, C64::new(1.0, 0.0));
        }
        let st = TwoModeState::from_amplitudes(amps, 2).unwrap();
        let pdf = generalized_phase_pdf(&st, 64).unwrap();
        assert!((pdf.values[32] - 5.0 / (2.0 * PI)).abs() < 1e-12);
        for (phi, &p) in pdf.grid.angles().zip(&pdf.values).skip(1) {
            if phi.abs() > 1e-12 {
                let dirichlet = (2.5 * phi).sin() / (0.5 * phi).sin();
                assert!((p - dirichlet * dirichlet / 5.0 / (2.0 * PI)).abs() < 1e-12);
            }
        }

        let aux = generalized_phase_pdf(&TwoModeState::basis(0, 1), 16).unwrap();
        assert!(aux.values.iter().all(|&p| (p - 1.0 / (2.0 * PI)).abs() < 1e-14));
    }

    #[test]
    fn off_h_prime_rejected() {
        let st = TwoModeState::basis(1, 1);
        assert_eq!(generalized_phase_pdf(&st, 16), Err(Error::OffHPrime { n_s: 1, n_a: 1 }));
    }
}
