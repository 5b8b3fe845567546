//! Discrete phase statistics on the truncated space `n <= s` and their
//! convergence in distribution to the continuous single-mode phase law.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::SingleModeState;
use crate::grid::AngularGrid;

/// Probability mass on the `s + 1` angles `theta_m = -pi + 2 pi m / (s + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscretePhasePmf {
    pub s: u32,
    pub theta: Vec<f64>,
    pub masses: Vec<f64>,
}

impl DiscretePhasePmf {
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Right-continuous cumulative masses anchored at `-pi`.
    pub fn cumulative(&self) -> Vec<f64> {
        self.masses
            .iter()
            .scan(0.0, |acc, &m| {
                *acc += m;
                Some(*acc)
            })
            .collect()
    }
}

/// Measurement statistics of the truncated, renormalized state on the `s + 1`
/// orthogonal truncated phase kets.
pub fn pb_pmf(state: &SingleModeState, s: u32) -> Result<DiscretePhasePmf> {
    let cut = state.truncated(s)?;
    let grid = AngularGrid::new(s as usize + 1)?;
    let terms = cut.amplitudes().iter().enumerate().map(|(n, &a)| (2 * n as i32, a));
    let scale = (s as f64 + 1.0).recip();
    let masses = grid.eval_series(terms)?.into_iter().map(|v| v.norm_sqr() * scale).collect();
    Ok(DiscretePhasePmf { s, theta: grid.angles().collect(), masses })
}

/// Exact CDF of the continuous phase density, `F(phi) = int_{-pi}^{phi} P`.
#[derive(Clone, Debug)]
pub struct ContinuousCdf {
    // |psi(phi)|^2 = sum_k autocorr[k + n] exp(-i k phi), k = -n..=n
    autocorr: Vec<C64>,
    n: i64,
}

impl ContinuousCdf {
    pub fn new(state: &SingleModeState) -> Self {
        let a = state.amplitudes();
        let n = a.len() as i64 - 1;
        let autocorr = (-n..=n)
            .map(|k| {
                (0..a.len() as i64)
                    .filter(|&p| p + k >= 0 && p + k <= n)
                    .map(|p| a[(p + k) as usize] * a[p as usize].conj())
                    .sum()
            })
            .collect();
        Self { autocorr, n }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let mut acc = C64::default();
        for (i, &c) in self.autocorr.iter().enumerate() {
            let k = i as i64 - self.n;
            if k == 0 {
                acc += c * (phi + PI);
            } else {
                let kf = k as f64;
                let prim = (C64::from_polar(1.0, -kf * phi) - C64::from_polar(1.0, kf * PI)) / C64::new(0.0, -kf);
                acc += c * prim;
            }
        }
        acc.re / (2.0 * PI)
    }
}

/// Kolmogorov (sup-norm) distance between the discrete and continuous phase CDFs.
pub fn kolmogorov_distance(state: &SingleModeState, s: u32) -> Result<f64> {
    if s < state.n_max() {
        return Err(Error::TruncationBelowSupport { s, n_max: state.n_max() });
    }
    let pmf = pb_pmf(state, s)?;
    let cdf = ContinuousCdf::new(state);
    let mut before = 0.0;
    let mut worst: f64 = 0.0;
    for (&theta, after) in pmf.theta.iter().zip(pmf.cumulative()) {
        let f = cdf.eval(theta);
        worst = worst.max((f - before).abs()).max((f - after).abs());
        before = after;
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub s: u32,
    pub distance: f64,
}

/// Kolmogorov distance for each truncation in `s_list` (each must be `>= n_max`).
pub fn pb_convergence(state: &SingleModeState, s_list: &[u32]) -> Result<Vec<ConvergencePoint>> {
    s_list.iter().map(|&s| Ok(ConvergencePoint { s, distance: kolmogorov_distance(state, s)? })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_uniform() {
        let pmf = pb_pmf(&SingleModeState::vacuum(), 3).unwrap();
        assert!(pmf.masses.iter().all(|&m| (m - 0.25).abs() < 1e-15));
        assert_eq!(pmf.theta[0], -PI);
    }

    #[test]
    fn two_point_transform() {
        let st = SingleModeState::from_real(&[1.0, 1.0]).unwrap();
        let pmf = pb_pmf(&st, 1).unwrap();
        assert_eq!(pmf.theta, vec![-PI, 0.0]);
        assert!(pmf.masses[0].abs() < 1e-15);
        assert!((pmf.masses[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn number_state_is_uniform() {
        let pmf = pb_pmf(&SingleModeState::number(2, 4).unwrap(), 4).unwrap();
        assert!(pmf.masses.iter().all(|&m| (m - 0.2).abs() < 1e-15));
    }

    #[test]
    fn truncation_uses_renormalized_state() {
        // support beyond s: statistics must be those of the cut, renormalized state
        let st = SingleModeState::from_real(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let pmf = pb_pmf(&st, 1).unwrap();
        assert!((pmf.total() - 1.0).abs() < 1e-14);
        let direct = pb_pmf(&SingleModeState::from_real(&[1.0, 1.0]).unwrap(), 1).unwrap();
        for (a, b) in pmf.masses.iter().zip(&direct.masses) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cdf_endpoints_and_closed_form() {
        let st = SingleModeState::from_real(&[1.0, 1.0]).unwrap();
        let cdf = ContinuousCdf::new(&st);
        assert!(cdf.eval(-PI).abs() < 1e-15);
        assert!((cdf.eval(PI) - 1.0).abs() < 1e-14);
        for phi in [-2.0, -0.3, 0.0, 1.1, 3.0] {
            // int (1 + cos x) / 2 pi from -pi
            let exact = (phi + PI + phi.sin()) / (2.0 * PI);
            assert!((cdf.eval(phi) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn vacuum_and_number_distance_bound() {
        for s in [4, 16, 33] {
            let d = kolmogorov_distance(&SingleModeState::vacuum(), s).unwrap();
            assert!(d <= 1.0 / (s as f64 + 1.0) + 1e-12);
            let d1 = kolmogorov_distance(&SingleModeState::number(1, 1).unwrap(), s).unwrap();
            assert!(d1 <= 1.0 / (s as f64 + 1.0) + 1e-12);
        }
    }

    #[test]
    fn precondition_s_at_least_n_max() {
        let st = SingleModeState::number(3, 5).unwrap();
        assert_eq!(kolmogorov_distance(&st, 4), Err(Error::TruncationBelowSupport { s: 4, n_max: 5 }));
    }
}
