//! Relative-phase statistics of two-mode states organised by angular-momentum
//! branch.
//!
//! Each `j` branch carries the angle wavefunction
//! `Psi_j(phi) = sum_m Psi_{j,m} exp(-i m phi)`. Averaging over absolute time
//! adds branch probabilities (the marginal); conditioning on an absolute time
//! adds branch amplitudes (the snapshot). The weight of the conditioning event,
//! `C(t)`, doubles as the absolute-time density `C(t) / 2 pi`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{evolve, from_jm, to_jm, JmKey, JmState, PrimitiveConvention};
use crate::grid::{AngularGrid, AngularPdf};

/// Conditioning probabilities at or below this are refused.
pub const C_MIN: f64 = 1e-12;

pub const DEFAULT_TIME_GRID: usize = 256;

/// Branch wavefunctions sampled on a shared grid, keyed by doubled `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSet {
    pub convention: PrimitiveConvention,
    pub grid: AngularGrid,
    pub branches: BTreeMap<u32, Vec<C64>>,
}

impl BranchSet {
    /// `sum_j (1/2 pi) int |Psi_j|^2`
    pub fn total_norm(&self) -> f64 {
        self.branches
            .values()
            .map(|v| self.grid.integrate(&v.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()))
            .sum::<f64>()
            / (2.0 * PI)
    }
}

fn check_grid(state: &JmState, k: usize) -> Result<AngularGrid> {
    let span = state.max_abs_two_m() as usize;
    if k <= span {
        return Err(Error::Aliasing { k, span });
    }
    AngularGrid::new(k)
}

fn by_branch(state: &JmState) -> BTreeMap<u32, Vec<(i32, C64)>> {
    let mut out: BTreeMap<u32, Vec<(i32, C64)>> = BTreeMap::new();
    for (key, v) in state.iter() {
        out.entry(key.two_j).or_default().push((key.two_m, v));
    }
    out
}

pub fn branch_wavefunctions(state: &JmState, k: usize) -> Result<BranchSet> {
    let grid = check_grid(state, k)?;
    let branches = by_branch(state)
        .into_iter()
        .map(|(two_j, terms)| Ok((two_j, grid.eval_series(terms)?)))
        .collect::<Result<_>>()?;
    Ok(BranchSet { convention: state.convention(), grid, branches })
}

/// Time-averaged relative-phase density `(1/2 pi) sum_j |Psi_j(phi)|^2`.
pub fn marginal_pdf(state: &JmState, k: usize) -> Result<AngularPdf> {
    let set = branch_wavefunctions(state, k)?;
    let mut values = vec![0.0; k];
    for branch in set.branches.values() {
        for (v, z) in values.iter_mut().zip(branch) {
            *v += z.norm_sqr() / (2.0 * PI);
        }
    }
    Ok(AngularPdf { grid: set.grid, values })
}

/// Amplitude for each `m` after evolving for time `t`, summed over branches.
fn m_amplitudes(state: &JmState, t: f64) -> BTreeMap<i32, C64> {
    let conv = state.convention();
    let mut out: BTreeMap<i32, C64> = BTreeMap::new();
    for (key, v) in state.iter() {
        let n = conv.total_quanta(key) as f64;
        *out.entry(key.two_m).or_default() += v * C64::from_polar(1.0, -n * t);
    }
    out
}

/// `C(t) = sum_m |sum_j Psi_{j,m} exp(-i N_j t)|^2` with `N_j` the total quanta of branch `j`.
pub fn conditioning_probability(state: &JmState, t: f64) -> f64 {
    m_amplitudes(state, t).values().map(|a| a.norm_sqr()).sum()
}

fn check_parity(state: &JmState) -> Result<()> {
    let mut parities = state.iter().filter(|(_, v)| v.norm_sqr() > 0.0).map(|(k, _)| k.two_m.rem_euclid(2));
    match parities.next() {
        Some(p) if parities.any(|q| q != p) => Err(Error::HalfIntegerMix),
        _ => Ok(()),
    }
}

fn condition(values: Vec<C64>, grid: AngularGrid, t: f64) -> Result<AngularPdf> {
    let sq: Vec<f64> = values.iter().map(|z| z.norm_sqr()).collect();
    let c = grid.integrate(&sq) / (2.0 * PI);
    if c <= C_MIN {
        return Err(Error::ConditioningImpossible { t, c, c_min: C_MIN });
    }
    Ok(AngularPdf { grid, values: sq.into_iter().map(|p| p / (2.0 * PI * c)).collect() })
}

/// Relative-phase density conditioned on absolute time `t`: the state is
/// evolved by `t` and the branch amplitudes are added at zero absolute time.
pub fn snapshot_pdf(state: &JmState, t: f64, k: usize) -> Result<AngularPdf> {
    check_parity(state)?;
    let moved = to_jm(&evolve(&from_jm(state), t), state.convention());
    let set = branch_wavefunctions(&moved, k)?;
    let mut sum = vec![C64::default(); k];
    for branch in set.branches.values() {
        for (s, z) in sum.iter_mut().zip(branch) {
            *s += z;
        }
    }
    condition(sum, set.grid, t)
}

/// Same density as [`snapshot_pdf`], built from the per-`m` amplitudes instead of per-branch sums.
pub fn snapshot_pdf_via_m_amplitudes(state: &JmState, t: f64, k: usize) -> Result<AngularPdf> {
    check_parity(state)?;
    let grid = check_grid(state, k)?;
    let values = grid.eval_series(m_amplitudes(state, t))?;
    condition(values, grid, t)
}

/// Absolute-time density `C(t) / 2 pi` on `t_k = -pi + 2 pi k / k_t`.
///
/// `C` is a trigonometric polynomial of degree at most the largest total
/// quanta `N`, so `k_t > 2 N` samples it without aliasing and the grid sum
/// integrates it exactly.
pub fn absolute_time_pdf(state: &JmState, k_t: usize) -> Result<AngularPdf> {
    let top = state.iter().map(|(key, _)| state.convention().total_quanta(key)).max().unwrap_or(0);
    let span = 2 * top as usize;
    if k_t <= span {
        return Err(Error::Aliasing { k: k_t, span });
    }
    let grid = AngularGrid::new(k_t)?;
    let values = grid.angles().map(|t| conditioning_probability(state, t) / (2.0 * PI)).collect();
    Ok(AngularPdf { grid, values })
}

/// `(1/2 pi) int C(t) P_C(phi; t) dt` on the time grid of [`absolute_time_pdf`].
///
/// Times refused by [`C_MIN`] contribute nothing, which is exact since their
/// weight is below it.
pub fn time_averaged_snapshots(state: &JmState, k: usize, k_t: usize) -> Result<AngularPdf> {
    let times = absolute_time_pdf(state, k_t)?;
    let mut acc = vec![0.0; k];
    let mut grid = None;
    for (t, &w) in times.grid.angles().zip(&times.values) {
        match snapshot_pdf(state, t, k) {
            Ok(p) => {
                for (a, v) in acc.iter_mut().zip(&p.values) {
                    *a += w * v * times.grid.step();
                }
                grid = Some(p.grid);
            }
            Err(Error::ConditioningImpossible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(AngularPdf { grid: grid.map_or_else(|| AngularGrid::new(k), Ok)?, values: acc })
}

/// Key helper for building states by hand: `(j, m)` given in doubled units.
pub fn jm(two_j: u32, two_m: i32) -> JmKey {
    JmKey { two_j, two_m }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PH: PrimitiveConvention = PrimitiveConvention::Photonic;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn state(conv: PrimitiveConvention, amps: &[(u32, i32, f64)]) -> JmState {
        JmState::from_amplitudes(conv, amps.iter().map(|&(j, m, a)| (jm(j, m), c(a))).collect()).unwrap()
    }

    /// |1>_x + |2>_x, normalized, photonic keys (doubled)
    fn one_plus_two() -> JmState {
        let h = 0.5;
        let q = 0.5 / 2f64.sqrt();
        state(PH, &[(2, 2, h), (2, -2, h), (4, 0, h), (4, 4, q), (4, -4, q)])
    }

    #[test]
    fn branch_forms() {
        let set = branch_wavefunctions(&one_plus_two(), 64).unwrap();
        let s2 = 2f64.sqrt();
        for (i, phi) in set.grid.angles().enumerate() {
            assert!((set.branches[&2][i] * s2 - c(s2 * phi.cos())).norm() < 1e-12);
            assert!((set.branches[&4][i] * s2 - c((2.0 * phi).cos() + 1.0 / s2)).norm() < 1e-12);
        }
        assert!((set.total_norm() - 1.0).abs() < 1e-12);

        let one = branch_wavefunctions(&state(PH, &[(2, 2, 1.0)]), 16).unwrap();
        for (i, phi) in one.grid.angles().enumerate() {
            assert!((one.branches[&2][i] - C64::from_polar(1.0, -phi)).norm() < 1e-13);
        }
        assert!(matches!(branch_wavefunctions(&one_plus_two(), 4), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn conditioning_examples() {
        assert!((conditioning_probability(&one_plus_two(), 0.0) - 1.0).abs() < 1e-14);
        let single = state(PH, &[(4, 0, 0.6), (4, 4, 0.8)]);
        for t in [0.0, 0.4, 2.0] {
            assert!((conditioning_probability(&single, t) - 1.0).abs() < 1e-14);
        }
        let pair = state(PH, &[(0, 0, 1.0), (4, 0, 1.0)]);
        assert!((conditioning_probability(&pair, 0.0) - 2.0).abs() < 1e-14);
        assert!((conditioning_probability(&pair, PI) - 2.0).abs() < 1e-13);
        assert!(conditioning_probability(&pair, PI / 2.0) < 1e-14);
        assert!(matches!(snapshot_pdf(&pair, PI / 2.0, 16), Err(Error::ConditioningImpossible { .. })));
    }

    #[test]
    fn snapshot_ratio_and_reversal() {
        let st = one_plus_two();
        let k = 64;
        let p0 = snapshot_pdf(&st, 0.0, k).unwrap();
        let s2 = 2f64.sqrt();
        let want = ((1.0 - s2 + 1.0 / s2) / (1.0 + s2 + 1.0 / s2)).powi(2);
        assert!((p0.at(PI) / p0.at(0.0) - want).abs() < 1e-10);
        assert_eq!(p0.argmax(), k / 2);
        assert!((p0.integral() - 1.0).abs() < 1e-12);

        let pi = snapshot_pdf(&st, PI, k).unwrap();
        assert_eq!(pi.argmax(), 0);
    }

    #[test]
    fn marginal_examples() {
        let m = marginal_pdf(&one_plus_two(), 64).unwrap();
        assert!((m.integral() - 1.0).abs() < 1e-12);
        let peaks = m.local_maxima();
        assert!(peaks.contains(&0) && peaks.contains(&32));

        let vac = marginal_pdf(&state(PH, &[(0, 0, 1.0)]), 16).unwrap();
        assert!(vac.values.iter().all(|&p| (p - 1.0 / (2.0 * PI)).abs() < 1e-14));

        let single = state(PH, &[(6, 2, 0.6), (6, -6, 0.8)]);
        let marg = marginal_pdf(&single, 32).unwrap();
        for t in [0.0, 1.0, -2.5] {
            assert!(snapshot_pdf(&single, t, 32).unwrap().max_abs_diff(&marg) < 1e-14);
        }
    }

    #[test]
    fn m_route_agrees() {
        let st = one_plus_two();
        for t in [0.0, 0.7, PI] {
            let a = snapshot_pdf(&st, t, 64).unwrap();
            let b = snapshot_pdf_via_m_amplitudes(&st, t, 64).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn absolute_time_examples() {
        let single = state(PH, &[(4, 0, 1.0)]);
        let u = absolute_time_pdf(&single, 16).unwrap();
        assert!(u.values.iter().all(|&p| (p - 1.0 / (2.0 * PI)).abs() < 1e-14));

        let pair = state(PH, &[(0, 0, 1.0), (4, 0, 1.0)]);
        let d = absolute_time_pdf(&pair, 32).unwrap();
        for (t, &p) in d.grid.angles().zip(&d.values) {
            assert!((p - (1.0 + (2.0 * t).cos()) / (2.0 * PI)).abs() < 1e-13);
        }
        assert!((d.integral() - 1.0).abs() < 1e-12);
        assert!(absolute_time_pdf(&pair, 4).is_err());
    }

    #[test]
    fn mixture_reproduces_marginal() {
        let st = one_plus_two();
        let avg = time_averaged_snapshots(&st, 64, 16).unwrap();
        assert!(avg.max_abs_diff(&marginal_pdf(&st, 64).unwrap()) < 1e-12);
    }

    #[test]
    fn fermionic_half_integer_handling() {
        let f = PrimitiveConvention::Fermionic;
        let spinor = state(f, &[(1, 1, 1.0), (1, -1, 1.0)]);
        let p = snapshot_pdf(&spinor, 0.0, 32).unwrap();
        assert!((p.integral() - 1.0).abs() < 1e-12);
        let mixed = state(f, &[(0, 0, 1.0), (1, 1, 1.0)]);
        assert_eq!(snapshot_pdf(&mixed, 0.0, 32), Err(Error::HalfIntegerMix));
        assert!((marginal_pdf(&mixed, 32).unwrap().integral() - 1.0).abs() < 1e-12);
    }
}
