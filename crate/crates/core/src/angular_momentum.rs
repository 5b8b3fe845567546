//! Angular momentum from two oscillators, in Schwinger's fermionic-primitive
//! form and in the photonic form built on circular polarization modes.
//!
//! Photonic: `J_z = n_r - n_l`, `J_+ = 2 a_r^dag a_l`, `J_- = 2 a_l^dag a_r`,
//! structure constant 2. Fermionic: `J_z = (n_u - n_d)/2`, `J_+ = a_u^dag a_d`,
//! structure constant 1. `hbar = 1`. The first mode of a [`TwoModeState`] is
//! `r` (or `u`), the second `l` (or `d`).
//!
//! The ladders conserve `n_s + n_a`, so on the space `n_s + n_a <= n_max`
//! no ladder image is ever clipped by the truncation.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{PrimitiveConvention, TwoModeKet, TwoModeState};

/// Dense operator construction is confined to small truncations.
pub const DENSE_LIMIT: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JOperatorSet {
    pub convention: PrimitiveConvention,
}

impl JOperatorSet {
    pub fn new(convention: PrimitiveConvention) -> Self {
        Self { convention }
    }

    pub fn photonic() -> Self {
        Self::new(PrimitiveConvention::Photonic)
    }

    pub fn fermionic() -> Self {
        Self::new(PrimitiveConvention::Fermionic)
    }

    /// `c` in `[J_i, J_j] = i c eps_ijk J_k`.
    pub fn structure_constant(&self) -> f64 {
        match self.convention {
            PrimitiveConvention::Photonic => 2.0,
            PrimitiveConvention::Fermionic => 1.0,
        }
    }

    fn ladder_scale(&self) -> f64 {
        self.structure_constant()
    }

    pub fn m_of(&self, n_s: u32, n_a: u32) -> f64 {
        let diff = n_s as f64 - n_a as f64;
        match self.convention {
            PrimitiveConvention::Photonic => diff,
            PrimitiveConvention::Fermionic => diff / 2.0,
        }
    }

    pub fn apply_jz(&self, state: &impl AsRef<TwoModeKet>) -> TwoModeKet {
        let mut out = TwoModeKet::new();
        for ((s, a), v) in state.as_ref().iter() {
            out.add(s, a, v * self.m_of(s, a));
        }
        out
    }

    pub fn apply_jplus(&self, state: &impl AsRef<TwoModeKet>) -> TwoModeKet {
        let mut out = TwoModeKet::new();
        for ((s, a), v) in state.as_ref().iter() {
            if a > 0 {
                out.add(s + 1, a - 1, v * self.ladder_scale() * (((s + 1) * a) as f64).sqrt());
            }
        }
        out
    }

    pub fn apply_jminus(&self, state: &impl AsRef<TwoModeKet>) -> TwoModeKet {
        let mut out = TwoModeKet::new();
        for ((s, a), v) in state.as_ref().iter() {
            if s > 0 {
                out.add(s - 1, a + 1, v * self.ladder_scale() * ((s * (a + 1)) as f64).sqrt());
            }
        }
        out
    }

    /// `J^2 = (J_+ J_- + J_- J_+)/2 + J_z^2` applied to `state`.
    pub fn apply_j_squared(&self, state: &impl AsRef<TwoModeKet>) -> TwoModeKet {
        let pm = self.apply_jplus(&self.apply_jminus(state));
        let mp = self.apply_jminus(&self.apply_jplus(state));
        let zz = self.apply_jz(&self.apply_jz(state));
        let mut out = zz;
        for ((s, a), v) in pm.iter().chain(mp.iter()) {
            out.add(s, a, v * 0.5);
        }
        out
    }

    /// Eigenvalue of the operator `J^2` on the branch with `n_s + n_a = total`.
    ///
    /// Fermionic: `j (j + 1)` with `j = total / 2`. Photonic: the doubled
    /// ladders give `j (j + 2)` with `j = total`.
    pub fn casimir(&self, total: u32) -> f64 {
        let n = total as f64;
        match self.convention {
            PrimitiveConvention::Photonic => n * (n + 2.0),
            PrimitiveConvention::Fermionic => (n / 2.0) * (n / 2.0 + 1.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JSquaredCheck {
    /// `<psi|J^2|psi>` from the ladder-operator identity.
    pub operator_value: f64,
    /// Closed form for the branch.
    pub closed_form: f64,
}

/// Applies `J^2` to a single-branch state and confirms it is an eigenvector.
pub fn j_squared_eigencheck(state: &TwoModeState, convention: PrimitiveConvention) -> Result<JSquaredCheck> {
    let mut totals: Vec<u32> = state.iter().filter(|(_, v)| v.norm_sqr() > 0.0).map(|((s, a), _)| s + a).collect();
    totals.sort_unstable();
    totals.dedup();
    if totals.len() != 1 {
        let doubled = totals.iter().map(|&t| convention.key(t, 0).two_j).collect();
        return Err(Error::MixedJ(doubled));
    }
    let ops = JOperatorSet::new(convention);
    let image = ops.apply_j_squared(state);
    let operator_value = state.ket().inner(&image).re / state.norm_sqr();
    let residual = image.sub(&state.ket().scaled(C64::new(operator_value, 0.0))).max_abs();
    if residual > 1e-12 * operator_value.max(1.0) {
        return Err(Error::NotEigenstate(residual));
    }
    Ok(JSquaredCheck { operator_value, closed_form: ops.casimir(totals[0]) })
}

/// Independent phase shifts `exp(-i n_s theta_s)` and `exp(-i n_a theta_a)` on the two modes.
pub fn mode_phase_shift(state: &TwoModeState, theta_s: f64, theta_a: f64) -> TwoModeState {
    state.map_phases(|s, a| C64::from_polar(1.0, -(s as f64 * theta_s + a as f64 * theta_a)))
}

/// Rotation about the propagation axis in the circular basis:
/// `psi_{n_r,n_l} -> psi_{n_r,n_l} exp(-i (n_r - n_l) phi)`.
pub fn rotate_z(state: &TwoModeState, phi: f64) -> TwoModeState {
    mode_phase_shift(state, phi, -phi)
}

/// Dense J matrices on the basis `{|n_s, n_a> : n_s + n_a <= n_max}`.
#[derive(Clone, Debug)]
pub struct JMatrices {
    pub basis: Vec<(u32, u32)>,
    pub jz: DMatrix<C64>,
    pub jplus: DMatrix<C64>,
    pub jminus: DMatrix<C64>,
}

impl JMatrices {
    pub fn build(ops: &JOperatorSet, n_max: u32) -> Result<Self> {
        if n_max > DENSE_LIMIT {
            return Err(Error::DenseTooLarge { n_max, limit: DENSE_LIMIT });
        }
        let basis: Vec<(u32, u32)> = (0..=n_max).flat_map(|t| (0..=t).rev().map(move |s| (s, t - s))).collect();
        let index: BTreeMap<(u32, u32), usize> = basis.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let dim = basis.len();
        let matrix = |apply: &dyn Fn(&TwoModeKet) -> TwoModeKet| {
            let mut m = DMatrix::<C64>::zeros(dim, dim);
            for (col, &(s, a)) in basis.iter().enumerate() {
                let mut ket = TwoModeKet::new();
                ket.add(s, a, C64::new(1.0, 0.0));
                for (key, v) in apply(&ket).iter() {
                    m[(index[&key], col)] += v;
                }
            }
            m
        };
        Ok(Self {
            jz: matrix(&|k| ops.apply_jz(k)),
            jplus: matrix(&|k| ops.apply_jplus(k)),
            jminus: matrix(&|k| ops.apply_jminus(k)),
            basis,
        })
    }

    pub fn jx(&self) -> DMatrix<C64> {
        (&self.jplus + &self.jminus) * C64::new(0.5, 0.0)
    }

    pub fn jy(&self) -> DMatrix<C64> {
        (&self.jplus - &self.jminus) * C64::new(0.0, -0.5)
    }
}

fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Max-abs residuals of the angular-momentum algebra on the truncated space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub structure_constant: f64,
    /// `[J_x, J_y] - i c J_z`
    pub xy: f64,
    /// `[J_y, J_z] - i c J_x`
    pub yz: f64,
    /// `[J_z, J_x] - i c J_y`
    pub zx: f64,
    /// `[J_+, J_-] - 2 c J_z`
    pub plus_minus: f64,
    /// `[J_z, J_+] - c J_+`
    pub z_plus: f64,
    /// `[J_z, J_-] + c J_-`
    pub z_minus: f64,
    /// `J^2` minus its closed-form diagonal
    pub casimir: f64,
}

impl CommutatorReport {
    pub fn worst(&self) -> f64 {
        [self.xy, self.yz, self.zx, self.plus_minus, self.z_plus, self.z_minus, self.casimir]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn commutator_residuals(convention: PrimitiveConvention, n_max: u32) -> Result<CommutatorReport> {
    let ops = JOperatorSet::new(convention);
    let m = JMatrices::build(&ops, n_max)?;
    let c = ops.structure_constant();
    let ic = C64::new(0.0, c);
    let (jx, jy, jz) = (m.jx(), m.jy(), m.jz.clone());
    let j2 = (&m.jplus * &m.jminus + &m.jminus * &m.jplus) * C64::new(0.5, 0.0) + &jz * &jz;
    let casimir = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        m.basis.len(),
        m.basis.iter().map(|&(s, a)| C64::new(ops.casimir(s + a), 0.0)),
    ));
    Ok(CommutatorReport {
        structure_constant: c,
        xy: max_abs(&(commutator(&jx, &jy) - &jz * ic)),
        yz: max_abs(&(commutator(&jy, &jz) - &jx * ic)),
        zx: max_abs(&(commutator(&jz, &jx) - &jy * ic)),
        plus_minus: max_abs(&(commutator(&m.jplus, &m.jminus) - &jz * C64::new(2.0 * c, 0.0))),
        z_plus: max_abs(&(commutator(&jz, &m.jplus) - &m.jplus * C64::new(c, 0.0))),
        z_minus: max_abs(&(commutator(&jz, &m.jminus) + &m.jminus * C64::new(c, 0.0))),
        casimir: max_abs(&(j2 - casimir)),
    })
}
