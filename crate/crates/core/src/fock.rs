//! Truncated one- and two-mode Fock states, the (j, m) re-indexing of two-mode
//! amplitudes, and free time evolution.
//!
//! Every constructor renormalizes after truncation and keeps the discarded
//! probability mass so callers can see how much the cut cost.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the Poisson tail discarded by coherent-state truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Norm tolerance carried by every state invariant.
pub const NORM_TOL: f64 = 1e-10;

fn norm_sqr<'a>(amps: impl IntoIterator<Item = &'a C64>) -> f64 {
    amps.into_iter().map(|a| a.norm_sqr()).sum()
}

/// Probability that a Poisson variable of mean `mean` exceeds `n_max`.
///
/// Summed upward from the cut rather than as `1 - cdf`, so tails far below
/// machine epsilon stay accurate.
pub fn poisson_tail(mean: f64, n_max: u32) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut ln_fact: f64 = (1..=n_max + 1).map(|k| (k as f64).ln()).sum();
    let mut n = n_max + 1;
    let mut total = 0.0;
    loop {
        let term = (-mean + n as f64 * ln_mean - ln_fact).exp();
        total += term;
        if n as f64 > mean && term <= total * 1e-18 {
            break;
        }
        if n > n_max + 100_000 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    total.min(1.0)
}

/// Smallest truncation whose discarded Poisson tail is below `tail_tol`.
pub fn poisson_cutoff(mean: f64, tail_tol: f64) -> u32 {
    let mut n = mean.floor() as u32;
    // walk down first in case mean is large but tol is loose
    while n > 0 && poisson_tail(mean, n - 1) < tail_tol {
        n -= 1;
    }
    while poisson_tail(mean, n) >= tail_tol {
        n += 1;
    }
    n
}

/// Pure state of a single oscillator on the number basis `0..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleModeState {
    amps: Vec<C64>,
    discarded: f64,
}

impl SingleModeState {
    /// Normalizes the given amplitudes; index is the photon number.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let norm = norm_sqr(&amps);
        if amps.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let scale = norm.sqrt().recip();
        Ok(Self { amps: amps.into_iter().map(|a| a * scale).collect(), discarded: 0.0 })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    pub fn number(n: u32, n_max: u32) -> Result<Self> {
        if n > n_max {
            return Err(Error::Truncation { n, n_max });
        }
        let mut amps = vec![C64::new(0.0, 0.0); n_max as usize + 1];
        amps[n as usize] = C64::new(1.0, 0.0);
        Ok(Self { amps, discarded: 0.0 })
    }

    pub fn vacuum() -> Self {
        Self { amps: vec![C64::new(1.0, 0.0)], discarded: 0.0 }
    }

    /// Coherent state `|alpha>` cut at `n_max`.
    ///
    /// Fails when the Poisson tail beyond `n_max` is not below `tail_tol`; the
    /// error carries the smallest adequate `n_max`.
    pub fn coherent(alpha: C64, n_max: u32, tail_tol: f64) -> Result<Self> {
        let mean = alpha.norm_sqr();
        let tail = poisson_tail(mean, n_max);
        if tail >= tail_tol {
            return Err(Error::TruncationInsufficient {
                n_max,
                tail,
                tail_tol,
                required: poisson_cutoff(mean, tail_tol),
            });
        }
        let mut amps = Vec::with_capacity(n_max as usize + 1);
        let mut a = C64::new((-mean / 2.0).exp(), 0.0);
        for n in 0..=n_max {
            amps.push(a);
            a = a * alpha / ((n + 1) as f64).sqrt();
        }
        let mut state = Self::from_amplitudes(amps)?;
        state.discarded = tail;
        Ok(state)
    }

    /// Coherent state with the smallest truncation meeting `tail_tol`.
    pub fn coherent_auto(alpha: C64, tail_tol: f64) -> Result<Self> {
        Self::coherent(alpha, poisson_cutoff(alpha.norm_sqr(), tail_tol), tail_tol)
    }

    pub fn n_max(&self) -> u32 {
        (self.amps.len() - 1) as u32
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude of `|n>`, zero beyond the truncation.
    pub fn amplitude(&self, n: usize) -> C64 {
        self.amps.get(n).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Probability mass dropped (before renormalization) when this state was cut.
    pub fn discarded_mass(&self) -> f64 {
        self.discarded
    }

    pub fn vacuum_probability(&self) -> f64 {
        self.amps[0].norm_sqr()
    }

    /// Restriction to `n <= s`, renormalized; the discarded mass is recorded.
    pub fn truncated(&self, s: u32) -> Result<Self> {
        let keep = (s as usize + 1).min(self.amps.len());
        let kept = self.amps[..keep].to_vec();
        let lost = norm_sqr(&self.amps[keep..]);
        let mut out = Self::from_amplitudes(kept)?;
        out.discarded = lost;
        Ok(out)
    }

    /// Same state with every amplitude replaced by its modulus.
    pub fn phase_stripped(&self) -> Self {
        Self { amps: self.amps.iter().map(|a| C64::new(a.norm(), 0.0)).collect(), discarded: self.discarded }
    }

    /// Zero-padded copy with truncation `n_max`.
    pub fn padded(&self, n_max: u32) -> Self {
        let mut amps = self.amps.clone();
        if amps.len() < n_max as usize + 1 {
            amps.resize(n_max as usize + 1, C64::default());
        }
        Self { amps, discarded: self.discarded }
    }

    /// Embeds this state as `|psi>_s |0>_a`.
    pub fn with_auxiliary_vacuum(&self) -> TwoModeState {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(n, &a)| ((n as u32, 0), a))
            .collect();
        TwoModeState { ket: TwoModeKet { amps }, n_max: self.n_max(), discarded: self.discarded }
    }
}

/// Unnormalized sparse vector on the two-mode number basis, keyed by `(n_s, n_a)`.
///
/// Operator images (J_z, J_+, ...) land here since they need not be unit norm.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TwoModeKet {
    amps: BTreeMap<(u32, u32), C64>,
}

impl TwoModeKet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_map(amps: BTreeMap<(u32, u32), C64>) -> Self {
        Self { amps }
    }

    pub fn get(&self, n_s: u32, n_a: u32) -> C64 {
        self.amps.get(&(n_s, n_a)).copied().unwrap_or_default()
    }

    /// Adds `amp` to the coefficient of `|n_s, n_a>`.
    pub fn add(&mut self, n_s: u32, n_a: u32, amp: C64) {
        *self.amps.entry((n_s, n_a)).or_default() += amp;
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), C64)> + '_ {
        self.amps.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(self.amps.values())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &TwoModeKet) -> C64 {
        self.amps.iter().map(|(k, a)| a.conj() * other.amps.get(k).copied().unwrap_or_default()).sum()
    }

    pub fn scaled(&self, c: C64) -> TwoModeKet {
        Self { amps: self.amps.iter().map(|(&k, &v)| (k, v * c)).collect() }
    }

    pub fn sub(&self, other: &TwoModeKet) -> TwoModeKet {
        let mut out = self.clone();
        for (&(s, a), &v) in &other.amps {
            out.add(s, a, -v);
        }
        out
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.amps.values().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest `n_s + n_a` among stored keys with non-zero amplitude.
    pub fn max_total(&self) -> u32 {
        self.amps.iter().filter(|(_, a)| a.norm_sqr() > 0.0).map(|(&(s, a), _)| s + a).max().unwrap_or(0)
    }
}

impl AsRef<TwoModeKet> for TwoModeKet {
    fn as_ref(&self) -> &TwoModeKet {
        self
    }
}

/// Normalized pure state on `H_s (x) H_a` with `n_s + n_a <= n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    ket: TwoModeKet,
    n_max: u32,
    discarded: f64,
}

impl TwoModeState {
    pub fn from_amplitudes(amps: BTreeMap<(u32, u32), C64>, n_max: u32) -> Result<Self> {
        if let Some(&(s, a)) = amps.keys().find(|&&(s, a)| s + a > n_max) {
            return Err(Error::Truncation { n: s + a, n_max });
        }
        Self::from_ket(TwoModeKet { amps }, n_max, 0.0)
    }

    /// Normalizes `ket`; `discarded` is the mass already cut away by the caller.
    pub(crate) fn from_ket(ket: TwoModeKet, n_max: u32, discarded: f64) -> Result<Self> {
        let norm = ket.norm_sqr();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let ket = ket.scaled(C64::new(norm.sqrt().recip(), 0.0));
        Ok(Self { ket, n_max, discarded })
    }

    pub fn basis(n_s: u32, n_a: u32) -> Self {
        let mut ket = TwoModeKet::new();
        ket.add(n_s, n_a, C64::new(1.0, 0.0));
        Self { ket, n_max: n_s + n_a, discarded: 0.0 }
    }

    /// Builds `sum f(n_s, n_a) |n_s, n_a>` over `n_s + n_a <= n_max`, then normalizes.
    pub fn from_fn(n_max: u32, discarded: f64, mut f: impl FnMut(u32, u32) -> C64) -> Result<Self> {
        let mut ket = TwoModeKet::new();
        for total in 0..=n_max {
            for n_s in 0..=total {
                let a = f(n_s, total - n_s);
                if a.norm_sqr() > 0.0 {
                    ket.add(n_s, total - n_s, a);
                }
            }
        }
        Self::from_ket(ket, n_max, discarded)
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn ket(&self) -> &TwoModeKet {
        &self.ket
    }

    pub fn get(&self, n_s: u32, n_a: u32) -> C64 {
        self.ket.get(n_s, n_a)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), C64)> + '_ {
        self.ket.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.ket.norm_sqr()
    }

    pub fn discarded_mass(&self) -> f64 {
        self.discarded
    }

    /// Same amplitudes under a different truncation label; fails if any key no longer fits.
    pub fn with_n_max(&self, n_max: u32) -> Result<Self> {
        let top = self.ket.max_total();
        if top > n_max {
            return Err(Error::Truncation { n: top, n_max });
        }
        Ok(Self { n_max, ..self.clone() })
    }

    /// Applies `amp -> amp * phase(n_s, n_a)`; `phase` must have unit modulus.
    pub(crate) fn map_phases(&self, phase: impl Fn(u32, u32) -> C64) -> Self {
        let amps = self.ket.amps.iter().map(|(&(s, a), &v)| ((s, a), v * phase(s, a))).collect();
        Self { ket: TwoModeKet { amps }, n_max: self.n_max, discarded: self.discarded }
    }

    /// Restriction to the `n_a = 0` line as a single-mode state, if that is the whole support.
    pub fn system_mode(&self) -> Option<SingleModeState> {
        if self.ket.iter().any(|((_, a), v)| a > 0 && v.norm_sqr() > 0.0) {
            return None;
        }
        let mut amps = vec![C64::default(); self.n_max as usize + 1];
        for ((s, _), v) in self.ket.iter() {
            amps[s as usize] = v;
        }
        let mut st = SingleModeState::from_amplitudes(amps).ok()?;
        st.discarded = self.discarded;
        Some(st)
    }
}

impl AsRef<TwoModeKet> for TwoModeState {
    fn as_ref(&self) -> &TwoModeKet {
        &self.ket
    }
}

/// Free evolution `psi_{n_s,n_a} -> psi_{n_s,n_a} exp(-i (n_s + n_a) t)` at unit frequency.
pub fn evolve(state: &TwoModeState, t: f64) -> TwoModeState {
    state.map_phases(|s, a| C64::from_polar(1.0, -((s + a) as f64) * t))
}

/// How oscillator occupations map onto angular-momentum quantum numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveConvention {
    /// `j = n_s + n_a`, `m = n_s - n_a`; m steps by two within a branch.
    Photonic,
    /// Schwinger's spin-1/2 primitives: `j = (n_u + n_d)/2`, `m = (n_u - n_d)/2`.
    Fermionic,
}

impl PrimitiveConvention {
    pub fn name(self) -> &'static str {
        match self {
            Self::Photonic => "photonic",
            Self::Fermionic => "fermionic",
        }
    }

    /// Doubled `(j, m)` of the basis ket `|n_s, n_a>`.
    pub fn key(self, n_s: u32, n_a: u32) -> JmKey {
        let (two_j, two_m) = (n_s + n_a, n_s as i32 - n_a as i32);
        match self {
            Self::Photonic => JmKey { two_j: 2 * two_j, two_m: 2 * two_m },
            Self::Fermionic => JmKey { two_j, two_m },
        }
    }

    /// Occupations `(n_s, n_a)` of a doubled `(j, m)` pair, if it is allowed.
    pub fn occupations(self, key: JmKey) -> Result<(u32, u32)> {
        let bad = || Error::InvalidJm { two_j: key.two_j, two_m: key.two_m, convention: self.name() };
        if key.two_m.unsigned_abs() > key.two_j {
            return Err(bad());
        }
        let (sum, diff) = match self {
            Self::Photonic => {
                if !key.two_j.is_multiple_of(2) || key.two_m % 2 != 0 {
                    return Err(bad());
                }
                (key.two_j / 2, key.two_m / 2)
            }
            Self::Fermionic => (key.two_j, key.two_m),
        };
        let n_s2 = sum as i64 + diff as i64;
        if n_s2 % 2 != 0 {
            return Err(bad());
        }
        let n_s = (n_s2 / 2) as u32;
        Ok((n_s, sum - n_s))
    }

    /// Exponent multiplying `t` in free evolution of a ket in branch `key`, i.e. `n_s + n_a`.
    pub fn total_quanta(self, key: JmKey) -> u32 {
        match self {
            Self::Photonic => key.two_j / 2,
            Self::Fermionic => key.two_j,
        }
    }
}

impl fmt::Display for PrimitiveConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `(j, m)` stored doubled so half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JmKey {
    pub two_j: u32,
    pub two_m: i32,
}

impl JmKey {
    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn m(self) -> f64 {
        self.two_m as f64 / 2.0
    }
}

/// Two-mode state indexed by `(j, m)` under a primitive convention.
#[derive(Clone, Debug, PartialEq)]
pub struct JmState {
    amps: BTreeMap<JmKey, C64>,
    convention: PrimitiveConvention,
    n_max: u32,
}

impl JmState {
    /// Validates every key against the convention, then normalizes.
    pub fn from_amplitudes(convention: PrimitiveConvention, amps: BTreeMap<JmKey, C64>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (&k, &v) in &amps {
            let (s, a) = convention.occupations(k)?;
            map.insert((s, a), v);
        }
        let n_max = map.keys().map(|&(s, a)| s + a).max().unwrap_or(0);
        let two = TwoModeState::from_amplitudes(map, n_max)?;
        Ok(to_jm(&two, convention))
    }

    pub fn convention(&self) -> PrimitiveConvention {
        self.convention
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn get(&self, key: JmKey) -> C64 {
        self.amps.get(&key).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (JmKey, C64)> + '_ {
        self.amps.iter().map(|(&k, &v)| (k, v))
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(self.amps.values())
    }

    /// Distinct doubled j values carrying non-zero amplitude, ascending.
    pub fn branches(&self) -> Vec<u32> {
        let mut js: Vec<u32> = self.amps.iter().filter(|(_, v)| v.norm_sqr() > 0.0).map(|(k, _)| k.two_j).collect();
        js.dedup();
        js
    }

    /// Largest `|2m|` with non-zero amplitude.
    pub fn max_abs_two_m(&self) -> u32 {
        self.amps.iter().filter(|(_, v)| v.norm_sqr() > 0.0).map(|(k, _)| k.two_m.unsigned_abs()).max().unwrap_or(0)
    }
}

pub fn to_jm(state: &TwoModeState, convention: PrimitiveConvention) -> JmState {
    let amps = state.iter().map(|((s, a), v)| (convention.key(s, a), v)).collect();
    JmState { amps, convention, n_max: state.n_max() }
}

pub fn from_jm(state: &JmState) -> TwoModeState {
    let amps = state
        .amps
        .iter()
        .map(|(&k, &v)| (state.convention.occupations(k).expect("JmState keys are validated"), v))
        .collect();
    TwoModeState { ket: TwoModeKet { amps }, n_max: state.n_max, discarded: 0.0 }
}
