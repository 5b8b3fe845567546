//! State-spec strings, the JSON state file format and CSV number formatting.
//!
//! Spec strings: `num:n`, `coh:N` (real amplitude, mean photon number `N`),
//! `xnum:n`, `xcoh:N`, `xsup:n1,w1;n2,w2`, and `file:path.json`.
//!
//! JSON state file:
//! `{"kind": "single" | "two", "n_max": 4, "amps": [[n_s, n_a, re, im], ...]}`.
//! Single-mode files must have `n_a = 0` throughout.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{SingleModeState, TwoModeState};
use crate::measurement::StateInput;
use crate::polarization::{to_circular_with_tol, LinearPolSpec};

/// Version of the state-file layout and CSV conventions.
pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Single,
    Two,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub kind: StateKind,
    pub n_max: u32,
    pub amps: Vec<(u32, u32, f64, f64)>,
}

impl StateFile {
    pub fn into_state(self) -> Result<StateInput> {
        match self.kind {
            StateKind::Single => {
                let mut amps = vec![C64::default(); self.n_max as usize + 1];
                for (n, a, re, im) in self.amps {
                    if a != 0 {
                        return Err(Error::Format(format!("single-mode entry has n_a = {a}")));
                    }
                    if n > self.n_max {
                        return Err(Error::Format(format!("n = {n} exceeds n_max = {}", self.n_max)));
                    }
                    amps[n as usize] += C64::new(re, im);
                }
                Ok(StateInput::Single(SingleModeState::from_amplitudes(amps)?))
            }
            StateKind::Two => {
                let mut map: BTreeMap<(u32, u32), C64> = BTreeMap::new();
                for (s, a, re, im) in self.amps {
                    if s + a > self.n_max {
                        return Err(Error::Format(format!("n_s + n_a = {} exceeds n_max = {}", s + a, self.n_max)));
                    }
                    *map.entry((s, a)).or_default() += C64::new(re, im);
                }
                Ok(StateInput::Two(TwoModeState::from_amplitudes(map, self.n_max)?))
            }
        }
    }

    pub fn from_state(state: &StateInput) -> Self {
        match state {
            StateInput::Single(s) => StateFile {
                kind: StateKind::Single,
                n_max: s.n_max(),
                amps: s.amplitudes().iter().enumerate().map(|(n, a)| (n as u32, 0, a.re, a.im)).collect(),
            },
            StateInput::Two(s) => StateFile {
                kind: StateKind::Two,
                n_max: s.n_max(),
                amps: s.iter().map(|((n, m), a)| (n, m, a.re, a.im)).collect(),
            },
        }
    }
}

pub fn read_state_file(path: &Path) -> Result<StateInput> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    file.into_state()
}

/// Parsed spec string, before a concrete truncation is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Number(u32),
    Coherent(f64),
    Polarized(LinearPolSpec),
    File(String),
}

impl std::str::FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').ok_or_else(|| Error::Spec(format!("missing ':' in '{s}'")))?;
        match kind {
            "num" => body
                .trim()
                .parse()
                .map(StateSpec::Number)
                .map_err(|_| Error::Spec(format!("expected a photon number, got '{body}'"))),
            "coh" => match body.trim().parse::<f64>() {
                Ok(m) if m >= 0.0 && m.is_finite() => Ok(StateSpec::Coherent(m)),
                _ => Err(Error::Spec(format!("expected a mean photon number >= 0, got '{body}'"))),
            },
            "xnum" | "xcoh" | "xsup" => s.parse().map(StateSpec::Polarized),
            "file" if !body.is_empty() => Ok(StateSpec::File(body.to_string())),
            _ => Err(Error::Spec(format!("unknown state kind '{kind}'"))),
        }
    }
}

impl StateSpec {
    /// Builds the state; `n_max = None` picks the smallest truncation meeting `tail_tol`.
    pub fn build(&self, n_max: Option<u32>, tail_tol: f64) -> Result<StateInput> {
        match self {
            StateSpec::Number(n) => Ok(StateInput::Single(SingleModeState::number(*n, n_max.unwrap_or(*n))?)),
            StateSpec::Coherent(mean) => {
                let alpha = C64::new(mean.sqrt(), 0.0);
                let st = match n_max {
                    Some(n) => SingleModeState::coherent(alpha, n, tail_tol)?,
                    None => SingleModeState::coherent_auto(alpha, tail_tol)?,
                };
                Ok(StateInput::Single(st))
            }
            StateSpec::Polarized(p) => {
                Ok(StateInput::Two(to_circular_with_tol(p, n_max.unwrap_or_else(|| p.auto_n_max(tail_tol)), tail_tol)?))
            }
            StateSpec::File(path) => read_state_file(Path::new(path)),
        }
    }
}

/// 15 significant digits, `.` decimal separator, independent of locale.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_num(v)).collect::<Vec<_>>().join(",")
}
