//! x-polarized light in the circular basis.
//!
//! With `a_x = (a_R + a_L)/sqrt(2)` and the y mode in vacuum, `|n>_x` expands
//! binomially over `|k>_R |n-k>_L`, and an x coherent state of mean photon
//! number `N` is a product of R and L coherent states of mean `N/2` each.
//! Relative phase between R and L is the field direction, measured from x.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{poisson_cutoff, poisson_tail, to_jm, JmState, PrimitiveConvention, TwoModeState, DEFAULT_TAIL_TOL};
use crate::grid::{AngularGrid, AngularPdf};
use crate::relphase::{conditioning_probability, marginal_pdf, snapshot_pdf};

/// dB value assigned to the peak of every plotted density.
pub const DB_PEAK: f64 = 60.0;

#[derive(Clone, Debug, PartialEq)]
pub enum LinearPolSpec {
    /// `|n>_x |0>_y`
    XNumber(u32),
    /// x coherent state with the given mean photon number, real amplitude.
    XCoherent(f64),
    /// `sum_i w_i |n_i>_x |0>_y`, normalized on construction of the state.
    XSuperposition(Vec<(u32, C64)>),
}

impl LinearPolSpec {
    pub fn superposition(terms: Vec<(u32, C64)>) -> Result<Self> {
        if terms.iter().map(|(_, w)| w.norm_sqr()).sum::<f64>() == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self::XSuperposition(terms))
    }

    /// Smallest truncation representing the spec; coherent specs use the tail rule.
    pub fn auto_n_max(&self, tail_tol: f64) -> u32 {
        match self {
            Self::XNumber(n) => *n,
            Self::XCoherent(mean) => poisson_cutoff(*mean, tail_tol),
            Self::XSuperposition(terms) => terms.iter().map(|t| t.0).max().unwrap_or(0),
        }
    }
}

fn parse_u32(tok: &str) -> Result<u32> {
    tok.trim().parse().map_err(|_| Error::Spec(format!("expected a photon number, got '{tok}'")))
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.trim().parse().map_err(|_| Error::Spec(format!("expected a number, got '{tok}'")))
}

/// `re`, `re+imi`, `re-imi`, `imi`
pub(crate) fn parse_complex(tok: &str) -> Result<C64> {
    let t = tok.trim();
    C64::from_str(t).map_err(|_| Error::Spec(format!("expected a complex weight, got '{tok}'")))
}

impl FromStr for LinearPolSpec {
    type Err = Error;

    /// `xnum:n`, `xcoh:N`, `xsup:n1,w1;n2,w2;...`
    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').ok_or_else(|| Error::Spec(format!("missing ':' in '{s}'")))?;
        match kind {
            "xnum" => Ok(Self::XNumber(parse_u32(body)?)),
            "xcoh" => {
                let mean = parse_f64(body)?;
                if !(mean >= 0.0 && mean.is_finite()) {
                    return Err(Error::Spec(format!("mean photon number must be >= 0, got '{body}'")));
                }
                Ok(Self::XCoherent(mean))
            }
            "xsup" => {
                let terms = body
                    .split(';')
                    .map(|term| {
                        let (n, w) = term
                            .split_once(',')
                            .ok_or_else(|| Error::Spec(format!("expected 'n,weight', got '{term}'")))?;
                        Ok((parse_u32(n)?, parse_complex(w)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::superposition(terms).map_err(|_| Error::Spec(format!("all weights are zero in '{s}'")))
            }
            other => Err(Error::Spec(format!("unknown polarization kind '{other}'"))),
        }
    }
}

impl fmt::Display for LinearPolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::XNumber(n) => write!(f, "xnum:{n}"),
            Self::XCoherent(m) => write!(f, "xcoh:{m}"),
            Self::XSuperposition(t) => {
                let parts: Vec<String> = t.iter().map(|(n, w)| format!("{n},{w}")).collect();
                write!(f, "xsup:{}", parts.join(";"))
            }
        }
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `|n>_x` in the R/L basis, added into `out` with weight `w`.
fn add_x_number(out: &mut crate::fock::TwoModeKet, n: u32, w: C64) {
    let ln_n = ln_factorial(n);
    for k in 0..=n {
        let ln_c = ln_n - ln_factorial(k) - ln_factorial(n - k);
        let amp = (0.5 * ln_c - 0.5 * n as f64 * std::f64::consts::LN_2).exp();
        out.add(k, n - k, w * amp);
    }
}

/// Circular-basis state for `spec` on `n_R + n_L <= n_max`, using the default tail tolerance.
pub fn to_circular(spec: &LinearPolSpec, n_max: u32) -> Result<TwoModeState> {
    to_circular_with_tol(spec, n_max, DEFAULT_TAIL_TOL)
}

pub fn to_circular_with_tol(spec: &LinearPolSpec, n_max: u32, tail_tol: f64) -> Result<TwoModeState> {
    let mut ket = crate::fock::TwoModeKet::new();
    let mut discarded = 0.0;
    match spec {
        LinearPolSpec::XNumber(n) => {
            if *n > n_max {
                return Err(Error::Truncation { n: *n, n_max });
            }
            add_x_number(&mut ket, *n, C64::new(1.0, 0.0));
        }
        LinearPolSpec::XSuperposition(terms) => {
            for &(n, w) in terms {
                if n > n_max {
                    return Err(Error::Truncation { n, n_max });
                }
                add_x_number(&mut ket, n, w);
            }
        }
        LinearPolSpec::XCoherent(mean) => {
            // total photon number is Poisson(mean), so the cut on n_R + n_L drops its tail
            let tail = poisson_tail(*mean, n_max);
            if tail >= tail_tol {
                return Err(Error::TruncationInsufficient {
                    n_max,
                    tail,
                    tail_tol,
                    required: poisson_cutoff(*mean, tail_tol),
                });
            }
            let half = mean / 2.0;
            let ln_beta = if half > 0.0 { 0.5 * half.ln() } else { f64::NEG_INFINITY };
            for total in 0..=n_max {
                for r in 0..=total {
                    let l = total - r;
                    let amp = if total == 0 {
                        (-half).exp()
                    } else {
                        (-half + total as f64 * ln_beta - 0.5 * (ln_factorial(r) + ln_factorial(l))).exp()
                    };
                    if amp > 0.0 {
                        ket.add(r, l, C64::new(amp, 0.0));
                    }
                }
            }
            discarded = tail;
        }
    }
    TwoModeState::from_ket(ket, n_max, discarded)
}

/// Circular-basis state in `(j, m)` form with an automatic truncation.
pub fn prepare(spec: &LinearPolSpec, n_max: Option<u32>, tail_tol: f64) -> Result<JmState> {
    let n_max = n_max.unwrap_or_else(|| spec.auto_n_max(tail_tol));
    Ok(to_jm(&to_circular_with_tol(spec, n_max, tail_tol)?, PrimitiveConvention::Photonic))
}

/// Snapshot densities over a sequence of absolute times.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotSweep {
    pub times: Vec<f64>,
    pub grid: AngularGrid,
    /// `None` where the conditioning probability is too small to condition on.
    pub slices: Vec<Option<AngularPdf>>,
    pub conditioning: Vec<f64>,
}

impl SnapshotSweep {
    pub fn gaps(&self) -> usize {
        self.slices.iter().filter(|s| s.is_none()).count()
    }

    /// Per slice, whether it shows a pair of local maxima at `+-phi` with `0 < phi < pi`.
    pub fn counter_rotating(&self) -> Vec<bool> {
        self.slices.iter().map(|s| s.as_ref().is_some_and(has_counter_rotating_peaks)).collect()
    }
}

/// True when some local maximum away from `0` and `pi` has a mirrored partner.
pub fn has_counter_rotating_peaks(pdf: &AngularPdf) -> bool {
    let peaks = pdf.local_maxima();
    let k = pdf.grid.len();
    peaks.iter().any(|&i| {
        let mirror = pdf.grid.mirror(i);
        i != mirror && i != 0 && 2 * i != k && peaks.contains(&mirror)
    })
}

pub fn snapshot_sequence(state: &JmState, times: &[f64], k: usize) -> Result<SnapshotSweep> {
    let grid = AngularGrid::new(k)?;
    let mut slices = Vec::with_capacity(times.len());
    let mut conditioning = Vec::with_capacity(times.len());
    for &t in times {
        conditioning.push(conditioning_probability(state, t));
        match snapshot_pdf(state, t, k) {
            Ok(p) => slices.push(Some(p)),
            Err(Error::ConditioningImpossible { .. }) => slices.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(SnapshotSweep { times: times.to_vec(), grid, slices, conditioning })
}

/// Quantum polarization ellipse: the time-averaged relative-phase density.
pub fn polarization_ellipse(state: &JmState, k: usize) -> Result<AngularPdf> {
    marginal_pdf(state, k)
}

/// `10 log10(p / p_peak) + 60`, floored at 0 dB.
pub fn db_view(pdf: &AngularPdf) -> Vec<f64> {
    let peak = pdf.max();
    pdf.values
        .iter()
        .map(|&p| if p <= 0.0 || peak <= 0.0 { 0.0 } else { (10.0 * (p / peak).log10() + DB_PEAK).max(0.0) })
        .collect()
}

/// Peak over the value at `phi`, in dB.
pub fn contrast_db(pdf: &AngularPdf, phi: f64) -> f64 {
    10.0 * (pdf.max() / pdf.at(phi)).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parse_specs() {
        assert_eq!("xnum:3".parse::<LinearPolSpec>().unwrap(), LinearPolSpec::XNumber(3));
        assert_eq!("xcoh:9".parse::<LinearPolSpec>().unwrap(), LinearPolSpec::XCoherent(9.0));
        let sup = "xsup:1,1;2,0.5-1i".parse::<LinearPolSpec>().unwrap();
        assert_eq!(sup, LinearPolSpec::XSuperposition(vec![(1, C64::new(1.0, 0.0)), (2, C64::new(0.5, -1.0))]));
        for bad in ["xcoh:-1", "xnum:a", "xsup:1", "ynum:1", "xnum", "xsup:1,0;2,0"] {
            assert!(matches!(bad.parse::<LinearPolSpec>(), Err(Error::Spec(_))), "{bad}");
        }
    }

    #[test]
    fn x_number_expansion() {
        let s = to_circular(&LinearPolSpec::XNumber(1), 1).unwrap();
        let r = 0.5f64.sqrt();
        assert!((s.get(1, 0).re - r).abs() < 1e-15 && (s.get(0, 1).re - r).abs() < 1e-15);
        let s = to_circular(&LinearPolSpec::XNumber(2), 2).unwrap();
        assert!((s.get(2, 0).re - 0.5).abs() < 1e-15);
        assert!((s.get(0, 2).re - 0.5).abs() < 1e-15);
        assert!((s.get(1, 1).re - r).abs() < 1e-15);
        assert!(to_circular(&LinearPolSpec::XNumber(3), 2).is_err());
    }

    #[test]
    fn x_coherent_expansion() {
        let vac = to_circular(&LinearPolSpec::XCoherent(0.0), 3).unwrap();
        assert_eq!(vac.get(0, 0), C64::new(1.0, 0.0));
        assert_eq!(vac.ket().len(), 1);
        let spec = LinearPolSpec::XCoherent(4.0);
        let n = spec.auto_n_max(1e-12);
        let st = to_circular(&spec, n).unwrap();
        assert!((st.get(0, 0).re - (-2.0f64).exp()).abs() < 1e-12);
        // |beta|^2 = 2 in each mode
        assert!((st.get(1, 0).re - (-2.0f64).exp() * 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(to_circular(&spec, 5), Err(Error::TruncationInsufficient { .. })));
    }

    #[test]
    fn ellipse_shapes() {
        let one = prepare(&LinearPolSpec::XNumber(1), None, DEFAULT_TAIL_TOL).unwrap();
        let e = polarization_ellipse(&one, 64).unwrap();
        assert!((e.at(0.0) - e.at(PI)).abs() < 1e-15);
        assert!(e.at(PI / 2.0) < 1e-14 && e.at(-PI / 2.0) < 1e-14);

        let vac = prepare(&LinearPolSpec::XCoherent(0.0), None, DEFAULT_TAIL_TOL).unwrap();
        let e = polarization_ellipse(&vac, 64).unwrap();
        assert!(db_view(&e).iter().all(|&d| (d - 60.0).abs() < 1e-9));
    }

    #[test]
    fn db_floor() {
        let grid = AngularGrid::new(4).unwrap();
        let pdf = AngularPdf { grid, values: vec![1.0, 1e-3, 1e-9, 0.0] };
        assert_eq!(db_view(&pdf), vec![60.0, 30.0, 0.0, 0.0]);
    }

    #[test]
    fn sweep_gaps_and_peaks() {
        let pair = to_jm(
            &TwoModeState::from_fn(2, 0.0, |s, a| match (s, a) {
                (0, 0) | (1, 1) => C64::new(1.0, 0.0),
                _ => C64::default(),
            })
            .unwrap(),
            PrimitiveConvention::Photonic,
        );
        let sweep = snapshot_sequence(&pair, &[0.0, PI / 2.0], 16).unwrap();
        assert_eq!(sweep.gaps(), 1);
        assert!(sweep.slices[1].is_none());

        let coh = prepare(&LinearPolSpec::XCoherent(1.0), None, DEFAULT_TAIL_TOL).unwrap();
        let sweep = snapshot_sequence(&coh, &[0.0, PI / 2.0], 256).unwrap();
        assert_eq!(sweep.counter_rotating(), vec![false, true]);
    }
}
