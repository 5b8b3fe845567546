use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("photon number {n} exceeds truncation n_max = {n_max}")]
    Truncation { n: u32, n_max: u32 },

    #[error(
        "truncation at n_max = {n_max} discards tail mass {tail:.3e} (tolerance {tail_tol:.1e}); \
         need n_max >= {required}"
    )]
    TruncationInsufficient { n_max: u32, tail: f64, tail_tol: f64, required: u32 },

    #[error("grid of {k} points aliases a series with frequency span {span}; need k > {span}")]
    Aliasing { k: usize, span: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("amplitude at (n_s={n_s}, n_a={n_a}) lies off the subspace n_s * n_a = 0")]
    OffHPrime { n_s: u32, n_a: u32 },

    #[error("invalid (2j={two_j}, 2m={two_m}) for the {convention} convention")]
    InvalidJm { two_j: u32, two_m: i32, convention: &'static str },

    #[error("state spans more than one j branch ({0:?} in doubled units)")]
    MixedJ(Vec<u32>),

    #[error("state is not an eigenvector of J^2 (residual {0:.3e})")]
    NotEigenstate(f64),

    #[error("conditioning probability {c:.3e} at t = {t} is below {c_min:.0e}")]
    ConditioningImpossible { t: f64, c: f64, c_min: f64 },

    #[error("relative-phase series mixes integer and half-integer m; the angular period is not 2*pi")]
    HalfIntegerMix,

    #[error("truncation s = {s} is below the state's n_max = {n_max}")]
    TruncationBelowSupport { s: u32, n_max: u32 },

    #[error("dense operator construction limited to n_max <= {limit}, got {n_max}")]
    DenseTooLarge { n_max: u32, limit: u32 },

    #[error("measurement '{scheme}' does not accept {reason}")]
    UnsupportedInput { scheme: String, reason: String },

    #[error("unknown measurement scheme '{0}'")]
    UnknownScheme(String),

    #[error("bad state spec: {0}")]
    Spec(String),

    #[error("bad state file: {0}")]
    Format(String),
}

impl Error {
    /// True for violations of a numerical precondition (aliasing, truncation, conditioning),
    /// as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. }
                | Error::TruncationInsufficient { .. }
                | Error::Aliasing { .. }
                | Error::ZeroNorm
                | Error::ConditioningImpossible { .. }
                | Error::HalfIntegerMix
                | Error::TruncationBelowSupport { .. }
                | Error::DenseTooLarge { .. }
                | Error::NotEigenstate(_)
                | Error::MixedJ(_)
                | Error::OffHPrime { .. }
        )
    }
}
