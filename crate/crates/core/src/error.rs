use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("capacitance matrix is numerically singular (relative determinant {0:e})")]
    Singular(f64),
    #[error("alpha = {0} gives a single-well potential (need alpha > 0.5 at f = 0.5)")]
    SingleWell(f64),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("operator is not Hermitian (relative defect {0:e})")]
    NotHermitian(f64),
    #[error("eigendecomposition did not converge")]
    Eigen,
    #[error("subspace crossing: ||P - P0|| = {norm:.6}, smallest overlap singular value {overlap:e}")]
    SubspaceCrossing { norm: f64, overlap: f64 },
    #[error("vanishing energy denominator between low state {low} and state {high}")]
    Intruder { low: usize, high: usize },
    #[error("gauge undefined: |<0|phi|1>| = {0:e}")]
    GaugeUndefined(f64),
    #[error("ground pair carries no flux contrast (|<phi>| = {0:e})")]
    NotFluxQubit(f64),
    #[error("need at least {need} levels, got {got}")]
    TooFewLevels { need: usize, got: usize },
    #[error("omega_q must be positive")]
    ZeroFrequency,
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}
