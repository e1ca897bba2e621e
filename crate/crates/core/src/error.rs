use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("input columns are not orthonormal (deviation {0:e})")]
    NotOrthonormalInput(f64),
    #[error("matrix is singular or ill-conditioned (condition estimate {0:e})")]
    SingularMatrix(f64),
    #[error("matrix of order {n} exceeds the supported limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid interferometer specification: {0}")]
    InvalidSpec(String),
    #[error("passive matrix is not unitary (deviation {0:e})")]
    NonUnitary(f64),
    #[error("covariance matrix sigma + I/2 is singular")]
    SingularSigma,
    #[error("factor in the B matrix is singular")]
    SingularFactor,
    #[error("detection pattern weight {0} is odd")]
    OddPatternWeight(usize),
    #[error("nu exceeds 1/||X|| (nu * ||X|| = {0})")]
    NuTooLarge(f64),
    #[error("M = {modes} is smaller than 2m = {required}")]
    MTooSmall { modes: usize, required: usize },
    #[error("matrix is not an involution (eigenvalue {0} is not +-1)")]
    NotInvolution(f64),
    #[error("Fock cutoff too small (leakage {0:e})")]
    CutoffTooSmall(f64),
    #[error("state norm vanished")]
    NullState,
    #[error("invalid beam splitter: reflectivity {reflectivity}, transmittivity {transmittivity}")]
    InvalidBs {
        reflectivity: f64,
        transmittivity: f64,
    },
    #[error("quadrature grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("conditional state vanished after repeated resampling")]
    NullConditional,
    #[error("step eta = {0} too large for the expansion")]
    StepTooLarge(f64),
    #[error("evaluation routes disagree: {first} vs {second}")]
    PathMismatch { first: f64, second: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::SingularMatrix(_)
                | Error::SingularSigma
                | Error::SingularFactor
                | Error::CutoffTooSmall(_)
                | Error::NullState
                | Error::NullConditional
                | Error::PathMismatch { .. }
                | Error::GridTooCoarse(_)
        )
    }
}
