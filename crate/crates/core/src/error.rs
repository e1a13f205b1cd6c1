use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kick period ωT = {tau} is not within 1e-9 of 2πr/q for any q ≤ {q_max}")]
    NoRationalPeriod { tau: f64, q_max: u32 },

    #[error("q = {0} has no crystal phase-space symmetry (need q ∈ {{3, 4, 6}})")]
    NoCrystalSymmetry(u32),

    #[error("the lattice mapping is only defined for q ∈ {{3, 4, 6}}, got q = {0}")]
    UnsupportedLatticeOrder(u32),

    #[error("the lattice mapping requires r = 1, got r = {0}")]
    UnsupportedWinding(u32),

    #[error("η² = {eta_sq} is not a principal quantum resonance for q = {q}")]
    NotResonant { eta_sq: f64, q: u32 },

    #[error("closed form is stated for N ≥ {min}, got N = {got}")]
    OutOfRegime { min: usize, got: usize },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
