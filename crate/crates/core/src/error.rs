use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// Variants fall in two classes: validation errors (bad input, violated
/// preconditions) and numerical-guarantee breaches, which indicate that a
/// result proven to exist in exact arithmetic was not reached in floating
/// point. [`Error::is_numerical`] tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group order {order} exceeds the configured cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },

    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary: entry ({row}, {col}) of B·B* deviates from the identity by {deviation:e}")]
    NotUnitary {
        deviation: f64,
        row: usize,
        col: usize,
    },

    #[error("basis is not flat: entry ({row}, {col}) has modulus {modulus} (expected {expected}, deviation {deviation:e})")]
    NotFlat {
        row: usize,
        col: usize,
        modulus: f64,
        expected: f64,
        deviation: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("shift {shift} does not exceed the operator norm {norm}")]
    ShiftNotAboveSpectrum { shift: f64, norm: f64 },

    #[error("Sherman-Morrison denominator {denominator:e} is numerically zero")]
    SingularUpdate { denominator: f64 },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no feasible candidate at step {step}: minimum barrier condition {min_value} (shift margin {margin:e})")]
    NoFeasibleCandidate {
        step: usize,
        min_value: f64,
        margin: f64,
    },

    #[error("numerical guarantee breached: {0}")]
    GuaranteeBreach(String),

    #[error("stacked system is numerically rank deficient (sigma_min {sigma_min:e})")]
    RankDeficient { sigma_min: f64 },

    #[error("enumeration of {count} subsets exceeds the cap {cap}")]
    EnumerationCapExceeded { count: u128, cap: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical guarantee rather than of input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NoFeasibleCandidate { .. }
                | Error::GuaranteeBreach(_)
                | Error::RankDeficient { .. }
        )
    }

    /// Short machine-readable tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGroup(_) => "invalid_group",
            Error::OrderCapExceeded { .. } => "order_cap_exceeded",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::Parse { .. } => "parse",
            Error::NotSquare { .. } => "not_square",
            Error::NotUnitary { .. } => "not_unitary",
            Error::NotFlat { .. } => "not_flat",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NoConvergence { .. } => "no_convergence",
            Error::ShiftNotAboveSpectrum { .. } => "shift_not_above_spectrum",
            Error::SingularUpdate { .. } => "singular_update",
            Error::InvalidSequence(_) => "invalid_sequence",
            Error::DegenerateFrame(_) => "degenerate_frame",
            Error::InvalidFrame(_) => "invalid_frame",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NoFeasibleCandidate { .. } => "no_feasible_candidate",
            Error::GuaranteeBreach(_) => "guarantee_breach",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::EnumerationCapExceeded { .. } => "enumeration_cap_exceeded",
            Error::Io(_) => "io",
        }
    }
}
