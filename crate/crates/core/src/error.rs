use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Validation or computation failure.
///
/// All row/column positions in error payloads are 1-based, matching the
/// labels used in reports and CSV files.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A data cell is NaN or infinite.
    NonFinite { row: usize, col: usize },
    /// Fewer observations than the operation supports.
    TooFewRows { n: usize, min: usize },
    /// Two shapes that must agree do not.
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// Component labels outside `1 <= a <= b <= p`.
    ComponentOutOfRange { a: usize, b: usize, p: usize },
    /// Linear component index past the end of the half-vectorized layout.
    IndexOutOfRange { index: usize, len: usize },
    /// Candidate split outside `2 <= k <= n - 2`.
    SplitOutOfRange { split: usize, n: usize },
    /// Column sums of supposedly centered data are too far from zero.
    NotCentered { col: usize },
    /// A 2x2 covariance block is not positive semidefinite.
    NotPositiveSemidefinite { block: usize },
    /// A configuration value is outside its domain.
    InvalidParameter {
        name: &'static str,
        detail: &'static str,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite { row, col } => {
                write!(f, "non-finite value at row {row}, column {col}")
            }
            Error::TooFewRows { n, min } => {
                write!(f, "{n} observations given, at least {min} required")
            }
            Error::ShapeMismatch {
                what,
                expected,
                actual,
            } => write!(f, "{what}: expected {expected}, got {actual}"),
            Error::ComponentOutOfRange { a, b, p } => {
                write!(f, "component ({a}, {b}) outside 1 <= a <= b <= p = {p}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "component index {index} out of range for {len} components")
            }
            Error::SplitOutOfRange { split, n } => {
                write!(f, "split {split} outside 2 <= k <= n - 2 with n = {n}")
            }
            Error::NotCentered { col } => {
                write!(f, "column {col} does not sum to zero within tolerance")
            }
            Error::NotPositiveSemidefinite { block } => {
                write!(f, "covariance block {block} is not positive semidefinite")
            }
            Error::InvalidParameter { name, detail } => write!(f, "{name}: {detail}"),
        }
    }
}

impl core::error::Error for Error {}
