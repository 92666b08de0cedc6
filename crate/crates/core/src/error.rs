use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of operands do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A column of the sensing-dictionary product has (numerically) zero
    /// norm, so the normalization matrix D is not invertible.
    #[error("column {index} of X*B has norm {norm:.3e}; normalization is singular")]
    SingularNormalization { index: usize, norm: f64 },

    /// Power iteration failed to settle within the allowed applications.
    #[error("spectral bound did not converge within {0} operator applications")]
    NoConvergence(usize),

    /// Relative error is undefined for a zero reference vector.
    #[error("relative error undefined: reference vector is zero")]
    DivisionByZero,

    /// A learned block's columns are not orthonormal.
    #[error("learned block deviates from column orthonormality by {max_dev:.3e}")]
    NotOrthonormal { max_dev: f64 },

    /// Malformed row in a dataset file. Rows are numbered from 1.
    #[error("{path}:{row}: {message}")]
    Format {
        path: String,
        row: usize,
        message: String,
    },

    /// A digit class does not have the expected number of examples.
    #[error("class {label}: found {found} examples, expected {expected}")]
    Count {
        label: u8,
        found: usize,
        expected: usize,
    },

    /// Training matrix rank is too low for the requested component count.
    #[error("training matrix has rank {rank}, cannot extract {requested} components")]
    Rank { rank: usize, requested: usize },

    /// Residual scores do not single out a pair of classes.
    #[error("residual scores are degenerate; no well-defined class pair")]
    DegenerateScores,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
