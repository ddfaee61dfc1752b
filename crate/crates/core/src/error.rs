use thiserror::Error;

/// Errors raised while preparing data or searching the model space.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A column lies (numerically) in the span of the columns before it.
    #[error("rank deficient: column '{0}' is linearly dependent on earlier columns")]
    RankDeficient(String),

    #[error("explanatory vector is numerically zero")]
    DegenerateExplanatory,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("column '{0}' not found")]
    ColumnNotFound(String),

    #[error("too few rows: {n} complete rows for {p} covariates (need more than {})", p + 1)]
    TooFewRows { n: usize, p: usize },

    #[error("node budget exceeded: {requested} exceeds the limit of {limit}")]
    NodeBudgetExceeded { requested: u64, limit: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed delimited text: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
