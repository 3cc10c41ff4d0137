use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("integer overflow in machine-word elimination")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("chain group in dimension {0} is infinite and no window was supplied")]
    InfiniteChainGroup(usize),
    #[error("not a subcomplex: {0}")]
    NotSubcomplex(String),
    #[error("map is not finite: {0}")]
    NotFinite(String),
    #[error("not a simplicial map: {0}")]
    NotSimplicialMap(String),
    #[error("orientation is only defined for top-dimensional simplices")]
    NotTopDimensional,
    #[error("basis vectors are linearly dependent")]
    DegenerateBasis,
    #[error("search budget exceeded at degree bound {degree}: {detail}")]
    SearchBudgetExceeded { degree: i64, detail: String },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("enumeration incomplete: {0}")]
    EnumerationIncomplete(String),
    #[error("symbol lattice did not stabilize: {0}")]
    NonStabilized(String),
    #[error("rank deficient: symbols span rank {ms} of {total}")]
    RankDeficient { ms: usize, total: usize },
    #[error("no filtration with elementary abelian quotients found")]
    NoFiltrationFound,
}
