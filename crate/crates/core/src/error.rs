use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("p0 = X(center) vanishes; move the expansion center off the root")]
    SqrtAtRoot,
    #[error("t = y - center is numerically zero; use the t = 0 base relation")]
    TAtZero,
    #[error("X is a perfect square")]
    PerfectSquare,
    #[error("polynomial is numerically constant")]
    DegreeZero,
    #[error("leading coefficient of B vanishes (degree {0} < genus)")]
    DegenerateB(usize),
    #[error("next center t is numerically zero")]
    IrregularRootZero,
    #[error("no root with index {0} (available: {1})")]
    NoSuchChoice(usize, usize),
    #[error("leading coefficient vanishes")]
    LeadingVanishes,
    #[error("quadratic in lambda degenerates")]
    QuadraticDegenerate,
    #[error("irregular step at index {0}")]
    IrregularStep(usize),
    #[error("elimination degenerates: {0}")]
    EliminationDegenerate(String),
    #[error("discriminant degenerates: {0}")]
    DegenerateDiscriminant(String),
    #[error("value is a branch value of the lambda projection (multiplicity {0})")]
    BranchValue(usize),
    #[error("index denominator vanishes")]
    DenominatorZero,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("root iteration did not converge (residual {0:e})")]
    RootsNotConverged(f64),
    #[error("precision exhausted: {0}")]
    PrecisionLoss(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short stable identifier used in diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SqrtAtRoot => "SqrtAtRoot",
            Error::TAtZero => "TAtZero",
            Error::PerfectSquare => "PerfectSquare",
            Error::DegreeZero => "DegreeZero",
            Error::DegenerateB(_) => "DegenerateB",
            Error::IrregularRootZero => "IrregularRootZero",
            Error::NoSuchChoice(..) => "NoSuchChoice",
            Error::LeadingVanishes => "LeadingVanishes",
            Error::QuadraticDegenerate => "QuadraticDegenerate",
            Error::IrregularStep(_) => "IrregularStep",
            Error::EliminationDegenerate(_) => "EliminationDegenerate",
            Error::DegenerateDiscriminant(_) => "DegenerateDiscriminant",
            Error::BranchValue(_) => "BranchValue",
            Error::DenominatorZero => "DenominatorZero",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::RootsNotConverged(_) => "RootsNotConverged",
            Error::PrecisionLoss(_) => "PrecisionLoss",
            Error::Parse(_) => "Parse",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Input problems, as opposed to numerical breakdown mid-computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::InvalidInput(_)
                | Error::PerfectSquare
                | Error::SqrtAtRoot
                | Error::TAtZero
                | Error::LeadingVanishes
                | Error::PreconditionViolated(_)
        )
    }
}
