use alloc::string::String;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A dimension was zero or two quantities that must agree did not.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// An input contained NaN or infinity where a finite number is required.
    #[error("non-finite numeric input: {0}")]
    NonFiniteInput(String),

    /// A configuration value is out of its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The requested operation is not defined for this feature map.
    #[error("unsupported feature map: {0}")]
    UnsupportedFeature(String),

    /// A dataset was empty where at least one point is required.
    #[error("empty dataset")]
    EmptyDataset,

    /// Exhaustive enumeration would exceed the guarded budget.
    #[error("enumeration budget exceeded: {0} assignments")]
    EnumerationBudget(u128),

    /// A solution vector does not match the program it is checked against.
    #[error("solution mismatch: {0}")]
    SolutionMismatch(String),
}
