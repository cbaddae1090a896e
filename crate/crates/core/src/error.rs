use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{what} of size {size} exceeds the limit {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("indices must differ (got {0} twice)")]
    EqualIndices(usize),
    #[error("index {index} out of range 1..={size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("row and column index lists differ in length ({rows} vs {cols})")]
    LengthMismatch { rows: usize, cols: usize },
    #[error("index conflict: {0}")]
    IndexConflict(String),
    #[error("matrix is singular")]
    Singular,
    #[error("network is singular (its admittance matrix has rank below n-1)")]
    SingularNetwork,
    #[error("current injections do not sum to zero")]
    UnbalancedInjection,

    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}: duplicate name '{name}'")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: unknown node '{name}'")]
    UnknownNode { line: usize, name: String },
    #[error("unknown branch '{0}'")]
    UnknownBranch(String),
    #[error("unknown source '{0}'")]
    UnknownSource(String),
    #[error("line {line}: branch '{name}': {message}")]
    InvalidGcrl { line: usize, name: String, message: String },
    #[error("branch '{0}' has a pole at the requested frequency")]
    PoleAtS(String),
    #[error("branch '{0}' is not in direct admittance form")]
    NonDirectBranch(String),
    #[error("value '{0}' cannot be represented in the chosen scalar type")]
    Unrepresentable(String),
    #[error("branch '{0}' connects a node to itself")]
    SelfLoop(String),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),

    #[error("network is disconnected")]
    Disconnected,
    #[error("solution does not satisfy Yv = i: {0}")]
    InconsistentSolution(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("immittance is zero")]
    ZeroImmittance,
    #[error("branch '{0}' admittance phase lies outside the interval")]
    PhaseOutsideInterval(String),
    #[error("no real voltage magnitude satisfies the flow")]
    NoRealRoot,
    #[error("branches not inductively loaded: {0:?}")]
    NotInductivelyLoaded(Vec<String>),
    #[error("branch '{0}' fails the phase-uniqueness condition and closes an inconsistent cycle")]
    ConditionAcdeltauFailed(String),

    #[error("division by the zero rational function")]
    DivideByZero,
    #[error("root finding did not converge: {0}")]
    RootFindingFailed(String),
    #[error("function is not positive-real")]
    NotPositiveReal,

    #[error("source admittance is zero")]
    ZeroAdmittance,
    #[error("the side subnetwork has a singular admittance block")]
    SingularSubnetwork,
    #[error("dependent source '{0}' needs a nonzero series admittance")]
    MissingSeriesAdmittance(String),
    #[error("voltage sources form a loop at '{0}'")]
    VoltageSourceLoop(String),
    #[error("no update formula covers this index pattern: {0}")]
    UnknownCase(String),
}

pub type Result<T> = std::result::Result<T, Error>;
