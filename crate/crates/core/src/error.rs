use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The network description violates a structural invariant.
    #[error("invalid network: {0}")]
    InvalidGraph(String),
    /// An input is too large for an exhaustive algorithm.
    #[error("{what} needs {required} evaluations, budget is {limit}; {hint}")]
    Size {
        what: &'static str,
        required: u128,
        limit: u128,
        hint: &'static str,
    },
    /// A parameter lies outside the domain of an operation.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A randomized construction gave up.
    #[error("construction failed: {0}")]
    Construction(String),
    /// A trace or route does not fit the network it is used with.
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    /// Exact arithmetic left the representable range.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
