use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input text; `pos` is a byte offset into the input.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A point, element or spec that does not belong where it was used.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value could not be built because its invariants fail.
    #[error("construction error: {0}")]
    Construction(String),

    /// The requested quantity needs a norm beyond the window radius.
    #[error("{element} lies outside the window of radius {radius}")]
    OutOfWindow { element: String, radius: u32 },

    #[error("resource cap exceeded: {what} needs about {estimate} elements, cap is {cap}")]
    ResourceCap {
        what: String,
        estimate: u128,
        cap: u64,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The finite horizon was too short to decide.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
