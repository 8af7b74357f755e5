use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "no Gale minimum in rotated order <_{vertex}: the basis set is not a positroid candidate"
    )]
    NoGaleMinimum { vertex: usize },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

/// Checks `1 <= k < n`, the range on which X(k,n) and its necklaces are defined.
pub fn check_kn(k: usize, n: usize) -> Result<()> {
    if k < 1 || k >= n {
        return invalid(format!("need 1 <= k < n, got k={k}, n={n}"));
    }
    Ok(())
}
