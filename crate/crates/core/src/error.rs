use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {re}{im:+}i lies outside the open unit disc")]
    OutsideDisc { re: f64, im: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("empty index range [{lo}, {hi}]")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("constant inner function: the model space is trivial")]
    ConstantInner,
    #[error("symbol is not unimodular")]
    NotUnimodular,
    #[error("symbol class not supported: {0}")]
    Unsupported(String),
    #[error("angle {0} is an arc endpoint; the symbol is undefined there")]
    ArcEndpoint(f64),
    #[error("invalid arc partition: {0}")]
    BadArcs(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::BadTolerance(tol))
    }
}
