use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} outside the domain of {what}: {reason}")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid Beltrami spec: {0}")]
    InvalidSpec(String),

    #[error("specs cannot be combined: {0}")]
    Incompatible(String),

    #[error("schedule depth {requested} exceeds the representable maximum {max}")]
    ScheduleTooDeep { requested: usize, max: usize },

    #[error("schedule violates {inequality} at j = {j}: {detail}")]
    ScheduleViolation {
        j: usize,
        inequality: &'static str,
        detail: String,
    },

    #[error("sigma profile rejected: {0}")]
    SigmaRejected(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not reach tolerance {tol:e}: best error bound {best:e} after {cells} subcells")]
    Quadrature { tol: f64, best: f64, cells: usize },

    #[error("schema: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        reason,
    }
}
