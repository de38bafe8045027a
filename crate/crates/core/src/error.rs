use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("map is not invertible at t = {t}")]
    SingularMap { t: f64 },

    #[error("stochastic process is singular at t = {t} (|det T| = {det:e})")]
    SingularProcess { t: f64, det: f64 },

    #[error("generator triple is singular at t = {t}: {reason}")]
    SingularGenerator { t: f64, reason: &'static str },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
