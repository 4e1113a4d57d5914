use thiserror::Error;

use crate::params::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("domain error: {0}")]
    Domain(String),

    /// Doppler averages need a strictly positive width; use the stationary forms instead.
    #[error("degenerate Doppler width {0}; use the stationary-atom path")]
    DegenerateWidth(f64),

    #[error("{what} did not converge after {iterations} iterations (last change {last_change:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        last_change: f64,
    },

    #[error("singular steady-state system: {0}")]
    Singular(String),

    #[error("no root of the maximal-rotation residual in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("enhancement ratio undefined: T_y with control {ty_on:e}, without {ty_off:e}")]
    UndefinedRatio { ty_on: f64, ty_off: f64 },

    #[error("invalid sweep: {0}")]
    Sweep(String),

    #[error("at scan value {value}: {source}")]
    AtScanValue { value: f64, source: Box<Error> },

    #[error("config error: {0}")]
    Config(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
