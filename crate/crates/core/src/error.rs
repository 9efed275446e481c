use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the toolkit.
///
/// The variants map onto failure classes rather than modules so that a front
/// end can turn them into exit codes without inspecting messages.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor invariant was violated (e.g. `n < 1`).
    #[error("validation: {0}")]
    Validation(String),
    /// An argument lies outside the domain of a formula (e.g. `L <= 0`).
    #[error("domain: {0}")]
    Domain(String),
    /// The effective theory breaks down for the requested input.
    #[error("validity: {0}")]
    Validity(String),
    /// An iterative or adaptive procedure did not converge.
    #[error("numerical: {message}")]
    Numerical { message: String, trace: Vec<f64> },
    /// A data file could not be parsed.
    #[error("parse: line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// Post-processing of a simulation series failed.
    #[error("analysis: {0}")]
    Analysis(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn numerical(message: impl Into<String>, trace: Vec<f64>) -> Self {
        Error::Numerical {
            message: message.into(),
            trace,
        }
    }
}

/// Non-fatal conditions attached to otherwise valid results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    EnergyScaleOutOfRange { m_ev: f64 },
    LargeCoupling { name: &'static str, value: f64 },
    BeyondValidity { omega_ev: f64, limit_ev: f64 },
    AnomalousDispersion { cauchy_b_m2: f64 },
    SpectrumTruncated { fraction: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::EnergyScaleOutOfRange { m_ev } => {
                write!(f, "energy scale M = {m_ev} eV outside [1, 100] eV")
            }
            Warning::LargeCoupling { name, value } => {
                write!(f, "coupling {name} = {value} is unusually large")
            }
            Warning::BeyondValidity { omega_ev, limit_ev } => write!(
                f,
                "omega = {omega_ev} eV exceeds the validity bound M/2 = {limit_ev} eV"
            ),
            Warning::AnomalousDispersion { cauchy_b_m2 } => write!(
                f,
                "negative Cauchy B = {cauchy_b_m2} m^2 implies anomalous dispersion (d1 > 0)"
            ),
            Warning::SpectrumTruncated { fraction } => write!(
                f,
                "{fraction:.3e} of the thermal spectrum lies beyond the validity cap"
            ),
        }
    }
}

/// A value together with the warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Flagged<T> {
    pub fn clean(value: T) -> Self {
        Flagged {
            value,
            warnings: Vec::new(),
        }
    }
}
