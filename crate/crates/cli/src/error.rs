//! Failures tagged with the process exit code they map to.

use std::fmt;

use dnfrule::colgen::{ColgenError, ModelError};
use dnfrule::dataset::DataError;
use dnfrule::experiments::ExperimentError;
use dnfrule::metrics::MetricError;
use dnfrule::ruledsl::RuleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Internal = 1,
    Config = 2,
    Data = 3,
    Infeasible = 4,
    IterationLimit = 5,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, Failure>;

pub trait Tag<T> {
    fn tag(self, exit: Exit) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Tag<T> for Result<T, E> {
    fn tag(self, exit: Exit) -> CliResult<T> {
        self.map_err(|e| Failure { exit, error: e.into() })
    }
}

pub fn fail(exit: Exit, message: impl fmt::Display) -> Failure {
    Failure { exit, error: anyhow::anyhow!("{message}") }
}

pub fn colgen_exit(e: &ColgenError) -> Exit {
    match e {
        ColgenError::InvalidParams(_)
        | ColgenError::NoTemplates
        | ColgenError::UnknownColumn { .. }
        | ColgenError::ColumnCount { .. } => Exit::Config,
        ColgenError::NoPositives => Exit::Data,
        ColgenError::BudgetExceeded { .. } | ColgenError::Infeasible => Exit::Infeasible,
        ColgenError::Solver(_) | ColgenError::Lp(_) => Exit::Internal,
    }
}

impl From<ColgenError> for Failure {
    fn from(e: ColgenError) -> Self {
        Failure { exit: colgen_exit(&e), error: e.into() }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let exit = match &e {
            ExperimentError::InvalidGrid(_)
            | ExperimentError::TooManyRules { .. }
            | ExperimentError::Rule(_) => Exit::Config,
            ExperimentError::TooFewPositives { .. }
            | ExperimentError::Data(_)
            | ExperimentError::Metric(_) => Exit::Data,
            ExperimentError::Train(t) => colgen_exit(t),
        };
        Failure { exit, error: e.into() }
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure { exit: Exit::Data, error: e.into() }
    }
}

impl From<RuleError> for Failure {
    fn from(e: RuleError) -> Self {
        Failure { exit: Exit::Config, error: e.into() }
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Failure { exit: Exit::Data, error: e.into() }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure { exit: Exit::Data, error: e.into() }
    }
}
