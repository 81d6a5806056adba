//! Column generation for DNF rule sets.
//!
//! The restricted master LP selects conjunctions from a pool, pricing searches
//! all conjunctions up to a degree bound for negative reduced cost, and a final
//! binary program over the pool yields the rule set. Human rules enter either
//! as a per-rule penalty when unselected, as forced selections, or as partial
//! templates that penalize dissimilar conjunctions.

mod master;
mod model;
mod pool;
mod pricing;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::Execution;
use crate::ruledsl::BoundConjunction;
use crate::solver::{LpError, LpStatus, MipOptions};

pub use master::{build_master, MasterLayout};
pub use model::{Model, ModelError, MODEL_VERSION};
pub use pool::{ColumnPool, PoolEntry};
pub use pricing::{enumerate_columns, price, Candidate, Duals, PricingContext};
pub use train::{predict, train, HumanRuleOutcome, IterationLog, TrainOutcome, TrainReport, TrainStatus};

#[derive(Debug, Error, PartialEq)]
pub enum ColgenError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("no positive samples in training data")]
    NoPositives,
    #[error("human rules exceed complexity budget ({required} literals > C = {budget})")]
    BudgetExceeded { required: usize, budget: usize },
    #[error("templates mode needs at least one template")]
    NoTemplates,
    #[error("conjunction references column {column}, dataset has {n}")]
    UnknownColumn { column: usize, n: usize },
    #[error("sample has {found} columns, model expects {expected}")]
    ColumnCount { expected: usize, found: usize },
    #[error("master problem is infeasible")]
    Infeasible,
    #[error("master LP solve ended with status {0:?}")]
    Solver(LpStatus),
    #[error("solver failure: {0}")]
    Lp(#[from] LpError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// No human input.
    #[default]
    Machine,
    /// Penalty `c_u·n` for each human rule left out.
    Soft,
    /// Human rules are forced into the rule set.
    Hard,
    /// Distance to partial templates, weighted by `c_p`.
    Templates,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "machine" | "machine-only" => Ok(Mode::Machine),
            "soft" | "soft-human" => Ok(Mode::Soft),
            "hard" | "hard-human" => Ok(Mode::Hard),
            "templates" | "template" => Ok(Mode::Templates),
            other => Err(format!("unknown mode `{other}` (machine, soft, hard, templates)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Machine => "machine",
            Mode::Soft => "soft",
            Mode::Hard => "hard",
            Mode::Templates => "templates",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Complexity budget: total literal count of the rule set.
    pub complexity: usize,
    /// Penalty per unselected human rule, as a fraction of the sample count.
    pub c_u: f64,
    /// Weight of the template distance.
    pub c_p: f64,
    /// Largest conjunction degree considered by pricing.
    pub max_degree: usize,
    pub max_iterations: usize,
    /// Reduced costs must fall below `-epsilon` to count as improving.
    pub epsilon: f64,
    pub mode: Mode,
    /// Columns added per pricing round.
    pub columns_per_iteration: usize,
    /// Gap closing after convergence is skipped when more columns than this
    /// could still improve the incumbent.
    pub gap_column_limit: usize,
    pub mip: MipOptions,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            complexity: 24,
            c_u: 0.05,
            c_p: 0.0,
            max_degree: 4,
            max_iterations: 500,
            epsilon: 1e-7,
            mode: Mode::Machine,
            columns_per_iteration: 20,
            gap_column_limit: 200,
            mip: MipOptions::default(),
            execution: Execution::default(),
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<(), ColgenError> {
        let bad = |m: &str| Err(ColgenError::InvalidParams(m.to_string()));
        if self.complexity < 1 {
            return bad("complexity budget must be at least 1");
        }
        if !(self.c_u >= 0.0 && self.c_u.is_finite()) {
            return bad("c_u must be a finite non-negative number");
        }
        if !(self.c_p >= 0.0 && self.c_p.is_finite()) {
            return bad("c_p must be a finite non-negative number");
        }
        if self.max_degree < 1 {
            return bad("max degree must be at least 1");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be a finite non-negative number");
        }
        if self.columns_per_iteration < 1 {
            return bad("columns per iteration must be at least 1");
        }
        Ok(())
    }
}

/// Human knowledge bound to dataset columns. Which part is used depends on
/// [`Params::mode`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HumanInput {
    pub rules: Vec<BoundConjunction>,
    pub templates: Vec<Vec<usize>>,
}

impl HumanInput {
    pub fn rules(rules: Vec<BoundConjunction>) -> Self {
        Self { rules, templates: Vec::new() }
    }

    pub fn templates(templates: Vec<Vec<usize>>) -> Self {
        Self { rules: Vec::new(), templates }
    }

    /// Rules that take part under `mode`.
    pub fn active_rules(&self, mode: Mode) -> &[BoundConjunction] {
        match mode {
            Mode::Soft | Mode::Hard => &self.rules,
            Mode::Machine | Mode::Templates => &[],
        }
    }

    /// Templates that take part under `mode`.
    pub fn active_templates(&self, mode: Mode) -> &[Vec<usize>] {
        match mode {
            Mode::Templates => &self.templates,
            _ => &[],
        }
    }
}
