//! Textual rules: literals, conjunctions, DNF rule sets and partial templates.
//!
//! ```text
//! ruleset  := clause { "OR" clause } | "FALSE" ;
//! clause   := [ "(" ] literal { "AND" literal } [ ")" ] ;
//! literal  := [ "NOT" ] ident op value ;
//! op       := "<=" | "<" | ">=" | ">" | "==" | "!=" ;
//! value    := number | ident | quoted-string ;
//! ```
//!
//! Keywords are case-insensitive, feature names are not. A clause that starts
//! on a new line is an implicit `OR`, and `#` starts a comment.

mod bind;
mod lexer;
mod parser;
mod printer;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Condition;

pub use bind::{bind, bind_literals, bind_templates, unbind, BoundConjunction, BoundRuleSet};
pub use parser::{parse_rules, parse_templates};
pub use printer::{format_value, print_rules, print_templates};

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unknown operator `{op}` at line {line}, column {col}")]
    UnknownOperator { line: usize, col: usize, op: String },
    #[error("contradictory literals in clause `{0}`")]
    Contradiction(String),
    #[error("empty clause")]
    EmptyClause,
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
}

/// A single test on a raw feature. Negations are folded into the condition,
/// so `NOT a == x` and `a != x` are the same literal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Literal {
    pub feature: String,
    pub condition: Condition,
}

impl Eq for Literal {}

impl Literal {
    pub fn new(feature: impl Into<String>, condition: Condition) -> Self {
        Self { feature: feature.into(), condition }
    }

    pub fn eq(feature: impl Into<String>, value: impl Into<String>) -> Self {
        Self::new(feature, Condition::Equals(value.into()))
    }

    pub fn negate(&self) -> Literal {
        Literal::new(self.feature.clone(), self.condition.negate())
    }

    /// Same test, thresholds compared with relative tolerance.
    pub fn matches(&self, other: &Literal) -> bool {
        self.feature == other.feature && self.condition.matches(&other.condition)
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.feature.cmp(&other.feature).then_with(|| self.condition.total_cmp(&other.condition))
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ", self.feature, self.condition.operator())?;
        match &self.condition {
            Condition::Equals(v) | Condition::NotEquals(v) => f.write_str(&format_value(v)),
            c => write!(f, "{}", c.threshold().unwrap_or(f64::NAN)),
        }
    }
}

/// Sorts, removes duplicates, and rejects contradictory literal sets.
fn normalize(mut literals: Vec<Literal>) -> Result<Vec<Literal>, RuleError> {
    if literals.is_empty() {
        return Err(RuleError::EmptyClause);
    }
    literals.sort();
    literals.dedup_by(|a, b| a.matches(b));
    let mut start = 0;
    while start < literals.len() {
        let end = start
            + literals[start..].iter().take_while(|l| l.feature == literals[start].feature).count();
        if !satisfiable(&literals[start..end]) {
            let text = literals.iter().map(ToString::to_string).collect::<Vec<_>>().join(" AND ");
            return Err(RuleError::Contradiction(text));
        }
        start = end;
    }
    Ok(literals)
}

/// Whether some cell value satisfies every condition (all on one feature).
fn satisfiable(group: &[Literal]) -> bool {
    // an equality pins the cell value
    if let Some(Condition::Equals(v)) =
        group.iter().map(|l| &l.condition).find(|c| matches!(c, Condition::Equals(_)))
    {
        return group.iter().all(|l| l.condition.evaluate(v));
    }
    let (mut lo, mut lo_strict) = (f64::NEG_INFINITY, false);
    let (mut hi, mut hi_strict) = (f64::INFINITY, false);
    for l in group {
        match l.condition {
            Condition::Greater(t) if t >= lo => (lo, lo_strict) = (t, true),
            Condition::GreaterEqual(t) if t > lo => (lo, lo_strict) = (t, false),
            Condition::Less(t) if t <= hi => (hi, hi_strict) = (t, true),
            Condition::LessEqual(t) if t < hi => (hi, hi_strict) = (t, false),
            _ => {}
        }
    }
    if lo > hi || (lo == hi && (lo_strict || hi_strict)) {
        return false;
    }
    if lo == hi {
        let point = lo.to_string();
        return group.iter().all(|l| l.condition.evaluate(&point));
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Machine,
    Human,
}

/// An AND of literals. Complexity is the number of literals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conjunction {
    literals: Vec<Literal>,
    pub provenance: Provenance,
}

impl Conjunction {
    pub fn new(literals: Vec<Literal>, provenance: Provenance) -> Result<Self, RuleError> {
        Ok(Self { literals: normalize(literals)?, provenance })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn complexity(&self) -> usize {
        self.literals.len()
    }

    /// Literal-set equality (provenance ignored).
    pub fn same_literals(&self, other: &Conjunction) -> bool {
        self.literals.len() == other.literals.len()
            && self.literals.iter().zip(&other.literals).all(|(a, b)| a.matches(b))
    }
}

/// An OR of conjunctions predicting `positive_label`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub conjunctions: Vec<Conjunction>,
    pub positive_label: String,
}

impl Default for RuleSet {
    fn default() -> Self {
        Self { conjunctions: Vec::new(), positive_label: "true".to_string() }
    }
}

impl RuleSet {
    pub fn new(conjunctions: Vec<Conjunction>) -> Self {
        let mut rs = RuleSet::default();
        for c in conjunctions {
            rs.push(c);
        }
        rs
    }

    /// Adds a conjunction unless an identical one is already present.
    pub fn push(&mut self, c: Conjunction) -> bool {
        if self.conjunctions.iter().any(|k| k.same_literals(&c)) {
            return false;
        }
        self.conjunctions.push(c);
        true
    }

    pub fn len(&self) -> usize {
        self.conjunctions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjunctions.is_empty()
    }

    pub fn complexity(&self) -> usize {
        self.conjunctions.iter().map(Conjunction::complexity).sum()
    }

    /// Equality as sets of literal sets.
    pub fn same_rules(&self, other: &RuleSet) -> bool {
        self.len() == other.len()
            && self.conjunctions.iter().all(|a| other.conjunctions.iter().any(|b| a.same_literals(b)))
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        for c in &mut self.conjunctions {
            c.provenance = provenance;
        }
        self
    }
}

/// A partial conjunction; any conjunction containing all its literals
/// matches it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    literals: Vec<Literal>,
}

impl Template {
    pub fn new(literals: Vec<Literal>) -> Result<Self, RuleError> {
        Ok(Self { literals: normalize(literals)? })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contradictions_are_detected() {
        let c = |lits: Vec<Literal>| Conjunction::new(lits, Provenance::Human);
        assert!(c(vec![Literal::eq("a", "x"), Literal::eq("a", "x").negate()]).is_err());
        assert!(c(vec![Literal::eq("a", "x"), Literal::eq("a", "o")]).is_err());
        assert!(c(vec![
            Literal::new("v", Condition::Greater(5.0)),
            Literal::new("v", Condition::LessEqual(5.0)),
        ])
        .is_err());
        assert!(c(vec![
            Literal::new("v", Condition::GreaterEqual(5.0)),
            Literal::new("v", Condition::LessEqual(5.0)),
        ])
        .is_ok());
        assert!(c(vec![
            Literal::new("v", Condition::GreaterEqual(5.0)),
            Literal::new("v", Condition::LessEqual(5.0)),
            Literal::new("v", Condition::NotEquals("5".into())),
        ])
        .is_err());
        assert!(c(vec![Literal::eq("a", "x"), Literal::eq("b", "o").negate()]).is_ok());
        assert_eq!(c(vec![]), Err(RuleError::EmptyClause));
    }

    #[test]
    fn normalization_is_idempotent() {
        let lits = vec![Literal::eq("b", "x"), Literal::eq("a", "x"), Literal::eq("b", "x")];
        let once = normalize(lits).unwrap();
        assert_eq!(once.len(), 2);
        assert_eq!(normalize(once.clone()).unwrap(), once);
    }

    #[test]
    fn ruleset_dedups_and_sums_complexity() {
        let k = Conjunction::new(vec![Literal::eq("a", "x"), Literal::eq("b", "x")], Provenance::Machine)
            .unwrap();
        let rs = RuleSet::new(vec![k.clone(), k]);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs.complexity(), 2);
    }
}
