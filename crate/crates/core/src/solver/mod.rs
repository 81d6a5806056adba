//! Dense revised simplex for small LPs and a binary branch-and-bound on top.

mod lpformat;
mod mip;
mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lpformat::write_lp_format;
pub use mip::{solve_binary_mip, MipOptions, MipSolution};
pub(crate) use mip::branch_and_bound;
pub use simplex::{Basis, Simplex};

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("variable {0} has lower bound above upper bound")]
    InvertedBounds(usize),
    #[error("variable {0} has an infinite lower bound")]
    FreeVariable(usize),
    #[error("constraint {row} references variable {var}, only {n} exist")]
    BadIndex { row: usize, var: usize, n: usize },
    #[error("{0} objective coefficients for {1} variables")]
    Dimension(usize, usize),
    #[error("non-finite data in constraint {0}")]
    NonFinite(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Ge,
    Le,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    /// Sparse (variable, coefficient) pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// minimize `objective · x + offset` subject to the rows and `lower ≤ x ≤ upper`.
/// Lower bounds must be finite; upper bounds may be `f64::INFINITY`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub offset: f64,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            objective: vec![0.0; n_vars],
            offset: 0.0,
            constraints: Vec::new(),
            lower: vec![0.0; n_vars],
            upper: vec![f64::INFINITY; n_vars],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self.constraints.len() - 1
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Dimension(n, self.lower.len().min(self.upper.len())));
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(LpError::InvertedBounds(j));
            }
            if !self.lower[j].is_finite() {
                return Err(LpError::FreeVariable(j));
            }
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(LpError::NonFinite(row));
            }
            for &(var, a) in &c.coeffs {
                if var >= n {
                    return Err(LpError::BadIndex { row, var, n });
                }
                if !a.is_finite() {
                    return Err(LpError::NonFinite(row));
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.offset + self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.n_vars() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for c in &self.constraints {
            let act: f64 = c.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            worst = worst.max(match c.sense {
                Sense::Ge => c.rhs - act,
                Sense::Le => act - c.rhs,
            });
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub feasibility: f64,
    pub optimality: f64,
    pub integrality: f64,
    pub duality_gap: f64,
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { feasibility: 1e-7, optimality: 1e-9, integrality: 1e-6, duality_gap: 1e-6, pivot: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// Row duals: `∂objective/∂rhs`, so ≥ rows have non-negative duals and
    /// ≤ rows non-positive ones at a minimum.
    pub duals: Vec<f64>,
    /// Structural reduced costs `c − Aᵀy`.
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs()
    }
}

pub fn solve_lp(lp: &LinearProgram, tol: Tolerances) -> Result<LpSolution, LpError> {
    let mut s = Simplex::new(lp, tol)?;
    s.solve();
    Ok(s.solution())
}

#[cfg(test)]
mod tests;
