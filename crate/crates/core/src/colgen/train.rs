use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::dataset::BinaryDataset;
use crate::ruledsl::{unbind, BoundConjunction, Provenance, RuleSet};
use crate::solver::{branch_and_bound, LinearProgram, LpSolution, LpStatus, Simplex};

use super::master::{column_bounds, column_coeffs, column_cost};
use super::pricing::{enumerate_columns, price, Candidate, Duals, PricingContext};
use super::{build_master, ColgenError, ColumnPool, HumanInput, MasterLayout, Mode, Params};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainStatus {
    /// Pricing found no improving column and the final program was solved
    /// to optimality.
    Converged,
    /// Column generation stopped at the iteration limit.
    IterationLimit,
    /// The final binary program ran out of nodes; the incumbent is returned.
    NodeLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub lp_objective: f64,
    pub pool_size: usize,
    pub columns_added: usize,
    pub best_reduced_cost: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HumanRuleOutcome {
    pub columns: Vec<usize>,
    pub selected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub status: TrainStatus,
    pub mode: Mode,
    pub n_samples: usize,
    pub n_positives: usize,
    pub iterations: Vec<IterationLog>,
    /// Final restricted-master LP objective (a lower bound once converged).
    pub lp_objective: f64,
    /// Objective reported by the binary solver.
    pub mip_objective: f64,
    pub mip_nodes: usize,
    /// Columns added after convergence to close the LP/MIP gap.
    pub gap_columns: usize,
    /// Whether the rule set is optimal over all conjunctions up to the degree
    /// bound, not just over the pool.
    pub proven_optimal: bool,
    /// Hamming loss plus penalties of the returned rule set.
    pub objective: f64,
    pub hamming_loss: usize,
    pub human_penalty: f64,
    pub template_penalty: f64,
    pub complexity: usize,
    pub pool_size: usize,
    pub human_rules: Vec<HumanRuleOutcome>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub rules: Vec<BoundConjunction>,
    pub rule_set: RuleSet,
    pub report: TrainReport,
}

/// True iff some conjunction has all its columns set in `sample`.
pub fn predict(rules: &[BoundConjunction], sample: &[bool], n_columns: usize) -> Result<bool, ColgenError> {
    if sample.len() != n_columns {
        return Err(ColgenError::ColumnCount { expected: n_columns, found: sample.len() });
    }
    for k in rules {
        if let Some(&j) = k.columns.iter().find(|&&j| j >= n_columns) {
            return Err(ColgenError::UnknownColumn { column: j, n: n_columns });
        }
    }
    Ok(rules.iter().any(|k| k.covers(sample)))
}

struct Master {
    lp: LinearProgram,
    simplex: Simplex,
    layout: MasterLayout,
}

impl Master {
    fn add(&mut self, pool: &ColumnPool, k: usize, n: usize, params: &Params) {
        let e = pool.get(k);
        let cost = column_cost(e, n, params);
        let (lo, hi) = column_bounds(e, params);
        let coeffs = column_coeffs(e, self.layout);
        let v = self.lp.add_var(cost, lo, hi);
        debug_assert_eq!(v, self.layout.w(k));
        for &(r, a) in &coeffs {
            self.lp.constraints[r].coeffs.push((v, a));
        }
        let s = self.simplex.add_column(cost, &coeffs, lo, hi);
        debug_assert_eq!(s, v);
    }

    fn solve_lp(&mut self) -> Result<LpSolution, ColgenError> {
        match self.simplex.solve() {
            LpStatus::Optimal => Ok(self.simplex.solution()),
            LpStatus::Infeasible => Err(ColgenError::Infeasible),
            st => Err(ColgenError::Solver(st)),
        }
    }

    fn duals(&self, sol: &LpSolution) -> Duals {
        let n_pos = self.layout.n_pos;
        Duals {
            mu: sol.duals[..n_pos].iter().map(|&y| y.max(0.0)).collect(),
            lambda: (-sol.duals[self.layout.budget_row()]).max(0.0),
        }
    }

    fn binaries(&self, pool: &ColumnPool) -> Vec<usize> {
        (0..pool.len()).map(|k| self.layout.w(k)).collect()
    }
}

fn add_candidates(
    master: &mut Master,
    pool: &mut ColumnPool,
    ds: &BinaryDataset,
    cands: &[Candidate],
    templates: &[Vec<usize>],
    params: &Params,
) -> Result<usize, ColgenError> {
    let mut added = 0;
    for c in cands {
        let (k, new) = pool.insert(ds, &c.columns, false, templates)?;
        if new {
            master.add(pool, k, ds.n_samples(), params);
            added += 1;
        }
    }
    Ok(added)
}

/// Column generation followed by a binary solve over the final pool, and a
/// gap-closing round that adds every column whose reduced cost could still
/// beat the incumbent.
pub fn train(ds: &BinaryDataset, human: &HumanInput, params: &Params) -> Result<TrainOutcome, ColgenError> {
    params.validate()?;
    if ds.positives().is_empty() {
        return Err(ColgenError::NoPositives);
    }
    let mode = params.mode;
    let templates = human.active_templates(mode);
    if mode == Mode::Templates && templates.is_empty() {
        return Err(ColgenError::NoTemplates);
    }
    let human_rules: Vec<Vec<usize>> = human.active_rules(mode).iter().map(|k| k.columns.clone()).collect();
    for h in &human_rules {
        if let Some(&j) = h.iter().find(|&&j| j >= ds.n_columns()) {
            return Err(ColgenError::UnknownColumn { column: j, n: ds.n_columns() });
        }
    }
    let n = ds.n_samples();
    let mut pool = ColumnPool::seeded(ds, &human_rules, templates)?;
    let (lp, layout) = build_master(&pool, ds, params)?;
    let simplex = Simplex::new(&lp, params.mip.tolerances)?;
    let mut master = Master { lp, simplex, layout };
    let c_p = if mode == Mode::Templates { params.c_p } else { 0.0 };
    let ctx = PricingContext::new(ds, params.max_degree, c_p, templates);
    let mut warnings = Vec::new();

    let mut iterations = Vec::new();
    let mut converged = false;
    let mut lp_sol;
    let mut iteration = 0;
    loop {
        lp_sol = master.solve_lp()?;
        if let Some(prev) = iterations.last().map(|l: &IterationLog| l.lp_objective) {
            if lp_sol.objective > prev + 1e-7 * (1.0 + prev.abs()) {
                warnings.push(format!(
                    "LP objective rose from {prev} to {} at iteration {iteration}",
                    lp_sol.objective
                ));
            }
        }
        let mut log = IterationLog {
            iteration,
            lp_objective: lp_sol.objective,
            pool_size: pool.len(),
            columns_added: 0,
            best_reduced_cost: None,
        };
        if iteration >= params.max_iterations {
            iterations.push(log);
            break;
        }
        let duals = master.duals(&lp_sol);
        let cands = price(&ctx, &duals, &pool, params.epsilon, params.columns_per_iteration, params.execution);
        log.best_reduced_cost = cands.first().map(|c| c.reduced_cost);
        if cands.is_empty() {
            iterations.push(log);
            converged = true;
            break;
        }
        log.columns_added = add_candidates(&mut master, &mut pool, ds, &cands, templates, params)?;
        debug!(
            "iteration {iteration}: lp {:.6}, pool {}, best rc {:.6}",
            lp_sol.objective,
            pool.len(),
            cands[0].reduced_cost
        );
        iterations.push(log);
        iteration += 1;
    }
    if !converged {
        warnings.push(format!("column generation stopped after {} iterations", params.max_iterations));
        warn!("column generation hit the iteration limit ({})", params.max_iterations);
    }
    let lp_objective = lp_sol.objective;
    let final_duals = master.duals(&lp_sol);
    let binaries = master.binaries(&pool);
    let mut mip = branch_and_bound(&mut master.simplex, &master.lp, &binaries, params.mip);
    let mut gap_columns = 0;
    let mut truncated = false;
    if converged && mip.status == LpStatus::Optimal {
        // any binary solution using an unpooled column k costs at least
        // lp_objective + rc(k), so only columns below the gap can help
        let gap = mip.objective - lp_objective;
        if gap > params.mip.tolerances.duality_gap * (1.0 + lp_objective.abs()) {
            let threshold = gap + params.complexity as f64 * params.epsilon + 1e-9;
            let limit = params.gap_column_limit;
            let cands =
                enumerate_columns(&ctx, &final_duals, Some(&pool), threshold, limit + 1, params.execution);
            if cands.len() > limit {
                // too many to add; keep the pool solution without a certificate
                truncated = true;
            } else {
                gap_columns = add_candidates(&mut master, &mut pool, ds, &cands, templates, params)?;
            }
            if gap_columns > 0 {
                let binaries = master.binaries(&pool);
                mip = branch_and_bound(&mut master.simplex, &master.lp, &binaries, params.mip);
            }
        }
    }
    let status = match mip.status {
        LpStatus::Optimal if converged => TrainStatus::Converged,
        LpStatus::Optimal => TrainStatus::IterationLimit,
        LpStatus::IterationLimit if !mip.values.is_empty() => {
            warnings.push(format!("binary solve stopped after {} nodes", mip.nodes));
            TrainStatus::NodeLimit
        }
        LpStatus::Infeasible => return Err(ColgenError::Infeasible),
        st => return Err(ColgenError::Solver(st)),
    };
    let proven_optimal = status == TrainStatus::Converged && !truncated;

    let selected: Vec<usize> = (0..pool.len()).filter(|&k| mip.values[layout.w(k)] > 0.5).collect();
    let mut covered = Bitset::new(layout.n_pos);
    let mut false_positives = 0;
    let mut complexity = 0;
    let mut template_penalty = 0.0;
    for &k in &selected {
        let e = pool.get(k);
        for i in e.cover_pos.ones() {
            covered.set(i, true);
        }
        false_positives += e.false_positives;
        complexity += e.complexity();
        if mode == Mode::Templates {
            template_penalty += params.c_p * e.template_distance;
        }
    }
    let hamming_loss = layout.n_pos - covered.count_ones() + false_positives;
    let outcomes: Vec<HumanRuleOutcome> = human_rules
        .iter()
        .map(|h| {
            let mut cols = h.clone();
            cols.sort_unstable();
            cols.dedup();
            let selected = pool.position(&cols).is_some_and(|k| selected.contains(&k));
            HumanRuleOutcome { columns: cols, selected }
        })
        .collect();
    let human_penalty = if mode == Mode::Soft {
        // duplicates in the input collapse to one pooled column
        let mut distinct: Vec<&HumanRuleOutcome> = outcomes.iter().collect();
        distinct.sort_by(|a, b| a.columns.cmp(&b.columns));
        distinct.dedup_by(|a, b| a.columns == b.columns);
        let unselected = distinct.iter().filter(|o| !o.selected).count();
        params.c_u * n as f64 * unselected as f64
    } else {
        0.0
    };
    let objective = hamming_loss as f64 + human_penalty + template_penalty;
    if (objective - mip.objective).abs() > 1e-6 * (1.0 + objective.abs()) {
        warnings.push(format!("solver objective {} differs from recomputed {objective}", mip.objective));
    }
    if complexity > params.complexity {
        warnings.push(format!("rule set complexity {complexity} exceeds budget {}", params.complexity));
    }

    let mut rules: Vec<BoundConjunction> = selected
        .iter()
        .map(|&k| {
            let e = pool.get(k);
            let prov = if e.human { Provenance::Human } else { Provenance::Machine };
            BoundConjunction::new(e.columns.clone(), prov)
        })
        .collect();
    rules.sort_by(|a, b| a.columns.cmp(&b.columns));
    let rule_set = RuleSet::new(rules.iter().map(|k| unbind(&k.columns, ds.columns(), k.provenance)).collect());

    let report = TrainReport {
        status,
        mode,
        n_samples: n,
        n_positives: layout.n_pos,
        iterations,
        lp_objective,
        mip_objective: mip.objective,
        mip_nodes: mip.nodes,
        gap_columns,
        proven_optimal,
        objective,
        hamming_loss,
        human_penalty,
        template_penalty,
        complexity,
        pool_size: pool.len(),
        human_rules: outcomes,
        warnings,
    };
    Ok(TrainOutcome { rules, rule_set, report })
}
