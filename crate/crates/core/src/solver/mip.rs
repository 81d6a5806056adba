//! Best-bound branch-and-bound over binary variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{Basis, LinearProgram, LpError, LpStatus, Simplex, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MipOptions {
    pub tolerances: Tolerances,
    pub node_limit: usize,
}

impl Default for MipOptions {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), node_limit: 50_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MipSolution {
    /// `Optimal` certifies the search tree was exhausted; `IterationLimit`
    /// means the node budget ran out and `values` holds the incumbent, if any.
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    /// Root LP relaxation objective.
    pub lp_bound: f64,
    pub nodes: usize,
}

struct Node {
    bound: f64,
    seq: usize,
    fixings: Vec<(usize, f64)>,
    basis: Basis,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // max-heap: smallest bound first, then oldest node
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Minimizes `lp` with the listed variables restricted to {0, 1}.
pub fn solve_binary_mip(
    lp: &LinearProgram,
    binaries: &[usize],
    opts: MipOptions,
) -> Result<MipSolution, LpError> {
    let mut lp = lp.clone();
    for &j in binaries {
        lp.lower[j] = lp.lower[j].max(0.0);
        lp.upper[j] = lp.upper[j].min(1.0);
    }
    let mut simplex = Simplex::new(&lp, opts.tolerances)?;
    Ok(branch_and_bound(&mut simplex, &lp, binaries, opts))
}

/// Branch-and-bound reusing a prepared solver (for example one that already
/// holds an optimal basis of the relaxation). Binary bounds must already be
/// within [0, 1] in both `simplex` and `lp`.
pub(crate) fn branch_and_bound(
    simplex: &mut Simplex,
    lp: &LinearProgram,
    binaries: &[usize],
    opts: MipOptions,
) -> MipSolution {
    let tol = opts.tolerances;
    let root_bounds: Vec<(f64, f64)> = binaries.iter().map(|&j| (lp.lower[j], lp.upper[j])).collect();
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0;
    let mut seq = 0;

    // a previous search may have left fixings behind
    for (k, &j) in binaries.iter().enumerate() {
        simplex.set_bounds_deferred(j, root_bounds[k].0, root_bounds[k].1);
    }
    let current = simplex.basis();
    simplex.restore(&current);
    let root_status = simplex.solve();
    let root = simplex.solution();
    match root_status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return MipSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective: f64::INFINITY,
                lp_bound: f64::INFINITY,
                nodes: 1,
            }
        }
        st => {
            return MipSolution {
                status: st,
                values: Vec::new(),
                objective: f64::NAN,
                lp_bound: f64::NAN,
                nodes: 1,
            }
        }
    }
    let lp_bound = root.objective;
    let mut heap = BinaryHeap::new();
    heap.push(Node { bound: lp_bound, seq, fixings: Vec::new(), basis: simplex.basis() });
    let mut limit_hit = false;
    let mut first = true;

    while let Some(node) = heap.pop() {
        if let Some((best, _)) = &incumbent {
            if node.bound >= best - prune_margin(*best) {
                continue;
            }
        }
        if nodes >= opts.node_limit {
            limit_hit = true;
            break;
        }
        nodes += 1;
        let sol = if first {
            first = false;
            root.clone()
        } else {
            for (k, &j) in binaries.iter().enumerate() {
                simplex.set_bounds_deferred(j, root_bounds[k].0, root_bounds[k].1);
            }
            for &(j, v) in &node.fixings {
                simplex.set_bounds_deferred(j, v, v);
            }
            simplex.restore(&node.basis);
            if simplex.solve() != LpStatus::Optimal {
                continue;
            }
            simplex.solution()
        };
        if let Some((best, _)) = &incumbent {
            if sol.objective >= best - prune_margin(*best) {
                continue;
            }
        }
        // most fractional, lowest index on ties
        let mut branch: Option<(usize, f64)> = None;
        for &j in binaries {
            let v = sol.primal[j];
            let frac = (v - v.round()).abs();
            if frac > tol.integrality {
                let dist = (v - 0.5).abs();
                if branch.is_none_or(|(_, d)| dist < d) {
                    branch = Some((j, dist));
                }
            }
        }
        match branch {
            None => {
                let mut values = sol.primal.clone();
                for &j in binaries {
                    values[j] = values[j].round();
                }
                let obj = lp.evaluate(&values);
                if incumbent.as_ref().is_none_or(|(best, _)| obj < *best) {
                    incumbent = Some((obj, values));
                }
            }
            Some((j, _)) => {
                let basis = simplex.basis();
                for v in [0.0, 1.0] {
                    seq += 1;
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, v));
                    heap.push(Node { bound: sol.objective, seq, fixings, basis: basis.clone() });
                }
            }
        }
    }

    match incumbent {
        Some((objective, values)) => MipSolution {
            status: if limit_hit { LpStatus::IterationLimit } else { LpStatus::Optimal },
            values,
            objective,
            lp_bound,
            nodes,
        },
        None => MipSolution {
            status: if limit_hit { LpStatus::IterationLimit } else { LpStatus::Infeasible },
            values: Vec::new(),
            objective: f64::INFINITY,
            lp_bound,
            nodes,
        },
    }
}

fn prune_margin(best: f64) -> f64 {
    1e-9 * best.abs().max(1.0)
}
