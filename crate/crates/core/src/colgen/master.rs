use crate::dataset::BinaryDataset;
use crate::solver::{LinearProgram, Sense};

use super::{ColgenError, ColumnPool, Mode, Params, PoolEntry};

/// Where things live in the master program: `ξ_i` are variables
/// `0..n_pos`, pooled conjunction `k` is variable `n_pos + k`; rows
/// `0..n_pos` are the coverage rows and row `n_pos` is the budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MasterLayout {
    pub n_pos: usize,
}

impl MasterLayout {
    pub fn w(&self, k: usize) -> usize {
        self.n_pos + k
    }

    pub fn budget_row(&self) -> usize {
        self.n_pos
    }
}

/// Objective coefficient of a pooled conjunction.
pub(crate) fn column_cost(e: &PoolEntry, n: usize, params: &Params) -> f64 {
    let mut c = e.false_positives as f64;
    if e.human && params.mode == Mode::Soft {
        c -= params.c_u * n as f64;
    }
    if params.mode == Mode::Templates {
        c += params.c_p * e.template_distance;
    }
    c
}

pub(crate) fn column_bounds(e: &PoolEntry, params: &Params) -> (f64, f64) {
    if e.human && params.mode == Mode::Hard {
        (1.0, 1.0)
    } else {
        (0.0, 1.0)
    }
}

pub(crate) fn column_coeffs(e: &PoolEntry, layout: MasterLayout) -> Vec<(usize, f64)> {
    let mut coeffs: Vec<(usize, f64)> = e.cover_pos.ones().map(|i| (i, 1.0)).collect();
    coeffs.push((layout.budget_row(), e.complexity() as f64));
    coeffs
}

/// The LP relaxation of the master problem restricted to `pool`. The constant
/// `c_u·n·|U|` of the soft penalty sits in the objective offset, so the
/// objective at a binary point is Hamming loss plus the penalties.
pub fn build_master(
    pool: &ColumnPool,
    ds: &BinaryDataset,
    params: &Params,
) -> Result<(LinearProgram, MasterLayout), ColgenError> {
    if ds.positives().is_empty() {
        return Err(ColgenError::NoPositives);
    }
    let n = ds.n_samples();
    let layout = MasterLayout { n_pos: ds.positives().len() };
    if params.mode == Mode::Hard {
        let required: usize = pool.entries().iter().filter(|e| e.human).map(PoolEntry::complexity).sum();
        if required > params.complexity {
            return Err(ColgenError::BudgetExceeded { required, budget: params.complexity });
        }
    }
    let mut lp = LinearProgram::new(0);
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); layout.n_pos + 1];
    for (i, row) in rows.iter_mut().take(layout.n_pos).enumerate() {
        lp.add_var(1.0, 0.0, 1.0);
        row.push((i, 1.0));
    }
    for (k, e) in pool.entries().iter().enumerate() {
        let (lo, hi) = column_bounds(e, params);
        lp.add_var(column_cost(e, n, params), lo, hi);
        for (r, a) in column_coeffs(e, layout) {
            rows[r].push((layout.w(k), a));
        }
    }
    if params.mode == Mode::Soft {
        let humans = pool.entries().iter().filter(|e| e.human).count();
        lp.offset = params.c_u * n as f64 * humans as f64;
    }
    let budget = rows.pop().unwrap_or_default();
    for row in rows {
        lp.add_constraint(row, Sense::Ge, 1.0);
    }
    lp.add_constraint(budget, Sense::Le, params.complexity as f64);
    Ok((lp, layout))
}
