//! Exact bounded-degree search for conjunctions with negative reduced cost.
//!
//! For duals `μ ≥ 0` on the coverage rows and `λ ≥ 0` on the budget row, a
//! conjunction `k` has reduced cost
//! `FP(k) − Σ_{i∈P, k covers i} μ_i + λ·|k| + c_p·d(k)`.
//! Literals are added in increasing column order. Adding literals can only
//! shrink the covered positives and grows `λ·|k|`, and the false-positive and
//! distance terms are non-negative, so `−μ(cover) + λ·(|k|+1)` bounds every
//! extension from below.

use std::cmp::Ordering;

use crate::bitset::Bitset;
use crate::dataset::BinaryDataset;
use crate::metrics::template_distance_columns;
use crate::par::{self, Execution};

use super::ColumnPool;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Duals {
    /// One per positive sample, in `positives()` order.
    pub mu: Vec<f64>,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub columns: Vec<usize>,
    pub reduced_cost: f64,
}

fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.reduced_cost.total_cmp(&b.reduced_cost).then_with(|| a.columns.cmp(&b.columns))
}

/// Column coverage split by class, plus the pricing knobs.
#[derive(Clone, Debug)]
pub struct PricingContext<'a> {
    col_pos: Vec<Bitset>,
    col_neg: Vec<Bitset>,
    n_pos: usize,
    n_neg: usize,
    pub max_degree: usize,
    pub c_p: f64,
    pub templates: &'a [Vec<usize>],
}

impl<'a> PricingContext<'a> {
    pub fn new(ds: &BinaryDataset, max_degree: usize, c_p: f64, templates: &'a [Vec<usize>]) -> Self {
        let (col_pos, col_neg) = (0..ds.n_columns())
            .map(|j| (ds.column(j).select(ds.positives()), ds.column(j).select(ds.negatives())))
            .unzip();
        Self {
            col_pos,
            col_neg,
            n_pos: ds.positives().len(),
            n_neg: ds.negatives().len(),
            max_degree,
            c_p,
            templates,
        }
    }

    pub fn n_columns(&self) -> usize {
        self.col_pos.len()
    }

    fn distance(&self, columns: &[usize]) -> f64 {
        if self.templates.is_empty() || self.c_p == 0.0 {
            0.0
        } else {
            // non-empty templates, so this cannot fail
            self.c_p * template_distance_columns(columns, self.templates).unwrap_or(1.0)
        }
    }

    /// Reduced cost of an arbitrary column set, evaluated directly.
    pub fn reduced_cost(&self, columns: &[usize], duals: &Duals) -> f64 {
        let mut pos = Bitset::full(self.n_pos);
        let mut neg = Bitset::full(self.n_neg);
        for &j in columns {
            pos.and_assign(&self.col_pos[j]);
            neg.and_assign(&self.col_neg[j]);
        }
        let mu = mu_sum(&pos, duals);
        neg.count_ones() as f64 - mu + duals.lambda * columns.len() as f64 + self.distance(columns)
    }
}

fn mu_sum(cover: &Bitset, duals: &Duals) -> f64 {
    cover.ones().map(|i| duals.mu[i]).sum()
}

struct TopK {
    cap: usize,
    threshold: f64,
    items: Vec<Candidate>,
}

impl TopK {
    /// Reduced cost a new candidate must beat (ties broken by columns).
    fn cutoff(&self) -> f64 {
        if self.items.len() < self.cap {
            self.threshold
        } else {
            self.items.last().map_or(self.threshold, |c| c.reduced_cost.min(self.threshold))
        }
    }

    fn offer(&mut self, columns: &[usize], reduced_cost: f64) {
        if reduced_cost >= self.threshold || self.cap == 0 {
            return;
        }
        let c = Candidate { columns: columns.to_vec(), reduced_cost };
        if self.items.len() == self.cap {
            match self.items.last() {
                Some(last) if candidate_order(&c, last) == Ordering::Less => {}
                _ => return,
            }
        }
        let at = self.items.partition_point(|x| candidate_order(x, &c) == Ordering::Less);
        self.items.insert(at, c);
        self.items.truncate(self.cap);
    }
}

struct Search<'c, 'a> {
    ctx: &'c PricingContext<'a>,
    duals: &'c Duals,
    exclude: Option<&'c ColumnPool>,
    /// Per-depth coverage scratch space.
    pos: Vec<Bitset>,
    neg: Vec<Bitset>,
    stack: Vec<usize>,
    top: TopK,
}

impl Search<'_, '_> {
    fn visit(&mut self, depth: usize, j: usize) {
        let ctx = self.ctx;
        if depth == 0 {
            self.pos[0].clone_from(&ctx.col_pos[j]);
            self.neg[0].clone_from(&ctx.col_neg[j]);
        } else {
            let (done, rest) = self.pos.split_at_mut(depth);
            rest[0].assign_and(&done[depth - 1], &ctx.col_pos[j]);
            let (done, rest) = self.neg.split_at_mut(depth);
            rest[0].assign_and(&done[depth - 1], &ctx.col_neg[j]);
        }
        self.stack.push(j);
        let size = self.stack.len() as f64;
        let mu = mu_sum(&self.pos[depth], self.duals);
        let base = self.neg[depth].count_ones() as f64 - mu + self.duals.lambda * size;
        // the distance term is non-negative, so it only matters once the base
        // reduced cost is already competitive
        if base < self.top.cutoff() && !self.exclude.is_some_and(|p| p.contains(&self.stack)) {
            let rc = base + ctx.distance(&self.stack);
            self.top.offer(&self.stack, rc);
        }
        if self.stack.len() < ctx.max_degree {
            let bound = -mu + self.duals.lambda * (size + 1.0);
            let n = ctx.n_columns();
            for next in j + 1..n {
                let cutoff = self.top.cutoff();
                if bound > cutoff + 1e-12 * (1.0 + cutoff.abs()) {
                    break;
                }
                self.visit(depth + 1, next);
            }
        }
        self.stack.pop();
    }
}

/// The `cap` best conjunctions of degree `1..=max_degree` whose reduced cost
/// is below `threshold`, ordered by reduced cost then columns. Members of
/// `exclude` are skipped. The result does not depend on `exec`.
pub fn enumerate_columns(
    ctx: &PricingContext<'_>,
    duals: &Duals,
    exclude: Option<&ColumnPool>,
    threshold: f64,
    cap: usize,
    exec: Execution,
) -> Vec<Candidate> {
    if cap == 0 || ctx.max_degree == 0 {
        return Vec::new();
    }
    let subtree = |j: usize| {
        let mut s = Search {
            ctx,
            duals,
            exclude,
            pos: vec![Bitset::new(ctx.n_pos); ctx.max_degree],
            neg: vec![Bitset::new(ctx.n_neg); ctx.max_degree],
            stack: Vec::with_capacity(ctx.max_degree),
            top: TopK { cap, threshold, items: Vec::new() },
        };
        s.visit(0, j);
        s.top.items
    };
    let mut all: Vec<Candidate> = par::map_range(ctx.n_columns(), exec, subtree).into_iter().flatten().collect();
    all.sort_by(candidate_order);
    all.truncate(cap);
    all
}

/// Improving columns for the restricted master: reduced cost below `-epsilon`,
/// not already pooled, at most `cap` of them.
pub fn price(
    ctx: &PricingContext<'_>,
    duals: &Duals,
    pool: &ColumnPool,
    epsilon: f64,
    cap: usize,
    exec: Execution,
) -> Vec<Candidate> {
    enumerate_columns(ctx, duals, Some(pool), -epsilon, cap, exec)
}
