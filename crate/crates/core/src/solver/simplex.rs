//! Bounded-variable revised simplex with an explicit dense basis inverse.
//!
//! The inverse is updated in product form after every pivot and rebuilt from
//! scratch every [`REFACTOR_PERIOD`] pivots. Pricing is Dantzig's rule until a
//! run of degenerate pivots, then Bland's rule until progress resumes. Primal
//! iterations run on slightly widened bounds for the variables that are or
//! become basic, which breaks most ties in the ratio test; the original bounds
//! are restored afterwards and a dual pass removes any leftover infeasibility.

use super::{LinearProgram, LpError, LpSolution, LpStatus, Sense, Tolerances};

const REFACTOR_PERIOD: usize = 50;
const DEGENERACY_STREAK: usize = 30;
const PERTURBATION: f64 = 5e-7;

/// Deterministic value in [0, 1) per variable index.
fn jitter(v: usize) -> f64 {
    ((v as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11) as f64 / (1u64 << 53) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarKind {
    Structural,
    Slack,
    Artificial,
}

/// A saved basis, restorable into the same [`Simplex`] after bound changes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    state: Vec<VarState>,
    basis: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Simplex {
    tol: Tolerances,
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    kind: Vec<VarKind>,
    /// Internal index of each structural variable.
    structural: Vec<usize>,
    artificial_for_row: Vec<Option<usize>>,
    slack_start: usize,
    rhs: Vec<f64>,
    offset: f64,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Row-major m × m.
    binv: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
    status: LpStatus,
    perturb: bool,
    /// Original bounds of variables whose bounds are currently widened.
    shifted: Vec<(usize, f64, f64)>,
    is_shifted: Vec<bool>,
}

impl Simplex {
    pub fn new(lp: &LinearProgram, tol: Tolerances) -> Result<Self, LpError> {
        lp.validate()?;
        let m = lp.constraints.len();
        let n = lp.n_vars();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, c) in lp.constraints.iter().enumerate() {
            for &(j, a) in &c.coeffs {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
        }
        // merge duplicate entries for the same (row, var)
        for col in &mut cols {
            col.sort_by_key(|e| e.0);
            col.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            col.retain(|e| e.1 != 0.0);
        }
        let mut kind = vec![VarKind::Structural; n];
        let mut cost = lp.objective.clone();
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        for (i, c) in lp.constraints.iter().enumerate() {
            let sign = match c.sense {
                Sense::Le => 1.0,
                Sense::Ge => -1.0,
            };
            cols.push(vec![(i, sign)]);
            kind.push(VarKind::Slack);
            cost.push(0.0);
            lower.push(0.0);
            upper.push(f64::INFINITY);
        }
        let total = cols.len();
        let mut s = Simplex {
            tol,
            m,
            cols,
            cost,
            lower,
            upper,
            kind,
            structural: (0..n).collect(),
            artificial_for_row: vec![None; m],
            slack_start: n,
            rhs: lp.constraints.iter().map(|c| c.rhs).collect(),
            offset: lp.offset,
            x: vec![0.0; total],
            state: vec![VarState::Lower; total],
            basis: Vec::new(),
            binv: Vec::new(),
            since_refactor: 0,
            iterations: 0,
            status: LpStatus::IterationLimit,
            perturb: false,
            shifted: Vec::new(),
            is_shifted: Vec::new(),
        };
        s.crash();
        Ok(s)
    }

    pub fn n_structural(&self) -> usize {
        self.structural.len()
    }

    pub fn status(&self) -> LpStatus {
        self.status
    }

    /// Adds a structural column, nonbasic at its lower bound. The current
    /// basis stays valid, so the next [`Simplex::solve`] warm-starts.
    pub fn add_column(&mut self, cost: f64, coeffs: &[(usize, f64)], lower: f64, upper: f64) -> usize {
        assert!(lower.is_finite() && lower <= upper);
        let mut col: Vec<(usize, f64)> = coeffs.iter().copied().filter(|e| e.1 != 0.0).collect();
        col.sort_by_key(|e| e.0);
        let idx = self.cols.len();
        self.cols.push(col);
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.kind.push(VarKind::Structural);
        self.x.push(lower);
        self.state.push(VarState::Lower);
        self.structural.push(idx);
        if lower != 0.0 {
            self.recompute_basic_values();
        }
        self.structural.len() - 1
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        let v = self.structural[j];
        (self.lower[v], self.upper[v])
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.set_bounds_deferred(j, lower, upper);
        self.recompute_basic_values();
    }

    /// Like [`Simplex::set_bounds`] but leaves basic values stale until the
    /// next [`Simplex::restore`] or [`Simplex::solve`].
    pub(crate) fn set_bounds_deferred(&mut self, j: usize, lower: f64, upper: f64) {
        assert!(lower.is_finite() && lower <= upper);
        let v = self.structural[j];
        self.lower[v] = lower;
        self.upper[v] = upper;
        match self.state[v] {
            VarState::Basic(_) => {}
            VarState::Upper if upper.is_finite() => self.x[v] = upper,
            _ => {
                self.state[v] = VarState::Lower;
                self.x[v] = lower;
            }
        }
    }

    pub fn basis(&self) -> Basis {
        Basis { state: self.state.clone(), basis: self.basis.clone() }
    }

    /// Installs a basis saved from this solver (or from before columns were
    /// added; newer columns become nonbasic at their lower bound).
    pub fn restore(&mut self, b: &Basis) {
        let total = self.cols.len();
        self.state = b.state.clone();
        self.state.resize(total, VarState::Lower);
        self.basis = b.basis.clone();
        for v in 0..total {
            match self.state[v] {
                VarState::Basic(_) => {}
                VarState::Upper if self.upper[v].is_finite() => self.x[v] = self.upper[v],
                _ => {
                    self.state[v] = VarState::Lower;
                    self.x[v] = self.lower[v];
                }
            }
        }
        if !self.refactor() {
            self.crash();
        }
    }

    /// Slack basis, with singleton columns or artificials covering rows the
    /// slack cannot satisfy.
    fn crash(&mut self) {
        let m = self.m;
        let total = self.cols.len();
        for v in 0..total {
            self.state[v] = VarState::Lower;
            self.x[v] = self.lower[v];
            if self.kind[v] == VarKind::Artificial {
                self.upper[v] = 0.0;
            }
        }
        let mut residual = self.rhs.clone();
        for v in 0..total {
            if self.x[v] != 0.0 {
                for &(i, a) in &self.cols[v] {
                    residual[i] -= a * self.x[v];
                }
            }
        }
        let mut singleton: Vec<Vec<usize>> = vec![Vec::new(); m];
        for &v in &self.structural {
            if self.cols[v].len() == 1 && self.lower[v] < self.upper[v] {
                singleton[self.cols[v][0].0].push(v);
            }
        }
        self.basis = vec![usize::MAX; m];
        let mut diag = vec![0.0; m];
        for i in 0..m {
            let slack = self.slack_of(i);
            let coef = self.cols[slack][0].1;
            let need = residual[i] / coef;
            if need >= -self.tol.feasibility {
                self.set_basic(slack, i, need.max(0.0));
                diag[i] = coef;
                continue;
            }
            let fill = singleton[i].iter().copied().find(|&v| {
                let a = self.cols[v][0].1;
                let val = self.x[v] + residual[i] / a;
                val >= self.lower[v] && val <= self.upper[v]
            });
            if let Some(v) = fill {
                let a = self.cols[v][0].1;
                let val = self.x[v] + residual[i] / a;
                self.set_basic(v, i, val);
                diag[i] = a;
                continue;
            }
            let sign = residual[i].signum();
            let art = match self.artificial_for_row[i] {
                Some(a) => {
                    self.cols[a] = vec![(i, sign)];
                    a
                }
                None => {
                    let a = self.cols.len();
                    self.cols.push(vec![(i, sign)]);
                    self.cost.push(0.0);
                    self.lower.push(0.0);
                    self.upper.push(0.0);
                    self.kind.push(VarKind::Artificial);
                    self.x.push(0.0);
                    self.state.push(VarState::Lower);
                    self.artificial_for_row[i] = Some(a);
                    a
                }
            };
            self.upper[art] = f64::INFINITY;
            self.set_basic(art, i, residual[i].abs());
            diag[i] = sign;
        }
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = 1.0 / diag[i];
        }
        self.since_refactor = 0;
    }

    fn shift_bounds(&mut self, v: usize) {
        if self.is_shifted.len() < self.cols.len() {
            self.is_shifted.resize(self.cols.len(), false);
        }
        if self.is_shifted[v] || self.kind[v] == VarKind::Artificial || !self.movable(v) {
            return;
        }
        self.is_shifted[v] = true;
        self.shifted.push((v, self.lower[v], self.upper[v]));
        let d = PERTURBATION * (1.0 + jitter(v));
        if self.lower[v].is_finite() {
            self.lower[v] -= d * (1.0 + self.lower[v].abs());
        }
        if self.upper[v].is_finite() {
            self.upper[v] += d * (1.0 + self.upper[v].abs());
        }
    }

    /// Restores widened bounds and moves nonbasic variables back onto them.
    /// Returns whether anything was widened.
    fn unshift(&mut self) -> bool {
        if self.shifted.is_empty() {
            return false;
        }
        for (v, lo, hi) in std::mem::take(&mut self.shifted) {
            self.is_shifted[v] = false;
            self.lower[v] = lo;
            self.upper[v] = hi;
            match self.state[v] {
                VarState::Basic(_) => {}
                VarState::Lower => self.x[v] = lo,
                VarState::Upper => self.x[v] = hi,
            }
        }
        self.recompute_basic_values();
        true
    }

    fn slack_of(&self, row: usize) -> usize {
        self.slack_start + row
    }

    fn set_basic(&mut self, v: usize, pos: usize, value: f64) {
        self.state[v] = VarState::Basic(pos);
        self.basis[pos] = v;
        self.x[v] = value;
    }

    /// Rebuilds the inverse from the basis columns. Returns false when the
    /// basis matrix is numerically singular.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            self.binv.clear();
            return true;
        }
        // augmented [B | I], Gauss-Jordan with partial pivoting; sparse columns
        // are eliminated first to limit fill
        let w = 2 * m;
        let mut a = vec![0.0; m * w];
        for (pos, &v) in self.basis.iter().enumerate() {
            for &(i, val) in &self.cols[v] {
                a[i * w + pos] = val;
            }
        }
        for i in 0..m {
            a[i * w + m + i] = 1.0;
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| self.cols[self.basis[p]].len());
        let mut row_used = vec![false; m];
        let mut pivot_row_of = vec![0usize; m];
        // singleton columns come first and touch only their own row, so each
        // one still holds its original single entry when its turn comes
        let mut done = 0;
        for &c in &order {
            let col = &self.cols[self.basis[c]];
            if col.len() != 1 {
                break;
            }
            let (r, val) = col[0];
            if row_used[r] || val.abs() < 1e-11 {
                return false;
            }
            row_used[r] = true;
            pivot_row_of[c] = r;
            let inv = 1.0 / val;
            for v in &mut a[r * w..(r + 1) * w] {
                *v *= inv;
            }
            done += 1;
        }
        for &c in &order[done..] {
            let mut best = usize::MAX;
            let mut best_val = 0.0;
            for r in 0..m {
                if !row_used[r] {
                    let v = a[r * w + c].abs();
                    if v > best_val {
                        best_val = v;
                        best = r;
                    }
                }
            }
            if best == usize::MAX || best_val < 1e-11 {
                return false;
            }
            row_used[best] = true;
            pivot_row_of[c] = best;
            let inv = 1.0 / a[best * w + c];
            let mut nz: Vec<(usize, f64)> = Vec::new();
            for k in 0..w {
                let v = a[best * w + k];
                if v != 0.0 {
                    let v = v * inv;
                    a[best * w + k] = v;
                    nz.push((k, v));
                }
            }
            for r in 0..m {
                if r == best {
                    continue;
                }
                let f = a[r * w + c];
                if f != 0.0 {
                    let row = &mut a[r * w..(r + 1) * w];
                    for &(k, pv) in &nz {
                        row[k] -= f * pv;
                    }
                    row[c] = 0.0;
                }
            }
        }
        // row pivot_row_of[c] of the right half is row c of B⁻¹
        for c in 0..m {
            let r = pivot_row_of[c];
            self.binv[c * m..(c + 1) * m].copy_from_slice(&a[r * w + m..(r + 1) * w]);
        }
        self.recompute_basic_values();
        true
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut r = self.rhs.clone();
        for v in 0..self.cols.len() {
            if !matches!(self.state[v], VarState::Basic(_)) && self.x[v] != 0.0 {
                for &(i, a) in &self.cols[v] {
                    r[i] -= a * self.x[v];
                }
            }
        }
        for pos in 0..m {
            let row = &self.binv[pos * m..(pos + 1) * m];
            let val: f64 = row.iter().zip(&r).map(|(b, rv)| b * rv).sum();
            self.x[self.basis[pos]] = val;
        }
    }

    fn duals(&self, costs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for pos in 0..m {
            let cb = costs[self.basis[pos]];
            if cb != 0.0 {
                let row = &self.binv[pos * m..(pos + 1) * m];
                for (yi, b) in y.iter_mut().zip(row) {
                    *yi += cb * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, v: usize, y: &[f64], costs: &[f64]) -> f64 {
        costs[v] - self.cols[v].iter().map(|&(i, a)| y[i] * a).sum::<f64>()
    }

    fn column(&self, v: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for &(k, a) in &self.cols[v] {
            for (i, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[i * m + k] * a;
            }
        }
        alpha
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let inv = 1.0 / alpha[r];
        let pivot_row: Vec<f64> = self.binv[r * m..(r + 1) * m].iter().map(|b| b * inv).collect();
        for i in 0..m {
            if i == r || alpha[i] == 0.0 {
                continue;
            }
            let f = alpha[i];
            let row = &mut self.binv[i * m..(i + 1) * m];
            for (b, p) in row.iter_mut().zip(&pivot_row) {
                *b -= f * p;
            }
        }
        self.binv[r * m..(r + 1) * m].copy_from_slice(&pivot_row);
        self.since_refactor += 1;
    }

    fn iteration_cap(&self) -> usize {
        1000 + 100 * (self.m + self.cols.len())
    }

    fn movable(&self, v: usize) -> bool {
        self.upper[v] > self.lower[v]
    }

    /// Primal simplex from a primal-feasible basis.
    fn primal(&mut self, costs: &[f64]) -> LpStatus {
        let m = self.m;
        let mut degenerate_streak = 0;
        let cap = self.iteration_cap();
        let mut local = 0;
        if self.perturb {
            for pos in 0..m {
                self.shift_bounds(self.basis[pos]);
            }
        }
        loop {
            if local >= cap {
                return LpStatus::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_PERIOD && !self.refactor() {
                self.crash();
                return LpStatus::IterationLimit;
            }
            let bland = degenerate_streak >= DEGENERACY_STREAK;
            let y = self.duals(costs);
            let mut entering = None;
            let mut best = 0.0;
            for v in 0..self.cols.len() {
                let dir = match self.state[v] {
                    VarState::Basic(_) => continue,
                    _ if !self.movable(v) => continue,
                    VarState::Lower => 1.0,
                    VarState::Upper => -1.0,
                };
                let d = self.reduced_cost(v, &y, costs);
                let gain = -dir * d;
                if gain > self.tol.optimality {
                    if bland {
                        entering = Some((v, dir));
                        break;
                    }
                    if gain > best {
                        best = gain;
                        entering = Some((v, dir));
                    }
                }
            }
            let Some((q, dir)) = entering else {
                return LpStatus::Optimal;
            };
            let alpha = self.column(q);
            let mut step = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_piv = 0.0;
            for i in 0..m {
                let delta = -dir * alpha[i];
                if delta.abs() <= self.tol.pivot {
                    continue;
                }
                let b = self.basis[i];
                let (ratio, to_upper) = if delta < 0.0 {
                    ((self.x[b] - self.lower[b]) / -delta, false)
                } else if self.upper[b].is_finite() {
                    ((self.upper[b] - self.x[b]) / delta, true)
                } else {
                    continue;
                };
                let ratio = ratio.max(0.0);
                let better = match leave {
                    None => ratio < step || (ratio == step && step.is_finite()),
                    Some((li, _)) => {
                        if ratio < step - 1e-12 {
                            true
                        } else if ratio <= step + 1e-12 {
                            if bland {
                                b < self.basis[li]
                            } else {
                                delta.abs() > leave_piv
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    step = step.min(ratio);
                    leave = Some((i, to_upper));
                    leave_piv = delta.abs();
                }
            }
            if !step.is_finite() {
                return LpStatus::Unbounded;
            }
            self.iterations += 1;
            local += 1;
            degenerate_streak = if step <= 1e-12 { degenerate_streak + 1 } else { 0 };
            if step != 0.0 {
                self.x[q] += dir * step;
                for i in 0..m {
                    if alpha[i] != 0.0 {
                        let b = self.basis[i];
                        self.x[b] -= dir * alpha[i] * step;
                    }
                }
            }
            match leave {
                None => {
                    // bound flip
                    self.state[q] = if dir > 0.0 { VarState::Upper } else { VarState::Lower };
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
                Some((r, to_upper)) => {
                    let b = self.basis[r];
                    self.state[b] = if to_upper { VarState::Upper } else { VarState::Lower };
                    self.x[b] = if to_upper { self.upper[b] } else { self.lower[b] };
                    self.pivot(r, &alpha);
                    self.basis[r] = q;
                    self.state[q] = VarState::Basic(r);
                    if self.perturb {
                        self.shift_bounds(q);
                    }
                }
            }
        }
    }

    fn primal_infeasibility(&self, pos: usize) -> f64 {
        let b = self.basis[pos];
        (self.lower[b] - self.x[b]).max(self.x[b] - self.upper[b])
    }

    fn primal_feasible(&self) -> bool {
        (0..self.m).all(|p| self.primal_infeasibility(p) <= self.tol.feasibility)
    }

    /// Moves nonbasic boxed variables to the bound their reduced cost
    /// prefers. False if some unboxed variable stays dual infeasible.
    fn make_dual_feasible(&mut self) -> bool {
        let y = self.duals(&self.cost);
        let mut changed = false;
        for v in 0..self.cols.len() {
            if matches!(self.state[v], VarState::Basic(_)) || !self.movable(v) {
                continue;
            }
            let d = self.reduced_cost(v, &y, &self.cost);
            match self.state[v] {
                VarState::Lower if d < -self.tol.optimality => {
                    if !self.upper[v].is_finite() {
                        return false;
                    }
                    self.state[v] = VarState::Upper;
                    self.x[v] = self.upper[v];
                    changed = true;
                }
                VarState::Upper if d > self.tol.optimality => {
                    self.state[v] = VarState::Lower;
                    self.x[v] = self.lower[v];
                    changed = true;
                }
                _ => {}
            }
        }
        if changed {
            self.recompute_basic_values();
        }
        true
    }

    /// Dual simplex from a dual-feasible basis. Reduced costs are updated
    /// from the pivot row and recomputed whenever the inverse is rebuilt.
    fn dual(&mut self) -> LpStatus {
        let m = self.m;
        let cap = self.iteration_cap();
        let mut d: Vec<f64> = Vec::new();
        let mut arow = vec![0.0; self.cols.len()];
        for k in 0..cap {
            if self.since_refactor >= REFACTOR_PERIOD && !self.refactor() {
                return LpStatus::IterationLimit;
            }
            if k == 0 || self.since_refactor == 0 {
                let y = self.duals(&self.cost);
                d = (0..self.cols.len()).map(|v| self.reduced_cost(v, &y, &self.cost)).collect();
            }
            let mut r = usize::MAX;
            let mut worst = self.tol.feasibility;
            for p in 0..m {
                let inf = self.primal_infeasibility(p);
                if inf > worst {
                    worst = inf;
                    r = p;
                }
            }
            if r == usize::MAX {
                return LpStatus::Optimal;
            }
            let leaving = self.basis[r];
            let to_lower = self.x[leaving] < self.lower[leaving];
            let target = if to_lower { self.lower[leaving] } else { self.upper[leaving] };
            let rho = &self.binv[r * m..(r + 1) * m];
            let mut best: Option<(usize, f64, f64)> = None;
            for v in 0..self.cols.len() {
                let at_lower = match self.state[v] {
                    VarState::Basic(_) => {
                        arow[v] = 0.0;
                        continue;
                    }
                    VarState::Lower => true,
                    VarState::Upper => false,
                };
                let arv: f64 = self.cols[v].iter().map(|&(i, a)| rho[i] * a).sum();
                arow[v] = arv;
                if !self.movable(v) || arv.abs() <= self.tol.pivot {
                    continue;
                }
                // x_B[r] moves by -arv per unit of x_v
                let eligible = match (to_lower, at_lower) {
                    (true, true) => arv < 0.0,
                    (true, false) => arv > 0.0,
                    (false, true) => arv > 0.0,
                    (false, false) => arv < 0.0,
                };
                if !eligible {
                    continue;
                }
                let ratio = d[v].abs() / arv.abs();
                let take = match best {
                    None => true,
                    Some((_, br, bp)) => {
                        ratio < br - 1e-12 || (ratio <= br + 1e-12 && arv.abs() > bp)
                    }
                };
                if take {
                    best = Some((v, ratio, arv.abs()));
                }
            }
            let Some((q, _, _)) = best else {
                return LpStatus::Infeasible;
            };
            let alpha = self.column(q);
            let theta = (self.x[leaving] - target) / alpha[r];
            self.x[q] += theta;
            for i in 0..m {
                if alpha[i] != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= alpha[i] * theta;
                }
            }
            self.x[leaving] = target;
            self.state[leaving] = if to_lower { VarState::Lower } else { VarState::Upper };
            let theta_d = d[q] / arow[q];
            for v in 0..self.cols.len() {
                if arow[v] != 0.0 {
                    d[v] -= theta_d * arow[v];
                }
            }
            d[q] = 0.0;
            d[leaving] = -theta_d;
            self.pivot(r, &alpha);
            self.basis[r] = q;
            self.state[q] = VarState::Basic(r);
            self.iterations += 1;
        }
        LpStatus::IterationLimit
    }

    /// Pushes each nonbasic cost slightly further in the direction its bound
    /// already prefers, keeping dual feasibility while breaking ties.
    fn perturb_costs(&mut self) -> Vec<f64> {
        let saved = self.cost.clone();
        for v in 0..self.cols.len() {
            if self.kind[v] == VarKind::Artificial || !self.movable(v) {
                continue;
            }
            let delta = PERTURBATION * (1.0 + jitter(v)) * (1.0 + self.cost[v].abs());
            match self.state[v] {
                VarState::Basic(_) => {}
                VarState::Lower => self.cost[v] += delta,
                VarState::Upper => self.cost[v] -= delta,
            }
        }
        saved
    }

    fn artificials_active(&self) -> bool {
        (0..self.cols.len()).any(|v| self.kind[v] == VarKind::Artificial && self.upper[v] > 0.0)
    }

    fn phase_one(&mut self) -> LpStatus {
        let costs: Vec<f64> = (0..self.cols.len())
            .map(|v| if self.kind[v] == VarKind::Artificial && self.upper[v] > 0.0 { 1.0 } else { 0.0 })
            .collect();
        let st = self.primal(&costs);
        if st == LpStatus::IterationLimit {
            return st;
        }
        let infeasibility: f64 = (0..self.cols.len())
            .filter(|&v| costs[v] > 0.0)
            .map(|v| self.x[v])
            .sum();
        if infeasibility > self.tol.feasibility * (1.0 + self.m as f64).sqrt() {
            return LpStatus::Infeasible;
        }
        for v in 0..self.cols.len() {
            if self.kind[v] == VarKind::Artificial {
                self.upper[v] = 0.0;
                if !matches!(self.state[v], VarState::Basic(_)) {
                    self.state[v] = VarState::Lower;
                    self.x[v] = 0.0;
                }
            }
        }
        LpStatus::Optimal
    }

    /// Solves from the current basis, warm-starting when possible.
    pub fn solve(&mut self) -> LpStatus {
        self.status = self.solve_inner();
        if self.status == LpStatus::Optimal {
            for _ in 0..2 {
                let sol = self.solution();
                if sol.duality_gap() <= self.tol.duality_gap * (1.0 + sol.objective.abs()) {
                    break;
                }
                if !self.refactor() {
                    break;
                }
                self.status = self.solve_inner();
            }
        }
        self.status
    }

    fn solve_inner(&mut self) -> LpStatus {
        if !self.artificials_active() {
            let factored = if self.since_refactor == 0 && self.binv.len() == self.m * self.m {
                self.recompute_basic_values();
                true
            } else {
                self.refactor()
            };
            if !factored {
                self.crash();
            } else if !self.primal_feasible() {
                let mut recovered = false;
                if self.make_dual_feasible() {
                    let saved = self.perturb_costs();
                    let st = self.dual();
                    self.cost = saved;
                    match st {
                        LpStatus::Optimal => recovered = true,
                        LpStatus::Infeasible => return LpStatus::Infeasible,
                        _ => {}
                    }
                }
                if !recovered {
                    self.crash();
                }
            }
        }
        let costs = self.cost.clone();
        self.perturb = true;
        let mut st = LpStatus::Optimal;
        if self.artificials_active() {
            st = self.phase_one();
        }
        if st == LpStatus::Optimal {
            st = self.primal(&costs);
        }
        self.perturb = false;
        // widened bounds relax the problem, so infeasible or unbounded
        // verdicts carry over to the original one
        if !self.unshift() || st != LpStatus::Optimal {
            return st;
        }
        if !self.primal_feasible() {
            match self.dual() {
                LpStatus::Optimal => {}
                other => return other,
            }
        }
        self.primal(&costs)
    }

    pub fn solution(&self) -> LpSolution {
        let y = self.duals(&self.cost);
        let mut dual_obj = self.offset + self.rhs.iter().zip(&y).map(|(b, yi)| b * yi).sum::<f64>();
        for v in 0..self.cols.len() {
            if self.kind[v] == VarKind::Artificial {
                continue;
            }
            let d = self.reduced_cost(v, &y, &self.cost);
            let term = if d.abs() <= self.tol.feasibility {
                d * self.x[v]
            } else if d > 0.0 {
                d * self.lower[v]
            } else if self.upper[v].is_finite() {
                d * self.upper[v]
            } else {
                f64::NEG_INFINITY
            };
            dual_obj += term;
        }
        let primal: Vec<f64> = self.structural.iter().map(|&v| self.x[v]).collect();
        let reduced_costs =
            self.structural.iter().map(|&v| self.reduced_cost(v, &y, &self.cost)).collect();
        let objective = self.offset
            + self.structural.iter().zip(&primal).map(|(&v, x)| self.cost[v] * x).sum::<f64>();
        LpSolution {
            status: self.status,
            primal,
            duals: y,
            reduced_costs,
            objective,
            dual_objective: dual_obj,
            iterations: self.iterations,
        }
    }
}
