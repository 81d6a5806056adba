//! Independent oracles shared by the integration and acceptance tests. None of
//! these call into the solver, pricing, or training code they check; the
//! dataset module is only used to build inputs.

#![allow(dead_code)]

use dnfrule::dataset::{binarize, BinaryDataset, ColumnKind, RawTable};
use dnfrule::solver::{LinearProgram, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- LPs

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    Infeasible,
    Unbounded,
    Optimal(f64),
}

/// Random LP with small integer data and at most 5 variables.
pub fn random_lp(r: &mut ChaCha8Rng) -> LinearProgram {
    let n = r.random_range(1..=5usize);
    let m = r.random_range(0..=4usize);
    let mut lp = LinearProgram::new(n);
    for j in 0..n {
        lp.objective[j] = r.random_range(-5..=5) as f64;
        lp.lower[j] = r.random_range(-2..=1) as f64;
        lp.upper[j] = if r.random_bool(0.7) {
            lp.lower[j] + r.random_range(0..=5) as f64
        } else {
            f64::INFINITY
        };
    }
    for _ in 0..m {
        let mut coeffs = Vec::new();
        for j in 0..n {
            if r.random_bool(0.8) {
                coeffs.push((j, r.random_range(-3..=3) as f64));
            }
        }
        let sense = if r.random_bool(0.5) { Sense::Ge } else { Sense::Le };
        lp.add_constraint(coeffs, sense, r.random_range(-5..=5) as f64);
    }
    lp
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != 0.0 {
                    for k in c..n {
                        a[r][k] -= f * a[c][k];
                    }
                    b[r] -= f * b[c];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum over basic feasible solutions with infinite upper bounds capped
/// at `cap`.
fn vertex_min(lp: &LinearProgram, cap: f64) -> Option<f64> {
    let n = lp.n_vars();
    // every hyperplane as (a, b, sense) with sense: +1 means a·x >= b
    let mut planes: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    for c in &lp.constraints {
        let mut a = vec![0.0; n];
        for &(j, v) in &c.coeffs {
            a[j] += v;
        }
        let s = if c.sense == Sense::Ge { 1.0 } else { -1.0 };
        planes.push((a, c.rhs, s));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lp.lower[j], 1.0));
        let u = if lp.upper[j].is_finite() { lp.upper[j] } else { cap };
        planes.push((e, u, -1.0));
    }
    let feasible = |x: &[f64]| {
        planes.iter().all(|(a, b, s)| {
            let act: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            s * (act - b) >= -1e-7 * (1.0 + b.abs())
        })
    };
    let k = planes.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(&x) {
                let v = lp.evaluate(&x);
                best = Some(best.map_or(v, |bv: f64| bv.min(v)));
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < k - n + i {
                idx[i] += 1;
                for t in i + 1..n {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Status and optimum by exhaustive vertex enumeration. Unboundedness shows
/// up as an optimum that keeps moving when the artificial cap doubles.
pub fn lp_oracle(lp: &LinearProgram) -> Oracle {
    const CAP: f64 = 1e6;
    match (vertex_min(lp, CAP), vertex_min(lp, 2.0 * CAP)) {
        (None, _) | (_, None) => Oracle::Infeasible,
        (Some(a), Some(b)) if b < a - 1e-6 * (1.0 + a.abs()) => Oracle::Unbounded,
        (Some(a), _) => Oracle::Optimal(a),
    }
}

// ---------------------------------------------------------------- rule learning

/// A random binary dataset: `samples` rows of `cols` bits and labels.
pub struct TinyData {
    pub bits: Vec<Vec<bool>>,
    pub labels: Vec<bool>,
}

pub fn random_tiny(r: &mut ChaCha8Rng, cols: usize, samples: usize) -> TinyData {
    let density = r.random_range(0.3..0.7);
    let bits = (0..samples).map(|_| (0..cols).map(|_| r.random_bool(density)).collect()).collect();
    let mut labels: Vec<bool> = (0..samples).map(|_| r.random_bool(0.5)).collect();
    labels[0] = true;
    TinyData { bits, labels }
}

pub fn covers(bits: &[bool], conj: &[usize]) -> bool {
    conj.iter().all(|&j| bits[j])
}

/// All column subsets of size 1..=max_degree, in lexicographic order.
pub fn all_conjunctions(cols: usize, max_degree: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, cols: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for j in start..cols {
            cur.push(j);
            out.push(cur.clone());
            if left > 1 {
                rec(j + 1, cols, left - 1, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, cols, max_degree, &mut Vec::new(), &mut out);
    out
}

/// Reduced cost of `conj` under the master duals, computed directly.
pub fn reduced_cost(d: &TinyData, conj: &[usize], mu: &[f64], lambda: f64) -> f64 {
    let mut rc = lambda * conj.len() as f64;
    let mut pi = 0;
    for (row, &y) in d.bits.iter().zip(&d.labels) {
        let c = covers(row, conj);
        if y {
            if c {
                rc -= mu[pi];
            }
            pi += 1;
        } else if c {
            rc += 1.0;
        }
    }
    rc
}

/// `min over t of 1 − |conj ∩ t| / |t|`.
pub fn template_distance(conj: &[usize], templates: &[Vec<usize>]) -> f64 {
    templates
        .iter()
        .map(|t| 1.0 - t.iter().filter(|j| conj.contains(j)).count() as f64 / t.len() as f64)
        .fold(f64::INFINITY, f64::min)
}

/// Hamming loss of a rule set: uncovered positives plus, for every
/// negative, the number of selected conjunctions covering it.
pub fn hamming(d: &TinyData, rules: &[Vec<usize>]) -> usize {
    d.bits
        .iter()
        .zip(&d.labels)
        .map(|(row, &y)| {
            let hits = rules.iter().filter(|k| covers(row, k)).count();
            if y {
                usize::from(hits == 0)
            } else {
                hits
            }
        })
        .sum()
}

/// Minimum Hamming loss over every rule set of conjunctions of degree ≤
/// `max_degree` with total literal count ≤ `budget`.
pub fn brute_force_min_loss(d: &TinyData, max_degree: usize, budget: usize) -> usize {
    let cols = d.bits[0].len();
    // conjunctions with identical coverage are interchangeable; keep the
    // cheapest, and drop those covering no positive (they only add loss)
    let mut by_cover: std::collections::BTreeMap<Vec<bool>, Vec<usize>> = Default::default();
    for k in all_conjunctions(cols, max_degree) {
        let cov: Vec<bool> = d.bits.iter().map(|row| covers(row, &k)).collect();
        if !cov.iter().zip(&d.labels).any(|(&c, &y)| c && y) {
            continue;
        }
        let keep = by_cover.get(&cov).is_none_or(|old| k.len() < old.len());
        if keep {
            by_cover.insert(cov, k);
        }
    }
    let cands: Vec<(Vec<bool>, usize)> = by_cover.into_iter().map(|(c, k)| (c, k.len())).collect();
    let n = d.labels.len();
    let mut best = d.labels.iter().filter(|&&y| y).count();
    let mut hits = vec![0usize; n];
    fn rec(
        i: usize,
        budget: usize,
        cands: &[(Vec<bool>, usize)],
        labels: &[bool],
        hits: &mut [usize],
        best: &mut usize,
    ) {
        let loss: usize = labels
            .iter()
            .zip(hits.iter())
            .map(|(&y, &h)| if y { usize::from(h == 0) } else { h })
            .sum();
        *best = (*best).min(loss);
        let false_hits: usize = labels.iter().zip(hits.iter()).filter(|(&y, _)| !y).map(|(_, &h)| h).sum();
        if false_hits >= *best {
            return;
        }
        for k in i..cands.len() {
            let (cov, c) = &cands[k];
            if *c > budget {
                continue;
            }
            // a conjunction whose false positives are at least the positives
            // it newly covers can be dropped from any set without loss
            let mut fresh = 0;
            let mut fp = 0;
            for ((&v, &y), &h) in cov.iter().zip(labels).zip(hits.iter()) {
                if v && y && h == 0 {
                    fresh += 1;
                }
                if v && !y {
                    fp += 1;
                }
            }
            if fp >= fresh {
                continue;
            }
            for (h, &v) in hits.iter_mut().zip(cov) {
                *h += usize::from(v);
            }
            rec(k + 1, budget - c, cands, labels, hits, best);
            for (h, &v) in hits.iter_mut().zip(cov) {
                *h -= usize::from(v);
            }
        }
    }
    rec(0, budget, &cands, &d.labels, &mut hits, &mut best);
    best
}

/// A random 0/1 feature table binarized without negations (two columns per
/// non-constant feature), with the oracle view of the same bits.
pub fn tiny_instance(r: &mut ChaCha8Rng, max_features: usize, max_samples: usize) -> (BinaryDataset, TinyData) {
    loop {
        let features = r.random_range(1..=max_features);
        let samples = r.random_range(4..=max_samples);
        let density = r.random_range(0.3..0.7);
        let mut names: Vec<String> = (0..features).map(|j| format!("f{j}")).collect();
        names.push("y".into());
        let rows: Vec<Vec<String>> = (0..samples)
            .map(|i| {
                let mut row: Vec<String> =
                    (0..features).map(|_| if r.random_bool(density) { "1" } else { "0" }.to_string()).collect();
                row.push(if i == 0 || r.random_bool(0.5) { "true" } else { "false" }.to_string());
                row
            })
            .collect();
        let kinds = vec![ColumnKind::Categorical; features + 1];
        let raw = RawTable::new(names, kinds, rows, "y").expect("well-formed table");
        let Ok(ds) = binarize(&raw, 2, false) else { continue };
        let tiny = oracle_view(&ds);
        return (ds, tiny);
    }
}

/// The bit matrix and labels of a dataset, for the oracles above.
pub fn oracle_view(ds: &BinaryDataset) -> TinyData {
    let bits = (0..ds.n_samples()).map(|i| (0..ds.n_columns()).map(|j| ds.bit(i, j)).collect()).collect();
    let labels = (0..ds.n_samples()).map(|i| ds.label(i)).collect();
    TinyData { bits, labels }
}
