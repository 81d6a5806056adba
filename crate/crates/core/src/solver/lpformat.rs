//! CPLEX LP text format, for cross-checking models with external solvers.

use std::fmt::Write;

use super::{LinearProgram, Sense};

fn term(out: &mut String, first: bool, coef: f64, var: usize) {
    if coef < 0.0 {
        let _ = write!(out, " - {} x{var}", -coef);
    } else if first {
        let _ = write!(out, " {coef} x{var}");
    } else {
        let _ = write!(out, " + {coef} x{var}");
    }
}

pub fn write_lp_format(lp: &LinearProgram, binaries: &[usize]) -> String {
    let mut out = String::from("\\ generated by dnfrule\nMinimize\n obj:");
    let mut first = true;
    for (j, &c) in lp.objective.iter().enumerate() {
        if c != 0.0 {
            term(&mut out, first, c, j);
            first = false;
        }
    }
    if lp.offset != 0.0 {
        let _ = write!(out, " {} {}", if lp.offset < 0.0 { "-" } else { "+" }, lp.offset.abs());
    } else if first {
        out.push_str(" 0 x0");
    }
    out.push_str("\nSubject To\n");
    for (i, c) in lp.constraints.iter().enumerate() {
        let _ = write!(out, " c{i}:");
        let mut first = true;
        for &(j, a) in &c.coeffs {
            term(&mut out, first, a, j);
            first = false;
        }
        if first {
            out.push_str(" 0 x0");
        }
        let op = match c.sense {
            Sense::Ge => ">=",
            Sense::Le => "<=",
        };
        let _ = writeln!(out, " {op} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for j in 0..lp.n_vars() {
        if lp.upper[j].is_finite() {
            let _ = writeln!(out, " {} <= x{j} <= {}", lp.lower[j], lp.upper[j]);
        } else {
            let _ = writeln!(out, " x{j} >= {}", lp.lower[j]);
        }
    }
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for &j in binaries {
            let _ = writeln!(out, " x{j}");
        }
    }
    out.push_str("End\n");
    out
}
