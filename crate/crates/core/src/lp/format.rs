use std::fmt::Write;

use super::{LinearProgram, Relation, Sense};

fn term_list(coeffs: &[f64]) -> String {
    let mut out = String::new();
    for (j, &a) in coeffs.iter().enumerate().filter(|(_, a)| **a != 0.0) {
        let sign = if a < 0.0 { '-' } else { '+' };
        if out.is_empty() {
            let _ = write!(out, "{}{} v{j}", if a < 0.0 { "-" } else { "" }, a.abs());
        } else {
            let _ = write!(out, " {sign} {} v{j}", a.abs());
        }
    }
    if out.is_empty() {
        out.push_str("0 v0");
    }
    out
}

pub(super) fn write_lp(lp: &LinearProgram) -> String {
    let mut out = String::new();
    out.push_str(match lp.sense {
        Sense::Maximize => "Maximize\n",
        Sense::Minimize => "Minimize\n",
    });
    let _ = writeln!(out, " obj: {}", term_list(&lp.objective));
    out.push_str("Subject To\n");
    for (i, row) in lp.rows.iter().enumerate() {
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " r{i}: {} {rel} {}", term_list(&row.coeffs), row.rhs);
    }
    out.push_str("Bounds\n");
    for (j, b) in lp.bounds.iter().enumerate() {
        match (b.lower.is_finite(), b.upper.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " v{j} free");
            }
            (true, true) => {
                let _ = writeln!(out, " {} <= v{j} <= {}", b.lower, b.upper);
            }
            (true, false) => {
                if b.lower != 0.0 {
                    let _ = writeln!(out, " v{j} >= {}", b.lower);
                }
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= v{j} <= {}", b.upper);
            }
        }
    }
    out.push_str("End\n");
    out
}
