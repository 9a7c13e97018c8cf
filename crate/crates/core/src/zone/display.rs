//! Text form of sets: one cell per line, literals then constraints, in the
//! predicate syntax of the TEA format (`a && !b && 3 < x2 <= 5`).

use std::fmt;

use super::bound::{self, Raw, INF, LE_ZERO};
use super::dbm::Zone;
use super::set::{Cell, SymbolicSet};
use super::universe::{Universe, VarKind};

/// A non-redundant list of constraints `(i, j, raw)` whose closure, together
/// with the universe defaults, gives back `z`.
pub fn minimal_constraints(u: &Universe, z: &Zone) -> Vec<(usize, usize, Raw)> {
    let d = z.dim();
    // Variables on a zero-weight cycle are tied together by equalities.
    let mut class = (0..d).collect::<Vec<_>>();
    for i in 0..d {
        if class[i] != i {
            continue;
        }
        for j in i + 1..d {
            if class[j] == j && bound::add(z.get(i, j), z.get(j, i)) == LE_ZERO {
                class[j] = i;
            }
        }
    }
    let mut out = Vec::new();
    for rep in 0..d {
        if class[rep] != rep {
            continue;
        }
        let members: Vec<usize> = (0..d).filter(|&v| class[v] == rep).collect();
        if members.len() > 1 {
            for w in 0..members.len() {
                let (a, b) = (members[w], members[(w + 1) % members.len()]);
                out.push((a, b, z.get(a, b)));
            }
        }
    }
    let reps: Vec<usize> = (0..d).filter(|&v| class[v] == v).collect();
    for &i in &reps {
        for &j in &reps {
            let raw = z.get(i, j);
            if i == j || raw == INF {
                continue;
            }
            let redundant = reps
                .iter()
                .any(|&k| k != i && k != j && bound::add(z.get(i, k), z.get(k, j)) <= raw);
            if !redundant {
                out.push((i, j, raw));
            }
        }
    }
    out.retain(|&(i, j, raw)| !(i == 0 && u.kind(j) == VarKind::Clock && raw == LE_ZERO));
    out
}

fn fmt_upper(raw: Raw) -> (&'static str, i64) {
    (if bound::is_strict(raw) { "<" } else { "<=" }, bound::value(raw))
}

/// Text of one cell.
pub fn cell_to_string(u: &Universe, cell: &Cell) -> String {
    let mut parts = Vec::new();
    for (p, v) in cell.cube.literals() {
        parts.push(format!("{}{}", if v { "" } else { "!" }, u.props()[p]));
    }
    let cons = minimal_constraints(u, &cell.zone);
    let mut lower = vec![None; u.dim()];
    let mut upper = vec![None; u.dim()];
    let mut diffs = Vec::new();
    for (i, j, raw) in cons {
        if j == 0 {
            upper[i] = Some(raw);
        } else if i == 0 {
            lower[j] = Some(raw);
        } else {
            diffs.push((i, j, raw));
        }
    }
    for v in 1..u.dim() {
        let name = u.var_name(v);
        match (lower[v], upper[v]) {
            (None, None) => {}
            (Some(lo), Some(hi))
                if !bound::is_strict(lo) && !bound::is_strict(hi) && -bound::value(lo) == bound::value(hi) =>
            {
                parts.push(format!("{name} = {}", bound::value(hi)));
            }
            (lo, hi) => {
                let mut s = String::new();
                if let Some(lo) = lo {
                    let (op, c) = fmt_upper(lo);
                    s.push_str(&format!("{} {op} ", -c));
                }
                s.push_str(name);
                if let Some(hi) = hi {
                    let (op, c) = fmt_upper(hi);
                    s.push_str(&format!(" {op} {c}"));
                }
                parts.push(s);
            }
        }
    }
    for (i, j, raw) in diffs {
        let (op, c) = fmt_upper(raw);
        parts.push(format!("{} - {} {op} {c}", u.var_name(i), u.var_name(j)));
    }
    if parts.is_empty() {
        "true".to_string()
    } else {
        parts.join(" && ")
    }
}

impl fmt::Display for SymbolicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sorted = self.sorted();
        if sorted.is_empty() {
            return writeln!(f, "false");
        }
        for c in sorted.cells() {
            writeln!(f, "{}", cell_to_string(self.universe(), c))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zone::bound::{le, lt};
    use std::sync::Arc;

    #[test]
    fn chained_bounds_and_differences() {
        let u = Arc::new(Universe::new(&["a".into()], &["x1".into(), "x2".into()]).unwrap());
        let s = SymbolicSet::literal(&u, 0, true)
            .constrain(0, 2, lt(-3))
            .constrain(2, 0, le(5))
            .constrain(2, 1, le(2));
        assert_eq!(s.to_string(), "a && 3 < x2 <= 5 && x2 - x1 <= 2\n");
        assert_eq!(SymbolicSet::empty(&u).to_string(), "false\n");
        assert_eq!(SymbolicSet::top(&u).to_string(), "true\n");
        let eq = SymbolicSet::atom(&u, 1, 0, le(2)).constrain(0, 1, le(-2));
        assert_eq!(eq.to_string(), "x1 = 2\n");
    }
}
