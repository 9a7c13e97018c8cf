//! Predicates compiled against a universe, kept as syntax trees in negation
//! normal form so they can be conjoined with a set without first expanding
//! them into a disjunction of cells.

use std::sync::Arc;

use super::bound::{self, le, lt, Raw, LE_ZERO};
use super::cube::Cube;
use super::dbm::Zone;
use super::set::{atom_holds, Cell, Point, SymbolicSet};
use super::universe::Universe;
use crate::model::{CmpOp, Pred};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Lit(usize, bool),
    /// `var_i − var_j ≺ raw`.
    Atom(usize, usize, Raw),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("`{0}` is not a proposition of this universe")]
    Prop(String),
    #[error("`{0}` is not a clock of this universe")]
    Clock(String),
}

impl Formula {
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(ps) => flat.extend(ps),
                p => flat.push(p),
            }
        }
        match flat.len() {
            0 => Formula::True,
            1 => flat.pop().unwrap(),
            _ => Formula::And(flat),
        }
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(ps) => flat.extend(ps),
                p => flat.push(p),
            }
        }
        match flat.len() {
            0 => Formula::False,
            1 => flat.pop().unwrap(),
            _ => Formula::Or(flat),
        }
    }

    /// Atom with constant-folding when both sides are the zero reference.
    pub fn atom(i: usize, j: usize, raw: Raw) -> Formula {
        if i == j {
            if raw >= LE_ZERO {
                Formula::True
            } else {
                Formula::False
            }
        } else {
            Formula::Atom(i, j, raw)
        }
    }

    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lit(p, v) => Formula::Lit(*p, !v),
            Formula::Atom(i, j, raw) => Formula::atom(*j, *i, bound::negate(*raw)),
            Formula::And(ps) => Formula::or(ps.iter().map(Formula::negate).collect()),
            Formula::Or(ps) => Formula::and(ps.iter().map(Formula::negate).collect()),
        }
    }

    /// Compiles a predicate over the names of `u`.
    pub fn compile(u: &Universe, pred: &Pred) -> Result<Formula, CompileError> {
        Ok(match pred {
            Pred::True => Formula::True,
            Pred::False => Formula::False,
            Pred::Prop(p) => Formula::Lit(u.prop(p).ok_or_else(|| CompileError::Prop(p.clone()))?, true),
            Pred::Clock {
                clock,
                other,
                op,
                bound: c,
            } => {
                let i = clock_index(u, clock)?;
                let j = match other {
                    Some(o) => clock_index(u, o)?,
                    None => 0,
                };
                let c = *c;
                match op {
                    CmpOp::Lt => Formula::atom(i, j, lt(c)),
                    CmpOp::Le => Formula::atom(i, j, le(c)),
                    CmpOp::Gt => Formula::atom(j, i, lt(-c)),
                    CmpOp::Ge => Formula::atom(j, i, le(-c)),
                    CmpOp::Eq => Formula::and(vec![Formula::atom(i, j, le(c)), Formula::atom(j, i, le(-c))]),
                }
            }
            Pred::Not(p) => Formula::compile(u, p)?.negate(),
            Pred::And(ps) => Formula::and(ps.iter().map(|p| Formula::compile(u, p)).collect::<Result<_, _>>()?),
            Pred::Or(ps) => Formula::or(ps.iter().map(|p| Formula::compile(u, p)).collect::<Result<_, _>>()?),
        })
    }

    /// `s ∧ self`, pushed through the syntax tree.
    pub fn restrict(&self, s: &SymbolicSet) -> SymbolicSet {
        if s.is_empty() {
            return s.clone();
        }
        match self {
            Formula::True => s.clone(),
            Formula::False => SymbolicSet::empty(s.universe()),
            Formula::Lit(p, v) => s.with_literal(*p, *v),
            Formula::Atom(i, j, raw) => s.constrain(*i, *j, *raw),
            Formula::And(ps) => {
                let mut cur = s.clone();
                // Cheap conjuncts first: literals and atoms never split cells.
                for p in ps.iter().filter(|p| p.is_literal_or_atom()) {
                    cur = p.restrict(&cur);
                }
                for p in ps.iter().filter(|p| !p.is_literal_or_atom()) {
                    cur = p.restrict(&cur);
                }
                cur
            }
            Formula::Or(ps) => {
                let mut acc = SymbolicSet::empty(s.universe());
                let mut rest = s.clone();
                for p in ps {
                    let part = p.restrict(&rest);
                    if part.is_empty() {
                        continue;
                    }
                    rest = rest.subtract(&part);
                    acc.union_cheap(part);
                    if rest.is_empty() {
                        break;
                    }
                }
                SymbolicSet::from_cells(s.universe(), acc.into_cells())
            }
        }
    }

    fn is_literal_or_atom(&self) -> bool {
        matches!(
            self,
            Formula::Lit(..) | Formula::Atom(..) | Formula::True | Formula::False
        )
    }

    pub fn to_set(&self, u: &Arc<Universe>) -> SymbolicSet {
        self.restrict(&SymbolicSet::top(u))
    }

    /// `self + δ` with `disp` standing for the displacement variable.
    pub fn shift(&self, u: &Universe, disp: usize) -> Formula {
        match self {
            Formula::Atom(i, j, raw) => {
                let adv = |v: usize| u.kind(v).advances();
                match (*i, *j) {
                    (i, 0) if adv(i) => Formula::atom(i, disp, *raw),
                    (0, j) if adv(j) => Formula::atom(disp, j, *raw),
                    _ => self.clone(),
                }
            }
            Formula::And(ps) => Formula::and(ps.iter().map(|p| p.shift(u, disp)).collect()),
            Formula::Or(ps) => Formula::or(ps.iter().map(|p| p.shift(u, disp)).collect()),
            other => other.clone(),
        }
    }

    /// Weakest precondition under resetting `clocks` and writing `props`.
    pub fn assign_pre(&self, clocks: &[usize], props: &[(usize, bool)]) -> Formula {
        match self {
            Formula::Lit(p, v) => match props.iter().find(|(q, _)| q == p) {
                Some((_, w)) if w == v => Formula::True,
                Some(_) => Formula::False,
                None => self.clone(),
            },
            Formula::Atom(i, j, raw) => {
                let sub = |v: usize| if clocks.contains(&v) { 0 } else { v };
                Formula::atom(sub(*i), sub(*j), *raw)
            }
            Formula::And(ps) => Formula::and(ps.iter().map(|p| p.assign_pre(clocks, props)).collect()),
            Formula::Or(ps) => Formula::or(ps.iter().map(|p| p.assign_pre(clocks, props)).collect()),
            other => other.clone(),
        }
    }

    pub fn eval(&self, p: &Point) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Lit(q, v) => (p.props >> q & 1 == 1) == *v,
            Formula::Atom(i, j, raw) => atom_holds(*i, *j, *raw, p),
            Formula::And(ps) => ps.iter().all(|f| f.eval(p)),
            Formula::Or(ps) => ps.iter().any(|f| f.eval(p)),
        }
    }

    pub fn max_constant(&self) -> i64 {
        match self {
            Formula::Atom(_, _, raw) => bound::value(*raw).abs(),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().map(Formula::max_constant).max().unwrap_or(0),
            _ => 0,
        }
    }
}

fn clock_index(u: &Universe, name: &str) -> Result<usize, CompileError> {
    match u.var(name) {
        Some(i) if !u.is_aux(i) && i != 0 => Ok(i),
        _ => Err(CompileError::Clock(name.to_string())),
    }
}

/// A constraint that is either syntax or an already computed set (for
/// instance a non-Zeno set used as an invariant).
#[derive(Clone, Debug)]
pub enum Constraint {
    Formula(Formula),
    Set(SymbolicSet),
}

impl Constraint {
    pub fn restrict(&self, s: &SymbolicSet) -> SymbolicSet {
        match self {
            Constraint::Formula(f) => f.restrict(s),
            Constraint::Set(t) => s.intersect(t),
        }
    }

    pub fn is_true(&self) -> bool {
        match self {
            Constraint::Formula(f) => *f == Formula::True,
            Constraint::Set(_) => false,
        }
    }

    /// `self + δ` over the displacement variable `disp`.
    pub fn shift(&self, u: &Universe, disp: usize) -> Constraint {
        match self {
            Constraint::Formula(f) => Constraint::Formula(f.shift(u, disp)),
            Constraint::Set(t) => Constraint::Set(super::time::time_shift(t, disp)),
        }
    }

    pub fn assign_pre(&self, clocks: &[usize], props: &[(usize, bool)]) -> Constraint {
        match self {
            Constraint::Formula(f) => Constraint::Formula(f.assign_pre(clocks, props)),
            Constraint::Set(t) => Constraint::Set(super::time::assign_precondition(t, clocks, props)),
        }
    }

    pub fn to_set(&self, u: &Arc<Universe>) -> SymbolicSet {
        match self {
            Constraint::Formula(f) => f.to_set(u),
            Constraint::Set(t) => t.clone(),
        }
    }
}

/// The set of a single cube cell, handy in tests and examples.
pub fn cube_cell(u: &Arc<Universe>, literals: &[(usize, bool)]) -> SymbolicSet {
    let mut cube = Cube::TRUE;
    for &(p, v) in literals {
        match cube.with(p, v) {
            Some(c) => cube = c,
            None => return SymbolicSet::empty(u),
        }
    }
    SymbolicSet::from_cells(
        u,
        vec![Cell {
            cube,
            zone: Zone::universal(u),
        }],
    )
}
