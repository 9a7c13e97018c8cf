//! Linear hybrid predicates and Fourier–Motzkin elimination with arbitrary
//! integer coefficients.
//!
//! The zone engine only ever needs unit coefficients; this module eliminates
//! variables constraint by constraint for general coefficients and serves as
//! an independent cross-check of zone projection.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;

use super::bound::{self, INF};
use super::set::SymbolicSet;
use super::universe::Universe;

/// `Σ coeff·var ∼ rhs` with `∼` either `≤` or `<`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub terms: BTreeMap<String, i64>,
    pub strict: bool,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn new(terms: &[(&str, i64)], strict: bool, rhs: i64) -> LinearConstraint {
        let mut map = BTreeMap::new();
        for &(v, c) in terms {
            *map.entry(v.to_string()).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        LinearConstraint {
            terms: map,
            strict,
            rhs,
        }
    }

    pub fn coeff(&self, var: &str) -> i64 {
        self.terms.get(var).copied().unwrap_or(0)
    }

    pub fn negate(&self) -> LinearConstraint {
        LinearConstraint {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            strict: !self.strict,
            rhs: -self.rhs,
        }
    }

    pub fn eval(&self, vals: &HashMap<String, Rational64>) -> bool {
        let lhs: Rational64 = self
            .terms
            .iter()
            .map(|(v, c)| Rational64::from_integer(*c) * vals.get(v).copied().unwrap_or_default())
            .sum();
        let rhs = Rational64::from_integer(self.rhs);
        if self.strict {
            lhs < rhs
        } else {
            lhs <= rhs
        }
    }

    /// `None` when the constraint mentions no variable; then `Some(truth)`
    /// is returned by [`LinearConstraint::constant_truth`].
    pub fn constant_truth(&self) -> Option<bool> {
        self.terms.is_empty().then_some({
            if self.strict {
                0 < self.rhs
            } else {
                0 <= self.rhs
            }
        })
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (k, (v, c)) in self.terms.iter().enumerate() {
            if k == 0 {
                if *c < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(if *c < 0 { " - " } else { " + " });
            }
            if c.abs() != 1 {
                s.push_str(&format!("{}*", c.abs()));
            }
            s.push_str(v);
        }
        if s.is_empty() {
            s.push('0');
        }
        write!(f, "{s} {} {}", if self.strict { "<" } else { "<=" }, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LhPredicate {
    True,
    False,
    Prop(String),
    Linear(LinearConstraint),
    Not(Box<LhPredicate>),
    And(Vec<LhPredicate>),
    Or(Vec<LhPredicate>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Prop(String, bool),
    Linear(LinearConstraint),
}

impl Literal {
    fn to_predicate(&self) -> LhPredicate {
        match self {
            Literal::Prop(p, true) => LhPredicate::Prop(p.clone()),
            Literal::Prop(p, false) => LhPredicate::Not(Box::new(LhPredicate::Prop(p.clone()))),
            Literal::Linear(c) => LhPredicate::Linear(c.clone()),
        }
    }
}

impl LhPredicate {
    pub fn linear(terms: &[(&str, i64)], strict: bool, rhs: i64) -> LhPredicate {
        LhPredicate::Linear(LinearConstraint::new(terms, strict, rhs))
    }

    pub fn eval(&self, props: &HashMap<String, bool>, vals: &HashMap<String, Rational64>) -> bool {
        match self {
            LhPredicate::True => true,
            LhPredicate::False => false,
            LhPredicate::Prop(p) => props.get(p).copied().unwrap_or(false),
            LhPredicate::Linear(c) => c.eval(vals),
            LhPredicate::Not(p) => !p.eval(props, vals),
            LhPredicate::And(ps) => ps.iter().all(|p| p.eval(props, vals)),
            LhPredicate::Or(ps) => ps.iter().any(|p| p.eval(props, vals)),
        }
    }

    /// Disjunctive normal form: a list of conjunctions of literals.
    pub fn dnf(&self) -> Vec<Vec<Literal>> {
        self.dnf_signed(true)
    }

    fn dnf_signed(&self, positive: bool) -> Vec<Vec<Literal>> {
        match (self, positive) {
            (LhPredicate::True, true) | (LhPredicate::False, false) => vec![vec![]],
            (LhPredicate::True, false) | (LhPredicate::False, true) => vec![],
            (LhPredicate::Prop(p), s) => vec![vec![Literal::Prop(p.clone(), s)]],
            (LhPredicate::Linear(c), true) => vec![vec![Literal::Linear(c.clone())]],
            (LhPredicate::Linear(c), false) => vec![vec![Literal::Linear(c.negate())]],
            (LhPredicate::Not(p), s) => p.dnf_signed(!s),
            (LhPredicate::And(ps), true) | (LhPredicate::Or(ps), false) => {
                let mut acc = vec![vec![]];
                for p in ps {
                    let d = p.dnf_signed(positive);
                    let mut next = Vec::new();
                    for a in &acc {
                        for b in &d {
                            let mut c: Vec<Literal> = a.clone();
                            c.extend(b.iter().cloned());
                            next.push(c);
                        }
                    }
                    acc = next;
                }
                acc
            }
            (LhPredicate::Or(ps), true) | (LhPredicate::And(ps), false) => {
                ps.iter().flat_map(|p| p.dnf_signed(positive)).collect()
            }
        }
    }

    fn from_dnf(d: Vec<Vec<Literal>>) -> LhPredicate {
        LhPredicate::Or(
            d.into_iter()
                .map(|c| LhPredicate::And(c.iter().map(Literal::to_predicate).collect()))
                .collect(),
        )
    }

    /// `p[prop := value]`.
    pub fn substitute_prop(&self, prop: &str, value: bool) -> LhPredicate {
        match self {
            LhPredicate::Prop(p) if p == prop => {
                if value {
                    LhPredicate::True
                } else {
                    LhPredicate::False
                }
            }
            LhPredicate::Not(p) => LhPredicate::Not(Box::new(p.substitute_prop(prop, value))),
            LhPredicate::And(ps) => LhPredicate::And(ps.iter().map(|p| p.substitute_prop(prop, value)).collect()),
            LhPredicate::Or(ps) => LhPredicate::Or(ps.iter().map(|p| p.substitute_prop(prop, value)).collect()),
            other => other.clone(),
        }
    }

    /// The predicate of a zone set over its universe, with every matrix entry
    /// (including the implicit clock lower bounds) written out.
    pub fn from_set(s: &SymbolicSet) -> LhPredicate {
        let u = s.universe();
        LhPredicate::Or(
            s.cells()
                .iter()
                .map(|c| {
                    let mut parts = Vec::new();
                    for (p, v) in c.cube.literals() {
                        let lit = LhPredicate::Prop(u.props()[p].clone());
                        parts.push(if v { lit } else { LhPredicate::Not(Box::new(lit)) });
                    }
                    let d = c.zone.dim();
                    for i in 0..d {
                        for j in 0..d {
                            let raw = c.zone.get(i, j);
                            if i == j || raw == INF {
                                continue;
                            }
                            let mut terms = Vec::new();
                            if i != 0 {
                                terms.push((u.var_name(i), 1));
                            }
                            if j != 0 {
                                terms.push((u.var_name(j), -1));
                            }
                            parts.push(LhPredicate::linear(&terms, bound::is_strict(raw), bound::value(raw)));
                        }
                    }
                    LhPredicate::And(parts)
                })
                .collect(),
        )
    }

    /// Converts back to a zone set when every constraint is a difference
    /// constraint with unit coefficients. Constant constraints are folded.
    pub fn to_set(&self, u: &Arc<Universe>) -> Option<SymbolicSet> {
        let mut acc = SymbolicSet::empty(u);
        for conj in self.dnf() {
            let mut cell = SymbolicSet::top(u);
            for lit in conj {
                cell = match lit {
                    Literal::Prop(p, v) => cell.with_literal(u.prop(&p)?, v),
                    Literal::Linear(c) => {
                        if let Some(t) = c.constant_truth() {
                            if t {
                                cell
                            } else {
                                SymbolicSet::empty(u)
                            }
                        } else {
                            let mut pos = None;
                            let mut neg = None;
                            for (v, k) in &c.terms {
                                match k {
                                    1 if pos.is_none() => pos = Some(u.var(v)?),
                                    -1 if neg.is_none() => neg = Some(u.var(v)?),
                                    _ => return None,
                                }
                            }
                            let raw = if c.strict { bound::lt(c.rhs) } else { bound::le(c.rhs) };
                            cell.constrain(pos.unwrap_or(0), neg.unwrap_or(0), raw)
                        }
                    }
                };
            }
            acc = acc.union(&cell);
        }
        Some(acc)
    }
}

/// Combines an upper bound `a` on `var` (positive coefficient) with a lower
/// bound `b` (negative coefficient), cancelling `var`.
pub fn combine(a: &LinearConstraint, b: &LinearConstraint, var: &str) -> LinearConstraint {
    let a1 = a.coeff(var);
    let b1 = b.coeff(var);
    debug_assert!(a1 > 0 && b1 < 0);
    let mut terms: BTreeMap<String, i64> = BTreeMap::new();
    for (v, c) in &a.terms {
        *terms.entry(v.clone()).or_insert(0) += c * b1.abs();
    }
    for (v, c) in &b.terms {
        *terms.entry(v.clone()).or_insert(0) += c * a1.abs();
    }
    terms.retain(|_, c| *c != 0);
    LinearConstraint {
        terms,
        strict: a.strict || b.strict,
        rhs: b1.abs() * a.rhs + a1.abs() * b.rhs,
    }
}

/// `∃var(p)`. Propositions are eliminated by Shannon expansion; numeric
/// variables by pairing every upper bound with every lower bound in each
/// disjunct and keeping the constraints that do not mention `var`.
pub fn fm_eliminate_general(p: &LhPredicate, var: &str, is_prop: bool) -> LhPredicate {
    if is_prop {
        return LhPredicate::Or(vec![p.substitute_prop(var, true), p.substitute_prop(var, false)]);
    }
    let mut out = Vec::new();
    for conj in p.dnf() {
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        let mut rest = Vec::new();
        for lit in conj {
            match lit {
                Literal::Linear(c) if c.coeff(var) > 0 => upper.push(c),
                Literal::Linear(c) if c.coeff(var) < 0 => lower.push(c),
                other => rest.push(other),
            }
        }
        for a in &upper {
            for b in &lower {
                rest.push(Literal::Linear(combine(a, b, var)));
            }
        }
        out.push(rest);
    }
    LhPredicate::from_dnf(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vals(pairs: &[(&str, i64)]) -> HashMap<String, Rational64> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), Rational64::from_integer(*v)))
            .collect()
    }

    #[test]
    fn consistent_bounds_eliminate_to_true() {
        let p = LhPredicate::And(vec![
            LhPredicate::linear(&[("x", 1)], false, 3),
            LhPredicate::linear(&[("x", -1)], false, -1),
        ]);
        let e = fm_eliminate_general(&p, "x", false);
        assert!(e.eval(&HashMap::new(), &HashMap::new()));
    }

    #[test]
    fn scaled_pairing() {
        let p = LhPredicate::And(vec![
            LhPredicate::linear(&[("x", 2)], false, 6),
            LhPredicate::linear(&[("x", -1)], false, -4),
        ]);
        let a = LinearConstraint::new(&[("x", 2)], false, 6);
        let b = LinearConstraint::new(&[("x", -1)], false, -4);
        let c = combine(&a, &b, "x");
        assert!(c.terms.is_empty());
        assert_eq!(c.rhs, -2);
        assert!(!fm_eliminate_general(&p, "x", false).eval(&HashMap::new(), &vals(&[])));
    }

    #[test]
    fn shannon_for_props() {
        let p = LhPredicate::And(vec![
            LhPredicate::Prop("a".into()),
            LhPredicate::linear(&[("x", 1)], false, 3),
        ]);
        let e = fm_eliminate_general(&p, "a", true);
        assert!(e.eval(&HashMap::new(), &vals(&[("x", 2)])));
        assert!(!e.eval(&HashMap::new(), &vals(&[("x", 4)])));
    }
}
