//! Timed event-automata (TEA): syntax, concrete states and single steps.
//!
//! A TEA carries event-labelled transitions, clocks that all grow at rate one,
//! global (observable) and local propositions, an initial condition and an
//! invariance condition. Locations are not a separate concept: they are local
//! propositions (the text format's `mode` declarations compile to one-hot
//! locals).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

pub type Ident = String;

/// Clock values are exact rationals so that concrete runs can be replayed
/// without rounding.
pub type ClockValue = Rational64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("identifier `{0}` is declared more than once")]
    Duplicate(Ident),
    #[error("unknown identifier `{0}`")]
    Unknown(Ident),
    #[error("`{0}` is a proposition, not a clock")]
    NotAClock(Ident),
    #[error("`{0}` is a clock, not a proposition")]
    NotAProp(Ident),
    #[error("clock `{0}` can only be reset to 0")]
    ClockValue(Ident),
    #[error("event `{0}` is not declared")]
    UnknownEvent(Ident),
    #[error("the two automata disagree on {what}: {left:?} vs {right:?}")]
    Interface {
        what: &'static str,
        left: Vec<Ident>,
        right: Vec<Ident>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn holds<T: Ord>(self, lhs: T, rhs: T) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// State predicate: Boolean combinations of propositions and clock atoms
/// `clock - other ~ bound` with an integer bound.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pred {
    True,
    False,
    Prop(Ident),
    /// `clock - other ~ bound`; `other == None` stands for the zero reference.
    Clock {
        clock: Ident,
        other: Option<Ident>,
        op: CmpOp,
        bound: i64,
    },
    Not(Box<Pred>),
    And(Vec<Pred>),
    Or(Vec<Pred>),
}

impl Pred {
    pub fn prop(name: &str) -> Pred {
        Pred::Prop(name.to_string())
    }

    pub fn clock(clock: &str, op: CmpOp, bound: i64) -> Pred {
        Pred::Clock {
            clock: clock.to_string(),
            other: None,
            op,
            bound,
        }
    }

    pub fn diff(clock: &str, other: &str, op: CmpOp, bound: i64) -> Pred {
        Pred::Clock {
            clock: clock.to_string(),
            other: Some(other.to_string()),
            op,
            bound,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Pred) -> Pred {
        Pred::Not(Box::new(p))
    }

    pub fn and(parts: impl IntoIterator<Item = Pred>) -> Pred {
        let parts: Vec<Pred> = parts.into_iter().collect();
        match parts.len() {
            0 => Pred::True,
            1 => parts.into_iter().next().unwrap(),
            _ => Pred::And(parts),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Pred>) -> Pred {
        let parts: Vec<Pred> = parts.into_iter().collect();
        match parts.len() {
            0 => Pred::False,
            1 => parts.into_iter().next().unwrap(),
            _ => Pred::Or(parts),
        }
    }

    /// Visits every identifier, tagging clocks with `true`.
    pub fn for_each_ident(&self, f: &mut impl FnMut(&Ident, bool)) {
        match self {
            Pred::True | Pred::False => {}
            Pred::Prop(p) => f(p, false),
            Pred::Clock { clock, other, .. } => {
                f(clock, true);
                if let Some(o) = other {
                    f(o, true);
                }
            }
            Pred::Not(p) => p.for_each_ident(f),
            Pred::And(ps) | Pred::Or(ps) => ps.iter().for_each(|p| p.for_each_ident(f)),
        }
    }

    pub fn max_constant(&self) -> i64 {
        match self {
            Pred::True | Pred::False | Pred::Prop(_) => 0,
            Pred::Clock { bound, .. } => bound.abs(),
            Pred::Not(p) => p.max_constant(),
            Pred::And(ps) | Pred::Or(ps) => ps.iter().map(Pred::max_constant).max().unwrap_or(0),
        }
    }

    pub fn map_constants(&self, f: &impl Fn(i64) -> i64) -> Pred {
        match self {
            Pred::Clock {
                clock,
                other,
                op,
                bound,
            } => Pred::Clock {
                clock: clock.clone(),
                other: other.clone(),
                op: *op,
                bound: f(*bound),
            },
            Pred::Not(p) => Pred::not(p.map_constants(f)),
            Pred::And(ps) => Pred::And(ps.iter().map(|p| p.map_constants(f)).collect()),
            Pred::Or(ps) => Pred::Or(ps.iter().map(|p| p.map_constants(f)).collect()),
            other => other.clone(),
        }
    }

    pub fn rename(&self, map: &BTreeMap<Ident, Ident>) -> Pred {
        let r = |s: &Ident| map.get(s).cloned().unwrap_or_else(|| s.clone());
        match self {
            Pred::Prop(p) => Pred::Prop(r(p)),
            Pred::Clock {
                clock,
                other,
                op,
                bound,
            } => Pred::Clock {
                clock: r(clock),
                other: other.as_ref().map(r),
                op: *op,
                bound: *bound,
            },
            Pred::Not(p) => Pred::not(p.rename(map)),
            Pred::And(ps) => Pred::And(ps.iter().map(|p| p.rename(map)).collect()),
            Pred::Or(ps) => Pred::Or(ps.iter().map(|p| p.rename(map)).collect()),
            other => other.clone(),
        }
    }

    /// Evaluates against a total state. Unknown identifiers evaluate as
    /// `false` propositions / zero clocks.
    pub fn eval(&self, state: &State) -> bool {
        match self {
            Pred::True => true,
            Pred::False => false,
            Pred::Prop(p) => state.prop(p),
            Pred::Clock {
                clock,
                other,
                op,
                bound,
            } => {
                let lhs = state.clock(clock)
                    - other
                        .as_ref()
                        .map(|o| state.clock(o))
                        .unwrap_or_else(|| ClockValue::from_integer(0));
                op.holds(lhs, ClockValue::from_integer(*bound))
            }
            Pred::Not(p) => !p.eval(state),
            Pred::And(ps) => ps.iter().all(|p| p.eval(state)),
            Pred::Or(ps) => ps.iter().any(|p| p.eval(state)),
        }
    }
}

/// The value a transition writes into a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Assigned {
    /// Clock reset.
    Zero,
    Bool(bool),
}

/// Partial valuation attached to a transition; identifiers outside the map
/// keep their value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    pub entries: BTreeMap<Ident, Assigned>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(mut self, clock: &str) -> Self {
        self.entries.insert(clock.to_string(), Assigned::Zero);
        self
    }

    pub fn set(mut self, prop: &str, value: bool) -> Self {
        self.entries.insert(prop.to_string(), Assigned::Bool(value));
        self
    }

    pub fn get(&self, ident: &str) -> Option<Assigned> {
        self.entries.get(ident).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self` followed by `later`: entries of `later` win.
    pub fn then(&self, later: &PartialAssignment) -> PartialAssignment {
        let mut entries = self.entries.clone();
        entries.extend(later.entries.iter().map(|(k, v)| (k.clone(), *v)));
        PartialAssignment { entries }
    }

    pub fn rename(&self, map: &BTreeMap<Ident, Ident>) -> PartialAssignment {
        PartialAssignment {
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (map.get(k).cloned().unwrap_or_else(|| k.clone()), *v))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub label: BTreeSet<Ident>,
    pub guard: Pred,
    pub assign: PartialAssignment,
}

impl Transition {
    /// The null transition: empty label, guard `true`, writes nothing.
    pub fn null() -> Self {
        Transition {
            label: BTreeSet::new(),
            guard: Pred::True,
            assign: PartialAssignment::new(),
        }
    }

    pub fn new(label: &[&str], guard: Pred, assign: PartialAssignment) -> Self {
        Transition {
            label: label.iter().map(|s| s.to_string()).collect(),
            guard,
            assign,
        }
    }

    pub fn is_null(&self) -> bool {
        self.label.is_empty() && self.guard == Pred::True && self.assign.is_empty()
    }
}

/// A transition of one automaton, with the implicit null transition as its
/// own variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Null,
    Index(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tea {
    pub events: BTreeSet<Ident>,
    pub clocks: Vec<Ident>,
    pub globals: Vec<Ident>,
    pub locals: Vec<Ident>,
    pub init: Pred,
    pub invariant: Pred,
    pub transitions: Vec<Transition>,
}

impl Tea {
    pub fn transition(&self, edge: Edge) -> std::borrow::Cow<'_, Transition> {
        match edge {
            Edge::Null => std::borrow::Cow::Owned(Transition::null()),
            Edge::Index(i) => std::borrow::Cow::Borrowed(&self.transitions[i]),
        }
    }

    /// Declared transitions followed by the null transition.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.transitions.len())
            .map(Edge::Index)
            .chain(std::iter::once(Edge::Null))
    }

    pub fn is_clock(&self, name: &str) -> bool {
        self.clocks.iter().any(|c| c == name)
    }

    pub fn is_prop(&self, name: &str) -> bool {
        self.globals.iter().chain(&self.locals).any(|c| c == name)
    }

    pub fn max_constant(&self) -> i64 {
        self.transitions
            .iter()
            .map(|t| t.guard.max_constant())
            .chain([self.init.max_constant(), self.invariant.max_constant()])
            .max()
            .unwrap_or(0)
    }

    /// Checks the well-formedness conditions on declarations, predicates and
    /// assignments.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = BTreeSet::new();
        for name in self.clocks.iter().chain(&self.globals).chain(&self.locals) {
            if !seen.insert(name.clone()) {
                return Err(ModelError::Duplicate(name.clone()));
            }
        }
        let check_pred = |p: &Pred| -> Result<(), ModelError> {
            let mut err = None;
            p.for_each_ident(&mut |id, as_clock| {
                if err.is_some() {
                    return;
                }
                if as_clock && !self.is_clock(id) {
                    err = Some(if self.is_prop(id) {
                        ModelError::NotAClock(id.clone())
                    } else {
                        ModelError::Unknown(id.clone())
                    });
                } else if !as_clock && !self.is_prop(id) {
                    err = Some(if self.is_clock(id) {
                        ModelError::NotAProp(id.clone())
                    } else {
                        ModelError::Unknown(id.clone())
                    });
                }
            });
            err.map_or(Ok(()), Err)
        };
        check_pred(&self.init)?;
        check_pred(&self.invariant)?;
        for t in &self.transitions {
            check_pred(&t.guard)?;
            for ev in &t.label {
                if !self.events.contains(ev) {
                    return Err(ModelError::UnknownEvent(ev.clone()));
                }
            }
            for (id, value) in &t.assign.entries {
                match value {
                    Assigned::Zero if !self.is_clock(id) => {
                        return Err(if self.is_prop(id) {
                            ModelError::NotAClock(id.clone())
                        } else {
                            ModelError::Unknown(id.clone())
                        })
                    }
                    Assigned::Bool(_) if !self.is_prop(id) => {
                        return Err(if self.is_clock(id) {
                            ModelError::ClockValue(id.clone())
                        } else {
                            ModelError::Unknown(id.clone())
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Applies `map` to every clock and local proposition.
    pub fn rename(&self, map: &BTreeMap<Ident, Ident>) -> Tea {
        let r = |s: &Ident| map.get(s).cloned().unwrap_or_else(|| s.clone());
        Tea {
            events: self.events.clone(),
            clocks: self.clocks.iter().map(r).collect(),
            globals: self.globals.clone(),
            locals: self.locals.iter().map(r).collect(),
            init: self.init.rename(map),
            invariant: self.invariant.rename(map),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    label: t.label.clone(),
                    guard: t.guard.rename(map),
                    assign: t.assign.rename(map),
                })
                .collect(),
        }
    }

    pub fn map_constants(&self, f: &impl Fn(i64) -> i64) -> Tea {
        Tea {
            init: self.init.map_constants(f),
            invariant: self.invariant.map_constants(f),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    label: t.label.clone(),
                    guard: t.guard.map_constants(f),
                    assign: t.assign.clone(),
                })
                .collect(),
            ..self.clone()
        }
    }
}

/// Total valuation of clocks and propositions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct State {
    pub clocks: BTreeMap<Ident, ClockValue>,
    pub props: BTreeMap<Ident, bool>,
}

impl State {
    /// All clocks zero, all propositions false.
    pub fn zero(tea: &Tea) -> State {
        State {
            clocks: tea
                .clocks
                .iter()
                .map(|c| (c.clone(), ClockValue::from_integer(0)))
                .collect(),
            props: tea
                .globals
                .iter()
                .chain(&tea.locals)
                .map(|p| (p.clone(), false))
                .collect(),
        }
    }

    pub fn with_clock(mut self, name: &str, value: ClockValue) -> Self {
        self.clocks.insert(name.to_string(), value);
        self
    }

    pub fn with_prop(mut self, name: &str, value: bool) -> Self {
        self.props.insert(name.to_string(), value);
        self
    }

    pub fn clock(&self, name: &str) -> ClockValue {
        self.clocks
            .get(name)
            .copied()
            .unwrap_or_else(|| ClockValue::from_integer(0))
    }

    pub fn prop(&self, name: &str) -> bool {
        self.props.get(name).copied().unwrap_or(false)
    }

    /// `ν + δ`: every clock advanced by `delay`.
    pub fn delayed(&self, delay: ClockValue) -> State {
        State {
            clocks: self.clocks.iter().map(|(k, v)| (k.clone(), v + delay)).collect(),
            props: self.props.clone(),
        }
    }

    /// `νΠ`.
    pub fn assigned(&self, assign: &PartialAssignment) -> State {
        let mut next = self.clone();
        for (id, value) in &assign.entries {
            match value {
                Assigned::Zero => {
                    next.clocks.insert(id.clone(), ClockValue::from_integer(0));
                }
                Assigned::Bool(b) => {
                    next.props.insert(id.clone(), *b);
                }
            }
        }
        next
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.props {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{}{}", if *v { "" } else { "!" }, k)?;
        }
        for (k, v) in &self.clocks {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Two transitions are compatible when their labels are equal as sets and
/// they write the same values to the same global propositions. A global
/// written by one side and left alone by the other is a disagreement.
pub fn compatible(e1: &Transition, e2: &Transition, globals: &[Ident]) -> bool {
    e1.label == e2.label && globals.iter().all(|g| e1.assign.get(g) == e2.assign.get(g))
}

/// The transitions of `spec` (plus its null transition) compatible with `e1`.
pub fn compatible_set(e1: &Transition, spec: &Tea) -> Vec<Edge> {
    spec.edges()
        .filter(|&e| compatible(e1, &spec.transition(e), &spec.globals))
        .collect()
}

/// One discrete step, or `None` when the guard fails or the target violates
/// the invariant.
pub fn discrete_step(state: &State, edge: &Transition, tea: &Tea) -> Option<State> {
    if !edge.guard.eval(state) {
        return None;
    }
    let next = state.assigned(&edge.assign);
    tea.invariant.eval(&next).then_some(next)
}

/// Both automata of one check, with the specification's locals and clocks
/// renamed apart from the implementation's.
#[derive(Clone, Debug)]
pub struct CheckUniverse {
    pub events: BTreeSet<Ident>,
    pub globals: Vec<Ident>,
    pub implementation: Tea,
    pub specification: Tea,
    /// Original specification name to the name used in this check.
    pub renamed: BTreeMap<Ident, Ident>,
    pub max_constant: i64,
}

impl CheckUniverse {
    pub fn new(implementation: &Tea, specification: &Tea) -> Result<Self, ModelError> {
        implementation.validate()?;
        specification.validate()?;
        if implementation.events != specification.events {
            return Err(ModelError::Interface {
                what: "events",
                left: implementation.events.iter().cloned().collect(),
                right: specification.events.iter().cloned().collect(),
            });
        }
        let g1: BTreeSet<_> = implementation.globals.iter().collect();
        let g2: BTreeSet<_> = specification.globals.iter().collect();
        if g1 != g2 {
            return Err(ModelError::Interface {
                what: "global propositions",
                left: implementation.globals.clone(),
                right: specification.globals.clone(),
            });
        }
        let mut taken: BTreeSet<Ident> = implementation
            .clocks
            .iter()
            .chain(&implementation.globals)
            .chain(&implementation.locals)
            .chain(&specification.globals)
            .cloned()
            .collect();
        // Keep the specification's own names reserved so a fresh name never shadows one.
        let spec_names: BTreeSet<Ident> = specification
            .clocks
            .iter()
            .chain(&specification.locals)
            .cloned()
            .collect();
        let mut renamed = BTreeMap::new();
        for name in specification.clocks.iter().chain(&specification.locals) {
            if taken.contains(name) {
                let mut k = 2;
                let fresh = loop {
                    let candidate = format!("{name}_{k}");
                    if !taken.contains(&candidate) && !spec_names.contains(&candidate) {
                        break candidate;
                    }
                    k += 1;
                };
                taken.insert(fresh.clone());
                renamed.insert(name.clone(), fresh);
            } else {
                taken.insert(name.clone());
            }
        }
        let specification = specification.rename(&renamed);
        let max_constant = implementation.max_constant().max(specification.max_constant());
        Ok(CheckUniverse {
            events: implementation.events.clone(),
            globals: implementation.globals.clone(),
            implementation: implementation.clone(),
            specification,
            renamed,
            max_constant,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> ClockValue {
        ClockValue::from_integer(n)
    }

    fn one_clock(invariant: Pred, transitions: Vec<Transition>) -> Tea {
        Tea {
            events: ["send", "receive"].iter().map(|s| s.to_string()).collect(),
            clocks: vec!["x".into()],
            globals: vec!["q".into()],
            locals: vec![],
            init: Pred::True,
            invariant,
            transitions,
        }
    }

    #[test]
    fn label_and_global_agreement() {
        let g = vec!["q".to_string()];
        let send = Transition::new(&["send"], Pred::True, PartialAssignment::new());
        let receive = Transition::new(&["receive"], Pred::True, PartialAssignment::new());
        assert!(compatible(&send, &send, &g));
        assert!(!compatible(&send, &receive, &g));
        let writes_q = Transition::new(&[], Pred::True, PartialAssignment::new().set("q", true));
        let silent = Transition::new(&[], Pred::True, PartialAssignment::new());
        assert!(!compatible(&writes_q, &silent, &g));
    }

    #[test]
    fn global_agreement_exhaustive() {
        // Every combination of {undefined, true, false} on both sides.
        let g = vec!["q".to_string()];
        let options = [None, Some(true), Some(false)];
        for a in options {
            for b in options {
                let mk = |v: Option<bool>| {
                    let mut pa = PartialAssignment::new();
                    if let Some(v) = v {
                        pa = pa.set("q", v);
                    }
                    Transition::new(&[], Pred::True, pa)
                };
                assert_eq!(compatible(&mk(a), &mk(b), &g), a == b, "{a:?} {b:?}");
                assert_eq!(compatible(&mk(a), &mk(b), &g), compatible(&mk(b), &mk(a), &g));
            }
        }
    }

    #[test]
    fn compatible_sets() {
        let internal = |guard| Transition::new(&[], guard, PartialAssignment::new());
        let spec = one_clock(
            Pred::True,
            vec![
                internal(Pred::True),
                internal(Pred::clock("x", CmpOp::Ge, 1)),
                Transition::new(&["send"], Pred::True, PartialAssignment::new()),
                Transition::new(&["receive"], Pred::True, PartialAssignment::new()),
            ],
        );
        assert_eq!(
            compatible_set(&Transition::null(), &spec),
            vec![Edge::Index(0), Edge::Index(1), Edge::Null]
        );
        let send = Transition::new(&["send"], Pred::True, PartialAssignment::new());
        assert_eq!(compatible_set(&send, &spec), vec![Edge::Index(2)]);
        let both = Transition::new(&["send", "receive"], Pred::True, PartialAssignment::new());
        assert!(compatible_set(&both, &spec).is_empty());
    }

    #[test]
    fn steps() {
        let e = Transition::new(
            &["send"],
            Pred::clock("x", CmpOp::Ge, 5),
            PartialAssignment::new().reset("x"),
        );
        let tea = one_clock(Pred::True, vec![e.clone()]);
        let at = |v| State::zero(&tea).with_clock("x", r(v));
        assert_eq!(discrete_step(&at(5), &e, &tea), Some(at(0)));
        assert_eq!(discrete_step(&at(4), &e, &tea), None);

        let reset = Transition::new(&[], Pred::True, PartialAssignment::new().reset("x"));
        let strict = one_clock(Pred::clock("x", CmpOp::Ge, 1), vec![reset.clone()]);
        assert_eq!(discrete_step(&at(3), &reset, &strict), None);
        assert_eq!(discrete_step(&at(3), &Transition::null(), &strict), Some(at(3)));
    }

    #[test]
    fn universe_renames_collisions() {
        let a = one_clock(Pred::True, vec![]);
        let u = CheckUniverse::new(&a, &a).unwrap();
        assert_eq!(u.specification.clocks, vec!["x_2".to_string()]);
        assert_eq!(u.renamed.get("x").map(String::as_str), Some("x_2"));
        let mut b = a.clone();
        b.events.insert("other".into());
        assert!(matches!(
            CheckUniverse::new(&a, &b),
            Err(ModelError::Interface { what: "events", .. })
        ));
    }

    #[test]
    fn rejects_prop_written_as_clock() {
        let bad = one_clock(
            Pred::True,
            vec![Transition::new(&[], Pred::True, PartialAssignment::new().reset("q"))],
        );
        assert_eq!(bad.validate(), Err(ModelError::NotAClock("q".into())));
    }
}
