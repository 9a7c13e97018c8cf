//! Seeded random models for property tests and cross-checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{CmpOp, Ident, PartialAssignment, Pred, Tea, Transition};

#[derive(Clone, Debug)]
pub struct GenParams {
    pub max_clocks: usize,
    pub max_constant: i64,
    pub max_transitions: usize,
    pub events: Vec<Ident>,
    pub globals: Vec<Ident>,
    pub max_locals: usize,
    /// Allow `x - y ~ c` atoms.
    pub diagonals: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_clocks: 2,
            max_constant: 5,
            max_transitions: 4,
            events: vec!["a".into(), "b".into()],
            globals: vec!["g".into()],
            max_locals: 1,
            diagonals: false,
        }
    }
}

const OPS: [CmpOp; 5] = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt];

fn atom<R: Rng>(rng: &mut R, clocks: &[Ident], p: &GenParams) -> Pred {
    let x = clocks.choose(rng).unwrap();
    let op = *OPS.choose(rng).unwrap();
    if p.diagonals && clocks.len() > 1 && rng.gen_bool(0.2) {
        let y = clocks.iter().find(|c| *c != x).unwrap();
        return Pred::diff(x, y, op, rng.gen_range(-p.max_constant..=p.max_constant));
    }
    Pred::clock(x, op, rng.gen_range(0..=p.max_constant))
}

fn literal<R: Rng>(rng: &mut R, props: &[Ident]) -> Pred {
    let q = Pred::prop(props.choose(rng).unwrap());
    if rng.gen_bool(0.5) {
        q
    } else {
        Pred::not(q)
    }
}

/// A guard: a small conjunction of clock atoms and literals, sometimes a
/// disjunction of two such conjunctions.
fn guard<R: Rng>(rng: &mut R, clocks: &[Ident], props: &[Ident], p: &GenParams) -> Pred {
    let conj = |rng: &mut R| {
        let mut parts = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            if !clocks.is_empty() {
                parts.push(atom(rng, clocks, p));
            }
        }
        if !props.is_empty() && rng.gen_bool(0.3) {
            parts.push(literal(rng, props));
        }
        Pred::and(parts)
    };
    if rng.gen_bool(0.15) {
        Pred::or([conj(rng), conj(rng)])
    } else {
        conj(rng)
    }
}

/// Upper bounds on clocks, some of them conditional on a proposition.
fn invariant<R: Rng>(rng: &mut R, clocks: &[Ident], props: &[Ident], p: &GenParams) -> Pred {
    let mut parts = Vec::new();
    for x in clocks {
        if rng.gen_bool(0.4) {
            let op = if rng.gen_bool(0.7) { CmpOp::Le } else { CmpOp::Lt };
            let c = rng.gen_range(1..=p.max_constant);
            let bound = Pred::clock(x, op, c);
            if !props.is_empty() && rng.gen_bool(0.3) {
                parts.push(Pred::or([literal(rng, props), bound]));
            } else {
                parts.push(bound);
            }
        }
    }
    Pred::and(parts)
}

/// A random automaton. Clocks are named `{prefix}0`, `{prefix}1`, ...;
/// locals `{prefix}l0`, ...
pub fn random_tea<R: Rng>(rng: &mut R, p: &GenParams, prefix: &str) -> Tea {
    let nclocks = rng.gen_range(1..=p.max_clocks.max(1));
    let clocks: Vec<Ident> = (0..nclocks).map(|i| format!("{prefix}{i}")).collect();
    let locals: Vec<Ident> = (0..rng.gen_range(0..=p.max_locals))
        .map(|i| format!("{prefix}l{i}"))
        .collect();
    let props: Vec<Ident> = p.globals.iter().chain(&locals).cloned().collect();
    let mut init = Vec::new();
    for x in &clocks {
        init.push(Pred::clock(x, CmpOp::Eq, 0));
    }
    for q in &props {
        if rng.gen_bool(0.7) {
            init.push(if rng.gen_bool(0.5) {
                Pred::prop(q)
            } else {
                Pred::not(Pred::prop(q))
            });
        }
    }
    let mut transitions = Vec::new();
    for _ in 0..rng.gen_range(1..=p.max_transitions.max(1)) {
        let label: Vec<&str> = if rng.gen_bool(0.25) {
            vec![]
        } else {
            vec![p.events.choose(rng).unwrap().as_str()]
        };
        let mut assign = PartialAssignment::new();
        for x in &clocks {
            if rng.gen_bool(0.5) {
                assign = assign.reset(x);
            }
        }
        for q in &props {
            let global = p.globals.contains(q);
            // Internal transitions leave globals alone so they stay internal.
            if rng.gen_bool(0.3) && !(global && label.is_empty()) {
                assign = assign.set(q, rng.gen_bool(0.5));
            }
        }
        transitions.push(Transition::new(&label, guard(rng, &clocks, &props, p), assign));
    }
    let invariant = invariant(rng, &clocks, &props, p);
    Tea {
        events: p.events.iter().cloned().collect(),
        clocks,
        globals: p.globals.clone(),
        locals,
        init: Pred::and(init),
        invariant,
        transitions,
    }
}

/// Moves the first clock constant of `q` by one.
fn nudge<R: Rng>(rng: &mut R, q: &Pred, max: i64) -> Pred {
    let delta = if rng.gen_bool(0.5) { 1 } else { -1 };
    walk(q, delta, max, &mut false)
}

fn walk(q: &Pred, delta: i64, max: i64, done: &mut bool) -> Pred {
    match q {
        Pred::Clock {
            clock,
            other,
            op,
            bound,
        } if !*done => {
            *done = true;
            let lo = if other.is_none() { 0 } else { -max };
            Pred::Clock {
                clock: clock.clone(),
                other: other.clone(),
                op: *op,
                bound: (bound + delta).clamp(lo, max),
            }
        }
        Pred::Not(a) => Pred::not(walk(a, delta, max, done)),
        Pred::And(xs) => Pred::And(xs.iter().map(|x| walk(x, delta, max, done)).collect()),
        Pred::Or(xs) => Pred::Or(xs.iter().map(|x| walk(x, delta, max, done)).collect()),
        other => other.clone(),
    }
}

/// A small random edit of `a` that keeps its interface: a guard or
/// invariant constant moves by one, a transition is dropped or duplicated
/// with a fresh guard, or a reset is toggled.
pub fn mutate<R: Rng>(rng: &mut R, a: &Tea, p: &GenParams) -> Tea {
    let mut b = a.clone();
    let props: Vec<Ident> = b.globals.iter().chain(&b.locals).cloned().collect();
    match rng.gen_range(0..5) {
        0 if !b.transitions.is_empty() => {
            let i = rng.gen_range(0..b.transitions.len());
            b.transitions[i].guard = nudge(rng, &b.transitions[i].guard, p.max_constant);
        }
        1 => b.invariant = nudge(rng, &b.invariant, p.max_constant),
        2 if b.transitions.len() > 1 => {
            let i = rng.gen_range(0..b.transitions.len());
            b.transitions.remove(i);
        }
        3 if !b.transitions.is_empty() => {
            let i = rng.gen_range(0..b.transitions.len());
            let mut t = b.transitions[i].clone();
            t.guard = guard(rng, &b.clocks, &props, p);
            b.transitions.push(t);
        }
        _ if !b.transitions.is_empty() => {
            let i = rng.gen_range(0..b.transitions.len());
            let x = b.clocks.choose(rng).unwrap().clone();
            let t = &mut b.transitions[i];
            if t.assign.entries.remove(&x).is_none() {
                t.assign = t.assign.clone().reset(&x);
            }
        }
        _ => {}
    }
    b
}

/// An implementation and a specification over the same interface. Half of
/// the pairs are a model and a mutation of it (in either order), the rest
/// independent draws.
pub fn random_pair<R: Rng>(rng: &mut R, p: &GenParams) -> (Tea, Tea) {
    if rng.gen_bool(0.5) {
        let a = random_tea(rng, p, "x");
        let mut b = mutate(rng, &a, p);
        for _ in 0..rng.gen_range(0..2) {
            b = mutate(rng, &b, p);
        }
        if rng.gen_bool(0.5) {
            (a, b)
        } else {
            (b, a)
        }
    } else {
        (random_tea(rng, p, "x"), random_tea(rng, p, "y"))
    }
}
