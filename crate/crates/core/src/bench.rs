//! Benchmark families: Fischer's mutual exclusion, CSMA/CD and a
//! producer/consumer system.
//!
//! Each family is a set of processes composed into one automaton, with
//! locations encoded as local propositions. The implementation and the
//! specification differ in exactly one process. These are reconstructions of
//! the protocols, not copies of any particular tool's input files.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;

use crate::model::{Assigned, CmpOp, Ident, PartialAssignment, Pred, Tea, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Fischer,
    Csma,
    ProdCons,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// A simulation exists.
    Exists,
    /// Only an NZ-simulation exists.
    NzOnly,
    /// Neither exists.
    Not,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("unknown benchmark family `{0}` (expected fischer, csma or prodcons)")]
    Family(String),
    #[error("unknown variant `{0}` (expected exists, nz-only or not)")]
    Variant(String),
    #[error("{0:?} has no {1} variant")]
    Unsupported(Family, Variant),
    #[error("the process count must be at least 1")]
    Count,
    #[error("{family:?} takes {expected} constants, got {got}")]
    Constants {
        family: Family,
        expected: usize,
        got: usize,
    },
    #[error("the scale factor must be positive")]
    Scale,
}

impl FromStr for Family {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Family, BenchError> {
        match s {
            "fischer" => Ok(Family::Fischer),
            "csma" => Ok(Family::Csma),
            "prodcons" => Ok(Family::ProdCons),
            _ => Err(BenchError::Family(s.into())),
        }
    }
}

impl FromStr for Variant {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Variant, BenchError> {
        match s {
            "exists" | "ok" | "sim" => Ok(Variant::Exists),
            "nz-only" | "nz" => Ok(Variant::NzOnly),
            "not" | "none" | "broken" => Ok(Variant::Not),
            _ => Err(BenchError::Variant(s.into())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Fischer => "fischer",
            Family::Csma => "csma",
            Family::ProdCons => "prodcons",
        })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Exists => "exists",
            Variant::NzOnly => "nz-only",
            Variant::Not => "not",
        })
    }
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Fischer, Family::Csma, Family::ProdCons];

    pub fn variants(self) -> &'static [Variant] {
        match self {
            Family::Csma => &[Variant::Exists, Variant::NzOnly, Variant::Not],
            _ => &[Variant::Exists, Variant::Not],
        }
    }

    /// Timing constants at full size.
    ///
    /// * Fischer: `[a, b]`, the write deadline and the wait before entering.
    /// * CSMA/CD: `[sigma, window, lambda]`, the propagation delay, the
    ///   collision window and the frame length.
    /// * Producer/consumer: `[wipe, period_lo, period_hi, read, widened,
    ///   offset]`; `widened` is the specification's deadline in the
    ///   `exists` variant and `offset` its write time in the `not` variant.
    pub fn constants(self) -> Vec<i64> {
        match self {
            Family::Fischer => vec![10, 19],
            Family::Csma => vec![26, 52, 808],
            Family::ProdCons => vec![8, 5, 10, 3, 15, 20],
        }
    }

    /// Small constants with the same ordering, for the region oracle.
    pub fn desk_constants(self) -> Vec<i64> {
        match self {
            Family::Fischer => vec![1, 2],
            Family::Csma => vec![2, 4, 8],
            Family::ProdCons => vec![3, 2, 4, 1, 5, 6],
        }
    }
}

/// One process before composition.
#[derive(Clone, Debug, Default)]
pub struct Process {
    pub clocks: Vec<Ident>,
    pub locals: Vec<Ident>,
    pub init: Vec<Pred>,
    pub invariant: Vec<Pred>,
    /// Transitions carry at most one event.
    pub transitions: Vec<Transition>,
}

impl Process {
    fn alphabet(&self) -> BTreeSet<Ident> {
        self.transitions.iter().flat_map(|t| t.label.iter().cloned()).collect()
    }

    fn add(&mut self, label: &str, guard: Pred, assign: PartialAssignment) {
        let label: Vec<&str> = if label.is_empty() { vec![] } else { vec![label] };
        self.transitions.push(Transition::new(&label, guard, assign));
    }
}

fn merge(a: &PartialAssignment, b: &PartialAssignment) -> Option<PartialAssignment> {
    for (k, v) in &b.entries {
        if a.entries.get(k).is_some_and(|w| w != v) {
            return None;
        }
    }
    Some(a.then(b))
}

/// Synchronous product: a transition with event `e` fires jointly with one
/// `e`-transition of every other process that uses `e`; internal
/// transitions interleave. Combinations writing conflicting values are
/// dropped.
pub fn compose(events: &BTreeSet<Ident>, globals: &[Ident], processes: &[Process]) -> Tea {
    let mut clocks: Vec<Ident> = Vec::new();
    let mut locals: Vec<Ident> = Vec::new();
    let mut init = Vec::new();
    let mut invariant = Vec::new();
    for p in processes {
        for c in &p.clocks {
            if !clocks.contains(c) {
                clocks.push(c.clone());
            }
        }
        locals.extend(p.locals.iter().cloned());
        init.extend(p.init.iter().cloned());
        invariant.extend(p.invariant.iter().cloned());
    }
    let mut transitions = Vec::new();
    let alphabets: Vec<BTreeSet<Ident>> = processes.iter().map(Process::alphabet).collect();
    let used: BTreeSet<&Ident> = alphabets.iter().flatten().collect();
    for e in used {
        let mut partial: Vec<(Vec<Pred>, PartialAssignment)> = vec![(Vec::new(), PartialAssignment::new())];
        for (p, alpha) in processes.iter().zip(&alphabets) {
            if !alpha.contains(e) {
                continue;
            }
            let mut next = Vec::new();
            for (guards, assign) in &partial {
                for t in p.transitions.iter().filter(|t| t.label.contains(e)) {
                    if let Some(a) = merge(assign, &t.assign) {
                        let mut g = guards.clone();
                        g.push(t.guard.clone());
                        next.push((g, a));
                    }
                }
            }
            partial = next;
        }
        for (guards, assign) in partial {
            transitions.push(Transition::new(&[e.as_str()], Pred::and(guards), assign));
        }
    }
    for p in processes {
        transitions.extend(p.transitions.iter().filter(|t| t.label.is_empty()).cloned());
    }
    Tea {
        events: events.clone(),
        clocks,
        globals: globals.to_vec(),
        locals,
        init: Pred::and(init),
        invariant: Pred::and(invariant),
        transitions,
    }
}

fn p(name: &str) -> Pred {
    Pred::prop(name)
}

fn not(name: &str) -> Pred {
    Pred::not(Pred::prop(name))
}

fn when(loc: &str, inv: Pred) -> Pred {
    Pred::or([not(loc), inv])
}

fn fischer_process(i: usize, m: usize, a: i64, enter: Pred) -> Process {
    let x = format!("x{i}");
    let (req, wait, cs) = (format!("req{i}"), format!("wait{i}"), format!("cs{i}"));
    let locks: Vec<String> = (1..=m).map(|j| format!("lock{j}")).collect();
    let mine = &locks[i - 1];
    let idle = Pred::and([not(&req), not(&wait), not(&cs)]);
    let free = Pred::and(locks.iter().map(|l| not(l)));
    let mut take = PartialAssignment::new().reset(&x).set(&req, false).set(&wait, true);
    for l in &locks {
        take = take.set(l, l == mine);
    }
    let mut pr = Process {
        clocks: vec![x.clone()],
        locals: vec![req.clone(), wait.clone(), cs.clone()],
        init: vec![Pred::clock(&x, CmpOp::Eq, 0), not(&req), not(&wait), not(&cs)],
        invariant: vec![when(&req, Pred::clock(&x, CmpOp::Le, a))],
        transitions: Vec::new(),
    };
    pr.add(
        &format!("try{i}"),
        Pred::and([idle, free]),
        PartialAssignment::new().reset(&x).set(&req, true),
    );
    pr.add(
        &format!("set{i}"),
        Pred::and([p(&req), Pred::clock(&x, CmpOp::Le, a)]),
        take,
    );
    pr.add(
        &format!("enter{i}"),
        Pred::and([p(&wait), enter.clone(), p(mine)]),
        PartialAssignment::new().set(&wait, false).set(&cs, true),
    );
    pr.add(
        &format!("retry{i}"),
        Pred::and([p(&wait), enter, not(mine)]),
        PartialAssignment::new().set(&wait, false),
    );
    pr.add(
        &format!("exit{i}"),
        p(&cs),
        PartialAssignment::new().set(&cs, false).set(mine, false),
    );
    pr
}

fn fischer(m: usize, variant: Variant, c: &[i64]) -> (Tea, Tea) {
    let (a, b) = (c[0], c[1]);
    let events: BTreeSet<Ident> = (1..=m)
        .flat_map(|i| ["try", "set", "enter", "retry", "exit"].map(|e| format!("{e}{i}")))
        .collect();
    let globals: Vec<Ident> = (1..=m).map(|j| format!("lock{j}")).collect();
    let standard = |i: usize| fischer_process(i, m, a, Pred::clock(&format!("x{i}"), CmpOp::Gt, b));
    let imp: Vec<Process> = (1..=m).map(standard).collect();
    let mut spec = imp.clone();
    spec[0] = match variant {
        // Entering is allowed as soon as the write deadline has passed.
        Variant::Exists | Variant::NzOnly => fischer_process(1, m, a, Pred::clock("x1", CmpOp::Gt, a)),
        // Entering is allowed only during one time unit.
        Variant::Not => fischer_process(
            1,
            m,
            a,
            Pred::and([Pred::clock("x1", CmpOp::Gt, b), Pred::clock("x1", CmpOp::Le, b + 1)]),
        ),
    };
    (compose(&events, &globals, &imp), compose(&events, &globals, &spec))
}

fn csma_bus(m: usize, sigma: i64) -> Process {
    let y = "y";
    let mut bus = Process {
        clocks: vec![y.into()],
        locals: vec!["active".into(), "coll".into()],
        init: vec![Pred::clock(y, CmpOp::Eq, 0), not("active"), not("coll")],
        invariant: vec![when("coll", Pred::clock(y, CmpOp::Lt, sigma))],
        transitions: Vec::new(),
    };
    let idle = Pred::and([not("active"), not("coll")]);
    for i in 1..=m {
        bus.add(
            &format!("begin{i}"),
            idle.clone(),
            PartialAssignment::new().set("active", true).reset(y),
        );
        bus.add(
            &format!("end{i}"),
            p("active"),
            PartialAssignment::new().set("active", false).reset(y),
        );
        bus.add(
            &format!("begin{i}"),
            Pred::and([p("active"), Pred::clock(y, CmpOp::Lt, sigma)]),
            PartialAssignment::new().set("active", false).set("coll", true).reset(y),
        );
        bus.add(
            &format!("busy{i}"),
            Pred::and([p("active"), Pred::clock(y, CmpOp::Ge, sigma)]),
            PartialAssignment::new(),
        );
    }
    bus.add(
        "cd",
        Pred::and([p("coll"), Pred::clock(y, CmpOp::Lt, sigma)]),
        PartialAssignment::new().set("coll", false).reset(y),
    );
    bus
}

fn csma_sender(i: usize, window: i64, lambda: i64, end: Pred, trap: Option<i64>) -> Process {
    let x = format!("x{i}");
    let (tr, rt) = (format!("tr{i}"), format!("rt{i}"));
    let mut s = Process {
        clocks: vec![x.clone()],
        locals: vec![tr.clone(), rt.clone()],
        init: vec![Pred::clock(&x, CmpOp::Eq, 0), not(&tr), not(&rt)],
        invariant: vec![
            when(&tr, Pred::clock(&x, CmpOp::Le, lambda)),
            when(&rt, Pred::clock(&x, CmpOp::Lt, window)),
        ],
        transitions: Vec::new(),
    };
    let jam = format!("jam{i}");
    let wait = match trap {
        Some(_) => Pred::and([not(&tr), not(&rt), not(&jam)]),
        None => Pred::and([not(&tr), not(&rt)]),
    };
    let in_window = Pred::clock(&x, CmpOp::Lt, window);
    let to_tr = PartialAssignment::new().set(&tr, true).set(&rt, false).reset(&x);
    let to_rt = PartialAssignment::new().set(&tr, false).set(&rt, true).reset(&x);
    let begin = format!("begin{i}");
    let busy = format!("busy{i}");
    s.add(&begin, wait.clone(), to_tr.clone());
    s.add(&busy, wait.clone(), to_rt.clone());
    s.add("cd", wait, to_rt.clone());
    s.add(
        &format!("end{i}"),
        Pred::and([p(&tr), end]),
        PartialAssignment::new().set(&tr, false).reset(&x),
    );
    s.add("cd", Pred::and([p(&tr), in_window.clone()]), to_rt.clone());
    s.add(&begin, Pred::and([p(&rt), in_window.clone()]), to_tr);
    s.add(&busy, Pred::and([p(&rt), in_window.clone()]), to_rt.clone());
    s.add("cd", Pred::and([p(&rt), in_window]), to_rt);
    if let Some(sigma) = trap {
        // A jam signal that leads into a location time cannot leave.
        s.locals.push(jam.clone());
        s.init.push(not(&jam));
        s.invariant.push(when(&jam, Pred::clock(&x, CmpOp::Le, sigma)));
        s.add(
            &jam,
            Pred::and([p(&tr), Pred::clock(&x, CmpOp::Lt, sigma)]),
            PartialAssignment::new().set(&tr, false).set(&jam, true).reset(&x),
        );
    }
    s
}

fn csma(m: usize, variant: Variant, c: &[i64]) -> (Tea, Tea) {
    let (sigma, window, lambda) = (c[0], c[1], c[2]);
    let mut events: BTreeSet<Ident> = (1..=m)
        .flat_map(|i| ["begin", "end", "busy"].map(|e| format!("{e}{i}")))
        .collect();
    events.insert("cd".into());
    events.insert("jam1".into());
    let at_lambda = |i: usize| Pred::clock(&format!("x{i}"), CmpOp::Eq, lambda);
    let mut imp = vec![csma_bus(m, sigma)];
    imp.extend((1..=m).map(|i| csma_sender(i, window, lambda, at_lambda(i), None)));
    let mut spec = imp.clone();
    match variant {
        Variant::Exists => {
            let wide = Pred::and([
                Pred::clock("x1", CmpOp::Ge, window),
                Pred::clock("x1", CmpOp::Le, lambda),
            ]);
            spec[1] = csma_sender(1, window, lambda, wide, None);
        }
        Variant::NzOnly => {
            imp[1] = csma_sender(1, window, lambda, at_lambda(1), Some(sigma));
        }
        Variant::Not => {
            spec[1] = csma_sender(1, window, lambda, Pred::clock("x1", CmpOp::Eq, lambda - 1), None);
        }
    }
    (compose(&events, &[], &imp), compose(&events, &[], &spec))
}

fn producer(lo: i64, hi: i64) -> Process {
    let mut pr = Process {
        clocks: vec!["p".into()],
        init: vec![Pred::clock("p", CmpOp::Eq, 0)],
        invariant: vec![Pred::clock("p", CmpOp::Le, hi)],
        ..Process::default()
    };
    pr.add(
        "write",
        Pred::clock("p", CmpOp::Ge, lo),
        PartialAssignment::new().set("full", true).reset("p"),
    );
    pr
}

/// The buffer reuses the producer's clock, which measures the age of the
/// current data.
fn buffer(wipe: i64) -> Process {
    let mut b = Process {
        init: vec![not("full")],
        ..Process::default()
    };
    b.add(
        "wipe",
        Pred::and([p("full"), Pred::clock("p", CmpOp::Ge, wipe)]),
        PartialAssignment::new().set("full", false),
    );
    b
}

fn consumer(i: usize, read: i64) -> Process {
    let c = format!("c{i}");
    let mut k = Process {
        clocks: vec![c.clone()],
        init: vec![Pred::clock(&c, CmpOp::Eq, 0)],
        ..Process::default()
    };
    k.add(
        &format!("read{i}"),
        Pred::and([p("full"), Pred::clock(&c, CmpOp::Ge, read)]),
        PartialAssignment::new().set("full", false).reset(&c),
    );
    k
}

fn prodcons(m: usize, variant: Variant, c: &[i64]) -> (Tea, Tea) {
    let (wipe, lo, hi, read, widened, offset) = (c[0], c[1], c[2], c[3], c[4], c[5]);
    let mut events: BTreeSet<Ident> = (1..=m).map(|i| format!("read{i}")).collect();
    events.insert("write".into());
    events.insert("wipe".into());
    let globals = vec!["full".to_string()];
    let mut imp = vec![producer(lo, hi), buffer(wipe)];
    imp.extend((1..=m).map(|i| consumer(i, read)));
    let mut spec = imp.clone();
    spec[0] = match variant {
        Variant::Exists | Variant::NzOnly => producer(lo, widened),
        Variant::Not => producer(offset - 1, offset),
    };
    (compose(&events, &globals, &imp), compose(&events, &globals, &spec))
}

/// The implementation and specification of a benchmark instance.
pub fn generate(family: Family, m: usize, variant: Variant, constants: &[i64]) -> Result<(Tea, Tea), BenchError> {
    if m == 0 {
        return Err(BenchError::Count);
    }
    let expected = family.constants().len();
    if constants.len() != expected {
        return Err(BenchError::Constants {
            family,
            expected,
            got: constants.len(),
        });
    }
    if !family.variants().contains(&variant) {
        return Err(BenchError::Unsupported(family, variant));
    }
    Ok(match family {
        Family::Fischer => fischer(m, variant, constants),
        Family::Csma => csma(m, variant, constants),
        Family::ProdCons => prodcons(m, variant, constants),
    })
}

fn constants_of(tea: &Tea, out: &RefCell<Vec<i64>>) {
    tea.map_constants(&|c| {
        out.borrow_mut().push(c);
        c
    });
}

fn lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Multiplies every constant of both automata by `factor`, then by the
/// least common denominator of the results so that all stay integers.
pub fn scale_pair(a: &Tea, b: &Tea, factor: Rational64) -> Result<(Tea, Tea), BenchError> {
    if factor <= Rational64::from_integer(0) {
        return Err(BenchError::Scale);
    }
    let all = RefCell::new(Vec::new());
    constants_of(a, &all);
    constants_of(b, &all);
    let den = all
        .borrow()
        .iter()
        .map(|&c| (Rational64::from_integer(c) * factor).denom().to_owned())
        .fold(1, lcm);
    let f = |c: i64| (Rational64::from_integer(c) * factor * Rational64::from_integer(den)).to_integer();
    Ok((a.map_constants(&f), b.map_constants(&f)))
}

/// Checks that every transition carries at most one event and that no two
/// transitions write different values to the same variable (used by tests
/// on generated models).
pub fn well_formed(tea: &Tea) -> bool {
    tea.validate().is_ok()
        && tea.transitions.iter().all(|t| t.label.len() <= 1)
        && tea.transitions.iter().all(|t| {
            let mut seen: BTreeMap<&Ident, &Assigned> = BTreeMap::new();
            t.assign
                .entries
                .iter()
                .all(|(k, v)| seen.insert(k, v).is_none_or(|w| w == v))
        })
}
