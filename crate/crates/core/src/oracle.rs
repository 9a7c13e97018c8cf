//! Brute-force ground truth over clock regions.
//!
//! Everything here works on explicit regions and is meant for small models:
//! at most [`MAX_CLOCKS`] clocks across both automata and constants up to
//! [`MAX_CONSTANT`]. Guards and invariants must compare single clocks with
//! constants; difference constraints are rejected.
//!
//! The simulation game is played on regions of the joint clock set plus one
//! extra clock `w` that measures the delay chosen by the implementation.
//! `w` is compared with constants up to the common maximal constant, like
//! every other clock.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::model::{compatible, Assigned, CheckUniverse, CmpOp, Ident, ModelError, Pred, Tea, Transition};
use crate::zone::{Point, Universe};

pub const MAX_CLOCKS: usize = 6;
pub const MAX_CONSTANT: i64 = 20;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} clocks exceed the oracle limit of {MAX_CLOCKS}")]
    TooManyClocks(usize),
    #[error("maximal constant {0} exceeds the oracle limit of {MAX_CONSTANT}")]
    ConstantTooLarge(i64),
    #[error("difference constraint on `{0}` is not supported by the region oracle")]
    Diagonal(Ident),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Clock and proposition names of a region space. Bit `i` of
/// [`Region::props`] is `props[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    pub clocks: Vec<Ident>,
    pub props: Vec<Ident>,
    pub cap: u8,
}

impl Space {
    fn clock(&self, name: &str) -> Option<usize> {
        self.clocks.iter().position(|c| c == name)
    }

    fn prop(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|p| p == name)
    }

    /// A point of `u` lying in region `r` (clocks matched by name; clocks of
    /// `u` outside this space are zero).
    pub fn point(&self, r: &Region, u: &Universe) -> Point {
        let (den, values) = r.representative(self.cap);
        let mut nums = vec![0; u.dim()];
        for (i, name) in self.clocks.iter().enumerate().take(r.len()) {
            if let Some(v) = u.var(name) {
                nums[v] = values[i];
            }
        }
        let mut props = 0u128;
        for (i, name) in self.props.iter().enumerate() {
            if r.props >> i & 1 == 1 {
                if let Some(p) = u.prop(name) {
                    props |= 1 << p;
                }
            }
        }
        Point { props, den, nums }
    }
}

/// One clock region plus a proposition valuation.
///
/// Clock `i` has integer part `ints[i]`, where `cap + 1` stands for "above
/// the cap". `fracs[i]` is zero for a zero fractional part (or a clock
/// above the cap) and otherwise the rank of the fractional part among all
/// nonzero fractional parts, starting at 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    pub ints: Vec<u8>,
    pub fracs: Vec<u8>,
    pub props: u128,
}

impl Region {
    pub fn zero(clocks: usize, props: u128) -> Region {
        Region {
            ints: vec![0; clocks],
            fracs: vec![0; clocks],
            props,
        }
    }

    pub fn len(&self) -> usize {
        self.ints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ints.is_empty()
    }

    fn normalize(&mut self) {
        let mut ranks: Vec<u8> = self.fracs.iter().copied().filter(|&f| f > 0).collect();
        ranks.sort_unstable();
        ranks.dedup();
        for f in self.fracs.iter_mut() {
            if *f > 0 {
                *f = ranks.binary_search(f).unwrap() as u8 + 1;
            }
        }
    }

    /// The next region reached by letting time pass, or `None` when every
    /// clock is above the cap.
    pub fn time_successor(&self, cap: u8) -> Option<Region> {
        let active: Vec<usize> = (0..self.len()).filter(|&i| self.ints[i] <= cap).collect();
        if active.is_empty() {
            return None;
        }
        let mut next = self.clone();
        if active.iter().any(|&i| self.fracs[i] == 0) {
            for f in next.fracs.iter_mut() {
                if *f > 0 {
                    *f += 1;
                }
            }
            for &i in &active {
                if self.fracs[i] == 0 {
                    if self.ints[i] == cap {
                        next.ints[i] = cap + 1;
                    } else {
                        next.fracs[i] = 1;
                    }
                }
            }
        } else {
            let top = active.iter().map(|&i| self.fracs[i]).max().unwrap();
            for &i in &active {
                if self.fracs[i] == top {
                    next.ints[i] += 1;
                    next.fracs[i] = 0;
                }
            }
        }
        next.normalize();
        Some(next)
    }

    pub fn reset(&mut self, i: usize) {
        self.ints[i] = 0;
        self.fracs[i] = 0;
        self.normalize();
    }

    /// The clocks `keep` (in that order) and the propositions in `mask`.
    pub fn project(&self, keep: impl IntoIterator<Item = usize>, mask: u128) -> Region {
        let mut r = Region {
            ints: Vec::new(),
            fracs: Vec::new(),
            props: self.props & mask,
        };
        for i in keep {
            r.ints.push(self.ints[i]);
            r.fracs.push(self.fracs[i]);
        }
        r.normalize();
        r
    }

    /// `value(i)` compared with the constant `c` (`0 <= c <= cap`).
    fn compare(&self, i: usize, c: i64, cap: u8) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let n = self.ints[i] as i64;
        if self.ints[i] > cap {
            Greater
        } else if self.fracs[i] > 0 {
            if n < c {
                Less
            } else {
                Greater
            }
        } else {
            n.cmp(&c)
        }
    }

    /// A point inside the region: `(den, numerators)`.
    pub fn representative(&self, cap: u8) -> (i64, Vec<i64>) {
        let den = *self.fracs.iter().max().unwrap_or(&0) as i64 + 1;
        let nums = (0..self.len())
            .map(|i| {
                if self.ints[i] > cap {
                    (cap as i64 + 1) * den
                } else {
                    self.ints[i] as i64 * den + self.fracs[i] as i64
                }
            })
            .collect();
        (den, nums)
    }
}

/// A predicate compiled against a [`Space`].
#[derive(Clone, Debug)]
enum RPred {
    Const(bool),
    Prop(usize),
    Atom(usize, CmpOp, i64),
    Not(Box<RPred>),
    And(Vec<RPred>),
    Or(Vec<RPred>),
}

fn holds(op: CmpOp, ord: std::cmp::Ordering) -> bool {
    op.holds(ord, std::cmp::Ordering::Equal)
}

impl RPred {
    fn compile(space: &Space, p: &Pred) -> Result<RPred, OracleError> {
        Ok(match p {
            Pred::True => RPred::Const(true),
            Pred::False => RPred::Const(false),
            Pred::Prop(name) => RPred::Prop(space.prop(name).ok_or_else(|| ModelError::Unknown(name.clone()))?),
            Pred::Clock {
                clock, other: Some(_), ..
            } => return Err(OracleError::Diagonal(clock.clone())),
            Pred::Clock {
                clock,
                other: None,
                op,
                bound,
            } => {
                let i = space.clock(clock).ok_or_else(|| ModelError::Unknown(clock.clone()))?;
                if *bound < 0 {
                    // Clocks are never negative.
                    RPred::Const(holds(*op, std::cmp::Ordering::Greater))
                } else {
                    RPred::Atom(i, *op, *bound)
                }
            }
            Pred::Not(q) => RPred::Not(Box::new(RPred::compile(space, q)?)),
            Pred::And(qs) => RPred::And(qs.iter().map(|q| RPred::compile(space, q)).collect::<Result<_, _>>()?),
            Pred::Or(qs) => RPred::Or(qs.iter().map(|q| RPred::compile(space, q)).collect::<Result<_, _>>()?),
        })
    }

    fn eval(&self, r: &Region, cap: u8) -> bool {
        match self {
            RPred::Const(b) => *b,
            RPred::Prop(p) => r.props >> p & 1 == 1,
            RPred::Atom(i, op, c) => holds(*op, r.compare(*i, *c, cap)),
            RPred::Not(q) => !q.eval(r, cap),
            RPred::And(qs) => qs.iter().all(|q| q.eval(r, cap)),
            RPred::Or(qs) => qs.iter().any(|q| q.eval(r, cap)),
        }
    }

    /// Three-valued evaluation where only clocks below `clocks_known` and
    /// propositions in `props_known` are assigned.
    fn eval_partial(&self, r: &Region, cap: u8, clocks_known: usize, props_known: u128) -> Option<bool> {
        match self {
            RPred::Const(b) => Some(*b),
            RPred::Prop(p) => (props_known >> p & 1 == 1).then(|| r.props >> p & 1 == 1),
            RPred::Atom(i, op, c) => (*i < clocks_known).then(|| holds(*op, r.compare(*i, *c, cap))),
            RPred::Not(q) => q.eval_partial(r, cap, clocks_known, props_known).map(|b| !b),
            RPred::And(qs) => {
                let mut all = Some(true);
                for q in qs {
                    match q.eval_partial(r, cap, clocks_known, props_known) {
                        Some(false) => return Some(false),
                        None => all = None,
                        Some(true) => {}
                    }
                }
                all
            }
            RPred::Or(qs) => {
                let mut any = Some(false);
                for q in qs {
                    match q.eval_partial(r, cap, clocks_known, props_known) {
                        Some(true) => return Some(true),
                        None => any = None,
                        Some(false) => {}
                    }
                }
                any
            }
        }
    }
}

#[derive(Clone, Debug)]
struct RTransition {
    guard: RPred,
    resets: Vec<usize>,
    writes: Vec<(usize, bool)>,
}

impl RTransition {
    fn compile(space: &Space, t: &Transition) -> Result<RTransition, OracleError> {
        let mut resets = Vec::new();
        let mut writes = Vec::new();
        for (name, v) in &t.assign.entries {
            match v {
                Assigned::Zero => resets.push(space.clock(name).ok_or_else(|| ModelError::Unknown(name.clone()))?),
                Assigned::Bool(b) => {
                    writes.push((space.prop(name).ok_or_else(|| ModelError::Unknown(name.clone()))?, *b))
                }
            }
        }
        Ok(RTransition {
            guard: RPred::compile(space, &t.guard)?,
            resets,
            writes,
        })
    }

    fn apply(&self, r: &mut Region) {
        for &i in &self.resets {
            r.ints[i] = 0;
            r.fracs[i] = 0;
        }
        for &(p, v) in &self.writes {
            if v {
                r.props |= 1 << p;
            } else {
                r.props &= !(1 << p);
            }
        }
        r.normalize();
    }
}

/// Every region over clocks `0..clocks` and the propositions in `prop_bits`
/// satisfying all of `preds`.
fn enumerate(cap: u8, clocks: usize, prop_bits: &[usize], preds: &[&RPred]) -> Vec<Region> {
    let mut out = Vec::new();
    let mut r = Region::zero(clocks, 0);
    enumerate_props(cap, prop_bits, 0, 0, preds, &mut r, &mut out);
    out
}

fn enumerate_props(
    cap: u8,
    bits: &[usize],
    k: usize,
    known: u128,
    preds: &[&RPred],
    r: &mut Region,
    out: &mut Vec<Region>,
) {
    if preds.iter().any(|p| p.eval_partial(r, cap, 0, known) == Some(false)) {
        return;
    }
    if k == bits.len() {
        enumerate_clocks(cap, 0, known, preds, r, out);
        return;
    }
    for v in [false, true] {
        if v {
            r.props |= 1 << bits[k];
        } else {
            r.props &= !(1 << bits[k]);
        }
        enumerate_props(cap, bits, k + 1, known | 1 << bits[k], preds, r, out);
    }
    r.props &= !(1 << bits[k]);
}

/// Assigns integer classes clock by clock (a clock with a nonzero fraction
/// is marked with rank 1 for now), then spreads the fractional clocks over
/// all weak orders.
fn enumerate_clocks(cap: u8, i: usize, known: u128, preds: &[&RPred], r: &mut Region, out: &mut Vec<Region>) {
    if preds.iter().any(|p| p.eval_partial(r, cap, i, known) == Some(false)) {
        return;
    }
    if i == r.len() {
        let frac: Vec<usize> = (0..r.len()).filter(|&j| r.fracs[j] > 0).collect();
        for order in weak_orders(frac.len()) {
            let mut s = r.clone();
            for (k, &j) in frac.iter().enumerate() {
                s.fracs[j] = order[k];
            }
            out.push(s);
        }
        return;
    }
    for n in 0..=cap + 1 {
        for f in [0u8, 1] {
            if f == 1 && n >= cap {
                continue;
            }
            r.ints[i] = n;
            r.fracs[i] = f;
            enumerate_clocks(cap, i + 1, known, preds, r, out);
        }
    }
    r.ints[i] = 0;
    r.fracs[i] = 0;
}

/// All rank assignments of `n` items onto `1..=k` using every rank.
fn weak_orders(n: usize) -> Vec<Vec<u8>> {
    fn go(n: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            let max = *cur.iter().max().unwrap_or(&0);
            if (1..=max).all(|r| cur.contains(&r)) {
                out.push(cur.clone());
            }
            return;
        }
        for r in 1..=n as u8 {
            cur.push(r);
            go(n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

fn cap_for(max_constant: i64, clocks: usize) -> Result<u8, OracleError> {
    if clocks > MAX_CLOCKS {
        return Err(OracleError::TooManyClocks(clocks));
    }
    if max_constant > MAX_CONSTANT {
        return Err(OracleError::ConstantTooLarge(max_constant));
    }
    Ok(max_constant.max(1) as u8)
}

/// The reachable part of a region graph.
#[derive(Clone, Debug)]
pub struct RegionGraph {
    pub space: Space,
    pub regions: Vec<Region>,
    pub index: HashMap<Region, usize>,
    /// Time successor, when it exists and satisfies the invariant.
    pub time: Vec<Option<usize>>,
    /// `(transition index, target)` for declared transitions.
    pub discrete: Vec<Vec<(usize, usize)>>,
}

struct Compiled {
    space: Space,
    /// Bits of the propositions the automaton declares.
    bits: Vec<usize>,
    init: RPred,
    invariant: RPred,
    transitions: Vec<RTransition>,
}

fn compile_tea(tea: &Tea, space: Space) -> Result<Compiled, OracleError> {
    Ok(Compiled {
        init: RPred::compile(&space, &tea.init)?,
        invariant: RPred::compile(&space, &tea.invariant)?,
        transitions: tea
            .transitions
            .iter()
            .map(|t| RTransition::compile(&space, t))
            .collect::<Result<_, _>>()?,
        bits: (0..space.props.len())
            .filter(|&i| tea.globals.contains(&space.props[i]) || tea.locals.contains(&space.props[i]))
            .collect(),
        space,
    })
}

fn tea_space(tea: &Tea, cap: u8) -> Space {
    Space {
        clocks: tea.clocks.clone(),
        props: tea.globals.iter().chain(&tea.locals).cloned().collect(),
        cap,
    }
}

/// The region graph of `tea` reachable from `init ∧ invariant`.
pub fn region_graph(tea: &Tea) -> Result<RegionGraph, OracleError> {
    tea.validate()?;
    let cap = cap_for(tea.max_constant(), tea.clocks.len())?;
    let c = compile_tea(tea, tea_space(tea, cap))?;
    Ok(build_graph(&c))
}

fn build_graph(c: &Compiled) -> RegionGraph {
    let cap = c.space.cap;
    let starts = enumerate(cap, c.space.clocks.len(), &c.bits, &[&c.init, &c.invariant]);
    let mut g = RegionGraph {
        space: c.space.clone(),
        regions: Vec::new(),
        index: HashMap::new(),
        time: Vec::new(),
        discrete: Vec::new(),
    };
    let mut queue = VecDeque::new();
    let intern = |g: &mut RegionGraph, r: Region, queue: &mut VecDeque<usize>| -> usize {
        if let Some(&i) = g.index.get(&r) {
            return i;
        }
        let i = g.regions.len();
        g.index.insert(r.clone(), i);
        g.regions.push(r);
        g.time.push(None);
        g.discrete.push(Vec::new());
        queue.push_back(i);
        i
    };
    for r in starts {
        intern(&mut g, r, &mut queue);
    }
    while let Some(i) = queue.pop_front() {
        let r = g.regions[i].clone();
        if let Some(n) = r.time_successor(cap) {
            if c.invariant.eval(&n, cap) {
                let j = intern(&mut g, n, &mut queue);
                g.time[i] = Some(j);
            }
        }
        for (k, t) in c.transitions.iter().enumerate() {
            if t.guard.eval(&r, cap) {
                let mut n = r.clone();
                t.apply(&mut n);
                if c.invariant.eval(&n, cap) {
                    let j = intern(&mut g, n, &mut queue);
                    g.discrete[i].push((k, j));
                }
            }
        }
    }
    g
}

/// Reachable regions and the Zeno ones among them.
#[derive(Clone, Debug)]
pub struct ZenoAnalysis {
    pub graph: RegionGraph,
    /// Indices into `graph.regions` of the regions from which no run lets
    /// time diverge.
    pub zeno: HashSet<usize>,
}

impl ZenoAnalysis {
    pub fn non_zeno(&self) -> impl Iterator<Item = &Region> {
        self.graph
            .regions
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.zeno.contains(i))
            .map(|(_, r)| r)
    }
}

/// Zeno regions of `tea` among its reachable regions.
pub fn zeno_regions(tea: &Tea) -> Result<ZenoAnalysis, OracleError> {
    tea.validate()?;
    let cap = cap_for(tea.max_constant(), tea.clocks.len())?;
    zeno_in_space(tea, tea_space(tea, cap))
}

/// A run diverges iff it lets one full time unit pass infinitely often. The
/// regions are extended with a clock `u` that is reset by a marked "tick"
/// edge whenever `u >= 1`; a region is non-Zeno iff its copy with `u = 0`
/// reaches a cycle through a tick edge.
fn zeno_in_space(tea: &Tea, space: Space) -> Result<ZenoAnalysis, OracleError> {
    let c = compile_tea(tea, space)?;
    let cap = c.space.cap;
    let graph = build_graph(&c);
    let n = c.space.clocks.len();
    let u = n;

    let mut nodes: Vec<Region> = Vec::new();
    let mut index: HashMap<Region, usize> = HashMap::new();
    let mut succ: Vec<Vec<(usize, bool)>> = Vec::new();
    let mut queue = VecDeque::new();
    let intern = |r: Region,
                  nodes: &mut Vec<Region>,
                  index: &mut HashMap<Region, usize>,
                  succ: &mut Vec<Vec<(usize, bool)>>,
                  queue: &mut VecDeque<usize>| {
        if let Some(&i) = index.get(&r) {
            return i;
        }
        let i = nodes.len();
        index.insert(r.clone(), i);
        nodes.push(r);
        succ.push(Vec::new());
        queue.push_back(i);
        i
    };
    let with_u = |r: &Region| {
        let mut a = r.clone();
        a.ints.push(0);
        a.fracs.push(0);
        a
    };
    let starts: Vec<usize> = graph
        .regions
        .iter()
        .map(|r| intern(with_u(r), &mut nodes, &mut index, &mut succ, &mut queue))
        .collect();
    while let Some(i) = queue.pop_front() {
        let r = nodes[i].clone();
        let mut out = Vec::new();
        if let Some(next) = r.time_successor(cap) {
            if c.invariant.eval(&next, cap) {
                out.push((next, false));
            }
        }
        for t in &c.transitions {
            if t.guard.eval(&r, cap) {
                let mut next = r.clone();
                t.apply(&mut next);
                if c.invariant.eval(&next, cap) {
                    out.push((next, false));
                }
            }
        }
        if r.ints[u] >= 1 {
            let mut next = r.clone();
            next.reset(u);
            out.push((next, true));
        }
        for (next, tick) in out {
            let j = intern(next, &mut nodes, &mut index, &mut succ, &mut queue);
            succ[i].push((j, tick));
        }
    }

    let comp = scc(&succ);
    let mut good = vec![false; nodes.len()];
    for (i, edges) in succ.iter().enumerate() {
        for &(j, tick) in edges {
            if tick && comp[i] == comp[j] {
                good[i] = true;
            }
        }
    }
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, edges) in succ.iter().enumerate() {
        for &(j, _) in edges {
            pred[j].push(i);
        }
    }
    let mut stack: Vec<usize> = (0..nodes.len()).filter(|&i| good[i]).collect();
    while let Some(j) = stack.pop() {
        for &i in &pred[j] {
            if !good[i] {
                good[i] = true;
                stack.push(i);
            }
        }
    }
    let zeno = starts
        .iter()
        .enumerate()
        .filter(|(_, &s)| !good[s])
        .map(|(k, _)| k)
        .collect();
    Ok(ZenoAnalysis { graph, zeno })
}

/// Strongly connected component id per node (iterative Tarjan).
fn scc(succ: &[Vec<(usize, bool)>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < succ[v].len() {
                let w = succ[v][*k].0;
                *k += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Result of solving the simulation game on regions.
#[derive(Clone, Debug)]
pub struct OracleVerdict {
    pub holds: bool,
    /// Pair regions (implementation clocks first) of the maximal simulation
    /// restricted to pairs reachable from initial pairs.
    pub relation: HashSet<Region>,
    /// Pair regions examined.
    pub pairs: usize,
    /// Initial implementation regions without a partner.
    pub uncovered: Vec<Region>,
    pub rounds: usize,
    /// Joint space: implementation clocks then specification clocks.
    pub space: Space,
}

enum ImplInvariant {
    Pred(RPred),
    /// Allowed implementation-only regions (first `n1` clocks, implementation
    /// propositions).
    Regions(HashSet<Region>),
}

struct Game {
    cap: u8,
    n1: usize,
    n2: usize,
    impl_mask: u128,
    all_bits: Vec<usize>,
    impl_bits: Vec<usize>,
    i1: RPred,
    i2: RPred,
    h1: ImplInvariant,
    h2: RPred,
    imp: Vec<RTransition>,
    spec: Vec<RTransition>,
    compat: Vec<Vec<usize>>,
    internal: Vec<usize>,
}

impl Game {
    fn new(check: &CheckUniverse) -> Result<(Game, Space), OracleError> {
        let a1 = &check.implementation;
        let a2 = &check.specification;
        let n1 = a1.clocks.len();
        let n2 = a2.clocks.len();
        let cap = cap_for(check.max_constant, n1 + n2)?;
        let mut props: Vec<Ident> = check.globals.clone();
        props.extend(a1.locals.iter().cloned());
        props.extend(a2.locals.iter().cloned());
        let mut clocks = a1.clocks.clone();
        clocks.extend(a2.clocks.iter().cloned());
        clocks.push("w".into());
        let space = Space { clocks, props, cap };
        let impl_bits: Vec<usize> = (0..check.globals.len() + a1.locals.len()).collect();
        let impl_mask = impl_bits.iter().fold(0u128, |m, &b| m | 1 << b);
        let mut imp: Vec<RTransition> = Vec::new();
        let mut imp_src = a1.transitions.clone();
        imp_src.push(Transition::null());
        for t in &imp_src {
            imp.push(RTransition::compile(&space, t)?);
        }
        let mut spec_src = a2.transitions.clone();
        spec_src.push(Transition::null());
        let spec = spec_src
            .iter()
            .map(|t| RTransition::compile(&space, t))
            .collect::<Result<Vec<_>, _>>()?;
        let compat = imp_src
            .iter()
            .map(|t1| {
                (0..spec_src.len())
                    .filter(|&j| compatible(t1, &spec_src[j], &check.globals))
                    .collect()
            })
            .collect();
        let internal = (0..spec_src.len())
            .filter(|&j| compatible(&Transition::null(), &spec_src[j], &check.globals))
            .collect();
        let game = Game {
            cap,
            n1,
            n2,
            impl_mask,
            all_bits: (0..space.props.len()).collect(),
            impl_bits,
            i1: RPred::compile(&space, &a1.init)?,
            i2: RPred::compile(&space, &a2.init)?,
            h1: ImplInvariant::Pred(RPred::compile(&space, &a1.invariant)?),
            h2: RPred::compile(&space, &a2.invariant)?,
            imp,
            spec,
            compat,
            internal,
        };
        let mut pair_space = space.clone();
        pair_space.clocks.pop();
        Ok((game, pair_space))
    }

    fn impl_part(&self, r: &Region) -> Region {
        r.project(0..self.n1, self.impl_mask)
    }

    fn h1(&self, r: &Region) -> bool {
        match &self.h1 {
            ImplInvariant::Pred(p) => p.eval(r, self.cap),
            ImplInvariant::Regions(set) => set.contains(&self.impl_part(r)),
        }
    }

    fn inv(&self, r: &Region) -> bool {
        self.h1(r) && self.h2.eval(r, self.cap)
    }

    fn with_w(&self, p: &Region) -> Region {
        let mut c = p.clone();
        c.ints.push(0);
        c.fracs.push(0);
        c.normalize();
        c
    }

    fn drop_w(&self, c: &Region) -> Region {
        c.project(0..self.n1 + self.n2, u128::MAX)
    }

    /// Implementation clocks plus `w`.
    fn delay_part(&self, c: &Region) -> Region {
        c.project((0..self.n1).chain(std::iter::once(self.n1 + self.n2)), 0)
    }

    fn initial_pairs(&self) -> Vec<Region> {
        let h1 = match &self.h1 {
            ImplInvariant::Pred(p) => Some(p),
            ImplInvariant::Regions(_) => None,
        };
        let mut preds = vec![&self.i1, &self.i2, &self.h2];
        preds.extend(h1);
        enumerate(self.cap, self.n1 + self.n2, &self.all_bits, &preds)
            .into_iter()
            .filter(|r| self.h1(r))
            .collect()
    }

    fn initial_impl(&self) -> Vec<Region> {
        let mut preds = vec![&self.i1];
        if let ImplInvariant::Pred(p) = &self.h1 {
            preds.push(p);
        }
        enumerate(self.cap, self.n1, &self.impl_bits, &preds)
            .into_iter()
            .filter(|r| match &self.h1 {
                ImplInvariant::Pred(_) => true,
                ImplInvariant::Regions(set) => set.contains(r),
            })
            .collect()
    }

    fn fire(&self, r: &Region, e1: usize, e2: usize) -> Region {
        let mut n = r.clone();
        self.imp[e1].apply(&mut n);
        self.spec[e2].apply(&mut n);
        n
    }

    /// Pairs inside both invariants reachable from the initial pairs.
    fn reachable(&self) -> (Vec<Region>, HashMap<Region, usize>) {
        let mut regions = Vec::new();
        let mut index = HashMap::new();
        let mut queue = VecDeque::new();
        for r in self.initial_pairs() {
            if !index.contains_key(&r) {
                index.insert(r.clone(), regions.len());
                queue.push_back(regions.len());
                regions.push(r);
            }
        }
        let null1 = self.imp.len() - 1;
        let null2 = self.spec.len() - 1;
        while let Some(i) = queue.pop_front() {
            let r: Region = regions[i].clone();
            let mut next = Vec::new();
            if let Some(n) = r.time_successor(self.cap) {
                next.push(n);
            }
            for (e1, t1) in self.imp.iter().enumerate() {
                if !t1.guard.eval(&r, self.cap) {
                    continue;
                }
                for &e2 in &self.compat[e1] {
                    if (e1, e2) != (null1, null2) && self.spec[e2].guard.eval(&r, self.cap) {
                        next.push(self.fire(&r, e1, e2));
                    }
                }
            }
            for n in next {
                if self.inv(&n) && !index.contains_key(&n) {
                    index.insert(n.clone(), regions.len());
                    queue.push_back(regions.len());
                    regions.push(n);
                }
            }
        }
        (regions, index)
    }

    /// Whether every implementation move from pair `p` is matched inside
    /// the candidate relation `q`.
    fn matched(&self, p: &Region, q: &dyn Fn(&Region) -> bool) -> bool {
        let start = self.with_w(p);
        for e1 in 0..self.imp.len() {
            let t1 = &self.imp[e1];
            // The implementation's delay choices: regions of its clocks and
            // `w` along the time path, while its invariant holds.
            let mut chain: HashMap<Region, usize> = HashMap::new();
            let mut valid: Vec<bool> = Vec::new();
            let mut cur = start.clone();
            loop {
                if !self.h1(&cur) {
                    break;
                }
                let key = self.delay_part(&cur);
                if let std::collections::hash_map::Entry::Vacant(e) = chain.entry(key) {
                    let fires = t1.guard.eval(&cur, self.cap) && {
                        let mut n = cur.clone();
                        t1.apply(&mut n);
                        self.h1(&n)
                    };
                    e.insert(valid.len());
                    valid.push(fires);
                }
                match cur.time_successor(self.cap) {
                    Some(n) => cur = n,
                    None => break,
                }
            }
            let Some(last) = valid.iter().rposition(|&v| v) else {
                continue;
            };
            let mut done = vec![false; valid.len()];
            let mut seen: HashSet<Region> = HashSet::new();
            let mut queue = VecDeque::new();
            seen.insert(start.clone());
            queue.push_back(start.clone());
            while let Some(c) = queue.pop_front() {
                let Some(&j) = chain.get(&self.delay_part(&c)) else {
                    continue;
                };
                if j > last {
                    continue;
                }
                if valid[j] && !done[j] {
                    for &e2 in &self.compat[e1] {
                        if self.spec[e2].guard.eval(&c, self.cap) && q(&self.drop_w(&self.fire(&c, e1, e2))) {
                            done[j] = true;
                            break;
                        }
                    }
                }
                let mut next = Vec::new();
                if let Some(n) = c.time_successor(self.cap) {
                    next.push(n);
                }
                for &e2 in &self.internal {
                    if e2 + 1 < self.spec.len() && self.spec[e2].guard.eval(&c, self.cap) {
                        let mut n = c.clone();
                        self.spec[e2].apply(&mut n);
                        next.push(n);
                    }
                }
                for n in next {
                    if !seen.contains(&n) && q(&self.drop_w(&n)) {
                        seen.insert(n.clone());
                        queue.push_back(n);
                    }
                }
            }
            if valid.iter().zip(&done).any(|(&v, &d)| v && !d) {
                return false;
            }
        }
        true
    }

    fn solve(&self, space: Space) -> OracleVerdict {
        let (regions, index) = self.reachable();
        let mut alive = vec![true; regions.len()];
        let mut rounds = 0;
        loop {
            rounds += 1;
            let mut changed = false;
            for i in 0..regions.len() {
                if !alive[i] {
                    continue;
                }
                let q = |r: &Region| index.get(r).is_some_and(|&k| alive[k]);
                if !self.matched(&regions[i], &q) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let relation: HashSet<Region> = regions
            .iter()
            .zip(&alive)
            .filter(|(_, &a)| a)
            .map(|(r, _)| r.clone())
            .collect();
        let covered: HashSet<Region> = self
            .initial_pairs()
            .into_iter()
            .filter(|r| relation.contains(r))
            .map(|r| self.impl_part(&r))
            .collect();
        let uncovered: Vec<Region> = self
            .initial_impl()
            .into_iter()
            .filter(|r| !covered.contains(r))
            .collect();
        OracleVerdict {
            holds: uncovered.is_empty(),
            relation,
            pairs: regions.len(),
            uncovered,
            rounds,
            space,
        }
    }
}

/// The maximal simulation from `implementation` to `specification`,
/// computed on regions.
pub fn maximal_simulation(implementation: &Tea, specification: &Tea) -> Result<OracleVerdict, OracleError> {
    let check = CheckUniverse::new(implementation, specification)?;
    let (game, space) = Game::new(&check)?;
    Ok(game.solve(space))
}

/// Like [`maximal_simulation`] with the implementation restricted to its
/// reachable non-Zeno regions.
pub fn maximal_nz_simulation(implementation: &Tea, specification: &Tea) -> Result<OracleVerdict, OracleError> {
    let check = CheckUniverse::new(implementation, specification)?;
    let (mut game, space) = Game::new(&check)?;
    let a1 = &check.implementation;
    let impl_space = Space {
        clocks: a1.clocks.clone(),
        props: space.props.clone(),
        cap: game.cap,
    };
    let z = zeno_in_space(a1, impl_space)?;
    let nz: HashSet<Region> = z.non_zeno().cloned().collect();
    game.h1 = ImplInvariant::Regions(nz);
    Ok(game.solve(space))
}
