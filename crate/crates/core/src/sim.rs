//! The greatest-fixpoint simulation check.
//!
//! A candidate relation `Q` over pairs of implementation and specification
//! states starts from the pairs allowed by both invariants and shrinks by
//! deleting every pair from which some implementation move (a delay followed
//! by a transition) cannot be matched by the specification at the same
//! instant, after a stuttering run of internal transitions that stays inside
//! `Q`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::model::{compatible, Assigned, CheckUniverse, Edge, Ident, ModelError, Tea, Transition};
use crate::zone::bound::LE_ZERO;
use crate::zone::formula::CompileError;
use crate::zone::time::{self, Direction};
use crate::zone::universe::UniverseError;
use crate::zone::{CellStore, Constraint, Formula, SymbolicSet, Universe};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("transitions {0:?} and {1:?} are not compatible")]
    Incompatible(Edge, Edge),
}

/// Where the greatest fixpoint starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Seed {
    /// All pairs satisfying both invariants.
    #[default]
    Invariants,
    /// Pairs reachable in the joint product of both automata, synchronised
    /// on compatible transitions, within both invariants. Any simulation
    /// restricted to these pairs is still a simulation, so the verdict is the
    /// same; the relation is smaller when invariants have many disjuncts.
    ReachablePairs,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Test the initial condition after every sweep and stop as soon as it
    /// fails.
    pub edgf: bool,
    pub seed: Seed,
    /// Keep every iterate of `Q` in the verdict.
    pub record_iterates: bool,
    /// Stop after this many sweeps without a verdict (`None`: no limit).
    pub max_sweeps: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            edgf: true,
            seed: Seed::Invariants,
            record_iterates: false,
            max_sweeps: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub sweeps: usize,
    pub seed_cells: usize,
    /// Cells of `Q` after each sweep.
    pub cells_per_sweep: Vec<usize>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub holds: bool,
    /// The converged relation, when the check holds.
    pub relation: Option<SymbolicSet>,
    /// Initial implementation states without a partner, when it does not.
    pub failing_initial: Option<SymbolicSet>,
    pub iterations: usize,
    /// Seed followed by the iterate after each sweep, when recorded.
    pub iterates: Vec<SymbolicSet>,
    pub stats: Stats,
    /// True when the sweep limit stopped the loop before convergence.
    pub truncated: bool,
}

impl Verdict {
    pub fn message(&self) -> &'static str {
        if self.holds {
            "A1 implements A2."
        } else {
            "A1 does not implement A2."
        }
    }
}

/// A transition compiled against the check universe.
#[derive(Clone, Debug)]
pub struct CompiledTransition {
    pub edge: Edge,
    pub source: Transition,
    pub guard: Formula,
    pub resets: Vec<usize>,
    pub writes: Vec<(usize, bool)>,
}

/// One automaton compiled against the check universe. The null transition
/// is the last entry of `transitions`.
#[derive(Clone, Debug)]
pub struct Side {
    pub tea: Tea,
    pub init: Constraint,
    pub invariant: Constraint,
    pub transitions: Vec<CompiledTransition>,
    pub clocks: Vec<usize>,
    pub props: u128,
}

impl Side {
    fn compile(u: &Universe, tea: &Tea) -> Result<Side, CheckError> {
        let mut transitions = Vec::new();
        for edge in tea.edges() {
            let t = tea.transition(edge).into_owned();
            transitions.push(compile_transition(u, edge, t)?);
        }
        let clocks = tea.clocks.iter().map(|c| u.var(c).unwrap()).collect();
        let props = tea
            .globals
            .iter()
            .chain(&tea.locals)
            .fold(0u128, |m, p| m | 1 << u.prop(p).unwrap());
        Ok(Side {
            init: Constraint::Formula(Formula::compile(u, &tea.init)?),
            invariant: Constraint::Formula(Formula::compile(u, &tea.invariant)?),
            tea: tea.clone(),
            transitions,
            clocks,
            props,
        })
    }

    pub fn null(&self) -> usize {
        self.transitions.len() - 1
    }

    /// Local propositions as a mask.
    pub fn locals_mask(&self, u: &Universe) -> u128 {
        self.tea.locals.iter().fold(0u128, |m, p| m | 1 << u.prop(p).unwrap())
    }
}

fn compile_transition(u: &Universe, edge: Edge, t: Transition) -> Result<CompiledTransition, CheckError> {
    let mut resets = Vec::new();
    let mut writes = Vec::new();
    for (id, v) in &t.assign.entries {
        match v {
            Assigned::Zero => resets.push(u.var(id).ok_or_else(|| CompileError::Clock(id.clone()))?),
            Assigned::Bool(b) => writes.push((u.prop(id).ok_or_else(|| CompileError::Prop(id.clone()))?, *b)),
        }
    }
    Ok(CompiledTransition {
        edge,
        guard: Formula::compile(u, &t.guard)?,
        source: t,
        resets,
        writes,
    })
}

/// Both automata of a check compiled against one universe, with the
/// compatibility table precomputed.
#[derive(Clone, Debug)]
pub struct Checker {
    pub check: CheckUniverse,
    pub universe: Arc<Universe>,
    pub imp: Side,
    pub spec: Side,
    /// `compat[i]`: indices of spec transitions compatible with impl
    /// transition `i` (null transitions included).
    pub compat: Vec<Vec<usize>>,
    /// Spec transitions compatible with the null transition.
    pub internal: Vec<usize>,
    pub max_constant: i64,
}

impl Checker {
    pub fn new(implementation: &Tea, specification: &Tea) -> Result<Checker, CheckError> {
        let check = CheckUniverse::new(implementation, specification)?;
        let imp_tea = &check.implementation;
        let spec_tea = &check.specification;
        let mut props: Vec<Ident> = check.globals.clone();
        props.extend(imp_tea.locals.iter().cloned());
        props.extend(spec_tea.locals.iter().cloned());
        let mut clocks: Vec<Ident> = imp_tea.clocks.clone();
        clocks.extend(spec_tea.clocks.iter().cloned());
        let universe = Arc::new(Universe::new(&props, &clocks)?);
        let imp = Side::compile(&universe, imp_tea)?;
        let spec = Side::compile(&universe, spec_tea)?;
        let compat = imp
            .transitions
            .iter()
            .map(|t1| {
                spec.transitions
                    .iter()
                    .enumerate()
                    .filter(|(_, t2)| compatible(&t1.source, &t2.source, &check.globals))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let internal = spec
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, t2)| compatible(&Transition::null(), &t2.source, &check.globals))
            .map(|(j, _)| j)
            .collect();
        let max_constant = check.max_constant.max(1);
        Ok(Checker {
            check,
            universe,
            imp,
            spec,
            compat,
            internal,
            max_constant,
        })
    }

    /// Replaces the implementation's initial condition and invariant by
    /// precomputed sets (used by the non-Zeno check).
    pub fn with_implementation_sets(mut self, init: SymbolicSet, invariant: SymbolicSet) -> Checker {
        self.imp.init = Constraint::Set(init);
        self.imp.invariant = Constraint::Set(invariant);
        self
    }

    pub fn top(&self) -> SymbolicSet {
        SymbolicSet::top(&self.universe)
    }

    /// `τ1(e1) ∧ τ2(e2) ∧ s(π1(e1)π2(e2))`.
    pub fn xbck(&self, e1: usize, e2: usize, s: &SymbolicSet) -> Result<SymbolicSet, CheckError> {
        let (t1, t2) = (&self.imp.transitions[e1], &self.spec.transitions[e2]);
        if !self.compat[e1].contains(&e2) {
            return Err(CheckError::Incompatible(t1.edge, t2.edge));
        }
        Ok(self.xbck_unchecked(t1, t2, s))
    }

    fn xbck_unchecked(&self, t1: &CompiledTransition, t2: &CompiledTransition, s: &SymbolicSet) -> SymbolicSet {
        if s.is_empty() {
            return s.clone();
        }
        let mut resets = t1.resets.clone();
        resets.extend(&t2.resets);
        let mut writes = t1.writes.clone();
        for w in &t2.writes {
            if let Some(slot) = writes.iter_mut().find(|(p, _)| *p == w.0) {
                *slot = *w;
            } else {
                writes.push(*w);
            }
        }
        let pre = time::assign_precondition(s, &resets, &writes);
        t2.guard.restrict(&t1.guard.restrict(&pre))
    }

    /// States reaching `target` through time passage and internal spec
    /// transitions while every intermediate pair stays in `guard`.
    ///
    /// Time predecessors within a fixed guard are closed under repetition
    /// and distribute over unions, so the specification's null transition is applied
    /// once and later rounds only follow its real internal transitions.
    pub fn rbck(&self, guard: &SymbolicSet, target: &SymbolicSet) -> SymbolicSet {
        let c = self.max_constant;
        let null = &self.imp.transitions[self.imp.null()];
        let spec_null = self.spec.null();
        let g = Constraint::Set(guard.clone());
        let mut reached = target.extrapolate(c);
        let mut frontier = time::tbck(&[&g], &reached).extrapolate(c);
        reached.union_cheap(frontier.clone());
        while !frontier.is_empty() {
            let mut pre = SymbolicSet::empty(&self.universe);
            for &e2 in self.internal.iter().filter(|&&e2| e2 != spec_null) {
                let t2 = &self.spec.transitions[e2];
                pre.union_cheap(self.xbck_unchecked(null, t2, &frontier));
            }
            if pre.is_empty() {
                break;
            }
            let new = time::tbck(&[&g], &pre).extrapolate(c);
            frontier = new.not_subsumed_by(&reached);
            reached.union_cheap(frontier.clone());
        }
        SymbolicSet::from_cells(&self.universe, reached.into_cells())
    }

    /// `(Xbck(e1,⊥)(H1) + δ) ∧ path(H1, δ) ∧ δ ≥ 0`, restricted to `support`
    /// (a set not mentioning `−δ`).
    pub fn f_b_within(&self, e1: usize, support: &SymbolicSet) -> SymbolicSet {
        let u = &self.universe;
        let t1 = &self.imp.transitions[e1];
        let nd = u.nd();
        let pre = match &self.imp.invariant {
            Constraint::Formula(h) => Constraint::Formula(Formula::and(vec![
                t1.guard.clone(),
                h.assign_pre(&t1.resets, &t1.writes),
            ])),
            Constraint::Set(h) => {
                Constraint::Set(t1.guard.restrict(&time::assign_precondition(h, &t1.resets, &t1.writes)))
            }
        };
        let shifted = pre.shift(u, nd);
        let base = shifted.restrict(&support.constrain(nd, 0, LE_ZERO));
        let ends = pre.restrict(&self.top());
        time::path_within(&base, &self.imp.invariant, nd, u.nt(), Direction::Backward, Some(&ends))
    }

    /// The deletion-relevant form of formula (B) over the whole universe.
    pub fn f_b(&self, e1: usize) -> SymbolicSet {
        self.f_b_within(e1, &self.top())
    }

    /// Pairs and delays for which the specification can stutter for exactly `δ`
    /// inside `q` and then fire a transition compatible with `e1` back into
    /// `q`.
    pub fn f_c(&self, e1: usize, q: &SymbolicSet) -> SymbolicSet {
        self.f_c_within(e1, q, q)
    }

    /// [`Checker::f_c`] with the stutter confined to `stay`, a subset of `q`.
    fn f_c_within(&self, e1: usize, q: &SymbolicSet, stay: &SymbolicSet) -> SymbolicSet {
        let u = &self.universe;
        let t1 = &self.imp.transitions[e1];
        let mut fire = SymbolicSet::empty(u);
        for &e2 in &self.compat[e1] {
            fire.union_cheap(self.xbck_unchecked(t1, &self.spec.transitions[e2], q));
        }
        if fire.is_empty() {
            return fire;
        }
        let zd = u.zd();
        let seed = fire.clip(stay).constrain(zd, 0, LE_ZERO).constrain(0, zd, LE_ZERO);
        time::replace_z(&self.rbck(stay, &seed))
    }

    /// Pairs of `q` to delete because of implementation transition `e1`.
    pub fn f_a(&self, e1: usize, q: &SymbolicSet) -> SymbolicSet {
        let b = self.f_b_within(e1, q);
        if b.is_empty() {
            return b;
        }
        // A stutter of the specification never changes globals or implementation
        // locals, so only the cubes of `b` over those matter.
        let spec_locals = self.spec.locals_mask(&self.universe);
        let keys = b.cubes().map_cubes(|c| Some(c.forget(spec_locals)));
        let c = self.f_c_within(e1, q, &q.intersect(&keys));
        b.subtract(&c).eliminate(&[self.universe.nd()], 0)
    }

    /// `I1 ∧ H1`: initial implementation states.
    pub fn initial_impl(&self) -> SymbolicSet {
        self.imp.invariant.restrict(&self.imp.init.restrict(&self.top()))
    }

    /// `I1 \ ∃(L2 ∪ X2)(I1 ∧ I2 ∧ Q)`.
    pub fn unmatched_initial(&self, init1: &SymbolicSet, q: &SymbolicSet) -> SymbolicSet {
        let joint = self.spec.init.restrict(&self.imp.init.restrict(q));
        let proj = joint.eliminate(&self.spec.clocks, self.spec.locals_mask(&self.universe));
        init1.subtract(&proj)
    }

    /// `H1 ∧ H2`.
    pub fn invariant_pairs(&self) -> SymbolicSet {
        self.spec.invariant.restrict(&self.imp.invariant.restrict(&self.top()))
    }

    /// Pairs reachable in the joint product, within both invariants.
    pub fn reachable_pairs(&self) -> SymbolicSet {
        let c = self.max_constant;
        let h = [&self.imp.invariant, &self.spec.invariant];
        let inv = |s: &SymbolicSet| self.spec.invariant.restrict(&self.imp.invariant.restrict(s));
        let start = inv(&self.spec.init.restrict(&self.imp.init.restrict(&self.top())));
        let mut reached = CellStore::new(&self.universe);
        let mut frontier = reached.add(&time::elapse(&h, &start).extrapolate(c));
        let null1 = self.imp.null();
        let null2 = self.spec.null();
        while !frontier.is_empty() {
            let mut post = SymbolicSet::empty(&self.universe);
            for (e1, t1) in self.imp.transitions.iter().enumerate() {
                let enabled1 = t1.guard.restrict(&frontier);
                if enabled1.is_empty() {
                    continue;
                }
                for &e2 in &self.compat[e1] {
                    if e1 == null1 && e2 == null2 {
                        continue;
                    }
                    let t2 = &self.spec.transitions[e2];
                    let enabled = t2.guard.restrict(&enabled1);
                    if enabled.is_empty() {
                        continue;
                    }
                    let mut resets = t1.resets.clone();
                    resets.extend(&t2.resets);
                    let mut writes = t1.writes.clone();
                    writes.extend(&t2.writes);
                    post.union_cheap(inv(&time::assign_post(&enabled, &resets, &writes)));
                }
            }
            frontier = reached.add(&time::elapse(&h, &post).extrapolate(c));
        }
        inv(&reached.to_set())
    }

    pub fn seed(&self, seed: Seed) -> SymbolicSet {
        match seed {
            Seed::Invariants => self.invariant_pairs(),
            Seed::ReachablePairs => self.reachable_pairs(),
        }
        .extrapolate(self.max_constant)
    }

    /// One pass of deletions over every implementation transition, null
    /// transition last.
    pub fn sweep(&self, q: &SymbolicSet) -> SymbolicSet {
        let mut q = q.clone();
        for e1 in 0..self.imp.transitions.len() {
            let fa = self.f_a(e1, &q);
            if !fa.is_empty() {
                q = q.subtract(&fa);
            }
        }
        q
    }

    pub fn run(&self, opts: &CheckOptions) -> Verdict {
        let start = Instant::now();
        let c = self.max_constant;
        let init1 = self.initial_impl();
        let mut q = self.seed(opts.seed);
        let mut stats = Stats {
            seed_cells: q.len(),
            ..Stats::default()
        };
        let mut iterates = Vec::new();
        if opts.record_iterates {
            iterates.push(q.clone());
        }
        let finish = |holds: bool, q: SymbolicSet, fail: Option<SymbolicSet>, mut stats: Stats, iterates, truncated| {
            stats.elapsed = start.elapsed();
            Verdict {
                holds,
                relation: holds.then_some(q),
                failing_initial: fail,
                iterations: stats.sweeps,
                iterates,
                stats,
                truncated,
            }
        };
        loop {
            let prev = q.clone();
            let swept = self.sweep(&q);
            q = swept.extrapolate(c).clip(&prev);
            stats.sweeps += 1;
            stats.cells_per_sweep.push(q.len());
            if opts.record_iterates {
                iterates.push(q.clone());
            }
            if opts.edgf {
                let fail = self.unmatched_initial(&init1, &q);
                if !fail.is_empty() {
                    return finish(false, q, Some(fail), stats, iterates, false);
                }
            }
            let converged = q.includes(&prev);
            let limit = opts.max_sweeps.is_some_and(|m| stats.sweeps >= m);
            if converged || limit {
                let fail = self.unmatched_initial(&init1, &q);
                let truncated = !converged;
                return if fail.is_empty() {
                    finish(true, q, None, stats, iterates, truncated)
                } else {
                    finish(false, q, Some(fail), stats, iterates, truncated)
                };
            }
        }
    }
}

/// Decides whether `implementation` is simulated by `specification`.
pub fn simulation_check(implementation: &Tea, specification: &Tea, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    Ok(Checker::new(implementation, specification)?.run(opts))
}

/// Mutual simulation: both directions of [`simulation_check`].
pub fn equivalence_check(a1: &Tea, a2: &Tea, opts: &CheckOptions) -> Result<(Verdict, Verdict), CheckError> {
    Ok((simulation_check(a1, a2, opts)?, simulation_check(a2, a1, opts)?))
}
