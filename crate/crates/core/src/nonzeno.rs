//! Forward reachability, non-Zeno states, and the NZ-simulation check.

use std::sync::Arc;

use crate::model::{Assigned, Ident, Tea};
use crate::sim::{CheckError, CheckOptions, Checker, Verdict};
use crate::zone::bound::{le, LE_ZERO};
use crate::zone::formula::CompileError;
use crate::zone::time;
use crate::zone::{CellStore, Constraint, Formula, SymbolicSet, Universe};

/// `(guard, resets, writes)`
type Step = (Formula, Vec<usize>, Vec<(usize, bool)>);

struct Compiled {
    u: Arc<Universe>,
    init: Formula,
    invariant: Constraint,
    transitions: Vec<Step>,
    c: i64,
}

fn compile(tea: &Tea) -> Result<Compiled, CheckError> {
    tea.validate()?;
    let props: Vec<Ident> = tea.globals.iter().chain(&tea.locals).cloned().collect();
    let u = Arc::new(Universe::new(&props, &tea.clocks)?);
    let mut transitions = Vec::new();
    for t in &tea.transitions {
        let mut resets = Vec::new();
        let mut writes = Vec::new();
        for (id, v) in &t.assign.entries {
            match v {
                Assigned::Zero => resets.push(u.var(id).ok_or_else(|| CompileError::Clock(id.clone()))?),
                Assigned::Bool(b) => writes.push((u.prop(id).ok_or_else(|| CompileError::Prop(id.clone()))?, *b)),
            }
        }
        transitions.push((Formula::compile(&u, &t.guard)?, resets, writes));
    }
    Ok(Compiled {
        init: Formula::compile(&u, &tea.init)?,
        invariant: Constraint::Formula(Formula::compile(&u, &tea.invariant)?),
        transitions,
        c: tea.max_constant().max(1),
        u,
    })
}

impl Compiled {
    fn reach(&self) -> SymbolicSet {
        let h = &self.invariant;
        let start = h.restrict(&self.init.restrict(&SymbolicSet::top(&self.u)));
        let mut reached = CellStore::new(&self.u);
        let mut frontier = reached.add(&time::elapse(&[h], &start).extrapolate(self.c));
        while !frontier.is_empty() {
            let mut post = SymbolicSet::empty(&self.u);
            for (guard, resets, writes) in &self.transitions {
                let enabled = guard.restrict(&frontier);
                if !enabled.is_empty() {
                    post.union_cheap(h.restrict(&time::assign_post(&enabled, resets, writes)));
                }
            }
            frontier = reached.add(&time::elapse(&[h], &post).extrapolate(self.c));
        }
        reached.to_set()
    }

    /// States of `within` that reach `target` through delays and transitions
    /// inside the invariant. `within` must be closed under successors.
    fn backward(&self, target: &SymbolicSet, within: &SymbolicSet) -> SymbolicSet {
        let h = &self.invariant;
        let mut reached = CellStore::new(&self.u);
        let mut frontier = reached.add(&target.intersect(within).extrapolate(self.c));
        while !frontier.is_empty() {
            let mut pre = frontier.clone();
            for (guard, resets, writes) in &self.transitions {
                pre.union_cheap(guard.restrict(&time::assign_precondition(&frontier, resets, writes)));
            }
            frontier = reached.add(&time::tbck(&[h], &pre).intersect(within).extrapolate(self.c));
        }
        reached.to_set()
    }
}

/// States of `tea` reachable from `init ∧ invariant`, over its own universe.
pub fn forward_reach(tea: &Tea) -> Result<SymbolicSet, CheckError> {
    Ok(compile(tea)?.reach())
}

#[derive(Clone, Debug)]
pub struct NonZeno {
    pub reach: SymbolicSet,
    /// Reachable states from which some run lets time diverge.
    pub set: SymbolicSet,
    pub rounds: usize,
}

/// Non-Zeno reachable states: the greatest `Y` inside the reachable states
/// such that from every state of `Y` one can let at least one time unit
/// pass, moving through the invariant, and land in `Y` again. The elapsed
/// time is measured by the auxiliary clock `z`.
pub fn non_zeno(tea: &Tea) -> Result<NonZeno, CheckError> {
    let c = compile(tea)?;
    let reach = c.reach();
    let zd = c.u.zd();
    let within = reach.eliminate(&[zd], 0);
    let mut y = c.invariant.restrict(&reach);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let target = y.constrain(0, zd, le(-1));
        let back = c.backward(&target, &within);
        let start = back
            .constrain(zd, 0, LE_ZERO)
            .constrain(0, zd, LE_ZERO)
            .eliminate(&[zd], 0);
        let next = y.intersect(&start);
        if next.includes(&y) {
            return Ok(NonZeno { reach, set: y, rounds });
        }
        y = next;
    }
}

/// The simulation check with the implementation restricted to its non-Zeno
/// reachable states: both its initial condition and its invariant are
/// intersected with them.
pub fn nz_simulation_check(
    implementation: &Tea,
    specification: &Tea,
    opts: &CheckOptions,
) -> Result<Verdict, CheckError> {
    let nz = non_zeno(implementation)?.set;
    let checker = Checker::new(implementation, specification)?;
    let nz = nz
        .embed(&checker.universe)
        .expect("implementation names are kept in the check universe");
    let init = checker.imp.init.restrict(&nz);
    Ok(checker.with_implementation_sets(init, nz).run(opts))
}
