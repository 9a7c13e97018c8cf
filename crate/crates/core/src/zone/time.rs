//! Time progress over zones: `+δ` through displacement variables, `path`,
//! time predecessors and successors, the `z−δ` replacement and assignment
//! preconditions.

use std::collections::BTreeMap;

use super::bound::{INF, LE_ZERO};
use super::cube::Cube;
use super::dbm::Zone;
use super::formula::Constraint;
use super::set::{Cell, SymbolicSet};
use super::universe::{Universe, VarKind};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ShiftError {
    #[error("`{0}` is not a displacement variable")]
    NotDisplacement(String),
    #[error("the set already mentions `{0}`")]
    AlreadyShifted(String),
}

/// `s + δ` where `disp` holds the displacement. A constraint of a time
/// advancing variable against zero is rewritten against `disp`; differences
/// between two advancing variables are untouched.
///
/// The same matrix operation also serves forward elapse when `disp` is read
/// as `+t` instead of `−t`: the result is `{(v, d) | v − d ∈ s}`.
pub fn try_time_shift(s: &SymbolicSet, disp: usize) -> Result<SymbolicSet, ShiftError> {
    let u = s.universe().clone();
    if u.kind(disp) != VarKind::Displacement {
        return Err(ShiftError::NotDisplacement(u.var_name(disp).to_string()));
    }
    if s.cells().iter().any(|c| c.zone.mentions(&u, disp)) {
        return Err(ShiftError::AlreadyShifted(u.var_name(disp).to_string()));
    }
    Ok(s.map_zones(|z| shift_zone(&u, z, disp)))
}

/// [`try_time_shift`] for callers that uphold its preconditions.
///
/// # Panics
/// If `disp` is not a displacement variable or already constrained.
pub fn time_shift(s: &SymbolicSet, disp: usize) -> SymbolicSet {
    try_time_shift(s, disp).unwrap_or_else(|e| panic!("{e}"))
}

fn shift_zone(u: &Universe, z: &Zone, disp: usize) -> Option<Zone> {
    let adv = |v: usize| u.kind(v).advances();
    z.rebuild(|i, j, m| match (adv(i), adv(j)) {
        (true, true) => m.get(i, j),
        (true, false) if j == disp => m.get(i, 0),
        (false, true) if i == disp => m.get(0, j),
        (false, true) if i == 0 => {
            if u.kind(j) == VarKind::Clock {
                LE_ZERO
            } else {
                INF
            }
        }
        (false, false) if i != disp && j != disp => m.get(i, j),
        _ => INF,
    })
}

/// Direction of a `path` computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `outer` holds `−δ`: the guard must hold at `v + δ′` for `δ′ ∈ [0, δ]`.
    Backward,
    /// `outer` holds `+t`: the guard must hold at `v − t′` for `t′ ∈ [0, t]`.
    Forward,
}

/// `support ∧ path(guard, outer)`: the part of `support` whose time segment
/// of length `outer` stays inside `guard`. Time does not change
/// propositions, so the work is done one cube of `support` at a time and
/// only the guard cells compatible with that cube are consulted.
///
/// `ends`, when given, holds the far end of every segment of `support`
/// (the target for [`Direction::Backward`], the source for
/// [`Direction::Forward`]) and must not mention `outer` or `inner`.
/// Violations of `guard` are then only sought in the time cone of `ends`,
/// which keeps the complement of a many-celled guard small.
pub fn path_within(
    support: &SymbolicSet,
    guard: &Constraint,
    outer: usize,
    inner: usize,
    dir: Direction,
    ends: Option<&SymbolicSet>,
) -> SymbolicSet {
    if support.is_empty() || guard.is_true() {
        return support.clone();
    }
    let u = support.universe().clone();
    let mut groups: BTreeMap<Cube, Vec<Cell>> = BTreeMap::new();
    for c in support.cells() {
        groups.entry(c.cube).or_default().push(c.clone());
    }
    let mut out = Vec::new();
    let mut changed = false;
    for (cube, cells) in groups {
        let whole = SymbolicSet::from_cell(&u, cube, Zone::universal(&u));
        let plain = match guard {
            Constraint::Formula(f) => f.restrict(&whole),
            Constraint::Set(g) => g.compatible_with(cube).intersect(&whole),
        };
        if let [g] = plain.cells() {
            if g.cube == cube {
                if g.zone.is_universal(&u) {
                    out.extend(cells);
                    continue;
                }
                // A convex guard holds on the segment iff it holds at both ends.
                if let Ok(moved) = try_time_shift(&plain, outer) {
                    let part = SymbolicSet::from_cells(&u, cells);
                    changed = true;
                    out.extend(part.intersect(&plain).intersect(&moved).into_cells());
                    continue;
                }
            }
        }
        let region = match ends {
            Some(e) => e
                .compatible_with(cube)
                .map_zones(|z| {
                    Some(match dir {
                        Direction::Backward => z.past(&u),
                        Direction::Forward => z.future(&u),
                    })
                })
                .intersect(&whole),
            None => whole,
        };
        let inside = match guard {
            Constraint::Formula(f) => f.restrict(&region),
            Constraint::Set(g) => g.compatible_with(cube).intersect(&region),
        };
        let violation = region.subtract(&inside);
        if violation.is_empty() {
            out.extend(cells);
            continue;
        }
        let shifted = time_shift(&violation, inner);
        let bounded = match dir {
            Direction::Backward => shifted.constrain(inner, 0, LE_ZERO).constrain(outer, inner, LE_ZERO),
            Direction::Forward => shifted.constrain(0, inner, LE_ZERO).constrain(inner, outer, LE_ZERO),
        };
        let reachable_violation = bounded.eliminate(&[inner], 0);
        let part = SymbolicSet::from_cells(&u, cells);
        changed = true;
        out.extend(part.subtract(&reachable_violation).into_cells());
    }
    if changed {
        SymbolicSet::from_cells(&u, out)
    } else {
        support.clone()
    }
}

/// `path(s, δ) ≡ ¬∃δ′((¬s) + δ′ ∧ 0 ≤ δ′ ≤ δ)` together with `δ ≥ 0`, over
/// `−δ`.
pub fn path_constraint(s: &SymbolicSet) -> SymbolicSet {
    let u = s.universe().clone();
    let support = SymbolicSet::top(&u).constrain(u.nd(), 0, LE_ZERO);
    path_within(
        &support,
        &Constraint::Set(s.clone()),
        u.nd(),
        u.nt(),
        Direction::Backward,
        None,
    )
}

/// States that reach `target` by letting time pass while `guard` holds
/// throughout (both endpoints included).
pub fn tbck(guards: &[&Constraint], target: &SymbolicSet) -> SymbolicSet {
    let u = target.universe().clone();
    let (t, tp) = (u.nt(), u.ntp());
    let mut s = time_shift(target, t).constrain(t, 0, LE_ZERO);
    for g in guards {
        s = path_within(&s, g, t, tp, Direction::Backward, Some(target));
    }
    s.eliminate(&[t], 0)
}

/// States reachable from `source` by letting time pass while `guard` holds.
pub fn elapse(guards: &[&Constraint], source: &SymbolicSet) -> SymbolicSet {
    let u = source.universe().clone();
    let (t, tp) = (u.nt(), u.ntp());
    let mut s = time_shift(source, t).constrain(0, t, LE_ZERO);
    for g in guards {
        s = path_within(&s, g, t, tp, Direction::Forward, Some(source));
    }
    s.eliminate(&[t], 0)
}

/// `∃z(z = 0 ∧ s)` where `s` uses the `z−δ` clock: `z−δ` becomes `−δ`.
pub fn replace_z(s: &SymbolicSet) -> SymbolicSet {
    let u = s.universe().clone();
    let (zd, nd) = (u.zd(), u.nd());
    if !s.cells().iter().any(|c| c.zone.mentions(&u, zd)) {
        return s.clone();
    }
    s.constrain(zd, nd, LE_ZERO)
        .constrain(nd, zd, LE_ZERO)
        .eliminate(&[zd], 0)
}

/// `sΠ`: states whose image under resetting `clocks` and writing `props`
/// lies in `s`.
pub fn assign_precondition(s: &SymbolicSet, clocks: &[usize], props: &[(usize, bool)]) -> SymbolicSet {
    let u = s.universe().clone();
    let cells = s
        .cells()
        .iter()
        .filter_map(|c| {
            let mut cube = c.cube;
            for &(p, v) in props {
                if cube.get(p) == Some(!v) {
                    return None;
                }
                cube = cube.forget(1 << p);
            }
            let mut zone = c.zone.clone();
            for &x in clocks {
                if !zone.constrain(x, 0, LE_ZERO) {
                    return None;
                }
            }
            for &x in clocks {
                zone.free(&u, x);
            }
            Some(Cell { cube, zone })
        })
        .collect();
    SymbolicSet::from_cells(&u, cells)
}

/// Image of `s` under resetting `clocks` and writing `props`.
pub fn assign_post(s: &SymbolicSet, clocks: &[usize], props: &[(usize, bool)]) -> SymbolicSet {
    let u = s.universe().clone();
    let mut set_mask = Cube::TRUE;
    for &(p, v) in props {
        set_mask = set_mask.forget(1 << p).with(p, v).unwrap();
    }
    let cells = s
        .cells()
        .iter()
        .map(|c| {
            let cube = c.cube.forget(set_mask.mask).conjoin(&set_mask).unwrap();
            let mut zone = c.zone.clone();
            for &x in clocks {
                zone.free(&u, x);
            }
            for &x in clocks {
                let nonempty = zone.constrain(x, 0, LE_ZERO);
                debug_assert!(nonempty);
            }
            Cell { cube, zone }
        })
        .collect();
    SymbolicSet::from_cells(&u, cells)
}
