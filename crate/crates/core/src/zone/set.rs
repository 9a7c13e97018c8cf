//! Finite unions of (cube, zone) cells.

use std::hash::BuildHasher;
use std::sync::Arc;

use rustc_hash::{FxBuildHasher, FxHashMap};

use super::bound::{self, Raw};
use super::cube::Cube;
use super::dbm::Zone;
use super::index::CubeIndex;
use super::universe::Universe;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub cube: Cube,
    pub zone: Zone,
}

impl Cell {
    pub fn subsumes(&self, other: &Cell) -> bool {
        other.cube.implies(&self.cube) && self.zone.includes(&other.zone)
    }

    pub fn intersect(&self, other: &Cell) -> Option<Cell> {
        let cube = self.cube.conjoin(&other.cube)?;
        let zone = self.zone.intersect(&other.zone)?;
        Some(Cell { cube, zone })
    }

    fn meets(&self, other: &Cell) -> bool {
        self.cube.conjoin(&other.cube).is_some() && self.zone.meets(&other.zone)
    }

    /// Pieces of `self \ other`, pairwise disjoint.
    fn subtract(self, other: &Cell, out: &mut Vec<Cell>) {
        if !self.meets(other) {
            out.push(self);
            return;
        }
        let mut cube = self.cube;
        for (p, v) in other.cube.literals() {
            if cube.get(p).is_none() {
                out.push(Cell {
                    cube: cube.with(p, !v).unwrap(),
                    zone: self.zone.clone(),
                });
                cube = cube.with(p, v).unwrap();
            }
        }
        if let Some(pieces) = self.zone.subtract(&other.zone) {
            out.extend(pieces.into_iter().map(|zone| Cell { cube, zone }));
        }
    }
}

/// A point with rational clock values `nums[i] / den`, used for sampling.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub props: u128,
    pub den: i64,
    /// One numerator per DBM variable; index 0 is the zero reference.
    pub nums: Vec<i64>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("the two sets range over different universes")]
    UniverseMismatch,
    #[error("`{0}` does not exist in the target universe")]
    Missing(String),
}

/// A union of cells over one universe. Cells are never empty.
#[derive(Clone, Debug)]
pub struct SymbolicSet {
    u: Arc<Universe>,
    cells: Vec<Cell>,
}

impl SymbolicSet {
    pub fn empty(u: &Arc<Universe>) -> SymbolicSet {
        SymbolicSet {
            u: u.clone(),
            cells: Vec::new(),
        }
    }

    /// The whole universe.
    pub fn top(u: &Arc<Universe>) -> SymbolicSet {
        SymbolicSet::from_cell(u, Cube::TRUE, Zone::universal(u))
    }

    pub fn from_cell(u: &Arc<Universe>, cube: Cube, zone: Zone) -> SymbolicSet {
        SymbolicSet {
            u: u.clone(),
            cells: vec![Cell { cube, zone }],
        }
    }

    pub fn from_cells(u: &Arc<Universe>, cells: Vec<Cell>) -> SymbolicSet {
        let mut s = SymbolicSet { u: u.clone(), cells };
        s.reduce();
        s
    }

    /// A single constraint `var_i − var_j ≺ raw`.
    pub fn atom(u: &Arc<Universe>, i: usize, j: usize, raw: Raw) -> SymbolicSet {
        match Zone::universal(u).constrained(i, j, raw) {
            Some(z) => SymbolicSet::from_cell(u, Cube::TRUE, z),
            None => SymbolicSet::empty(u),
        }
    }

    pub fn literal(u: &Arc<Universe>, p: usize, v: bool) -> SymbolicSet {
        SymbolicSet::from_cell(u, Cube::literal(p, v), Zone::universal(u))
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.u
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<Cell> {
        self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn same_universe(&self, other: &SymbolicSet) -> Result<(), SetError> {
        if Arc::ptr_eq(&self.u, &other.u) || *self.u == *other.u {
            Ok(())
        } else {
            Err(SetError::UniverseMismatch)
        }
    }

    fn assert_same(&self, other: &SymbolicSet) {
        if let Err(e) = self.same_universe(other) {
            panic!("{e}");
        }
    }

    /// # Panics
    /// If the universes differ; see [`SymbolicSet::same_universe`].
    pub fn union(&self, other: &SymbolicSet) -> SymbolicSet {
        self.assert_same(other);
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        SymbolicSet::from_cells(&self.u, cells)
    }

    /// Union without a full reduction pass: only cells of `other` that are not
    /// already covered by a single cell of `self` are appended.
    pub fn union_cheap(&mut self, other: SymbolicSet) {
        self.assert_same(&other);
        if other.is_empty() {
            return;
        }
        let mut idx = CubeIndex::new(self.cells.iter().map(|c| &c.cube));
        let mut dead = vec![false; self.cells.len()];
        let mut cand = Vec::new();
        for c in other.cells {
            idx.implied_by(c.cube, &mut cand);
            if cand.iter().any(|&i| !dead[i] && self.cells[i].subsumes(&c)) {
                continue;
            }
            idx.implying(c.cube, &mut cand);
            for &i in &cand {
                if !dead[i] && c.subsumes(&self.cells[i]) {
                    dead[i] = true;
                }
            }
            idx.insert(self.cells.len(), c.cube);
            self.cells.push(c);
            dead.push(false);
        }
        let mut i = 0;
        self.cells.retain(|_| {
            i += 1;
            !dead[i - 1]
        });
    }

    /// Cells of `self` not contained in a single cell of `seen`. Cheaper than
    /// [`SymbolicSet::subtract`] and never splits zones, which makes it the
    /// right frontier for fixpoints that only grow.
    pub fn not_subsumed_by(&self, seen: &SymbolicSet) -> SymbolicSet {
        self.assert_same(seen);
        let idx = seen.index();
        let mut cand = Vec::new();
        let cells = self
            .cells
            .iter()
            .filter(|c| !seen.covers_cell(&idx, c, &mut cand))
            .cloned()
            .collect();
        SymbolicSet {
            u: self.u.clone(),
            cells,
        }
    }

    fn index(&self) -> CubeIndex {
        CubeIndex::new(self.cells.iter().map(|c| &c.cube))
    }

    /// True when one cell of `self` (indexed by `idx`) contains `c`.
    fn covers_cell(&self, idx: &CubeIndex, c: &Cell, cand: &mut Vec<usize>) -> bool {
        idx.implied_by(c.cube, cand);
        cand.iter().any(|&i| self.cells[i].zone.includes(&c.zone))
    }

    /// `self ∩ other`, keeping cells of `self` that already lie inside a
    /// single cell of `other` as they are.
    pub fn clip(&self, other: &SymbolicSet) -> SymbolicSet {
        self.assert_same(other);
        let idx = other.index();
        let mut cand = Vec::new();
        let mut cells = Vec::new();
        for c in &self.cells {
            if other.covers_cell(&idx, c, &mut cand) {
                cells.push(c.clone());
            } else {
                idx.compatible(c.cube, &mut cand);
                cells.extend(cand.iter().filter_map(|&i| c.intersect(&other.cells[i])));
            }
        }
        SymbolicSet::from_cells(&self.u, cells)
    }

    /// The cells whose cube is consistent with `cube`.
    pub fn compatible_with(&self, cube: Cube) -> SymbolicSet {
        SymbolicSet {
            u: self.u.clone(),
            cells: self
                .cells
                .iter()
                .filter(|c| c.cube.conjoin(&cube).is_some())
                .cloned()
                .collect(),
        }
    }

    pub fn intersect(&self, other: &SymbolicSet) -> SymbolicSet {
        self.assert_same(other);
        let idx = other.index();
        let mut cand = Vec::new();
        let mut cells = Vec::new();
        for a in &self.cells {
            idx.compatible(a.cube, &mut cand);
            cells.extend(cand.iter().filter_map(|&i| a.intersect(&other.cells[i])));
        }
        SymbolicSet::from_cells(&self.u, cells)
    }

    /// `self \ other`.
    pub fn subtract(&self, other: &SymbolicSet) -> SymbolicSet {
        self.assert_same(other);
        if other.is_empty() || self.is_empty() {
            return self.clone();
        }
        let idx = other.index();
        let mut cand = Vec::new();
        let mut result = Vec::new();
        let mut work = Vec::new();
        let mut next = Vec::new();
        for a in &self.cells {
            work.clear();
            work.push(a.clone());
            idx.compatible(a.cube, &mut cand);
            cand.sort_unstable();
            for b in cand.iter().map(|&i| &other.cells[i]) {
                if !work.iter().any(|p| p.meets(b)) {
                    continue;
                }
                next.clear();
                for piece in work.drain(..) {
                    piece.subtract(b, &mut next);
                }
                std::mem::swap(&mut work, &mut next);
                if work.is_empty() {
                    break;
                }
            }
            result.append(&mut work);
        }
        SymbolicSet::from_cells(&self.u, result)
    }

    /// Complement relative to the universe.
    pub fn negate(&self) -> SymbolicSet {
        SymbolicSet::top(&self.u).subtract(self)
    }

    /// `self ⊇ other`.
    pub fn includes(&self, other: &SymbolicSet) -> bool {
        self.assert_same(other);
        let idx = self.index();
        let mut cand = Vec::new();
        other.cells.iter().all(|c| {
            self.covers_cell(&idx, c, &mut cand)
                || SymbolicSet {
                    u: self.u.clone(),
                    cells: vec![c.clone()],
                }
                .subtract(self)
                .is_empty()
        })
    }

    pub fn equivalent(&self, other: &SymbolicSet) -> bool {
        self.includes(other) && other.includes(self)
    }

    /// `self ∧ literal`.
    pub fn with_literal(&self, p: usize, v: bool) -> SymbolicSet {
        let cells = self
            .cells
            .iter()
            .filter_map(|c| {
                c.cube.with(p, v).map(|cube| Cell {
                    cube,
                    zone: c.zone.clone(),
                })
            })
            .collect();
        SymbolicSet::from_cells(&self.u, cells)
    }

    /// `self ∧ (var_i − var_j ≺ raw)`.
    pub fn constrain(&self, i: usize, j: usize, raw: Raw) -> SymbolicSet {
        let cells = self
            .cells
            .iter()
            .filter_map(|c| c.zone.constrained(i, j, raw).map(|zone| Cell { cube: c.cube, zone }))
            .collect();
        SymbolicSet::from_cells(&self.u, cells)
    }

    /// `∃vars ∃props`: projects out DBM variables and propositions.
    pub fn eliminate(&self, vars: &[usize], props: u128) -> SymbolicSet {
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let mut zone = c.zone.clone();
                for &v in vars {
                    zone.free(&self.u, v);
                }
                Cell {
                    cube: c.cube.forget(props),
                    zone,
                }
            })
            .collect();
        SymbolicSet::from_cells(&self.u, cells)
    }

    /// Projects out identifiers by name (propositions or variables).
    pub fn eliminate_names<S: AsRef<str>>(&self, names: &[S]) -> SymbolicSet {
        let mut vars = Vec::new();
        let mut props = 0u128;
        for n in names {
            let n = n.as_ref();
            if let Some(p) = self.u.prop(n) {
                props |= 1 << p;
            } else if let Some(v) = self.u.var(n) {
                vars.push(v);
            } else {
                panic!("unknown identifier `{n}`");
            }
        }
        self.eliminate(&vars, props)
    }

    /// Every cube of `self` paired with the universal zone.
    pub fn cubes(&self) -> SymbolicSet {
        let mut seen: Vec<Cube> = self.cells.iter().map(|c| c.cube).collect();
        seen.sort();
        seen.dedup();
        let zone = Zone::universal(&self.u);
        SymbolicSet::from_cells(
            &self.u,
            seen.into_iter()
                .map(|cube| Cell {
                    cube,
                    zone: zone.clone(),
                })
                .collect(),
        )
    }

    pub fn extrapolate(&self, c: i64) -> SymbolicSet {
        let cells = self
            .cells
            .iter()
            .map(|cell| {
                let mut zone = cell.zone.clone();
                zone.extrapolate(c);
                Cell { cube: cell.cube, zone }
            })
            .collect();
        SymbolicSet::from_cells(&self.u, cells)
    }

    /// Applies `f` to every zone; `None` drops the cell.
    pub fn map_zones(&self, f: impl Fn(&Zone) -> Option<Zone>) -> SymbolicSet {
        let cells = self
            .cells
            .iter()
            .filter_map(|c| f(&c.zone).map(|zone| Cell { cube: c.cube, zone }))
            .collect();
        SymbolicSet::from_cells(&self.u, cells)
    }

    /// Applies `f` to every cube; `None` drops the cell.
    pub fn map_cubes(&self, f: impl Fn(&Cube) -> Option<Cube>) -> SymbolicSet {
        let cells = self
            .cells
            .iter()
            .filter_map(|c| {
                f(&c.cube).map(|cube| Cell {
                    cube,
                    zone: c.zone.clone(),
                })
            })
            .collect();
        SymbolicSet::from_cells(&self.u, cells)
    }

    pub fn max_abs_constant(&self) -> i64 {
        self.cells.iter().map(|c| c.zone.max_abs_constant()).max().unwrap_or(0)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.cells
            .iter()
            .any(|c| c.cube.satisfied_by(p.props) && c.zone.contains_scaled(&p.nums, p.den))
    }

    /// The same set over a universe that contains every name of this one.
    pub fn embed(&self, target: &Arc<Universe>) -> Result<SymbolicSet, SetError> {
        if Arc::ptr_eq(&self.u, target) {
            return Ok(self.clone());
        }
        let mut pmap = Vec::with_capacity(self.u.prop_count());
        for p in self.u.props() {
            pmap.push(target.prop(p).ok_or_else(|| SetError::Missing(p.clone()))?);
        }
        let mut vmap = Vec::with_capacity(self.u.dim());
        for i in 0..self.u.dim() {
            let name = self.u.var_name(i);
            vmap.push(if i == 0 {
                0
            } else {
                target.var(name).ok_or_else(|| SetError::Missing(name.to_string()))?
            });
        }
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let mut cube = Cube::TRUE;
                for (p, v) in c.cube.literals() {
                    cube = cube.with(pmap[p], v).unwrap();
                }
                Cell {
                    cube,
                    zone: c.zone.transport(target, &vmap),
                }
            })
            .collect();
        Ok(SymbolicSet::from_cells(target, cells))
    }

    /// Deterministic cell order: cube, then matrix.
    pub fn sorted(&self) -> SymbolicSet {
        let mut cells = self.cells.clone();
        cells.sort();
        SymbolicSet {
            u: self.u.clone(),
            cells,
        }
    }

    /// Merges cells with the same cube wherever their union is convex.
    pub fn coalesce(&self) -> SymbolicSet {
        let mut store = CellStore::new(&self.u);
        store.add(self);
        store.to_set()
    }

    /// Drops subsumed cells and merges cells that differ in a single literal.
    fn reduce(&mut self) {
        if self.cells.len() <= 1 {
            return;
        }
        let n = self.cells.len();
        let hashes: Vec<u64> = self.cells.iter().map(|c| FxBuildHasher.hash_one(&c.zone)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by_key(|&i| (hashes[i], i));
        // rep[i]: first cell (in the original order) with the same zone.
        let mut rep: Vec<usize> = (0..n).collect();
        let mut extra: Vec<Vec<Cube>> = vec![Vec::new(); n];
        let mut run = 0;
        while run < n {
            let mut end = run + 1;
            while end < n && hashes[order[end]] == hashes[order[run]] {
                end += 1;
            }
            for a in run..end {
                let i = order[a];
                if rep[i] != i {
                    continue;
                }
                for &j in &order[a + 1..end] {
                    if rep[j] == j && self.cells[j].zone == self.cells[i].zone {
                        rep[j] = i;
                        let cube = self.cells[j].cube;
                        extra[i].push(cube);
                    }
                }
            }
            run = end;
        }
        let mut cells = Vec::with_capacity(n);
        for (i, c) in self.cells.drain(..).enumerate() {
            if rep[i] != i {
                continue;
            }
            if extra[i].is_empty() {
                cells.push(c);
                continue;
            }
            let mut cubes = std::mem::take(&mut extra[i]);
            cubes.push(c.cube);
            for cube in merge_cubes(cubes) {
                cells.push(Cell {
                    cube,
                    zone: c.zone.clone(),
                });
            }
        }
        cells.sort_by_key(|c| c.cube.mask.count_ones());
        let mut kept: Vec<Cell> = Vec::with_capacity(cells.len());
        let mut idx = CubeIndex::default();
        let mut cand = Vec::new();
        for c in cells {
            idx.implied_by(c.cube, &mut cand);
            if !cand.iter().any(|&i| kept[i].zone.includes(&c.zone)) {
                idx.insert(kept.len(), c.cube);
                kept.push(c);
            }
        }
        self.cells = kept;
    }
}

fn merge_cubes(mut cubes: Vec<Cube>) -> Vec<Cube> {
    loop {
        cubes.sort();
        cubes.dedup();
        let mut changed = false;
        let n = cubes.len();
        let mut dead = vec![false; n];
        let mut extra = Vec::new();
        for i in 0..n {
            if dead[i] {
                continue;
            }
            for j in 0..n {
                if i == j || dead[j] {
                    continue;
                }
                if cubes[j].implies(&cubes[i]) {
                    dead[j] = true;
                    changed = true;
                    continue;
                }
                if j > i && cubes[i].mask == cubes[j].mask {
                    let diff = cubes[i].value ^ cubes[j].value;
                    if diff.count_ones() == 1 {
                        dead[i] = true;
                        dead[j] = true;
                        extra.push(cubes[i].forget(diff));
                        changed = true;
                        break;
                    }
                }
            }
        }
        if !changed {
            return cubes;
        }
        cubes = cubes
            .into_iter()
            .zip(dead)
            .filter(|(_, d)| !d)
            .map(|(c, _)| c)
            .chain(extra)
            .collect();
    }
}

/// An accumulating union of cells that merges zones of the same cube
/// whenever their union is convex.
pub struct CellStore {
    u: Arc<Universe>,
    zones: FxHashMap<Cube, Vec<Zone>>,
    order: Vec<Cube>,
}

impl CellStore {
    pub fn new(u: &Arc<Universe>) -> CellStore {
        CellStore {
            u: u.clone(),
            zones: FxHashMap::default(),
            order: Vec::new(),
        }
    }

    /// Adds the cells of `s` and returns those not already covered by a
    /// stored zone of the same cube.
    pub fn add(&mut self, s: &SymbolicSet) -> SymbolicSet {
        let mut fresh = Vec::new();
        for c in &s.cells {
            let zones = self.zones.entry(c.cube).or_insert_with(|| {
                self.order.push(c.cube);
                Vec::new()
            });
            if zones.iter().any(|z| z.includes(&c.zone)) {
                continue;
            }
            let mut z = c.zone.clone();
            while let Some((k, hull)) = zones
                .iter()
                .enumerate()
                .find_map(|(k, w)| w.convex_union(&z).map(|h| (k, h)))
            {
                zones.swap_remove(k);
                z = hull;
            }
            zones.push(z);
            fresh.push(c.clone());
        }
        SymbolicSet::from_cells(&self.u, fresh)
    }

    pub fn to_set(&self) -> SymbolicSet {
        let cells = self
            .order
            .iter()
            .flat_map(|cube| {
                self.zones[cube].iter().map(|z| Cell {
                    cube: *cube,
                    zone: z.clone(),
                })
            })
            .collect();
        SymbolicSet::from_cells(&self.u, cells)
    }
}

/// `var_i − var_j ≺ raw` evaluated at a scaled point.
pub fn atom_holds(i: usize, j: usize, raw: Raw, p: &Point) -> bool {
    let diff = p.nums[i] - p.nums[j];
    let c = bound::value(raw) * p.den;
    if bound::is_strict(raw) {
        diff < c
    } else {
        diff <= c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zone::bound::{le, lt};

    fn u() -> Arc<Universe> {
        Arc::new(Universe::new(&["a".into(), "b".into()], &["x".into(), "y".into()]).unwrap())
    }

    #[test]
    fn complement_of_upper_bound() {
        let u = u();
        let s = SymbolicSet::atom(&u, 1, 0, le(3));
        let n = s.negate();
        assert!(n.equivalent(&SymbolicSet::atom(&u, 0, 1, lt(-3))));
        assert!(n.negate().equivalent(&s));
    }

    #[test]
    fn store_merges_convex_unions_only() {
        let u = u();
        let low = SymbolicSet::atom(&u, 1, 0, le(3));
        let high = SymbolicSet::atom(&u, 0, 1, lt(-3)).constrain(1, 0, le(5));
        let far = SymbolicSet::atom(&u, 0, 1, lt(-7));
        let mut store = CellStore::new(&u);
        assert_eq!(store.add(&low).len(), 1);
        assert_eq!(store.add(&high).len(), 1);
        assert!(store.add(&SymbolicSet::atom(&u, 1, 0, le(4))).is_empty());
        store.add(&far);
        let all = store.to_set();
        assert_eq!(all.len(), 2);
        assert!(all.equivalent(&low.union(&high).union(&far)));
        assert!(all.coalesce().equivalent(&all));
    }

    #[test]
    fn cube_merging() {
        let u = u();
        let a = SymbolicSet::literal(&u, 0, true);
        let na = SymbolicSet::literal(&u, 0, false);
        let all = a.union(&na);
        assert_eq!(all.len(), 1);
        assert!(all.cells()[0].cube.is_true());
    }

    #[test]
    fn literal_conflicts_are_disjoint() {
        let u = u();
        let a = SymbolicSet::literal(&u, 0, true).constrain(1, 0, le(2));
        let na = SymbolicSet::literal(&u, 0, false).constrain(1, 0, le(9));
        assert!(a.intersect(&na).is_empty());
        assert!(a.union(&na).includes(&a));
        assert!(!a.includes(&a.union(&na)));
    }

    #[test]
    fn embed_by_name() {
        let small = Arc::new(Universe::new(&["b".into()], &["y".into()]).unwrap());
        let s = SymbolicSet::literal(&small, 0, true).constrain(1, 0, le(4));
        let big = u();
        let e = s.embed(&big).unwrap();
        let expected = SymbolicSet::literal(&big, 1, true).constrain(2, 0, le(4));
        assert!(e.equivalent(&expected));
    }
}
