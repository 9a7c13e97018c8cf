//! Canonical difference-bound matrices.

use super::bound::{self, Raw, INF, LE_ZERO};
use super::universe::{Universe, VarKind};

/// A non-empty conjunction of constraints `var_i − var_j ≺ c`, stored as a
/// closed DBM. Entry `(i, j)` bounds `var_i − var_j`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Zone {
    dim: usize,
    m: Vec<Raw>,
}

impl Zone {
    /// Every valuation of the universe: real clocks non-negative, everything
    /// else unconstrained.
    pub fn universal(u: &Universe) -> Zone {
        let dim = u.dim();
        let mut m = vec![INF; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = LE_ZERO;
        }
        for c in u.clocks() {
            m[c] = LE_ZERO;
        }
        Zone { dim, m }
    }

    /// Builds a zone from raw entries and closes it. `None` when empty.
    pub fn from_matrix(dim: usize, m: Vec<Raw>) -> Option<Zone> {
        assert_eq!(m.len(), dim * dim);
        let mut z = Zone { dim, m };
        z.close().then_some(z)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Raw {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, raw: Raw) {
        self.m[i * self.dim + j] = raw;
    }

    pub fn matrix(&self) -> &[Raw] {
        &self.m
    }

    /// Floyd–Warshall closure; returns false when the zone is empty.
    fn close(&mut self) -> bool {
        let d = self.dim;
        for k in 0..d {
            for i in 0..d {
                let ik = self.m[i * d + k];
                if ik == INF {
                    continue;
                }
                for j in 0..d {
                    let kj = self.m[k * d + j];
                    if kj == INF {
                        continue;
                    }
                    let s = bound::add(ik, kj);
                    if s < self.m[i * d + j] {
                        self.m[i * d + j] = s;
                    }
                }
            }
            if self.m[k * d + k] < LE_ZERO {
                return false;
            }
        }
        (0..d).all(|i| self.m[i * d + i] >= LE_ZERO)
    }

    /// Adds `var_i − var_j ≺ raw`, keeping the matrix closed. Returns false
    /// (and leaves `self` unspecified) when the result is empty.
    pub fn constrain(&mut self, i: usize, j: usize, raw: Raw) -> bool {
        if raw >= self.get(i, j) {
            return true;
        }
        if bound::add(raw, self.get(j, i)) < LE_ZERO {
            return false;
        }
        let d = self.dim;
        self.set(i, j, raw);
        let col_i: Vec<Raw> = (0..d).map(|a| self.get(a, i)).collect();
        let row_j: Vec<Raw> = (0..d).map(|b| self.get(j, b)).collect();
        for a in 0..d {
            let ai = col_i[a];
            if ai == INF {
                continue;
            }
            let via = bound::add(ai, raw);
            for b in 0..d {
                let s = bound::add(via, row_j[b]);
                if s < self.m[a * d + b] {
                    self.m[a * d + b] = s;
                }
            }
        }
        true
    }

    /// `self ∧ (var_i − var_j ≺ raw)`.
    pub fn constrained(&self, i: usize, j: usize, raw: Raw) -> Option<Zone> {
        let mut z = self.clone();
        z.constrain(i, j, raw).then_some(z)
    }

    pub fn intersect(&self, other: &Zone) -> Option<Zone> {
        debug_assert_eq!(self.dim, other.dim);
        if !self.meets(other) {
            return None;
        }
        let mut z = self.clone();
        let mut changed = false;
        for (a, b) in z.m.iter_mut().zip(&other.m) {
            if *b < *a {
                *a = *b;
                changed = true;
            }
        }
        if !changed {
            return Some(z);
        }
        z.close().then_some(z)
    }

    /// Whether the two zones share a point. For closed matrices a negative
    /// cycle in the union graph always shows up with length two.
    pub fn meets(&self, other: &Zone) -> bool {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                if bound::add(self.m[i * d + j], other.m[j * d + i]) < LE_ZERO {
                    return false;
                }
            }
        }
        true
    }

    /// `self ⊇ other`.
    pub fn includes(&self, other: &Zone) -> bool {
        self.m.iter().zip(&other.m).all(|(a, b)| b <= a)
    }

    /// `∃var_k`: forgets every constraint on `k`. A real clock keeps its
    /// implicit lower bound of zero.
    pub fn free(&mut self, u: &Universe, k: usize) {
        let d = self.dim;
        let clock = u.kind(k) == VarKind::Clock;
        for i in 0..d {
            if i == k {
                continue;
            }
            self.m[k * d + i] = INF;
            self.m[i * d + k] = if clock { self.m[i * d] } else { INF };
        }
        if clock {
            self.m[k] = LE_ZERO;
        }
    }

    /// Time predecessors: every point from which time passage leads into
    /// the zone. Drops the lower bounds of advancing variables, keeping real
    /// clocks non-negative.
    pub fn past(&self, u: &Universe) -> Zone {
        let adv = |v: usize| u.kind(v).advances();
        self.rebuild(|i, j, z| match (adv(i), adv(j)) {
            (false, true) if i == 0 && u.kind(j) == VarKind::Clock => LE_ZERO,
            (false, true) => INF,
            _ => z.get(i, j),
        })
        .expect("relaxing a zone keeps it nonempty")
    }

    /// Time successors: drops the upper bounds of advancing variables.
    pub fn future(&self, u: &Universe) -> Zone {
        let adv = |v: usize| u.kind(v).advances();
        self.rebuild(|i, j, z| match (adv(i), adv(j)) {
            (true, false) => INF,
            _ => z.get(i, j),
        })
        .expect("relaxing a zone keeps it nonempty")
    }

    /// `self ∪ other` when that union is itself a zone.
    pub fn convex_union(&self, other: &Zone) -> Option<Zone> {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        // Closures must touch.
        for i in 0..d {
            for j in 0..d {
                if bound::add(self.m[i * d + j] | 1, other.m[j * d + i] | 1) < LE_ZERO {
                    return None;
                }
            }
        }
        let m: Vec<Raw> = self.m.iter().zip(&other.m).map(|(a, b)| *a.max(b)).collect();
        // The entrywise maximum of two closed matrices is closed.
        let hull = Zone { dim: self.dim, m };
        if hull == *self || hull == *other {
            return Some(hull);
        }
        let rest = hull.subtract(self)?;
        for piece in rest {
            match piece.subtract(other) {
                Some(left) if left.is_empty() => {}
                _ => return None,
            }
        }
        Some(hull)
    }

    /// True when no variable is constrained beyond the universe defaults.
    pub fn is_universal(&self, u: &Universe) -> bool {
        *self == Zone::universal(u)
    }

    /// Whether `var` appears in any non-default constraint.
    pub fn mentions(&self, u: &Universe, var: usize) -> bool {
        let d = self.dim;
        let clock = u.kind(var) == VarKind::Clock;
        (0..d).any(|i| {
            if i == var {
                return false;
            }
            let out = self.m[var * d + i];
            let inc = self.m[i * d + var];
            if clock {
                out != INF || inc != self.m[i * d]
            } else {
                out != INF || inc != INF
            }
        })
    }

    /// Pieces of `self \ cover`, pairwise disjoint. Returns `None` when the
    /// two zones do not meet (the difference is `self` itself).
    pub fn subtract(&self, cover: &Zone) -> Option<Vec<Zone>> {
        if !self.meets(cover) {
            return None;
        }
        let d = self.dim;
        let mut pieces = Vec::new();
        let mut cur = self.clone();
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                let c = cover.m[i * d + j];
                if c == INF || cur.get(i, j) <= c {
                    continue;
                }
                let mut outside = cur.clone();
                if outside.constrain(j, i, bound::negate(c)) {
                    pieces.push(outside);
                }
                if !cur.constrain(i, j, c) {
                    return Some(pieces);
                }
            }
        }
        Some(pieces)
    }

    /// Relaxes bounds beyond `c`: upper bounds above `(c, ≤)` are dropped and
    /// lower bounds below `(−c, <)` are weakened to it, then the matrix is
    /// closed. Closing may re-derive a bound outside the window from two
    /// inside it; the pass repeats until the canonical form stops changing,
    /// so the operation is idempotent. Each pass only enlarges the zone.
    pub fn extrapolate(&mut self, c: i64) {
        let hi = bound::le(c);
        let lo = bound::lt(-c);
        loop {
            let before = self.m.clone();
            for raw in self.m.iter_mut() {
                if *raw != INF && *raw > hi {
                    *raw = INF;
                } else if *raw < lo {
                    *raw = lo;
                }
            }
            let nonempty = self.close();
            debug_assert!(nonempty);
            if self.m == before {
                return;
            }
        }
    }

    /// Largest finite bound magnitude, used to check that iterates stay
    /// inside the extrapolation window.
    pub fn max_abs_constant(&self) -> i64 {
        self.m
            .iter()
            .filter(|&&r| r != INF)
            .map(|&r| bound::value(r).abs())
            .max()
            .unwrap_or(0)
    }

    /// Membership of a point given as exact rationals `nums[i] / den` per
    /// variable (index 0 must be 0).
    pub fn contains_scaled(&self, nums: &[i64], den: i64) -> bool {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                let raw = self.m[i * d + j];
                if i == j || raw == INF {
                    continue;
                }
                let diff = nums[i] - nums[j];
                let c = bound::value(raw) * den;
                let ok = if bound::is_strict(raw) { diff < c } else { diff <= c };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Applies `f` to produce the matrix of a zone over another universe;
    /// `map[i]` is the target index of source variable `i`.
    pub(crate) fn transport(&self, target: &Universe, map: &[usize]) -> Zone {
        let mut z = Zone::universal(target);
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                let raw = self.m[i * d + j];
                let (ti, tj) = (map[i], map[j]);
                if raw < z.get(ti, tj) {
                    z.set(ti, tj, raw);
                }
            }
        }
        let nonempty = z.close();
        debug_assert!(nonempty);
        z
    }

    /// Rewrites the matrix in place through `f(i, j, &source) -> raw` and
    /// closes it.
    pub(crate) fn rebuild(&self, f: impl Fn(usize, usize, &Zone) -> Raw) -> Option<Zone> {
        let d = self.dim;
        let mut m = vec![INF; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = if i == j { LE_ZERO } else { f(i, j, self) };
            }
        }
        Zone::from_matrix(d, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zone::bound::{le, lt};

    fn u2() -> Universe {
        Universe::new(&[], &["x".into(), "y".into()]).unwrap()
    }

    #[test]
    fn closure_adds_sums() {
        let u = u2();
        let mut z = Zone::universal(&u);
        assert!(z.constrain(1, 0, le(3)));
        assert!(z.constrain(2, 1, le(2)));
        assert_eq!(z.get(2, 0), le(5));
    }

    #[test]
    fn contradictory_bounds() {
        let u = u2();
        let mut z = Zone::universal(&u);
        assert!(z.constrain(1, 0, le(1)));
        assert!(!z.constrain(0, 1, le(-2)));
    }

    #[test]
    fn free_keeps_non_negativity() {
        let u = u2();
        let mut z = Zone::universal(&u);
        z.constrain(1, 0, le(3));
        z.constrain(0, 1, le(-1));
        z.constrain(2, 1, lt(0));
        z.free(&u, 1);
        // y < x ≤ 3 projected: y < 3.
        assert_eq!(z.get(2, 0), lt(3));
        assert_eq!(z.get(0, 1), LE_ZERO);
        assert_eq!(z.get(2, 1), lt(3));
        assert!(!z.mentions(&u, 1));
    }

    #[test]
    fn subtract_pieces_are_disjoint() {
        let u = u2();
        let full = Zone::universal(&u);
        let mut hole = Zone::universal(&u);
        hole.constrain(1, 0, le(3));
        hole.constrain(0, 1, lt(-1));
        let pieces = full.subtract(&hole).unwrap();
        assert_eq!(pieces.len(), 2);
        for (a, p) in pieces.iter().enumerate() {
            assert!(!p.meets(&hole));
            for q in &pieces[a + 1..] {
                assert!(!p.meets(q));
            }
        }
    }

    #[test]
    fn extrapolation_drops_large_bounds() {
        let u = u2();
        let mut z = Zone::universal(&u);
        z.constrain(1, 0, le(7));
        z.extrapolate(5);
        assert!(z.is_universal(&u));
        let mut w = Zone::universal(&u);
        w.constrain(1, 0, le(4));
        let before = w.clone();
        w.extrapolate(5);
        assert_eq!(w, before);
    }

    #[test]
    fn past_and_future_match_sampling() {
        let u = u2();
        let mut z = Zone::universal(&u);
        z.constrain(1, 0, le(3));
        z.constrain(0, 1, le(-2));
        z.constrain(0, 2, lt(-1));
        z.constrain(1, 2, le(1));
        let (past, future) = (z.past(&u), z.future(&u));
        let point = |x: i64, y: i64| {
            let mut nums = vec![0; u.dim()];
            nums[1] = x;
            nums[2] = y;
            nums
        };
        for x in 0..=24 {
            for y in 0..=24 {
                let later = (0..=40).any(|d| z.contains_scaled(&point(x + d, y + d), 4));
                let earlier = (0..=x.min(y)).any(|d| z.contains_scaled(&point(x - d, y - d), 4));
                assert_eq!(past.contains_scaled(&point(x, y), 4), later, "past at {x}/4, {y}/4");
                assert_eq!(
                    future.contains_scaled(&point(x, y), 4),
                    earlier,
                    "future at {x}/4, {y}/4"
                );
            }
        }
    }
}
