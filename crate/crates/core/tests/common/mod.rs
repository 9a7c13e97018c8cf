//! Random zone sets with a direct membership test, shared by the property
//! suites.

#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use timesim::zone::bound::{self, Raw};
use timesim::zone::{Point, SymbolicSet, Universe};

/// Props `p`, `q`; clocks `x`, `y`.
pub fn universe() -> Arc<Universe> {
    Arc::new(Universe::new(&["p".into(), "q".into()], &["x".into(), "y".into()]).unwrap())
}

/// A conjunction of literals and difference atoms over `0`, `x`, `y`.
#[derive(Clone, Debug)]
pub struct CellDesc {
    pub lits: Vec<(usize, bool)>,
    pub atoms: Vec<(usize, usize, Raw)>,
}

pub type SetDesc = Vec<CellDesc>;

fn raw() -> impl Strategy<Value = Raw> {
    (-6i64..=6, any::<bool>()).prop_map(|(c, strict)| if strict { bound::lt(c) } else { bound::le(c) })
}

fn atom() -> impl Strategy<Value = (usize, usize, Raw)> {
    (0usize..3, 1usize..3, raw()).prop_map(|(i, k, r)| (i, (i + k) % 3, r))
}

pub fn cell_desc() -> impl Strategy<Value = CellDesc> {
    (
        proptest::collection::vec((0usize..2, any::<bool>()), 0..2),
        proptest::collection::vec(atom(), 0..4),
    )
        .prop_map(|(lits, atoms)| CellDesc { lits, atoms })
}

pub fn set_desc() -> impl Strategy<Value = SetDesc> {
    proptest::collection::vec(cell_desc(), 0..4)
}

pub fn build(u: &Arc<Universe>, d: &SetDesc) -> SymbolicSet {
    let mut acc = SymbolicSet::empty(u);
    for c in d {
        let mut s = SymbolicSet::top(u);
        for &(p, v) in &c.lits {
            s = s.with_literal(p, v);
        }
        for &(i, j, r) in &c.atoms {
            s = s.constrain(i, j, r);
        }
        acc = acc.union(&s);
    }
    acc
}

/// Membership read straight off the description.
pub fn eval(d: &SetDesc, pt: &Point) -> bool {
    d.iter().any(|c| {
        c.lits.iter().all(|&(p, v)| (pt.props >> p & 1 == 1) == v)
            && c.atoms.iter().all(|&(i, j, r)| {
                let diff = pt.nums[i] - pt.nums[j];
                let k = bound::value(r) * pt.den;
                if bound::is_strict(r) {
                    diff < k
                } else {
                    diff <= k
                }
            })
    })
}

/// Every valuation of `p`, `q` with `x`, `y` on the half-integer grid of
/// `[0, hi]`.
pub fn grid(u: &Universe, hi: i64) -> Vec<Point> {
    let (x, y) = (u.var("x").unwrap(), u.var("y").unwrap());
    let mut out = Vec::new();
    for props in 0..4u128 {
        for a in 0..=2 * hi {
            for b in 0..=2 * hi {
                let mut nums = vec![0; u.dim()];
                nums[x] = a;
                nums[y] = b;
                out.push(Point { props, den: 2, nums });
            }
        }
    }
    out
}
