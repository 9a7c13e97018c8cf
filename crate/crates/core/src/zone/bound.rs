//! DBM bounds packed into one `i64`.
//!
//! A bound `(v, ≤)` is stored as `2v + 1` and `(v, <)` as `2v`, so the usual
//! integer order is the bound order: a smaller raw value is a tighter bound,
//! and at equal `v` the strict bound is tighter. `INF` is the absent bound.

use std::cmp::Ordering;
use std::fmt;

pub type Raw = i64;

pub const INF: Raw = i64::MAX;
/// `(0, ≤)`.
pub const LE_ZERO: Raw = 1;
/// `(0, <)`.
pub const LT_ZERO: Raw = 0;

#[inline]
pub const fn le(v: i64) -> Raw {
    (v << 1) | 1
}

#[inline]
pub const fn lt(v: i64) -> Raw {
    v << 1
}

#[inline]
pub const fn value(raw: Raw) -> i64 {
    raw >> 1
}

#[inline]
pub const fn is_strict(raw: Raw) -> bool {
    raw & 1 == 0
}

#[inline]
pub fn add(a: Raw, b: Raw) -> Raw {
    if a == INF || b == INF {
        INF
    } else {
        (((a >> 1) + (b >> 1)) << 1) | (a & b & 1)
    }
}

/// The bound of the complementary constraint read in the other direction:
/// `¬(x − y ≺ c)` is `y − x ≺′ −c` with the strictness flipped.
#[inline]
pub fn negate(raw: Raw) -> Raw {
    debug_assert!(raw != INF);
    1 - raw
}

/// A bound as a value type, for display and tests.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Bound(pub Raw);

impl Bound {
    pub const INFINITY: Bound = Bound(INF);

    pub fn le(v: i64) -> Bound {
        Bound(le(v))
    }

    pub fn lt(v: i64) -> Bound {
        Bound(lt(v))
    }

    pub fn is_infinite(self) -> bool {
        self.0 == INF
    }

    pub fn value(self) -> Option<i64> {
        (!self.is_infinite()).then(|| value(self.0))
    }

    pub fn is_strict(self) -> bool {
        !self.is_infinite() && is_strict(self.0)
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl std::ops::Add for Bound {
    type Output = Bound;
    fn add(self, rhs: Bound) -> Bound {
        Bound(add(self.0, rhs.0))
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "< inf"),
            Some(v) if self.is_strict() => write!(f, "< {v}"),
            Some(v) => write!(f, "<= {v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(add(le(3), le(2)), le(5));
        assert_eq!(add(le(3), lt(2)), lt(5));
        assert_eq!(add(lt(-1), lt(-2)), lt(-3));
        assert_eq!(add(INF, le(-4)), INF);
        assert!(lt(3) < le(3));
        assert!(le(3) < lt(4));
        assert_eq!(negate(le(3)), lt(-3));
        assert_eq!(negate(lt(3)), le(-3));
        assert_eq!(negate(negate(le(-7))), le(-7));
    }

    #[test]
    fn order_matches_tightness() {
        for a in -4..4 {
            for b in -4..4 {
                assert_eq!(le(a) <= le(b), a <= b);
                assert_eq!(lt(a) < le(b), a <= b);
                assert_eq!(le(a) < lt(b), a < b);
            }
        }
    }
}
