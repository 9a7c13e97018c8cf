//! Conjunctions of propositional literals.

/// Bit `p` of `mask` says whether proposition `p` is constrained; bit `p` of
/// `value` gives its required value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Cube {
    pub mask: u128,
    pub value: u128,
}

impl Cube {
    pub const TRUE: Cube = Cube { mask: 0, value: 0 };

    pub fn literal(p: usize, v: bool) -> Cube {
        let bit = 1u128 << p;
        Cube {
            mask: bit,
            value: if v { bit } else { 0 },
        }
    }

    pub fn get(&self, p: usize) -> Option<bool> {
        let bit = 1u128 << p;
        (self.mask & bit != 0).then_some(self.value & bit != 0)
    }

    pub fn with(&self, p: usize, v: bool) -> Option<Cube> {
        self.conjoin(&Cube::literal(p, v))
    }

    pub fn conjoin(&self, other: &Cube) -> Option<Cube> {
        if (self.value ^ other.value) & self.mask & other.mask != 0 {
            None
        } else {
            Some(Cube {
                mask: self.mask | other.mask,
                value: self.value | other.value,
            })
        }
    }

    /// Every valuation satisfying `self` satisfies `other`.
    pub fn implies(&self, other: &Cube) -> bool {
        other.mask & !self.mask == 0 && (self.value ^ other.value) & other.mask == 0
    }

    pub fn forget(&self, mask: u128) -> Cube {
        Cube {
            mask: self.mask & !mask,
            value: self.value & !mask,
        }
    }

    pub fn is_true(&self) -> bool {
        self.mask == 0
    }

    pub fn literals(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        (0..128)
            .filter(move |p| self.mask >> p & 1 == 1)
            .map(move |p| (p, self.value >> p & 1 == 1))
    }

    pub fn satisfied_by(&self, valuation: u128) -> bool {
        (valuation ^ self.value) & self.mask == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_and_implication() {
        let a = Cube::literal(0, true);
        let not_a = Cube::literal(0, false);
        let b = Cube::literal(1, true);
        assert!(a.conjoin(&not_a).is_none());
        let ab = a.conjoin(&b).unwrap();
        assert!(ab.implies(&a));
        assert!(!a.implies(&ab));
        assert!(ab.implies(&Cube::TRUE));
        assert_eq!(ab.forget(1 << 1), a);
        assert_eq!(ab.literals().collect::<Vec<_>>(), vec![(0, true), (1, true)]);
    }
}
