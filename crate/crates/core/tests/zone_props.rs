mod common;

use proptest::prelude::*;
use timesim::zone::bound::le;
use timesim::zone::time::time_shift;

proptest! {
    #[test]
    fn negation_is_complement(d in common::set_desc()) {
        let u = common::universe();
        let s = common::build(&u, &d);
        let n = s.negate();
        prop_assert!(n.intersect(&s).is_empty());
        prop_assert!(n.union(&s).equivalent(&timesim::zone::SymbolicSet::top(&u)));
    }

    #[test]
    fn subtract_is_intersect_with_complement(a in common::set_desc(), b in common::set_desc()) {
        let u = common::universe();
        let (a, b) = (common::build(&u, &a), common::build(&u, &b));
        prop_assert!(a.subtract(&b).equivalent(&a.intersect(&b.negate())));
    }

    #[test]
    fn inclusion_matches_sampling(a in common::set_desc(), b in common::set_desc()) {
        let u = common::universe();
        let (sa, sb) = (common::build(&u, &a), common::build(&u, &b));
        let joined = sa.union(&sb);
        prop_assert!(joined.includes(&sa) && joined.includes(&sb));
        if sa.includes(&sb) {
            for pt in common::grid(&u, 7) {
                prop_assert!(!common::eval(&b, &pt) || common::eval(&a, &pt));
            }
        }
    }

    #[test]
    fn shift_then_pin_to_zero(d in common::set_desc()) {
        let u = common::universe();
        let s = common::build(&u, &d);
        let nd = u.nd();
        let back = time_shift(&s, nd).constrain(nd, 0, le(0)).constrain(0, nd, le(0)).eliminate(&[nd], 0);
        prop_assert!(back.equivalent(&s));
    }

    #[test]
    fn reduce_keeps_the_set(d in common::set_desc()) {
        let u = common::universe();
        let s = common::build(&u, &d);
        for pt in common::grid(&u, 7) {
            prop_assert_eq!(s.contains(&pt), common::eval(&d, &pt));
        }
    }
}
