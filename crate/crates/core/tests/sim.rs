use timesim::model::{CmpOp, PartialAssignment, Pred, Tea, Transition};
use timesim::sim::{equivalence_check, simulation_check, CheckOptions, Checker, Seed};
use timesim::zone::SymbolicSet;

fn looping(clock: &str, at_least: i64, invariant: Pred) -> Tea {
    Tea {
        events: ["send".to_string()].into_iter().collect(),
        clocks: vec![clock.into()],
        globals: vec![],
        locals: vec![],
        init: Pred::clock(clock, CmpOp::Eq, 0),
        invariant,
        transitions: vec![Transition::new(
            &["send"],
            Pred::clock(clock, CmpOp::Ge, at_least),
            PartialAssignment::new().reset(clock),
        )],
    }
}

#[test]
fn wider_window_simulates_narrower() {
    let imp = looping("x", 5, Pred::True);
    let spec = looping("y", 3, Pred::True);
    let opts = CheckOptions::default();
    assert!(simulation_check(&imp, &spec, &opts).unwrap().holds);
    assert!(!simulation_check(&spec, &imp, &opts).unwrap().holds);
    let (a, b) = equivalence_check(&imp, &spec, &opts).unwrap();
    assert!(a.holds && !b.holds);
}

#[test]
fn reflexive_with_shared_clock_name() {
    let a = looping("x", 2, Pred::clock("x", CmpOp::Le, 4));
    for seed in [Seed::Invariants, Seed::ReachablePairs] {
        let opts = CheckOptions {
            seed,
            ..CheckOptions::default()
        };
        let v = simulation_check(&a, &a, &opts).unwrap();
        assert!(v.holds, "{seed:?}");
        assert!(v.relation.is_some() && v.failing_initial.is_none());
    }
}

#[test]
fn xbck_discharges_reset_clocks() {
    let imp = looping("x1", 5, Pred::True);
    let spec = looping("x2", 3, Pred::True);
    let ck = Checker::new(&imp, &spec).unwrap();
    let u = ck.universe.clone();
    let (x1, x2) = (u.var("x1").unwrap(), u.var("x2").unwrap());
    let s = SymbolicSet::top(&u)
        .constrain(x1, 0, timesim::zone::bound::le(2))
        .constrain(x2, 0, timesim::zone::bound::le(2));
    let got = ck.xbck(0, 0, &s).unwrap();
    let want = SymbolicSet::top(&u)
        .constrain(0, x1, timesim::zone::bound::le(-5))
        .constrain(0, x2, timesim::zone::bound::le(-3));
    assert!(got.equivalent(&want), "{got}");
    assert!(ck.xbck(0, 0, &SymbolicSet::empty(&u)).unwrap().is_empty());
}

#[test]
fn iterates_descend_inside_invariants() {
    let imp = looping("x", 3, Pred::clock("x", CmpOp::Le, 6));
    let spec = looping("y", 2, Pred::clock("y", CmpOp::Le, 5));
    let ck = Checker::new(&imp, &spec).unwrap();
    let opts = CheckOptions {
        record_iterates: true,
        edgf: false,
        ..CheckOptions::default()
    };
    let v = ck.run(&opts);
    let h = ck.invariant_pairs();
    for w in v.iterates.windows(2) {
        assert!(w[0].includes(&w[1]));
        assert!(h.includes(&w[1]));
    }
}
