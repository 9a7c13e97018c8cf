//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! `ACCEPT_ONLY=3,5` restricts the run to some criteria.

mod common;

use std::collections::HashMap;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timesim::bench::{self, Family, Variant};
use timesim::generate::{random_pair, random_tea, GenParams};
use timesim::model::Tea;
use timesim::nonzeno::{non_zeno, nz_simulation_check};
use timesim::oracle::{maximal_nz_simulation, maximal_simulation, zeno_regions, Region, Space};
use timesim::sim::{simulation_check, CheckOptions, Checker, Seed};
use timesim::text::parse_pred;
use timesim::zone::bound::{le, lt};
use timesim::zone::lh::{fm_eliminate_general, LhPredicate, Literal};
use timesim::zone::time::time_shift;
use timesim::zone::{Formula, Point, SymbolicSet, Universe};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    check(t <= budget, || format!("took {t:.1?}, budget {budget:?}"))?;
    Ok(t)
}

// ---------------------------------------------------------------- 1 and 2

const F_Q: &str = "(a && b1 && !b2 && 0 <= x1 && 3 < x2 <= 5 && x2 - x1 <= 5) \
                   || (!a && 2 <= x1 < 9 && 1 < x2 && x1 - x2 < 8)";

fn example_universe() -> Arc<Universe> {
    Arc::new(Universe::new(&["a".into(), "b1".into(), "b2".into()], &["x1".into(), "x2".into()]).unwrap())
}

fn set_of(u: &Arc<Universe>, text: &str) -> SymbolicSet {
    Formula::compile(u, &parse_pred(text).unwrap()).unwrap().to_set(u)
}

fn point(u: &Universe, props: u128, den: i64, clocks: &[(&str, i64)]) -> Point {
    let mut nums = vec![0; u.dim()];
    for &(c, v) in clocks {
        nums[u.var(c).unwrap()] = v;
    }
    Point { props, den, nums }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let u = example_universe();
    let fq = set_of(&u, F_Q);

    let no_a = fq.eliminate_names(&["a"]);
    let want = set_of(
        &u,
        "(b1 && !b2 && 0 <= x1 && 3 < x2 <= 5 && x2 - x1 <= 5) || (2 <= x1 < 9 && 1 < x2 && x1 - x2 < 8)",
    );
    check(no_a.equivalent(&want), || format!("exists a: got {no_a}"))?;

    let no_x1 = fq.eliminate_names(&["x1"]);
    let a = u.prop("a").unwrap();
    let first = no_x1.with_literal(a, true);
    let want_first = set_of(&u, "a && b1 && !b2 && 3 < x2 <= 5");
    check(first.equivalent(&want_first), || {
        format!("exists x1, a-part: got {first}")
    })?;

    // Second disjunct against brute force: x1 witnesses on the quarter grid
    // suffice for half-grid x2 and integer constants.
    let second = no_x1.with_literal(a, false);
    let derived = set_of(&u, "!a && 1 < x2");
    check(second.equivalent(&derived), || {
        format!("exists x1, !a-part: got {second}")
    })?;
    let x1 = u.var("x1").unwrap();
    for props in 0..8u128 {
        for x2 in 0..=40 {
            let mut p = point(&u, props, 4, &[("x2", x2)]);
            let brute = (0..=80).any(|w| {
                p.nums[x1] = w;
                fq.contains(&p)
            });
            p.nums[x1] = 0;
            check(no_x1.contains(&p) == brute, || {
                format!("sampling disagrees at props {props:03b}, x2 = {x2}/4")
            })?;
        }
    }
    let general = fm_eliminate_general(&LhPredicate::from_set(&fq), "x1", false)
        .to_set(&u)
        .ok_or("general elimination left non-unit coefficients")?;
    check(general.equivalent(&no_x1), || {
        format!("general elimination: got {general}")
    })?;

    let printed = set_of(&u, "!a && 1 < x2 < 6");
    check(!printed.equivalent(&second), || {
        "printed bound unexpectedly matches".into()
    })?;
    let witness = point(&u, 0, 1, &[("x1", 2), ("x2", 7)]);
    check(fq.contains(&witness), || "witness x1=2, x2=7 not in f_Q".into())?;
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!(
        "both eliminations match; second part of exists x1 is `!a && 1 < x2` \
         (printed `1 < x2 < 6` excludes x2 = 7, yet x1 = 2, x2 = 7, !a satisfies f_Q) [{t:.1?}]"
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let u = example_universe();
    let fq = set_of(&u, F_Q);
    let nd = u.nd();
    let shifted = time_shift(&fq, nd);
    let (x1, x2) = (u.var("x1").unwrap(), u.var("x2").unwrap());
    // x + δ ∼ c is x − (−δ) ∼ c.
    let want = set_of(&u, "a && b1 && !b2 && x2 - x1 <= 5")
        .constrain(nd, x1, le(0))
        .constrain(nd, x2, lt(-3))
        .constrain(x2, nd, le(5))
        .union(
            &set_of(&u, "!a && x1 - x2 < 8")
                .constrain(nd, x1, le(-2))
                .constrain(x1, nd, lt(9))
                .constrain(nd, x2, lt(-1)),
        );
    check(shifted.equivalent(&want), || format!("got {shifted}"))?;
    check(shifted.len() == fq.len(), || "cell count changed".into())?;
    for (before, after) in fq.cells().iter().zip(shifted.cells()) {
        check(before.cube == after.cube, || "cubes differ".into())?;
        let (b, s) = (&before.zone, &after.zone);
        for (i, j) in [(x1, x2), (x2, x1)] {
            check(b.get(i, j) == s.get(i, j), || format!("diagonal {i},{j} changed"))?;
        }
        for x in [x1, x2] {
            check(s.get(x, nd) == b.get(x, 0) && s.get(nd, x) == b.get(0, x), || {
                format!("clock {x} not rewritten against the displacement")
            })?;
        }
    }
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!(
        "diagonals kept, clock bounds moved to -delta, cell by cell [{t:.1?}]"
    ))
}

// ---------------------------------------------------------------- 3

fn run_property(
    name: &str,
    cases: u32,
    test: impl Fn(common::SetDesc, common::SetDesc) -> Result<(), String>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(common::set_desc(), common::set_desc()), |(a, b)| {
            test(a, b).map_err(proptest::test_runner::TestCaseError::fail)
        })
        .map_err(|e| format!("{name}: {e}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let u = common::universe();
    let nd = u.nd();
    let (x, p) = (u.var("x").unwrap(), u.prop("p").unwrap());
    let pts = common::grid(&u, 7);
    let eq = |l: &SymbolicSet, r: &SymbolicSet, what: &str| check(l.equivalent(r), || format!("{what}: {l} vs {r}"));

    run_property("de morgan", 1000, |a, b| {
        let (a, b) = (common::build(&u, &a), common::build(&u, &b));
        eq(
            &a.union(&b).negate(),
            &a.negate().intersect(&b.negate()),
            "not (a or b)",
        )?;
        eq(
            &a.intersect(&b).negate(),
            &a.negate().union(&b.negate()),
            "not (a and b)",
        )
    })?;
    run_property("double negation", 1000, |a, _| {
        let a = common::build(&u, &a);
        eq(&a.negate().negate(), &a, "not not a")
    })?;
    run_property("projection and union", 1000, |a, b| {
        let (a, b) = (common::build(&u, &a), common::build(&u, &b));
        eq(
            &a.union(&b).eliminate(&[x], 0),
            &a.eliminate(&[x], 0).union(&b.eliminate(&[x], 0)),
            "clock",
        )?;
        eq(
            &a.union(&b).eliminate(&[], 1 << p),
            &a.eliminate(&[], 1 << p).union(&b.eliminate(&[], 1 << p)),
            "prop",
        )
    })?;
    run_property("zero shift", 1000, |a, _| {
        let a = common::build(&u, &a);
        let back = time_shift(&a, nd)
            .constrain(nd, 0, le(0))
            .constrain(0, nd, le(0))
            .eliminate(&[nd], 0);
        eq(&back, &a, "shift by 0")
    })?;
    run_property("extrapolation", 1000, |a, b| {
        let (a, b) = (common::build(&u, &a), common::build(&u, &b));
        let ea = a.extrapolate(3);
        eq(&ea.extrapolate(3), &ea, "idempotence")?;
        check(ea.includes(&a), || format!("a not inside its extrapolation: {a}"))?;
        let ab = a.union(&b);
        check(ab.extrapolate(3).includes(&ea), || {
            format!("monotonicity: {a} within {ab}")
        })
    })?;
    run_property("point sampling", 1000, |da, db| {
        let (a, b) = (common::build(&u, &da), common::build(&u, &db));
        let (na, ab, aob, amb) = (a.negate(), a.intersect(&b), a.union(&b), a.subtract(&b));
        for pt in &pts {
            let (ia, ib) = (common::eval(&da, pt), common::eval(&db, pt));
            let got = [
                a.contains(pt),
                na.contains(pt),
                ab.contains(pt),
                aob.contains(pt),
                amb.contains(pt),
            ];
            let want = [ia, !ia, ia && ib, ia || ib, ia && !ib];
            check(got == want, || format!("at {pt:?}: {got:?} vs {want:?}"))?;
        }
        Ok(())
    })?;
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("6 properties x 1000 cases [{t:.1?}]"))
}

// ---------------------------------------------------------------- 4

fn random_unit_pred(rng: &mut ChaCha8Rng, depth: u32) -> LhPredicate {
    let vars = ["x", "y", "z"];
    if depth == 0 || rng.gen_bool(0.3) {
        let c = rng.gen_range(-5..=5);
        let strict = rng.gen_bool(0.5);
        let a = vars[rng.gen_range(0..3)];
        return match rng.gen_range(0..3) {
            0 => LhPredicate::linear(&[(a, 1)], strict, c),
            1 => LhPredicate::linear(&[(a, -1)], strict, c),
            _ => {
                let b = vars.iter().find(|v| **v != a).unwrap();
                LhPredicate::linear(&[(a, 1), (b, -1)], strict, c)
            }
        };
    }
    let n = rng.gen_range(2..=3);
    let parts = (0..n).map(|_| random_unit_pred(rng, depth - 1)).collect();
    match rng.gen_range(0..5) {
        0 => LhPredicate::Not(Box::new(random_unit_pred(rng, depth - 1))),
        1 | 2 => LhPredicate::And(parts),
        _ => LhPredicate::Or(parts),
    }
}

fn nonnegative(p: LhPredicate, vars: &[&str]) -> LhPredicate {
    let mut parts = vec![p];
    parts.extend(vars.iter().map(|v| LhPredicate::linear(&[(v, -1)], false, 0)));
    LhPredicate::And(parts)
}

/// `∃var(p)` at a point, by intersecting the intervals each disjunct allows
/// for `var`.
fn exists_by_intervals(p: &LhPredicate, var: &str, vals: &HashMap<String, Rational64>) -> bool {
    p.dnf().iter().any(|conj| {
        let mut lo: Option<(Rational64, bool)> = None;
        let mut hi: Option<(Rational64, bool)> = None;
        for lit in conj {
            let c = match lit {
                Literal::Linear(c) => c,
                Literal::Prop(..) => unreachable!("numeric cases only"),
            };
            let k = c.coeff(var);
            if k == 0 {
                if !c.eval(vals) {
                    return false;
                }
                continue;
            }
            let rest: Rational64 = c
                .terms
                .iter()
                .filter(|(v, _)| v.as_str() != var)
                .map(|(v, a)| Rational64::from_integer(*a) * vals[v])
                .sum();
            let b = (Rational64::from_integer(c.rhs) - rest) / Rational64::from_integer(k);
            if k > 0 {
                if hi.is_none_or(|(h, s)| b < h || (b == h && c.strict && !s)) {
                    hi = Some((b, c.strict));
                }
            } else if lo.is_none_or(|(l, s)| b > l || (b == l && c.strict && !s)) {
                lo = Some((b, c.strict));
            }
        }
        match (lo, hi) {
            (Some((l, ls)), Some((h, hs))) => l < h || (l == h && !ls && !hs),
            _ => true,
        }
    })
}

fn multi_coefficient_cases() -> Vec<LhPredicate> {
    use LhPredicate as P;
    let l = P::linear;
    vec![
        P::And(vec![l(&[("x", 2)], false, 6), l(&[("x", -1)], false, -4)]),
        P::And(vec![l(&[("x", 2), ("y", 3)], false, 12), l(&[("x", -1)], false, -1)]),
        P::And(vec![
            l(&[("x", 3), ("y", -2)], true, 5),
            l(&[("x", -2), ("y", 1)], false, -3),
        ]),
        P::And(vec![
            l(&[("x", 5)], true, 7),
            l(&[("x", -3), ("y", 1)], true, 0),
            l(&[("y", -1)], false, 0),
        ]),
        P::Or(vec![
            P::And(vec![l(&[("x", 2), ("y", -1)], false, 1), l(&[("x", -4)], false, -5)]),
            P::And(vec![
                l(&[("x", 1), ("z", 1)], false, 3),
                l(&[("x", -2), ("y", 3)], true, 0),
            ]),
        ]),
        P::And(vec![
            l(&[("x", 4), ("y", 1)], false, 10),
            l(&[("x", -3), ("z", 2)], false, 1),
            l(&[("x", -1), ("y", -1)], true, -2),
        ]),
        P::And(vec![l(&[("x", 7)], false, 3), l(&[("x", -7)], false, -3)]),
        P::And(vec![l(&[("x", 7)], true, 3), l(&[("x", -7)], false, -3)]),
        P::And(vec![
            l(&[("x", 2), ("y", 2), ("z", -3)], false, 4),
            l(&[("x", -3), ("y", 1)], true, 2),
        ]),
        P::Not(Box::new(P::Or(vec![
            l(&[("x", 3), ("y", -1)], false, 2),
            l(&[("x", -2)], true, -1),
        ]))),
        P::And(vec![
            l(&[("y", 2)], false, 3),
            l(&[("x", 6), ("y", -4)], false, 1),
            l(&[("x", -6), ("z", 5)], false, 0),
        ]),
        P::And(vec![l(&[("x", 1)], false, 2), l(&[("x", -1), ("y", 2)], false, -1)]),
    ]
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let u = Arc::new(Universe::new(&[], &["x".into(), "y".into(), "z".into()]).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..1000 {
        let p = nonnegative(random_unit_pred(&mut rng, 3), &["x", "y", "z"]);
        let zone = p
            .to_set(&u)
            .ok_or("unit predicate did not convert")?
            .eliminate_names(&["x"]);
        let general = fm_eliminate_general(&p, "x", false);
        let general = general
            .to_set(&u)
            .ok_or_else(|| format!("case {i}: non-unit result {general:?}"))?;
        check(zone.equivalent(&general), || {
            format!("case {i}: {p:?}\nzone {zone}\ngeneral {general}")
        })?;
    }
    let cases = multi_coefficient_cases();
    let grid: Vec<Rational64> = (-12..=12).map(|k| Rational64::new(k, 4)).collect();
    let none = HashMap::new();
    for (i, p) in cases.iter().enumerate() {
        let e = fm_eliminate_general(p, "x", false);
        let mut vals = HashMap::new();
        for &y in &grid {
            for &z in &grid {
                vals.insert("y".to_string(), y);
                vals.insert("z".to_string(), z);
                let want = exists_by_intervals(p, "x", &vals);
                check(e.eval(&none, &vals) == want, || {
                    format!("handcrafted {i} at y={y}, z={z}: {p:?}")
                })?;
            }
        }
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!(
        "1000 unit cases agree, {} multi-coefficient cases match interval sampling [{t:.1?}]",
        cases.len()
    ))
}

// ---------------------------------------------------------------- 5 to 9

fn opts(seed: Seed, edgf: bool) -> CheckOptions {
    CheckOptions {
        seed,
        edgf,
        ..CheckOptions::default()
    }
}

struct Instance {
    name: String,
    a: Tea,
    b: Tea,
    nz: bool,
}

fn corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = GenParams::default();
    let mut out: Vec<Instance> = (0..200)
        .map(|i| {
            let (a, b) = random_pair(&mut rng, &p);
            Instance {
                name: format!("random #{i}"),
                a,
                b,
                nz: false,
            }
        })
        .collect();
    for family in Family::ALL {
        for &variant in family.variants() {
            let (a, b) = bench::generate(family, 1, variant, &family.desk_constants()).unwrap();
            for nz in [false, true] {
                let name = format!("{family} {variant} m=1 desk{}", if nz { " nz" } else { "" });
                out.push(Instance {
                    name,
                    a: a.clone(),
                    b: b.clone(),
                    nz,
                });
            }
        }
    }
    out
}

fn engine(i: &Instance, o: &CheckOptions) -> Result<bool, String> {
    let v = if i.nz {
        nz_simulation_check(&i.a, &i.b, o)
    } else {
        simulation_check(&i.a, &i.b, o)
    };
    v.map(|v| v.holds).map_err(|e| format!("{}: {e}", i.name))
}

fn oracle(a: &Tea, b: &Tea, nz: bool) -> Result<bool, String> {
    let v = if nz {
        maximal_nz_simulation(a, b)
    } else {
        maximal_simulation(a, b)
    };
    v.map(|v| v.holds).map_err(|e| e.to_string())
}

fn criterion_5_and_7() -> (Outcome, Outcome) {
    let start = Instant::now();
    let corpus = corpus();
    let mut disagree = Vec::new();
    let mut edgf_diff = Vec::new();
    let mut holds = 0;
    for i in &corpus {
        let want = match oracle(&i.a, &i.b, i.nz) {
            Ok(w) => w,
            Err(e) => {
                let e = Err(format!("{}: oracle failed: {e}", i.name));
                return (e.clone(), e);
            }
        };
        holds += want as usize;
        for seed in [Seed::Invariants, Seed::ReachablePairs] {
            let on = engine(i, &opts(seed, true));
            let off = engine(i, &opts(seed, false));
            match (on, off) {
                (Ok(on), Ok(off)) => {
                    if on != want {
                        disagree.push(format!("{} ({seed:?}): engine {on}, oracle {want}", i.name));
                    }
                    if on != off {
                        edgf_diff.push(format!("{} ({seed:?})", i.name));
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    let e = Err(e);
                    return (e.clone(), e);
                }
            }
        }
    }
    let t = start.elapsed();
    let c5 = if !disagree.is_empty() {
        Err(format!("{} disagreements: {}", disagree.len(), disagree.join("; ")))
    } else if t > Duration::from_secs(600) {
        Err(format!("took {t:.1?}, budget 10 min"))
    } else {
        Ok(format!(
            "{} instances agree with the oracle under both seeds ({holds} hold) [{t:.1?}]",
            corpus.len()
        ))
    };
    let c7 = if edgf_diff.is_empty() {
        Ok(format!(
            "{} instances x 2 seeds, same verdicts with and without EDGF",
            corpus.len()
        ))
    } else {
        Err(format!("EDGF changes the verdict on {}", edgf_diff.join("; ")))
    };
    (c5, c7)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = GenParams::default();
    let mut sweeps = 0;
    for k in 0..200 {
        let a = random_tea(&mut rng, &p, "x");
        let ck = Checker::new(&a, &a).map_err(|e| format!("#{k}: {e}"))?;
        let h = ck.invariant_pairs();
        for seed in [Seed::Invariants, Seed::ReachablePairs] {
            let v = ck.run(&CheckOptions {
                seed,
                record_iterates: true,
                ..CheckOptions::default()
            });
            check(v.holds, || format!("#{k} ({seed:?}) not reflexive: {a:?}"))?;
            check(v.iterates.iter().all(|q| h.includes(q)), || {
                format!("#{k} ({seed:?}) left H1 and H2")
            })?;
            for (n, w) in v.iterates.windows(2).enumerate() {
                check(w[0].includes(&w[1]), || {
                    format!("#{k} ({seed:?}) iterate {} grows", n + 1)
                })?;
            }
            sweeps += v.iterates.len();
        }
    }
    Ok(format!(
        "200 automata simulate themselves; {sweeps} iterates descend inside H1 and H2 [{:.1?}]",
        start.elapsed()
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let p = GenParams::default();
    let mut regions = 0;
    let mut zeno = 0;
    for k in 0..100 {
        let a = random_tea(&mut rng, &p, "x");
        let z = zeno_regions(&a).map_err(|e| format!("#{k}: {e}"))?;
        let nz = non_zeno(&a).map_err(|e| format!("#{k}: {e}"))?;
        let u = nz.set.universe().clone();
        let aux: Vec<usize> = (0..u.dim()).filter(|&i| u.is_aux(i)).collect();
        let (set, reach) = (nz.set.eliminate(&aux, 0), nz.reach.eliminate(&aux, 0));
        for (i, r) in z.graph.regions.iter().enumerate() {
            let cell = region_set(&z.graph.space, r, &u);
            let is_zeno = z.zeno.contains(&i);
            let inside = reach.intersect(&cell);
            check(!inside.is_empty(), || {
                format!("#{k} region {r:?} is missing from the reachable states")
            })?;
            let ok = if is_zeno {
                set.intersect(&cell).is_empty()
            } else {
                set.includes(&inside)
            };
            check(ok, || format!("#{k} region {r:?}: zeno {is_zeno}\n{a:?}"))?;
        }
        regions += z.graph.regions.len();
        zeno += z.zeno.len();
    }
    let o = opts(Seed::ReachablePairs, true);
    for (label, c) in [
        ("desk", Family::Csma.desk_constants()),
        ("full", Family::Csma.constants()),
    ] {
        let (a, b) = bench::generate(Family::Csma, 1, Variant::NzOnly, &c).unwrap();
        let sim = simulation_check(&a, &b, &o).map_err(|e| e.to_string())?.holds;
        let nz = nz_simulation_check(&a, &b, &o).map_err(|e| e.to_string())?.holds;
        check(!sim && nz, || format!("CSMA nz-only ({label}): sim {sim}, nz-sim {nz}"))?;
    }
    let t = within(start, Duration::from_secs(300))?;
    Ok(format!(
        "100 automata: {regions} regions, {zeno} Zeno, all classified alike; CSMA nz-only: sim fails, NZ-sim holds [{t:.1?}]"
    ))
}

/// The states of one region, with every auxiliary variable left free.
fn region_set(space: &Space, r: &Region, u: &Arc<Universe>) -> SymbolicSet {
    let mut s = SymbolicSet::top(u);
    for (b, name) in space.props.iter().enumerate() {
        s = s.with_literal(u.prop(name).unwrap(), r.props >> b & 1 == 1);
    }
    let vars: Vec<usize> = space.clocks.iter().map(|c| u.var(c).unwrap()).collect();
    let cap = space.cap as i64;
    for (i, &x) in vars.iter().enumerate() {
        let n = r.ints[i] as i64;
        s = if n > cap {
            s.constrain(0, x, lt(-cap))
        } else if r.fracs[i] == 0 {
            s.constrain(x, 0, le(n)).constrain(0, x, le(-n))
        } else {
            s.constrain(x, 0, lt(n + 1)).constrain(0, x, lt(-n))
        };
    }
    for (i, &x) in vars.iter().enumerate() {
        for (j, &y) in vars.iter().enumerate() {
            let (fi, fj) = (r.fracs[i], r.fracs[j]);
            if i == j || fi == 0 || fj == 0 || r.ints[i] as i64 > cap || r.ints[j] as i64 > cap {
                continue;
            }
            let d = r.ints[i] as i64 - r.ints[j] as i64;
            if fi < fj {
                s = s.constrain(x, y, lt(d));
            } else if fi == fj {
                s = s.constrain(x, y, le(d));
            }
        }
    }
    s
}

fn expected(variant: Variant) -> (bool, bool) {
    match variant {
        Variant::Exists => (true, true),
        Variant::NzOnly => (false, true),
        Variant::Not => (false, false),
    }
}

fn verdicts(a: &Tea, b: &Tea) -> Result<(bool, bool), String> {
    let o = opts(Seed::ReachablePairs, true);
    let sim = simulation_check(a, b, &o).map_err(|e| e.to_string())?.holds;
    let nz = nz_simulation_check(a, b, &o).map_err(|e| e.to_string())?.holds;
    Ok((sim, nz))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    for family in Family::ALL {
        for &variant in family.variants() {
            let want = expected(variant);
            let (a, b) = bench::generate(family, 1, variant, &family.desk_constants()).unwrap();
            let truth = (oracle(&a, &b, false)?, oracle(&a, &b, true)?);
            check(truth == want, || {
                format!("{family} {variant}: oracle gives {truth:?} at desk constants")
            })?;
            check(verdicts(&a, &b)? == truth, || {
                format!("{family} {variant} m=1 desk: engine differs from oracle")
            })?;
            for m in [1, 2] {
                let (a, b) = bench::generate(family, m, variant, &family.constants()).unwrap();
                for scale in [Rational64::new(1, 13), Rational64::from_integer(1)] {
                    let (a, b) = bench::scale_pair(&a, &b, scale).map_err(|e| e.to_string())?;
                    let got = verdicts(&a, &b)?;
                    check(got == want, || {
                        format!("{family} {variant} m={m} scale {scale}: {got:?}, want {want:?}")
                    })?;
                }
            }
            rows.push(format!("{family}/{variant}={}{}", want.0 as u8, want.1 as u8));
        }
    }
    Ok(format!(
        "sim/nz pattern at m=1,2, scales 1/13 and 1: {} [{:.1?}]",
        rows.join(" "),
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- 10

const CHILD: &str = "ACCEPT_FISCHER5";

fn peak_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn fischer5_child(variant: &str) -> ExitCode {
    let variant: Variant = variant.parse().unwrap();
    let (a, b) = bench::generate(Family::Fischer, 5, variant, &Family::Fischer.constants()).unwrap();
    let start = Instant::now();
    let v = simulation_check(&a, &b, &opts(Seed::ReachablePairs, true)).unwrap();
    println!(
        "{} {} {}",
        v.holds,
        start.elapsed().as_secs_f64(),
        peak_kb().unwrap_or(0)
    );
    ExitCode::SUCCESS
}

fn criterion_10() -> Outcome {
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for variant in [Variant::Exists, Variant::Not] {
        let out = Command::new(&exe)
            .env(CHILD, variant.to_string())
            .output()
            .map_err(|e| e.to_string())?;
        let text = String::from_utf8_lossy(&out.stdout);
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [holds, secs, kb] = fields[..] else {
            return Err(format!(
                "{variant}: child failed: {}",
                String::from_utf8_lossy(&out.stderr)
            ));
        };
        let (holds, secs, kb): (bool, f64, u64) = (holds.parse().unwrap(), secs.parse().unwrap(), kb.parse().unwrap());
        check(holds == expected(variant).0, || format!("{variant}: verdict {holds}"))?;
        check(secs < 600.0, || format!("{variant}: {secs:.0} s"))?;
        check(kb < 2 * 1024 * 1024, || format!("{variant}: peak {} MB", kb / 1024))?;
        parts.push(format!("{variant} {secs:.1} s, peak {} MB", kb / 1024));
    }
    Ok(format!("Fischer m=5: {}", parts.join("; ")))
}

// ----------------------------------------------------------------

fn main() -> ExitCode {
    if let Ok(v) = std::env::var(CHILD) {
        return fischer5_child(&v);
    }
    let only: Option<Vec<u32>> = std::env::var("ACCEPT_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|n| n.trim().parse().ok()).collect());
    let wanted = |n: u32| only.as_ref().is_none_or(|o| o.contains(&n));
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut record = |n: u32, r: Outcome| {
        match &r {
            Ok(msg) => println!("criterion {n:>2}: PASS  {msg}"),
            Err(msg) => println!("criterion {n:>2}: FAIL  {msg}"),
        }
        results.push((n, r));
    };
    let singles: [(u32, fn() -> Outcome); 4] = [(1, criterion_1), (2, criterion_2), (3, criterion_3), (4, criterion_4)];
    for (n, f) in singles {
        if wanted(n) {
            record(n, f());
        }
    }
    if wanted(5) || wanted(7) {
        let (c5, c7) = criterion_5_and_7();
        for (n, r) in [(5, c5), (7, c7)] {
            if wanted(n) {
                record(n, r);
            }
        }
    }
    let singles: [(u32, fn() -> Outcome); 4] =
        [(6, criterion_6), (8, criterion_8), (9, criterion_9), (10, criterion_10)];
    for (n, f) in singles {
        if wanted(n) {
            record(n, f());
        }
    }
    let failed = results.iter().filter(|(_, r)| r.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
