use bratteli::algebra::{trace, Algebra, AlgebraElement};
use bratteli::cohomology::{distributions, limit_rank};
use bratteli::function::CylinderFunction;
use bratteli::io::{function_from_json, function_to_json};
use bratteli::measures::{cocycle_product, path_counts, tail_measure};
use bratteli::scalar::{format_rational, parse_rational};
use bratteli::space::PathSpace;
use bratteli::{builtin, LazyPath, OrderedDiagram, Rational, Tail};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["odo2", "odo3", "fib", "pisot31"])
}

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn function(space: &PathSpace, level: usize, raw: &[i64]) -> CylinderFunction<Rational> {
    CylinderFunction::from_fn(space, level, |i| rat(raw[i % raw.len()], 1 + (i % 3) as i64)).unwrap()
}

fn walk(d: &OrderedDiagram, mut x: LazyPath, steps: usize, forward: bool) -> LazyPath {
    for _ in 0..steps {
        x = if forward { d.successor(&x).unwrap() } else { d.predecessor(&x).unwrap() };
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn successor_is_a_bijection(name in name(), start in 0usize..300, steps in 0usize..300) {
        let d = builtin::by_name(name).unwrap();
        let x = walk(&d, LazyPath::min_path(), start, true);
        let there = walk(&d, x.clone(), steps, true);
        let back = walk(&d, there.clone(), steps, false);
        prop_assert_eq!(d.first_difference(&x, &back).unwrap(), None);
        if steps > 0 {
            prop_assert!(d.first_difference(&x, &there).unwrap().is_some());
        }
    }

    #[test]
    fn metric_is_an_ultrametric(name in name(), n in 1usize..7, picks in prop::array::uniform3(any::<prop::sample::Index>())) {
        let space = PathSpace::new(builtin::by_name(name).unwrap(), n).unwrap();
        let lambda = space.lambda();
        let count = space.table.count(n);
        let p: Vec<LazyPath> = picks.iter().map(|i| LazyPath::new(space.table.edges(n, i.index(count)), Tail::Min)).collect();
        let d = |a: &LazyPath, b: &LazyPath| space.diagram.metric(a, b, lambda).unwrap();
        prop_assert!(d(&p[0], &p[2]) <= d(&p[0], &p[1]).max(d(&p[1], &p[2])) * (1.0 + 1e-12));
        prop_assert_eq!(d(&p[0], &p[1]), d(&p[1], &p[0]));
        prop_assert_eq!(d(&p[0], &p[0]), 0.0);
    }

    #[test]
    fn enumeration_follows_the_order(name in name(), n in 1usize..7) {
        let d = builtin::by_name(name).unwrap();
        for v in 0..d.num_vertices(n).unwrap() {
            let paths = d.enumerate_paths(0, n, Some(v)).unwrap();
            for pair in paths.windows(2) {
                prop_assert_eq!(&d.step_prefix(&pair[0].edges, n, true).unwrap(), &pair[1].edges);
                prop_assert_eq!(&d.step_prefix(&pair[1].edges, n, false).unwrap(), &pair[0].edges);
            }
        }
    }

    #[test]
    fn cocycle_counts_paths(name in name(), m in 0usize..4, len in 1usize..5) {
        let d = builtin::by_name(name).unwrap();
        let n = m + len;
        let a = cocycle_product(&d, m, n).unwrap();
        let mut counts = vec![vec![0u64; d.num_vertices(m).unwrap()]; d.num_vertices(n).unwrap()];
        for p in d.enumerate_paths(m, n, None).unwrap() {
            let lv = d.level(m + 1).unwrap();
            let last = d.level(n).unwrap();
            counts[last.range(*p.edges.last().unwrap())][lv.source(p.edges[0])] += 1;
        }
        for (row, expect) in a.matrix.iter().zip(&counts) {
            for (x, y) in row.iter().zip(expect) {
                prop_assert_eq!(x, &BigInt::from(*y));
            }
        }
    }

    #[test]
    fn shift_drops_one_level(name in name(), k in 1usize..12) {
        let d = builtin::by_name(name).unwrap();
        let s = d.shift().unwrap();
        prop_assert_eq!(s.level(k).unwrap(), d.level(k + 1).unwrap());
    }

    #[test]
    fn rational_text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let x = rat(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn function_json_round_trip(name in name(), level in 0usize..4, raw in prop::collection::vec(-9i64..9, 1..8)) {
        let space = PathSpace::new(builtin::by_name(name).unwrap(), 4).unwrap();
        let h = function(&space, level, &raw);
        prop_assert_eq!(function_from_json(&space, &function_to_json(&h)).unwrap(), h);
    }

    #[test]
    fn diagram_json_round_trip(name in name()) {
        let d = builtin::by_name(name).unwrap();
        prop_assert_eq!(OrderedDiagram::from_json(&d.to_json()).unwrap(), d);
    }
}

#[test]
fn measure_propagates_back() {
    for name in builtin::NAMES {
        let d = builtin::by_name(name).unwrap();
        let m = tail_measure(&d, 8).unwrap();
        for k in 1..=8 {
            let lv = d.level(k).unwrap();
            let mut back = vec![Rational::zero(); lv.num_sources];
            for &(s, r) in &lv.edges {
                back[s] += &m.xi[k][r];
            }
            assert_eq!(back, m.xi[k - 1], "{name} level {k}");
            // total mass one
            let total: Rational = path_counts(&d, k)
                .unwrap()
                .iter()
                .zip(&m.xi[k])
                .map(|(c, x)| Rational::from_integer(c.clone()) * x)
                .sum();
            assert_eq!(total, rat(1, 1), "{name} level {k}");
        }
    }
}

// the invariant distributions annihilate coboundaries and pair with the
// constant function through the measure
proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distributions_kill_coboundaries(name in prop::sample::select(vec!["odo2", "fib", "pisot31"]), level in 0usize..3, raw in prop::collection::vec(-9i64..9, 1..6)) {
        let space = PathSpace::new(builtin::by_name(name).unwrap(), 9).unwrap();
        let tower = limit_rank(&space.diagram, &space.renorm, 5, 3).unwrap();
        let g = function(&space, level, &raw);
        let h = g.compose_phi(&space, 1).unwrap().sub(&space, &g).unwrap();
        prop_assert!(distributions(&space, &h, &tower).unwrap().all_zero());
        let one = CylinderFunction::constant(&space, rat(1, 1));
        prop_assert_eq!(&distributions(&space, &one, &tower).unwrap().values[0], &rat(1, 1));
    }

    #[test]
    fn algebra_star_laws(seed in 0u64..1000) {
        use rand::SeedableRng;
        let space = PathSpace::new(builtin::fib(), 10).unwrap();
        let tower = limit_rank(&space.diagram, &space.renorm, 5, 3).unwrap();
        let (alg, _) = Algebra::estimated(&space, 1.0, 4).unwrap();
        let alg = Algebra { level_cap: 10, ..alg };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = bratteli::algebra::random_element(&space, &mut rng, 3, 2, 2).unwrap();
        let b = bratteli::algebra::random_element(&space, &mut rng, 3, 2, 2).unwrap();
        let star = |x: &AlgebraElement<Rational>| alg.involution(x).unwrap();
        prop_assert!(star(&star(&a)).same(&space, &a).unwrap());
        let ab = alg.convolve(&a, &b).unwrap();
        let rhs = alg.convolve(&star(&b), &star(&a)).unwrap();
        prop_assert!(star(&ab).same(&space, &rhs).unwrap());
        // τ(ab) = τ(ba) and τ(a*a) ≥ 0 in the first coordinate
        let ba = alg.convolve(&b, &a).unwrap();
        prop_assert_eq!(trace(&space, &ab, &tower).unwrap(), trace(&space, &ba, &tower).unwrap());
        let aa = alg.convolve(&star(&a), &a).unwrap();
        prop_assert!(!trace(&space, &aa, &tower).unwrap()[0].is_negative());
    }
}
