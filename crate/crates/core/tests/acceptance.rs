//! Acceptance criteria 1-10. Each test prints one `criterion N: PASS|FAIL`
//! line and then asserts.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use bratteli::algebra::{Algebra, AlgebraElement, WeightRegime};
use bratteli::algebra::trace;
use bratteli::cohomology::{distributions, is_coboundary_class, limit_rank, ClassTower};
use bratteli::function::CylinderFunction;
use bratteli::martingale::{delta, project};
use bratteli::solenoid::{edge_lengths, wrapping, Conjugacy};
use bratteli::solver::{birkhoff, regularity_report, solve};
use bratteli::space::PathSpace;
use bratteli::{builtin, LazyPath, OrderedDiagram, Rational};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: usize, ok: bool, detail: &str) {
    // written past the test harness capture so the line shows on every run
    let line = format!("criterion {n}: {} ({detail})\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {n} failed: {detail}");
}

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn random_function(space: &PathSpace, rng: &mut ChaCha8Rng, level: usize) -> CylinderFunction<Rational> {
    CylinderFunction::from_fn(space, level, |_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))).unwrap()
}

fn setup(name: &str, depth: usize) -> (PathSpace, ClassTower) {
    let space = PathSpace::new(builtin::by_name(name).unwrap(), depth).unwrap();
    let tower = limit_rank(&space.diagram, &space.renorm, 5, 3).unwrap();
    (space, tower)
}

/// Rank of an integer matrix by fraction-free elimination over `i128`.
fn int_rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let (a, b) = (m[rank][c], m[r][c]);
                for k in 0..cols {
                    m[r][k] = m[r][k] * a - m[rank][k] * b;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn int_matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    (0..a.len())
        .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// Eventual rank of the period block: the number of nonzero eigenvalues
/// counted with multiplicity, which is the obstruction count for these
/// one-block stationary diagrams.
fn eventual_rank(d: &OrderedDiagram) -> usize {
    let n = d.materialized();
    let p = d.period();
    let mut block: Option<Vec<Vec<i128>>> = None;
    for k in (n - p + 1)..=n {
        let a: Vec<Vec<i128>> = d.level(k).unwrap().matrix().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        block = Some(match block {
            None => a,
            Some(b) => int_matmul(&a, &b),
        });
    }
    let block = block.unwrap();
    let mut power = block.clone();
    for _ in 0..block.len() {
        power = int_matmul(&power, &block);
    }
    int_rank(power)
}

#[test]
fn criterion_01_obstruction_count() {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, expected) in [("odo2", 1), ("fib", 2)] {
        let start = Instant::now();
        let d = builtin::by_name(name).unwrap();
        let space = PathSpace::new(d.clone(), 3).unwrap();
        let tower = limit_rank(&space.diagram, &space.renorm, 5, 3).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let oracle = eventual_rank(&d);
        ok &= tower.d == expected && oracle == expected && tower.k_prime <= 5 && elapsed < 1.0;
        detail.push(format!("{name}: d={} oracle={oracle} k'={} {elapsed:.3}s", tower.d, tower.k_prime));
    }
    report(1, ok, &detail.join(", "));
}

#[test]
fn criterion_02_round_trip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    let mut total = 0;
    for name in ["odo2", "fib"] {
        let (space, tower) = setup(name, 12);
        for _ in 0..200 {
            let level = rng.gen_range(0..=3);
            let g0 = random_function(&space, &mut rng, level);
            let f = g0.compose_phi(&space, 1).unwrap().sub(&space, &g0).unwrap();
            let dist = distributions(&space, &f, &tower).unwrap();
            let sol = solve(&space, &f, &tower).unwrap();
            let diff = sol.g.sub(&space, &g0).unwrap();
            let constant = diff.values().iter().all(|x| x == &diff.values()[0]);
            total += 1;
            if !(dist.all_zero() && sol.residual.is_zero() && constant) {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(2, failures == 0 && elapsed < 30.0, &format!("{failures}/{total} failures, {elapsed:.2}s"));
}

#[test]
fn criterion_03_obstruction_completeness() {
    let (space, tower) = setup("odo2", 8);
    let d = &space.diagram;
    let height = space.table.count(2);
    let mut agree = 0;
    let mut total = 0;
    for code in 0..3usize.pow(height as u32) {
        let h = CylinderFunction::from_fn(&space, 2, |i| rat(((code / 3usize.pow(i as u32)) % 3) as i64 - 1, 1))
            .unwrap();
        // sums along the orbit of the minimal path over 64 tower cycles;
        // bounded iff every full cycle sums to zero
        let mut x = LazyPath::min_path();
        let mut s = Rational::zero();
        let mut bounded = true;
        for n in 1..=64 * height {
            s += h.eval(&space, &x).unwrap();
            x = d.successor(&x).unwrap();
            if n.is_multiple_of(height) && !s.is_zero() {
                bounded = false;
            }
        }
        let certified = is_coboundary_class(&space, &h, &tower).unwrap().coboundary;
        total += 1;
        if certified == bounded {
            agree += 1;
        }
    }
    report(3, agree == total, &format!("{agree}/{total} agree"));
}

#[test]
fn criterion_04_lyapunov() {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let fib = PathSpace::new(builtin::fib(), 4).unwrap();
    let pisot = PathSpace::new(builtin::pisot31(), 3).unwrap();
    let e_fib = (fib.lambda() - golden).abs();
    let e_pisot = (pisot.lambda() - 4.0).abs();
    let residual = fib.renorm.roof_residual.max(pisot.renorm.roof_residual);
    report(
        4,
        e_fib <= 1e-9 && e_pisot <= 1e-9 && residual <= 1e-12,
        &format!("fib err {e_fib:e}, pisot31 err {e_pisot:e}, roof residual {residual:e}"),
    );
}

#[test]
fn criterion_05_stretch_identity() {
    let mut worst: f64 = 0.0;
    let mut bounded = true;
    for name in ["odo2", "fib", "pisot31"] {
        let space = PathSpace::new(builtin::by_name(name).unwrap(), 2).unwrap();
        let d = &space.diagram;
        let lambda = space.lambda();
        // |e_v|_k = λ^{-k} (A_k ... A_1 l)_v, built level by level
        let mut lengths = vec![space.renorm.roof.clone()];
        for k in 1..=10 {
            let a = d.level(k).unwrap().matrix();
            let prev = &lengths[k - 1];
            let next: Vec<f64> = a.iter().map(|row| row.iter().zip(prev).map(|(&x, l)| x as f64 * l).sum::<f64>() / lambda).collect();
            lengths.push(next);
        }
        for k in 1..=10 {
            let level = d.level(k).unwrap();
            for (v, order) in level.in_order.iter().enumerate() {
                let total: f64 = order.iter().map(|&e| lengths[k - 1][level.source(e)]).sum();
                worst = worst.max((total - lambda * lengths[k][v]).abs());
            }
            // library lengths and wrapping maps against the recursion
            let lib = edge_lengths(d, &space.renorm, k).unwrap();
            for (x, y) in lib.iter().zip(&lengths[k]) {
                worst = worst.max((x - y).abs());
            }
            worst = worst.max(wrapping(d, &space.renorm, k).unwrap().max_error);
        }
        // λ is the right scale: lengths neither collapse nor blow up
        let top = lengths[10].iter().cloned().fold(0.0, f64::max);
        let bottom = lengths[10].iter().cloned().fold(f64::INFINITY, f64::min);
        bounded &= bottom > 1e-3 && top < 1e3;
    }
    report(5, worst <= 1e-9 && bounded, &format!("max error {worst:e}, lengths bounded: {bounded}"));
}

#[test]
fn criterion_06_martingale_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let spaces: Vec<PathSpace> = [("odo2", 5), ("fib", 5), ("pisot31", 3)]
        .iter()
        .map(|(n, k)| PathSpace::new(builtin::by_name(n).unwrap(), *k).unwrap())
        .collect();
    let mut failures = 0;
    for t in 0..500 {
        let space = &spaces[t % 3];
        let level = rng.gen_range(0..=space.depth());
        let h = random_function(space, &mut rng, level);
        let mut sum = CylinderFunction::zero(space);
        let mut ok = true;
        for k in 0..=level {
            let dk = delta(space, &h, k).unwrap();
            if k >= 1 {
                ok &= dk.mean(space).unwrap().is_zero();
                ok &= project(space, &dk, k - 1).unwrap().is_zero();
            }
            sum = sum.add(space, &dk).unwrap();
        }
        ok &= sum.same_function(space, &h).unwrap();
        let (j, k) = (rng.gen_range(0..=level), rng.gen_range(0..=level));
        let lhs = project(space, &project(space, &h, k).unwrap(), j).unwrap();
        ok &= lhs.same_function(space, &project(space, &h, j.min(k)).unwrap()).unwrap();
        if !ok {
            failures += 1;
        }
    }
    report(6, failures == 0, &format!("{failures}/500 failures"));
}

#[test]
fn criterion_07_deviation_exponent() {
    let start = Instant::now();
    let (space, tower) = setup("pisot31", 6);
    // second eigenvector (1, -1) of [[3,1],[1,3]] on the level-0 cylinders
    let h = CylinderFunction::from_fn(&space, 0, |v| if v == 0 { Rational::one() } else { -Rational::one() }).unwrap();
    let mean_zero = h.mean(&space).unwrap().is_zero();
    let dist = distributions(&space, &h, &tower).unwrap();
    let oracle = 2f64.ln() / 4f64.ln();
    let rep = birkhoff(&space, &h, &LazyPath::min_path(), 1_000_000).unwrap();
    let exponent_ok = (rep.exponent - oracle).abs() <= 0.1 && rep.r_squared >= 0.9;

    // solved coboundary: |S_n| <= 2 ‖g‖_∞, exactly
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g0 = random_function(&space, &mut rng, 2);
    let f = g0.compose_phi(&space, 1).unwrap().sub(&space, &g0).unwrap();
    let g = solve(&space, &f, &tower).unwrap().g;
    let bound = g.values().iter().map(|x| x.abs()).max().unwrap() * Rational::from_integer(2.into());
    let mut x = LazyPath::min_path();
    let mut s = Rational::zero();
    let mut bounded = true;
    for _ in 0..1_000_000 {
        s += f.eval(&space, &x).unwrap();
        x = space.diagram.successor(&x).unwrap();
        if s.abs() > bound {
            bounded = false;
            break;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        7,
        mean_zero && !dist.values[1].is_zero() && exponent_ok && bounded && elapsed < 120.0,
        &format!(
            "exponent {:.4} (oracle {oracle:.4}), R^2 {:.4}, D_2 = {}, bounded sums {bounded}, {elapsed:.1}s",
            rep.exponent, rep.r_squared, dist.values[1]
        ),
    );
}

#[test]
fn criterion_08_metric_sandwich() {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in ["odo2", "fib"] {
        // glued endpoints can hide the first difference below level 8, so
        // each cylinder is represented by a point four levels deeper
        let deep = 12;
        let space = PathSpace::new(builtin::by_name(name).unwrap(), deep).unwrap();
        let lambda = space.lambda();
        let conj = Conjugacy::new(&space, deep).unwrap();
        let count = space.table.count(8);
        let paths: Vec<Vec<usize>> = (0..count).map(|i| space.table.edges(8, i)).collect();
        let points: Vec<_> = paths
            .iter()
            .map(|p| {
                let mut e = p.clone();
                for k in 9..=deep {
                    let lv = space.diagram.level(k).unwrap();
                    let v = space.diagram.level(k - 1).unwrap().range(*e.last().unwrap());
                    e.push((0..lv.edges.len()).find(|&f| lv.source(f) == v).unwrap());
                }
                conj.point(&space, deep, space.table.index_of(&space.diagram, &e).unwrap())
            })
            .collect();
        let mut violations = 0;
        let mut lower = f64::INFINITY;
        for i in 0..count {
            for j in (i + 1)..count {
                let k = paths[i].iter().zip(&paths[j]).position(|(a, b)| a != b).unwrap() + 1;
                let dist = lambda.powi(1 - k as i32);
                let dbar = conj.metric(&points[i], &points[j], lambda);
                if dbar > dist / (lambda - 1.0) * (1.0 + 1e-12) {
                    violations += 1;
                }
                lower = lower.min(dbar / dist);
            }
        }
        ok &= violations == 0 && lower > 0.0;
        detail.push(format!("{name}: {violations} violations over {} pairs, K = {lower:.6}", count * (count - 1) / 2));
    }
    report(8, ok, &detail.join("; "));
}

fn random_element(space: &PathSpace, rng: &mut ChaCha8Rng, support: usize, radius: i64, level: usize) -> AlgebraElement<Rational> {
    let mut coeffs = BTreeMap::new();
    for _ in 0..rng.gen_range(1..=support) {
        let k = rng.gen_range(-radius..=radius);
        let m = rng.gen_range(0..=level);
        coeffs.insert(k, random_function(space, rng, m));
    }
    AlgebraElement::from_map(coeffs)
}

fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + 1e-9) + 1e-12
}

#[test]
fn criterion_09_algebra_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures: BTreeMap<&str, usize> = BTreeMap::new();
    let mut fail = |name: &'static str, ok: bool| {
        if !ok {
            *failures.entry(name).or_default() += 1;
        }
    };
    let alpha = 1.0;
    let mut neumann_worst: f64 = 0.0;
    let mut neumann_runs = 0;
    for (name, depth) in [("odo2", 12), ("fib", 16)] {
        let (space, tower) = setup(name, depth);
        let (alg, _) = Algebra::estimated(&space, alpha, 6).unwrap();
        let alg = Algebra { level_cap: depth, ..alg };
        for _ in 0..100 {
            let a = random_element(&space, &mut rng, 5, 2, 3);
            let b = random_element(&space, &mut rng, 5, 2, 3);
            let ab = alg.convolve(&a, &b).unwrap();
            let a_star = alg.involution(&a).unwrap();
            for s in [0.5, 1.0, 2.0] {
                fail("product", leq(alg.s_alpha(&ab, s), alg.s_alpha(&a, s + alpha) * alg.s_alpha(&b, s)));
                fail("involution", leq(alg.s_alpha(&a_star, s), alg.s_alpha(&a, s + alpha)));
            }
            for q in [1.0, 2.0, 3.0] {
                fail("mu_below_norm", leq(alg.mu_q(&a, q), alg.s_alpha(&a, q)));
                if let WeightRegime::Exponential(t) = alg.regime {
                    let e = alpha + q;
                    let factor = 2.0 * t.powf(2.0 * e) / (1.0 - t.powf(-e));
                    fail("norm_below_mu", leq(alg.s_alpha(&a, q), factor * alg.mu_q(&a, 2.0 * q + alpha)));
                }
            }
            let n = rng.gen_range(1..=4);
            let big_n = rng.gen_range(1..=2);
            let f = random_element(&space, &mut rng, 3, 2, 2);
            fail("telescoping", alg.telescoped_power(&f, n, big_n).unwrap().same(&space, &alg.power(&f, n).unwrap()).unwrap());
        }
        for _ in 0..50 {
            let a = random_element(&space, &mut rng, 2, 1, 2);
            let b = random_element(&space, &mut rng, 2, 1, 2);
            let ab = alg.convolve(&a, &b).unwrap();
            let ba = alg.convolve(&b, &a).unwrap();
            fail("tracial", trace(&space, &ab, &tower).unwrap() == trace(&space, &ba, &tower).unwrap());
        }
        for _ in 0..20 {
            let f = random_element(&space, &mut rng, 3, 1, 2);
            let f: AlgebraElement<f64> = AlgebraElement::from_map(
                f.coeffs.iter().map(|(&k, c)| (k, bratteli::function::convert::<f64>(c))).collect(),
            );
            let norm = alg.s_alpha(&f, alpha);
            let f = f.scale(&(rng.gen_range(0.05..0.49) / norm));
            let h = AlgebraElement::unit(&space).sub(&space, &f).unwrap();
            let res = alg.neumann_invert(&h, 1e-10, 200).unwrap();
            neumann_runs += 1;
            neumann_worst = neumann_worst.max(res.residual);
            fail("neumann", res.residual <= 1e-10);
        }
    }
    report(
        9,
        failures.is_empty(),
        &format!("failures {failures:?}; {neumann_runs} inversions, worst residual {neumann_worst:e}"),
    );
}

#[test]
fn criterion_10_norm_loss() {
    let (space, tower) = setup("odo2", 12);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_ratio: f64 = 0.0;
    let mut ok = true;
    for _ in 0..100 {
        let level = rng.gen_range(1..=4);
        let g0 = random_function(&space, &mut rng, level);
        let h = g0.compose_phi(&space, 1).unwrap().sub(&space, &g0).unwrap();
        let sol = solve(&space, &h, &tower).unwrap();
        let row = &regularity_report(&space, &h, &sol.g, 3.0, &[0.25]).unwrap()[0];
        ok &= row.empirical_k.is_finite() && row.chained.is_finite() && row.empirical_k <= row.chained;
        worst_ratio = worst_ratio.max(row.empirical_k / row.chained);
    }
    report(10, ok, &format!("max K / chained constant = {worst_ratio:.3e}"));
}
