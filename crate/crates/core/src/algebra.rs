//! Finitely supported elements `Σ a(k) u^k` of the crossed product, with
//! `u f u* = f∘φ^{-1}`: convolution, involution, weighted norms, Neumann
//! inversion and the traces `τ_i(a) = D_i(a(0))`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cohomology::{distributions, ClassTower};
use crate::error::{Error, Result};
use crate::function::{CylinderFunction, DEFAULT_LEVEL_CAP};
use crate::paths::{LazyPath, Tail};
use crate::scalar::Scalar;
use crate::space::PathSpace;
use crate::Rational;

/// Lower bound for `△_φ` from pairs of level-`L` cylinders.
#[derive(Clone, Debug, Serialize)]
pub struct TriangleEstimate {
    pub value: f64,
    pub level: usize,
    /// Path indices at `level` attaining `value`, if any pair exceeds 1.
    pub attained_pair: Option<(usize, usize)>,
}

/// Max of `d(φx, φy)/d(x, y)` and the same for `φ^{-1}` over `x, y` the
/// minimal-tail representatives of distinct level-`L` cylinders.
pub fn triangle_phi(space: &PathSpace, level: usize) -> Result<TriangleEstimate> {
    space.require(level)?;
    let d = &space.diagram;
    let lambda = space.lambda();
    let count = space.table.count(level);
    let reps: Vec<LazyPath> = (0..count).map(|i| LazyPath::new(space.table.edges(level, i), Tail::Min)).collect();
    let forward: Vec<LazyPath> = reps.iter().map(|x| d.successor(x)).collect::<Result<_>>()?;
    let backward: Vec<LazyPath> = reps.iter().map(|x| d.predecessor(x)).collect::<Result<_>>()?;
    let mut value = 1.0;
    let mut attained_pair = None;
    for i in 0..count {
        for j in (i + 1)..count {
            let base = d.metric(&reps[i], &reps[j], lambda)?;
            let r = d.metric(&forward[i], &forward[j], lambda)?.max(d.metric(&backward[i], &backward[j], lambda)?) / base;
            if r > value {
                value = r;
                attained_pair = Some((i, j));
            }
        }
    }
    Ok(TriangleEstimate { value, level, attained_pair })
}

/// Weights `△^{(α+s)|k|}` when `△ > 1`, `(1+|k|)^s` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum WeightRegime {
    Exponential(f64),
    Polynomial,
}

impl WeightRegime {
    pub fn from_triangle(triangle: f64) -> Self {
        if triangle > 1.0 + 1e-12 {
            WeightRegime::Exponential(triangle)
        } else {
            WeightRegime::Polynomial
        }
    }
}

/// `Σ a(k) u^k` with finitely many nonzero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<S> {
    pub coeffs: BTreeMap<i64, CylinderFunction<S>>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero() -> Self {
        AlgebraElement { coeffs: BTreeMap::new() }
    }

    pub fn monomial(k: i64, f: CylinderFunction<S>) -> Self {
        let mut coeffs = BTreeMap::new();
        if !f.is_zero() {
            coeffs.insert(k, f);
        }
        AlgebraElement { coeffs }
    }

    pub fn unit(space: &PathSpace) -> Self {
        Self::monomial(0, CylinderFunction::constant(space, S::one()))
    }

    pub fn from_map(coeffs: BTreeMap<i64, CylinderFunction<S>>) -> Self {
        AlgebraElement { coeffs: coeffs.into_iter().filter(|(_, f)| !f.is_zero()).collect() }
    }

    pub fn coeff(&self, k: i64) -> Option<&CylinderFunction<S>> {
        self.coeffs.get(&k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|k|` in the support.
    pub fn radius(&self) -> u64 {
        self.coeffs.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    fn insert_add(map: &mut BTreeMap<i64, CylinderFunction<S>>, space: &PathSpace, k: i64, f: CylinderFunction<S>) -> Result<()> {
        let merged = match map.remove(&k) {
            Some(g) => g.add(space, &f)?.reduce(space),
            None => f,
        };
        if !merged.is_zero() {
            map.insert(k, merged);
        }
        Ok(())
    }

    pub fn add(&self, space: &PathSpace, other: &Self) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        for (&k, f) in &other.coeffs {
            Self::insert_add(&mut coeffs, space, k, f.clone())?;
        }
        Ok(AlgebraElement { coeffs })
    }

    pub fn sub(&self, space: &PathSpace, other: &Self) -> Result<Self> {
        self.add(space, &other.scale(&(S::zero() - S::one())))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_map(self.coeffs.iter().map(|(&k, f)| (k, f.scale(c))).collect())
    }

    /// `P_n`: the coefficients with `|k| < n`.
    pub fn low_part(&self, n: u64) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().filter(|(k, _)| k.unsigned_abs() < n).map(|(&k, f)| (k, f.clone())).collect() }
    }

    /// `1 - P_n`.
    pub fn high_part(&self, n: u64) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().filter(|(k, _)| k.unsigned_abs() >= n).map(|(&k, f)| (k, f.clone())).collect() }
    }

    /// Equality as functions, ignoring the cylinder level of each coefficient.
    pub fn same(&self, space: &PathSpace, other: &Self) -> Result<bool> {
        if self.coeffs.len() != other.coeffs.len() {
            return Ok(false);
        }
        for ((k, f), (j, g)) in self.coeffs.iter().zip(&other.coeffs) {
            if k != j || !f.same_function(space, g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Norms of one element.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Norms {
    pub l1_alpha: f64,
    pub s_alpha: f64,
    pub mu_q: f64,
}

/// Operations on elements over a fixed path space, Hölder exponent and
/// weight regime.
#[derive(Clone, Copy, Debug)]
pub struct Algebra<'a> {
    pub space: &'a PathSpace,
    pub alpha: f64,
    pub lambda: f64,
    pub regime: WeightRegime,
    pub level_cap: usize,
}

impl<'a> Algebra<'a> {
    pub fn new(space: &'a PathSpace, alpha: f64, regime: WeightRegime) -> Self {
        Algebra { space, alpha, lambda: space.lambda(), regime, level_cap: DEFAULT_LEVEL_CAP }
    }

    /// Regime chosen from the `△_φ` estimate at `level`.
    pub fn estimated(space: &'a PathSpace, alpha: f64, level: usize) -> Result<(Self, TriangleEstimate)> {
        let t = triangle_phi(space, level)?;
        Ok((Self::new(space, alpha, WeightRegime::from_triangle(t.value)), t))
    }

    fn compose<S: Scalar>(&self, f: &CylinderFunction<S>, power: i64) -> Result<CylinderFunction<S>> {
        f.compose_phi_capped(self.space, power, self.level_cap)
    }

    /// `(ab)(k) = Σ_i a(i) · b(k-i)∘φ^{-i}`.
    pub fn convolve<S: Scalar>(&self, a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        let mut coeffs = BTreeMap::new();
        for (&i, ai) in &a.coeffs {
            for (&j, bj) in &b.coeffs {
                let term = ai.mul(self.space, &self.compose(bj, -i)?)?.reduce(self.space);
                AlgebraElement::insert_add(&mut coeffs, self.space, i + j, term)?;
            }
        }
        Ok(AlgebraElement { coeffs })
    }

    /// `a*(k) = a(-k)∘φ^{-k}`; coefficients are real.
    pub fn involution<S: Scalar>(&self, a: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        let mut coeffs = BTreeMap::new();
        for (&k, f) in &a.coeffs {
            coeffs.insert(-k, self.compose(f, k)?);
        }
        Ok(AlgebraElement { coeffs })
    }

    pub fn power<S: Scalar>(&self, a: &AlgebraElement<S>, n: usize) -> Result<AlgebraElement<S>> {
        let mut out = AlgebraElement::unit(self.space);
        for _ in 0..n {
            out = self.convolve(a, &out)?;
        }
        Ok(out)
    }

    /// `‖f‖_α = ‖f‖_∞ + |f|_α`.
    pub fn holder<S: Scalar>(&self, f: &CylinderFunction<S>) -> f64 {
        f.holder_norm(self.space, self.alpha, self.lambda)
    }

    pub fn weight(&self, s: f64, k: u64) -> f64 {
        match self.regime {
            WeightRegime::Exponential(t) => t.powf((self.alpha + s) * k as f64),
            WeightRegime::Polynomial => (1.0 + k as f64).powf(s),
        }
    }

    pub fn l1_alpha<S: Scalar>(&self, a: &AlgebraElement<S>) -> f64 {
        a.coeffs.values().map(|f| self.holder(f)).sum()
    }

    /// `‖a‖_{s,α}`.
    pub fn s_alpha<S: Scalar>(&self, a: &AlgebraElement<S>, s: f64) -> f64 {
        a.coeffs.iter().map(|(k, f)| self.holder(f) * self.weight(s, k.unsigned_abs())).sum()
    }

    /// `μ_q^α(a) = sup_N w_q(N) ‖(1 - P_N) a‖_{ℓ^1_α}`, with `w_q(N)` equal to
    /// `△^{(α+q)N}` or `(1+N)^q`.
    pub fn mu_q<S: Scalar>(&self, a: &AlgebraElement<S>, q: f64) -> f64 {
        let tail_weight = |n: u64| match self.regime {
            WeightRegime::Exponential(t) => t.powf((self.alpha + q) * n as f64),
            WeightRegime::Polynomial => (1.0 + n as f64).powf(q),
        };
        (0..=a.radius()).map(|n| tail_weight(n) * self.l1_alpha(&a.high_part(n))).fold(0.0, f64::max)
    }

    pub fn norms<S: Scalar>(&self, a: &AlgebraElement<S>, s: f64, q: f64) -> Norms {
        Norms { l1_alpha: self.l1_alpha(a), s_alpha: self.s_alpha(a, s), mu_q: self.mu_q(a, q) }
    }

    /// `Σ_{k<n} (Pf)^k (1-P)f f^{n-k-1} + (Pf)^n` with `P = P_{N^2}` keeping
    /// `|i| <= N^2`; equals `f^n`.
    pub fn telescoped_power<S: Scalar>(&self, f: &AlgebraElement<S>, n: usize, big_n: u64) -> Result<AlgebraElement<S>> {
        let cut = big_n * big_n + 1;
        let pf = f.low_part(cut);
        let qf = f.high_part(cut);
        let mut total = self.power(&pf, n)?;
        let mut pf_k = AlgebraElement::unit(self.space);
        for k in 0..n {
            let term = self.convolve(&self.convolve(&pf_k, &qf)?, &self.power(f, n - k - 1)?)?;
            total = total.add(self.space, &term)?;
            pf_k = self.convolve(&pf_k, &pf)?;
        }
        Ok(total)
    }

    /// Partial Neumann sum for `h^{-1} = Σ (1-h)^n`.
    pub fn neumann_invert<S: Scalar>(&self, h: &AlgebraElement<S>, tol: f64, max_terms: usize) -> Result<NeumannResult<S>> {
        let one = AlgebraElement::unit(self.space);
        let f = one.sub(self.space, h)?;
        let f_norm = self.s_alpha(&f, self.alpha);
        if f_norm >= 0.5 {
            return Err(Error::NeumannRegime(f_norm));
        }
        // ‖f^n‖_{ℓ^1_α} <= 2^{-n} by the submultiplicative bound
        let wanted = (1.0 / tol).log2().ceil().max(0.0) as usize;
        let limit = wanted.min(max_terms);
        let mut inverse = one.clone();
        let mut term = one.clone();
        let mut terms = 0;
        while terms < limit {
            term = self.convolve(&f, &term)?;
            if term.is_zero() {
                break;
            }
            inverse = inverse.add(self.space, &term)?;
            terms += 1;
        }
        let residual = self.l1_alpha(&self.convolve(h, &inverse)?.sub(self.space, &one)?);
        Ok(NeumannResult { inverse, terms, residual, f_norm, tail_bound: 0.5f64.powi(terms as i32 + 1) })
    }
}

/// Output of [`Algebra::neumann_invert`].
#[derive(Clone, Debug)]
pub struct NeumannResult<S> {
    pub inverse: AlgebraElement<S>,
    pub terms: usize,
    /// `‖h · inverse - 1‖_{ℓ^1_α}`.
    pub residual: f64,
    /// `‖1 - h‖_{α,α}`.
    pub f_norm: f64,
    pub tail_bound: f64,
}

/// `τ_i(a) = D_i(a(0))` for `i = 1..=d`.
pub fn trace(space: &PathSpace, a: &AlgebraElement<Rational>, tower: &ClassTower) -> Result<Vec<Rational>> {
    let zero = CylinderFunction::zero(space);
    let a0 = a.coeff(0).unwrap_or(&zero);
    Ok(distributions(space, a0, tower)?.values)
}

/// Random element with coefficients in `[-radius, radius]`, at most
/// `max_support` of them, each a level-`level` function with small rational
/// values.
pub fn random_element<R: Rng>(space: &PathSpace, rng: &mut R, max_support: usize, radius: i64, level: usize) -> Result<AlgebraElement<Rational>> {
    let size = rng.gen_range(1..=max_support);
    let mut coeffs = BTreeMap::new();
    for _ in 0..size {
        let k = rng.gen_range(-radius..=radius);
        let m = rng.gen_range(0..=level);
        let f = CylinderFunction::from_fn(space, m, |_| {
            Rational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into())
        })?;
        coeffs.insert(k, f);
    }
    Ok(AlgebraElement::from_map(coeffs))
}

/// Pass and fail counts of one property.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckCount {
    pub passed: usize,
    pub failed: usize,
}

impl CheckCount {
    fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

/// Results of [`property_suite`].
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub trials: usize,
    pub seed: u64,
    pub regime: WeightRegime,
    pub checks: BTreeMap<String, CheckCount>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.values().all(|c| c.failed == 0)
    }
}

/// Float inequality with a relative slack for rounding in the norms.
pub fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + 1e-9) + 1e-12
}

/// Exact algebraic identities and norm inequalities on random elements.
/// Trace checks run when a class tower is given.
pub fn property_suite(alg: &Algebra, tower: Option<&ClassTower>, seed: u64, trials: usize) -> Result<SuiteReport> {
    let space = alg.space;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks: BTreeMap<String, CheckCount> = BTreeMap::new();
    let mut check = |name: &str, ok: bool| checks.entry(name.to_string()).or_default().record(ok);
    for _ in 0..trials {
        let a = random_element(space, &mut rng, 3, 2, 2)?;
        let b = random_element(space, &mut rng, 3, 2, 2)?;
        let c = random_element(space, &mut rng, 2, 1, 1)?;
        let ab = alg.convolve(&a, &b)?;
        let ba = alg.convolve(&b, &a)?;
        check("associativity", alg.convolve(&ab, &c)?.same(space, &alg.convolve(&a, &alg.convolve(&b, &c)?)?)?);
        let a_star = alg.involution(&a)?;
        check("involutive", alg.involution(&a_star)?.same(space, &a)?);
        let b_star = alg.involution(&b)?;
        check("star_antimultiplicative", alg.involution(&ab)?.same(space, &alg.convolve(&b_star, &a_star)?)?);
        for s in [0.5, 1.0] {
            check("product_bound", leq(alg.s_alpha(&ab, s), alg.s_alpha(&a, s + alg.alpha) * alg.s_alpha(&b, s)));
            check("involution_bound", leq(alg.s_alpha(&a_star, s), alg.s_alpha(&a, s + alg.alpha)));
        }
        for q in [1.0, 2.0] {
            check("mu_below_norm", leq(alg.mu_q(&a, q), alg.s_alpha(&a, q)));
            if let WeightRegime::Exponential(t) = alg.regime {
                let e = alg.alpha + q;
                let factor = 2.0 * t.powf(2.0 * e) / (1.0 - t.powf(-e));
                check("norm_below_mu", leq(alg.s_alpha(&a, q), factor * alg.mu_q(&a, 2.0 * q + alg.alpha)));
            }
        }
        let n = rng.gen_range(1..=4);
        let big_n = rng.gen_range(1..=2);
        check("telescoped_power", alg.telescoped_power(&a, n, big_n)?.same(space, &alg.power(&a, n)?)?);
        if let Some(t) = tower {
            check("tracial", trace(space, &ab, t)? == trace(space, &ba, t)?);
            let tau = trace(space, &alg.convolve(&a_star, &a)?, t)?;
            check("trace_positive", tau[0] >= Rational::from_integer(0.into()));
        }
    }
    Ok(SuiteReport { trials, seed, regime: alg.regime, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn odometer_is_an_isometry() {
        let space = PathSpace::new(builtin::odo2(), 8).unwrap();
        for level in 1..=7 {
            let t = triangle_phi(&space, level).unwrap();
            assert_eq!(t.value, 1.0);
            assert!(t.attained_pair.is_none());
        }
    }

    #[test]
    fn unit_and_conjugation() {
        let space = PathSpace::new(builtin::fib(), 10).unwrap();
        let alg = Algebra::new(&space, 1.0, WeightRegime::Polynomial);
        let f = CylinderFunction::from_fn(&space, 2, |i| r(i as i64 * 2 - 3)).unwrap();
        let b = AlgebraElement::monomial(0, f.clone()).add(&space, &AlgebraElement::monomial(2, f.clone())).unwrap();
        let one = AlgebraElement::unit(&space);
        assert!(alg.convolve(&one, &b).unwrap().same(&space, &b).unwrap());
        assert!(alg.convolve(&b, &one).unwrap().same(&space, &b).unwrap());
        // u f u* = f∘φ^{-1}
        let u = AlgebraElement::monomial(1, CylinderFunction::constant(&space, r(1)));
        let ustar = alg.involution(&u).unwrap();
        let conj = alg.convolve(&alg.convolve(&u, &AlgebraElement::monomial(0, f.clone())).unwrap(), &ustar).unwrap();
        let expected = AlgebraElement::monomial(0, f.compose_phi(&space, -1).unwrap());
        assert!(conj.same(&space, &expected).unwrap());
    }

    #[test]
    fn neumann_trivial_and_small() {
        let space = PathSpace::new(builtin::odo2(), 6).unwrap();
        let alg = Algebra::new(&space, 1.0, WeightRegime::Polynomial);
        let one = AlgebraElement::<f64>::unit(&space);
        let res = alg.neumann_invert(&one, 1e-10, 100).unwrap();
        assert_eq!(res.terms, 0);
        assert!(res.inverse.same(&space, &one).unwrap());
        let digit = CylinderFunction::from_fn(&space, 1, |i| i as f64).unwrap();
        // 0.3 times the first digit has ‖·‖_α = 0.6
        let h = one.sub(&space, &AlgebraElement::monomial(0, digit.scale(&0.3))).unwrap();
        assert!(matches!(alg.neumann_invert(&h, 1e-10, 100), Err(Error::NeumannRegime(_))));
        let h = one.sub(&space, &AlgebraElement::monomial(0, digit.scale(&0.2))).unwrap();
        let res = alg.neumann_invert(&h, 1e-10, 100).unwrap();
        assert!(res.residual < 1e-10, "{}", res.residual);
        assert!(res.terms >= 30);
    }

    #[test]
    fn suite_on_odo2_and_fib() {
        for (name, depth) in [("odo2", 10), ("fib", 14)] {
            let space = PathSpace::new(builtin::by_name(name).unwrap(), depth).unwrap();
            let tower = crate::cohomology::limit_rank(&space.diagram, &space.renorm, 5, 3).unwrap();
            let (alg, _) = Algebra::estimated(&space, 1.0, 4).unwrap();
            let rep = property_suite(&alg, Some(&tower), 7, 5).unwrap();
            assert!(rep.all_passed(), "{name}: {:?}", rep.checks);
        }
    }
}
