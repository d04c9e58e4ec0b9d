use std::ops::{Add, Mul, Neg, Sub};

use crate::diagram::Extreme;
use crate::error::{Error, Result};
use crate::measures::rational_to;
use crate::paths::LazyPath;
use crate::scalar::Scalar;
use crate::space::PathSpace;

/// Composition raises cylinder levels; refuse beyond this by default.
pub const DEFAULT_LEVEL_CAP: usize = 20;

/// A function on the path space constant on level-`m` cylinders, stored by
/// path index in `E_{0,m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFunction<S> {
    level: usize,
    values: Vec<S>,
}

impl<S: Scalar> CylinderFunction<S> {
    pub fn new(space: &PathSpace, level: usize, values: Vec<S>) -> Result<Self> {
        space.require(level)?;
        let expected = space.table.count(level);
        if values.len() != expected {
            return Err(Error::Invalid(format!(
                "level {level} needs {expected} values, got {}",
                values.len()
            )));
        }
        Ok(CylinderFunction { level, values })
    }

    pub fn constant(space: &PathSpace, c: S) -> Self {
        CylinderFunction { level: 0, values: vec![c; space.table.count(0)] }
    }

    pub fn zero(space: &PathSpace) -> Self {
        Self::constant(space, S::zero())
    }

    pub fn from_fn(space: &PathSpace, level: usize, f: impl FnMut(usize) -> S) -> Result<Self> {
        space.require(level)?;
        Ok(CylinderFunction { level, values: (0..space.table.count(level)).map(f).collect() })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, index: usize) -> &S {
        &self.values[index]
    }

    /// Same function seen on level `k >= level`.
    pub fn lift(&self, space: &PathSpace, k: usize) -> Result<Self> {
        if k < self.level {
            return Err(Error::Invalid(format!("cannot lift level {} to {k}", self.level)));
        }
        if k == self.level {
            return Ok(self.clone());
        }
        space.require(k)?;
        let values = (0..space.table.count(k))
            .map(|i| self.values[space.table.ancestor(k, i, self.level)].clone())
            .collect();
        Ok(CylinderFunction { level: k, values })
    }

    /// Smallest level on which the function is still a cylinder function.
    pub fn reduce(&self, space: &PathSpace) -> Self {
        let mut current = self.clone();
        while current.level > 0 {
            let k = current.level - 1;
            let lvl = space.table.level(current.level);
            let mut coarse: Vec<Option<S>> = vec![None; space.table.count(k)];
            let mut ok = true;
            for (i, v) in current.values.iter().enumerate() {
                let p = lvl.parent[i];
                match &coarse[p] {
                    None => coarse[p] = Some(v.clone()),
                    Some(w) if w == v => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            current = CylinderFunction { level: k, values: coarse.into_iter().map(|x| x.expect("every prefix extends")).collect() };
        }
        current
    }

    pub fn eval(&self, space: &PathSpace, p: &LazyPath) -> Result<S> {
        if self.level == 0 {
            let v = space.diagram.level(1)?.source(space.diagram.edge_at(p, 1)?);
            return Ok(self.values[v].clone());
        }
        let edges = space.diagram.prefix_of(p, self.level)?;
        self.eval_edges(space, &edges)
    }

    /// Value on the cylinder of `edges` (at least `level` edges long).
    pub fn eval_edges(&self, space: &PathSpace, edges: &[usize]) -> Result<S> {
        if self.level == 0 {
            let first = edges.first().ok_or_else(|| Error::Invalid("empty path".into()))?;
            return Ok(self.values[space.diagram.level(1)?.source(*first)].clone());
        }
        let index = space.table.index_of(&space.diagram, &edges[..self.level])?;
        Ok(self.values[index].clone())
    }

    fn zip_with(&self, space: &PathSpace, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        let k = self.level.max(other.level);
        let a = self.lift(space, k)?;
        let b = other.lift(space, k)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| f(x, y)).collect();
        Ok(CylinderFunction { level: k, values })
    }

    pub fn add(&self, space: &PathSpace, other: &Self) -> Result<Self> {
        self.zip_with(space, other, |x, y| x.clone() + y.clone())
    }

    pub fn sub(&self, space: &PathSpace, other: &Self) -> Result<Self> {
        self.zip_with(space, other, |x, y| x.clone() - y.clone())
    }

    pub fn mul(&self, space: &PathSpace, other: &Self) -> Result<Self> {
        self.zip_with(space, other, |x, y| x.clone() * y.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        CylinderFunction { level: self.level, values: self.values.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|x| x.is_zero())
    }

    /// Pointwise equality as functions on the path space.
    pub fn same_function(&self, space: &PathSpace, other: &Self) -> Result<bool> {
        let k = self.level.max(other.level);
        Ok(self.lift(space, k)?.values == other.lift(space, k)?.values)
    }

    /// `h ∘ φ^power`, exact; the level grows by the carry depth of each step.
    pub fn compose_phi(&self, space: &PathSpace, power: i64) -> Result<Self> {
        self.compose_phi_capped(space, power, DEFAULT_LEVEL_CAP)
    }

    pub fn compose_phi_capped(&self, space: &PathSpace, power: i64, cap: usize) -> Result<Self> {
        let mut current = self.clone();
        for _ in 0..power.unsigned_abs() {
            current = current.compose_once(space, power > 0, cap)?.reduce(space);
        }
        Ok(current)
    }

    fn compose_once(&self, space: &PathSpace, forward: bool, cap: usize) -> Result<Self> {
        let d = &space.diagram;
        let m = self.level;
        let which = if forward { Extreme::Min } else { Extreme::Max };
        let top = d.carry_depth(m, which, cap)?.max(1);
        if top > cap {
            return Err(Error::LevelCap { level: top, cap });
        }
        space.require(top)?;
        let mut values = Vec::with_capacity(space.table.count(top));
        for i in 0..space.table.count(top) {
            let edges = space.table.edges(top, i);
            let image = d.step_prefix(&edges, m.max(1), forward)?;
            values.push(self.eval_edges(space, &image)?);
        }
        Ok(CylinderFunction { level: top, values })
    }

    /// `ν`-integral.
    pub fn mean(&self, space: &PathSpace) -> Result<S> {
        let xi: Vec<S> = space.measure.level_as(self.level)?;
        let lvl = space.table.level(self.level);
        Ok(self
            .values
            .iter()
            .zip(&lvl.range)
            .fold(S::zero(), |acc, (v, &r)| acc + v.clone() * xi[r].clone()))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|x| x.abs().to_real()).fold(0.0, f64::max)
    }

    /// `(‖h‖_∞, |h|_α)` for the metric `λ^{1-k}`. Exact up to the float
    /// conversion of the final ratio.
    pub fn holder(&self, space: &PathSpace, alpha: f64, lambda: f64) -> (f64, f64) {
        let sup = self.sup_norm();
        let m = self.level;
        if m == 0 {
            // distinct vertices of V_0 disagree at level 1
            return (sup, spread(self.values.iter()));
        }
        let mut hi: Vec<S> = self.values.clone();
        let mut lo: Vec<S> = self.values.clone();
        let mut semi: f64 = 0.0;
        for j in (0..m).rev() {
            let lvl = space.table.level(j + 1);
            let count = space.table.count(j);
            let mut nhi: Vec<Option<S>> = vec![None; count];
            let mut nlo: Vec<Option<S>> = vec![None; count];
            for i in 0..lvl.len() {
                let p = lvl.parent[i];
                if nhi[p].as_ref().is_none_or(|x| hi[i] > *x) {
                    nhi[p] = Some(hi[i].clone());
                }
                if nlo[p].as_ref().is_none_or(|x| lo[i] < *x) {
                    nlo[p] = Some(lo[i].clone());
                }
            }
            hi = nhi.into_iter().map(|x| x.expect("prefix extends")).collect();
            lo = nlo.into_iter().map(|x| x.expect("prefix extends")).collect();
            if j >= 1 {
                let weight = lambda.powf(j as f64 * alpha);
                for (a, b) in hi.iter().zip(&lo) {
                    semi = semi.max((a.clone() - b.clone()).to_real() * weight);
                }
            }
        }
        let top = hi.iter().chain(lo.iter());
        semi = semi.max(spread(top));
        (sup, semi)
    }

    /// `‖h‖_α = ‖h‖_∞ + |h|_α`.
    pub fn holder_norm(&self, space: &PathSpace, alpha: f64, lambda: f64) -> f64 {
        let (s, h) = self.holder(space, alpha, lambda);
        s + h
    }
}

fn spread<'a, S: Scalar + 'a>(mut values: impl Iterator<Item = &'a S>) -> f64 {
    let Some(first) = values.next() else { return 0.0 };
    let (mut hi, mut lo) = (first.clone(), first.clone());
    for v in values {
        if *v > hi {
            hi = v.clone();
        }
        if *v < lo {
            lo = v.clone();
        }
    }
    (hi - lo).to_real()
}

impl<S: Scalar> Neg for &CylinderFunction<S> {
    type Output = CylinderFunction<S>;
    fn neg(self) -> CylinderFunction<S> {
        self.map(|x| -x.clone())
    }
}

/// Same-level arithmetic without a space (levels must agree).
macro_rules! same_level_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<S: Scalar> $trait for &CylinderFunction<S> {
            type Output = CylinderFunction<S>;
            fn $method(self, rhs: Self) -> CylinderFunction<S> {
                assert_eq!(self.level, rhs.level, "levels differ; lift first");
                CylinderFunction {
                    level: self.level,
                    values: self.values.iter().zip(&rhs.values).map(|(a, b)| a.clone() $op b.clone()).collect(),
                }
            }
        }
    };
}

same_level_op!(Add, add, +);
same_level_op!(Sub, sub, -);
same_level_op!(Mul, mul, *);

/// Converts a rational function into another scalar type.
pub fn convert<S: Scalar>(h: &CylinderFunction<crate::Rational>) -> CylinderFunction<S> {
    CylinderFunction { level: h.level, values: h.values.iter().map(rational_to::<S>).collect() }
}
