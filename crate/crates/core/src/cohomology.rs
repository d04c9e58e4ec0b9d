//! First cohomology of the complexes `Γ^k` over the rationals, the tower of
//! induced maps, its direct-limit rank and the invariant distributions.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::diagram::{Extreme, OrderedDiagram};
use crate::error::{Error, Result};
use crate::function::CylinderFunction;
use crate::linalg::{inverse, rank, rat_mul, rat_mul_vec, rref, solve, transpose, RatMatrix};
use crate::measures::RenormData;
use crate::scalar::Scalar;
use crate::solenoid::{build_complex, edge_lengths, ApproxComplex};
use crate::space::PathSpace;
use crate::Rational;

/// Edge and vertex cochains of one `Γ^k` with an explicit `H^1` basis.
#[derive(Clone, Debug)]
pub struct CochainSpace {
    pub level: usize,
    pub num_edges: usize,
    pub num_classes: usize,
    pub components: usize,
    pub class_of: Vec<usize>,
    /// Rows spanning `im d` in reduced echelon form.
    image: RatMatrix,
    pivots: Vec<usize>,
    /// Edge coordinates that survive in the quotient; the `H^1` basis is
    /// their unit cochains.
    pub free: Vec<usize>,
}

impl CochainSpace {
    pub fn from_complex(c: &ApproxComplex) -> Self {
        let n = c.num_edges();
        let mut rows: RatMatrix = (0..c.num_classes)
            .map(|class| {
                (0..n)
                    .map(|v| {
                        let (a, b) = c.ends(v);
                        let mut x = 0i64;
                        if b == class {
                            x += 1;
                        }
                        if a == class {
                            x -= 1;
                        }
                        Rational::from_integer(x.into())
                    })
                    .collect()
            })
            .collect();
        let pivots = rref(&mut rows, n);
        let free = (0..n).filter(|j| !pivots.contains(j)).collect();
        CochainSpace {
            level: c.level,
            num_edges: n,
            num_classes: c.num_classes,
            components: c.components,
            class_of: c.class_of.clone(),
            image: rows,
            pivots,
            free,
        }
    }

    /// `dim H^1`.
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// `(dβ)(e_v) = β(∂^+ e_v) - β(∂^- e_v)`.
    pub fn coboundary(&self, beta: &[Rational]) -> Vec<Rational> {
        (0..self.num_edges)
            .map(|v| beta[self.class_of[2 * v + 1]].clone() - beta[self.class_of[2 * v]].clone())
            .collect()
    }

    fn d_matrix(&self) -> RatMatrix {
        (0..self.num_edges)
            .map(|v| {
                let mut row = vec![Rational::zero(); self.num_classes];
                row[self.class_of[2 * v + 1]] += Rational::one();
                row[self.class_of[2 * v]] -= Rational::one();
                row
            })
            .collect()
    }

    /// Coordinates of the class of an edge cochain.
    pub fn reduce(&self, x: &[Rational]) -> Vec<Rational> {
        let mut r = x.to_vec();
        for (row, &p) in self.image.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for (ri, gi) in r.iter_mut().zip(row) {
                    *ri -= &f * gi;
                }
            }
        }
        self.free.iter().map(|&j| r[j].clone()).collect()
    }

    /// Cochain supported on the free coordinates representing `coords`.
    pub fn representative(&self, coords: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.num_edges];
        for (&j, c) in self.free.iter().zip(coords) {
            x[j] = c.clone();
        }
        x
    }

    /// A vertex cochain `β` with `dβ = c`, if `c` is a coboundary.
    pub fn potential(&self, c: &[Rational]) -> Option<Vec<Rational>> {
        let beta = solve(&self.d_matrix(), self.num_classes, c)?;
        debug_assert_eq!(self.coboundary(&beta), c);
        Some(beta)
    }
}

pub fn cohomology_basis(c: &ApproxComplex) -> CochainSpace {
    CochainSpace::from_complex(c)
}

fn level_matrix(d: &OrderedDiagram, k: usize) -> Result<RatMatrix> {
    Ok(d.level(k)?
        .matrix()
        .iter()
        .map(|row| row.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect())
}

/// Matrix of `A_k` on `H^1(Γ^{k-1}) -> H^1(Γ^k)`, after checking that `A_k`
/// carries coboundaries to coboundaries through the vertex map.
pub fn induced_map(d: &OrderedDiagram, lower: &CochainSpace, upper: &CochainSpace) -> Result<RatMatrix> {
    let k = upper.level;
    let a = level_matrix(d, k)?;
    // vertex map on classes: ∂^- e_v -> ∂^- e_{m(v)}, ∂^+ e_v -> ∂^+ e_{M(v)}
    let mut vm = vec![usize::MAX; upper.num_classes];
    for v in 0..upper.num_edges {
        let targets = [
            (2 * v, lower.class_of[2 * d.extreme_map(k, v, Extreme::Min)?]),
            (2 * v + 1, lower.class_of[2 * d.extreme_map(k, v, Extreme::Max)? + 1]),
        ];
        for (end, target) in targets {
            let class = upper.class_of[end];
            if vm[class] == usize::MAX {
                vm[class] = target;
            } else if vm[class] != target {
                return Err(Error::Descent(format!("level {k}: vertex class {class} has two images")));
            }
        }
    }
    for c in 0..lower.num_classes {
        let mut beta = vec![Rational::zero(); lower.num_classes];
        beta[c] = Rational::one();
        let pushed = rat_mul_vec(&a, &lower.coboundary(&beta));
        let pulled: Vec<Rational> = vm.iter().map(|&t| beta[t].clone()).collect();
        if pushed != upper.coboundary(&pulled) {
            return Err(Error::Descent(format!("level {k}: A_k does not commute with d")));
        }
    }
    let columns: Vec<Vec<Rational>> = lower
        .free
        .iter()
        .map(|&j| {
            let col: Vec<Rational> = a.iter().map(|row| row[j].clone()).collect();
            upper.reduce(&col)
        })
        .collect();
    Ok(transpose(&columns, upper.dim()))
}

/// `r(m, n)`: rank of `M_n ... M_{m+1}`.
#[derive(Clone, Debug, Serialize)]
pub struct RankEntry {
    pub m: usize,
    pub n: usize,
    pub rank: usize,
}

/// The stabilized tower and the data fixing the distributions.
#[derive(Clone, Debug)]
pub struct ClassTower {
    pub spaces: Vec<CochainSpace>,
    /// `maps[k]`: `H^1(Γ^{k-1}) -> H^1(Γ^k)`; `maps[0]` is empty.
    pub maps: Vec<RatMatrix>,
    pub d: usize,
    pub k_prime: usize,
    pub ranks: Vec<RankEntry>,
    /// Level at which classes are compared.
    pub reference: usize,
    /// Stationary: levels `reference + t * period` pull back by `R^{-t}`.
    period: Option<PeriodicData>,
    /// Basis of the stabilized image in `H^1(Γ^reference)` coordinates,
    /// orthogonal for the length-weighted product; `basis[0]` is the class of 1.
    pub basis: Vec<Vec<Rational>>,
    weights: Vec<Rational>,
    diagram: OrderedDiagram,
}

#[derive(Clone, Debug)]
struct PeriodicData {
    base: usize,
    period: usize,
    /// Period map on `H^1(Γ^base)`.
    block: RatMatrix,
    /// Columns spanning the eventual image.
    image_basis: RatMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerSummary {
    pub d: usize,
    pub k_prime: usize,
    pub per_level_dims: Vec<usize>,
    pub ranks: Vec<RankEntry>,
}

fn composite(maps: &[RatMatrix], m: usize, n: usize, dim_m: usize) -> RatMatrix {
    let mut acc = crate::linalg::rat_identity(dim_m);
    for k in (m + 1)..=n {
        acc = rat_mul(&maps[k], &acc);
    }
    acc
}

fn mat_rank(a: &RatMatrix) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    if a.is_empty() || cols == 0 {
        return 0;
    }
    rank(a, cols)
}

/// Independent columns of `a` spanning its column space.
fn column_basis(a: &RatMatrix, rows: usize) -> Vec<Vec<Rational>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut r = transpose(a, cols);
    rref(&mut r, rows);
    r
}

impl ClassTower {
    pub fn summary(&self) -> TowerSummary {
        TowerSummary {
            d: self.d,
            k_prime: self.k_prime,
            per_level_dims: self.spaces.iter().map(CochainSpace::dim).collect(),
            ranks: self.ranks.clone(),
        }
    }

    pub fn diagram(&self) -> &OrderedDiagram {
        &self.diagram
    }

    fn space_at(&self, level: usize, renorm: &RenormData) -> Result<CochainSpace> {
        match self.spaces.get(level) {
            Some(s) => Ok(s.clone()),
            None => Ok(CochainSpace::from_complex(&build_complex(&self.diagram, renorm, level)?)),
        }
    }
}

/// Builds `H^1(Γ^k)` and the induced maps; detects the direct-limit rank.
pub fn limit_rank(d: &OrderedDiagram, renorm: &RenormData, max_level: usize, window: usize) -> Result<ClassTower> {
    let n = d.materialized();
    let p = d.period();
    let base = n - p;
    let top = if d.is_stationary() { max_level.max(base + p) } else { max_level.min(n) };
    let spaces: Vec<CochainSpace> = (0..=top)
        .map(|k| build_complex(d, renorm, k).map(|c| CochainSpace::from_complex(&c)))
        .collect::<Result<_>>()?;
    let mut maps = vec![Vec::new()];
    for k in 1..=top {
        maps.push(induced_map(d, &spaces[k - 1], &spaces[k])?);
    }
    let mut ranks = Vec::new();
    for m in 0..top.min(max_level) {
        for nn in (m + 1)..=top.min(max_level) {
            let rank = mat_rank(&composite(&maps, m, nn, spaces[m].dim()));
            ranks.push(RankEntry { m, n: nn, rank });
        }
    }
    if d.is_stationary() {
        if spaces[base].class_of != spaces[base + p].class_of {
            return Err(Error::Descent("complexes are not periodic in the level".into()));
        }
        let dim = spaces[base].dim();
        let block = composite(&maps, base, base + p, dim);
        let mut power = crate::linalg::rat_identity(dim);
        let mut previous = dim;
        let mut j_star = 0;
        for j in 1..=dim + 1 {
            power = rat_mul(&block, &power);
            let r = mat_rank(&power);
            if r == previous {
                break;
            }
            previous = r;
            j_star = j;
        }
        let d_rank = previous;
        let mut eventual = crate::linalg::rat_identity(dim);
        for _ in 0..dim {
            eventual = rat_mul(&block, &eventual);
        }
        let image_basis = column_basis(&eventual, dim);
        let reference = base + p * dim;
        let periodic = PeriodicData { base, period: p, block, image_basis };
        let mut tower = ClassTower {
            spaces,
            maps,
            d: d_rank,
            k_prime: base + p * j_star,
            ranks,
            reference,
            period: Some(periodic),
            basis: Vec::new(),
            weights: Vec::new(),
            diagram: d.clone(),
        };
        tower.finish_basis(renorm)?;
        return Ok(tower);
    }
    // non-stationary: constant r(m, m + window) over `window` consecutive m
    let r_at = |m: usize, nn: usize| ranks.iter().find(|e| e.m == m && e.n == nn).map(|e| e.rank);
    let mut found = None;
    for m in 0..top {
        let values: Vec<Option<usize>> = (m..m + window).map(|i| r_at(i, i + window)).collect();
        if values.iter().all(Option::is_some) && values.windows(2).all(|w| w[0] == w[1]) {
            found = Some((m, values[0].expect("checked")));
            break;
        }
    }
    let Some((k_prime, d_rank)) = found else {
        let envelope = (0..top).map(|m| r_at(m, top).unwrap_or(0)).collect();
        return Err(Error::RankNotStabilized { max_level, envelope });
    };
    let comp = composite(&maps, k_prime, top, spaces[k_prime].dim());
    let image_basis = column_basis(&comp, spaces[top].dim());
    let mut tower = ClassTower {
        spaces,
        maps,
        d: d_rank,
        k_prime,
        ranks,
        reference: top,
        period: None,
        basis: image_basis,
        weights: Vec::new(),
        diagram: d.clone(),
    };
    tower.finish_basis(renorm)?;
    Ok(tower)
}

impl ClassTower {
    /// Orthogonalizes the stabilized image, starting from the class of 1.
    fn finish_basis(&mut self, renorm: &RenormData) -> Result<()> {
        let reference_space = self.space_at(self.reference, renorm)?;
        let lengths = edge_lengths(&self.diagram, renorm, self.reference)?;
        self.weights = reference_space.free.iter().map(|&j| Rational::from_real(lengths[j])).collect();
        let raw: Vec<Vec<Rational>> = match &self.period {
            Some(p) => p.image_basis.clone(),
            None => self.basis.clone(),
        };
        let one = self.class_of_cochain(&self.constant_cochain(self.reference)?, self.reference, renorm)?;
        let mut basis: Vec<Vec<Rational>> = Vec::new();
        for candidate in std::iter::once(one).chain(raw) {
            let mut v = candidate;
            for b in &basis {
                let f = self.inner(&v, b) / self.inner(b, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
            if v.iter().any(|x| !x.is_zero()) {
                if basis.is_empty() {
                    basis.push(v);
                    continue;
                }
                if let Some(first) = v.iter().find(|x| !x.is_zero()) {
                    if first.is_negative() {
                        v.iter_mut().for_each(|x| *x = -x.clone());
                    }
                }
                basis.push(v);
            }
        }
        if basis.len() != self.d {
            return Err(Error::Descent(format!(
                "stabilized image has dimension {} but rank is {}",
                basis.len(),
                self.d
            )));
        }
        self.basis = basis;
        Ok(())
    }

    fn inner(&self, x: &[Rational], y: &[Rational]) -> Rational {
        x.iter().zip(y).zip(&self.weights).fold(Rational::zero(), |acc, ((a, b), w)| acc + a * b * w)
    }

    /// `|E_v|` on `Γ^level`, the Birkhoff cochain of the constant 1.
    fn constant_cochain(&self, level: usize) -> Result<Vec<Rational>> {
        let counts = crate::measures::path_counts(&self.diagram, level)?;
        Ok(counts.into_iter().map(Rational::from_integer).collect())
    }

    /// Canonical coordinates of the class of an edge cochain at `level`.
    fn class_of_cochain(&self, c: &[Rational], level: usize, renorm: &RenormData) -> Result<Vec<Rational>> {
        match &self.period {
            Some(p) => {
                if level < self.reference || (level - self.reference) % p.period != 0 {
                    return Err(Error::Invalid(format!("level {level} is not a reference level")));
                }
                let space = self.space_at(level, renorm)?;
                let mut y = space.reduce(c);
                let steps = (level - self.reference) / p.period;
                if steps > 0 {
                    // R^{-1} on the eventual image: solve (P B) a = y, map back B a
                    let dim = p.block.len();
                    let basis_cols = transpose(&p.image_basis, dim);
                    let pb = rat_mul(&p.block, &basis_cols);
                    let back = inverse_on_image(&pb, &basis_cols)?;
                    for _ in 0..steps {
                        y = rat_mul_vec(&back, &y);
                    }
                }
                Ok(y)
            }
            None => {
                if level != self.reference {
                    return Err(Error::Invalid(format!("level {level} is not the reference level")));
                }
                Ok(self.space_at(level, renorm)?.reduce(c))
            }
        }
    }

    /// Level at which the class of a level-`m` function is read.
    pub fn evaluation_level(&self, m: usize) -> Result<usize> {
        match &self.period {
            Some(p) => {
                let extra = m.saturating_sub(p.base);
                Ok(self.reference + p.period * extra.div_ceil(p.period))
            }
            None => {
                if m > self.k_prime {
                    Err(Error::InsufficientLevel { level: m, stable: self.k_prime })
                } else {
                    Ok(self.reference)
                }
            }
        }
    }
}

/// Left inverse of `R` on the image: maps `y = P B a` to `B a`.
fn inverse_on_image(pb: &RatMatrix, basis_cols: &RatMatrix) -> Result<RatMatrix> {
    // P B has full column rank, so ((PB)^T PB)^{-1} (PB)^T is a left inverse
    let r = pb.first().map_or(0, Vec::len);
    let t = transpose(pb, r);
    let gram = rat_mul(&t, pb);
    let ginv = inverse(&gram).ok_or_else(|| Error::Descent("period map not injective on its image".into()))?;
    let left = rat_mul(&ginv, &t);
    Ok(rat_mul(basis_cols, &left))
}

/// `c_k(e_v) = Σ_{p ∈ E_v} h(p)` for `k >= level(h)`.
pub fn birkhoff_cochain(space: &PathSpace, h: &CylinderFunction<Rational>, k: usize) -> Result<Vec<Rational>> {
    let m = h.level();
    if k < m {
        return Err(Error::Invalid(format!("cochain level {k} below function level {m}")));
    }
    let lvl = space.table.level(m);
    let mut c = vec![Rational::zero(); lvl.num_vertices()];
    for (v, &r) in h.values().iter().zip(&lvl.range) {
        c[r] += v;
    }
    for j in (m + 1)..=k {
        c = rat_mul_vec(&level_matrix(&space.diagram, j)?, &c);
    }
    Ok(c)
}

/// `D_i(h)` for `i = 1..=d`.
#[derive(Clone, Debug, Serialize)]
pub struct DistributionValue {
    #[serde(serialize_with = "crate::io::ser_rationals")]
    pub values: Vec<Rational>,
    pub level: usize,
}

impl DistributionValue {
    pub fn all_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

pub fn distributions(space: &PathSpace, h: &CylinderFunction<Rational>, tower: &ClassTower) -> Result<DistributionValue> {
    let level = tower.evaluation_level(h.level())?;
    let c = birkhoff_cochain(space, h, level)?;
    let y = tower.class_of_cochain(&c, level, &space.renorm)?;
    // D_1 is the ν-integral; the rest are coordinates orthogonal to the
    // constant class, so they vanish on constants
    let mut values: Vec<Rational> = tower.basis.iter().map(|b| tower.inner(&y, b) / tower.inner(b, b)).collect();
    if let Some(first) = values.first_mut() {
        *first = h.mean(space)?;
    }
    Ok(DistributionValue { values, level })
}

/// Result of [`is_coboundary_class`].
#[derive(Clone, Debug)]
pub struct CoboundaryCertificate {
    pub coboundary: bool,
    pub distributions: DistributionValue,
    /// `β` with `dβ = c_level(h)` when `coboundary`.
    pub potential: Option<Vec<Rational>>,
    pub cochain: Vec<Rational>,
}

pub fn is_coboundary_class(
    space: &PathSpace,
    h: &CylinderFunction<Rational>,
    tower: &ClassTower,
) -> Result<CoboundaryCertificate> {
    let dist = distributions(space, h, tower)?;
    let cochain = birkhoff_cochain(space, h, dist.level)?;
    let potential = if dist.all_zero() {
        let cs = tower.space_at(dist.level, &space.renorm)?;
        let beta = cs
            .potential(&cochain)
            .ok_or_else(|| Error::Descent("vanishing distributions but no potential".into()))?;
        Some(beta)
    } else {
        None
    };
    Ok(CoboundaryCertificate { coboundary: potential.is_some(), distributions: dist, potential, cochain })
}

/// Complex at `level` for callers outside the tower.
pub fn cochain_space(tower: &ClassTower, level: usize, renorm: &RenormData) -> Result<CochainSpace> {
    tower.space_at(level, renorm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn tower(name: &str, depth: usize) -> (PathSpace, ClassTower) {
        let space = PathSpace::new(builtin::by_name(name).unwrap(), depth).unwrap();
        let t = limit_rank(&space.diagram, &space.renorm, 5, 3).unwrap();
        (space, t)
    }

    #[test]
    fn ranks_of_builtins() {
        assert_eq!(tower("odo2", 4).1.d, 1);
        assert_eq!(tower("fib", 4).1.d, 2);
        assert_eq!(tower("pisot31", 3).1.d, 2);
        assert_eq!(tower("odo3", 3).1.d, 1);
    }

    #[test]
    fn constant_pairs_with_first_direction() {
        for name in ["odo2", "fib", "pisot31"] {
            let (space, t) = tower(name, 3);
            let one = CylinderFunction::constant(&space, Rational::one());
            let dv = distributions(&space, &one, &t).unwrap();
            assert_eq!(dv.values[0], Rational::one(), "{name}");
            assert!(dv.values[1..].iter().all(Zero::is_zero), "{name}");
        }
    }

    #[test]
    fn first_digit_cochain() {
        let space = PathSpace::new(builtin::odo2(), 4).unwrap();
        let h = CylinderFunction::from_fn(&space, 1, |i| Rational::from_integer((i as i64).into())).unwrap();
        let c = birkhoff_cochain(&space, &h, 3).unwrap();
        assert_eq!(c, vec![Rational::from_integer(4.into())]);
    }

    #[test]
    fn fib_maps_are_invertible() {
        let (_, t) = tower("fib", 3);
        for k in 1..t.maps.len() {
            assert_eq!(t.maps[k].len(), 2);
            assert!(inverse(&t.maps[k]).is_some());
        }
    }
}
