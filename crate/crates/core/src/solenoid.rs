//! Graph approximants `Γ^k` of the suspension solenoid, the wrapping maps
//! between them and the finite-level conjugacy from paths to points.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::diagram::{Extreme, OrderedDiagram};
use crate::error::{Error, Result};
use crate::measures::{cocycle_product, RenormData};
use crate::space::PathSpace;

/// Tolerance of the stretch identity per edge.
pub const STRETCH_TOL: f64 = 1e-9;

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut y = x;
        while self.parent[y] != root {
            let next = self.parent[y];
            self.parent[y] = root;
            y = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// `λ^{-k} (A_(k) l)_v` for every `v` in `V_k`.
pub fn edge_lengths(d: &OrderedDiagram, renorm: &RenormData, k: usize) -> Result<Vec<f64>> {
    let scale = renorm.lambda_mu.powi(-(k as i32));
    if k == 0 {
        return Ok(renorm.roof.clone());
    }
    let a = cocycle_product(d, 0, k)?;
    Ok(a.matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(&renorm.roof)
                .map(|(x, l)| x.to_f64().unwrap_or(f64::INFINITY) * l)
                .sum::<f64>()
                * scale
        })
        .collect())
}

/// The graph `Γ^k`: one oriented edge `e_v` per `v ∈ V_k`, endpoints glued
/// into vertex classes. Endpoint `2v` is `∂^- e_v`, `2v + 1` is `∂^+ e_v`.
#[derive(Clone, Debug, Serialize)]
pub struct ApproxComplex {
    pub level: usize,
    pub lengths: Vec<f64>,
    pub class_of: Vec<usize>,
    pub num_classes: usize,
    pub components: usize,
    /// Shortest-path distances between vertex classes.
    #[serde(skip)]
    pub dist: Vec<Vec<f64>>,
    pub diameter: f64,
}

/// Pairs `(v, w)` with `∂^+ e_v ~ ∂^- e_w` in `Γ^k`.
pub fn gluing_pairs(d: &OrderedDiagram, k: usize) -> Result<Vec<(usize, usize)>> {
    if !d.is_properly_ordered() {
        return Err(Error::GluingUndefined("extreme paths are not unique".into()));
    }
    let vk = d.num_vertices(k)?;
    let mut pairs = HashSet::new();
    let mut mc: Vec<usize> = (0..vk).collect();
    let mut mx: Vec<usize> = (0..vk).collect();
    let mut seen = HashSet::new();
    let mut j = k + 1;
    loop {
        if !d.has_level(j) {
            break;
        }
        if d.is_stationary() && !seen.insert((mc.clone(), mx.clone(), d.level_index(j)?)) {
            break;
        }
        let level = d.level(j)?;
        for order in &level.in_order {
            for w in order.windows(2) {
                pairs.insert((mx[level.source(w[0])], mc[level.source(w[1])]));
            }
        }
        mc = (0..level.num_ranges)
            .map(|u| d.extreme_map(j, u, Extreme::Min).map(|s| mc[s]))
            .collect::<Result<_>>()?;
        mx = (0..level.num_ranges)
            .map(|u| d.extreme_map(j, u, Extreme::Max).map(|s| mx[s]))
            .collect::<Result<_>>()?;
        j += 1;
    }
    let top = d.extreme_vertex(k, Extreme::Max).map_err(|e| Error::GluingUndefined(e.to_string()))?;
    let bottom = d.extreme_vertex(k, Extreme::Min).map_err(|e| Error::GluingUndefined(e.to_string()))?;
    pairs.insert((top, bottom));
    let mut out: Vec<_> = pairs.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

pub fn build_complex(d: &OrderedDiagram, renorm: &RenormData, k: usize) -> Result<ApproxComplex> {
    let lengths = edge_lengths(d, renorm, k)?;
    let n = lengths.len();
    let mut uf = UnionFind::new(2 * n);
    for (v, w) in gluing_pairs(d, k)? {
        uf.union(2 * v + 1, 2 * w);
    }
    let mut label = vec![usize::MAX; 2 * n];
    let mut class_of = vec![0; 2 * n];
    let mut num_classes = 0;
    for (x, c) in class_of.iter_mut().enumerate() {
        let r = uf.find(x);
        if label[r] == usize::MAX {
            label[r] = num_classes;
            num_classes += 1;
        }
        *c = label[r];
    }
    let mut comp = UnionFind::new(num_classes);
    for v in 0..n {
        comp.union(class_of[2 * v], class_of[2 * v + 1]);
    }
    let components = (0..num_classes).filter(|&c| comp.find(c) == c).count();
    let mut dist = vec![vec![f64::INFINITY; num_classes]; num_classes];
    for (c, row) in dist.iter_mut().enumerate() {
        row[c] = 0.0;
    }
    for v in 0..n {
        let (a, b) = (class_of[2 * v], class_of[2 * v + 1]);
        if lengths[v] < dist[a][b] {
            dist[a][b] = lengths[v];
            dist[b][a] = lengths[v];
        }
    }
    for m in 0..num_classes {
        for i in 0..num_classes {
            for j in 0..num_classes {
                let through = dist[i][m] + dist[m][j];
                if through < dist[i][j] {
                    dist[i][j] = through;
                }
            }
        }
    }
    let mut complex = ApproxComplex { level: k, lengths, class_of, num_classes, components, dist, diameter: 0.0 };
    complex.diameter = complex.compute_diameter();
    Ok(complex)
}

impl ApproxComplex {
    pub fn num_edges(&self) -> usize {
        self.lengths.len()
    }

    /// `(∂^- class, ∂^+ class)` of `e_v`.
    pub fn ends(&self, v: usize) -> (usize, usize) {
        (self.class_of[2 * v], self.class_of[2 * v + 1])
    }

    /// First Betti number `|E| - |V| + components`.
    pub fn betti1(&self) -> usize {
        self.num_edges() + self.components - self.num_classes
    }

    /// Distance from the point at offset `s` on `e_v` to vertex class `c`.
    fn to_class(&self, v: usize, s: f64, c: usize) -> f64 {
        let (a, b) = self.ends(v);
        (s + self.dist[a][c]).min(self.lengths[v] - s + self.dist[b][c])
    }

    /// Shortest-path distance between two points `(edge, offset)`.
    pub fn distance(&self, x: (usize, f64), y: (usize, f64)) -> f64 {
        let (f, t) = y;
        let (c, dd) = self.ends(f);
        let via = (t + self.to_class(x.0, x.1, c)).min(self.lengths[f] - t + self.to_class(x.0, x.1, dd));
        if x.0 == f {
            via.min((x.1 - t).abs())
        } else {
            via
        }
    }

    fn compute_diameter(&self) -> f64 {
        let n = self.num_edges();
        let mut best: f64 = 0.0;
        for e in 0..n {
            let (a, b) = self.ends(e);
            let l1 = self.lengths[e];
            best = best.max((l1 + self.dist[a][b]) / 2.0);
            for f in 0..n {
                if f == e {
                    continue;
                }
                let (c, dd) = self.ends(f);
                let l2 = self.lengths[f];
                let mut candidates = vec![0.0, l1];
                for target in [c, dd] {
                    let s = (l1 + self.dist[b][target] - self.dist[a][target]) / 2.0;
                    if s > 0.0 && s < l1 {
                        candidates.push(s);
                    }
                }
                for s in candidates {
                    let value = (l2 + self.to_class(e, s, c) + self.to_class(e, s, dd)) / 2.0;
                    best = best.max(value);
                }
            }
        }
        best
    }

    /// Graphviz rendering; vertex classes become nodes.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph gamma_{} {{\n", self.level);
        for c in 0..self.num_classes {
            let _ = writeln!(out, "  c{c} [shape=point];");
        }
        for v in 0..self.num_edges() {
            let (a, b) = self.ends(v);
            let _ = writeln!(out, "  c{a} -> c{b} [label=\"e{v} ({:.6})\"];", self.lengths[v]);
        }
        out.push_str("}\n");
        out
    }
}

/// Words of `γ_k`: edge `e_v` of `Γ^k` runs over `e_{s(e)}` for `e` in the
/// order at `v`, after stretching by `λ`.
#[derive(Clone, Debug, Serialize)]
pub struct WrappingMap {
    pub level: usize,
    pub words: Vec<Vec<usize>>,
    /// Largest `|Σ |word| - λ |e_v||` over edges.
    pub max_error: f64,
}

pub fn wrapping(d: &OrderedDiagram, renorm: &RenormData, k: usize) -> Result<WrappingMap> {
    if k == 0 {
        return Err(Error::Invalid("wrapping maps start at level 1".into()));
    }
    let upper = edge_lengths(d, renorm, k)?;
    let lower = edge_lengths(d, renorm, k - 1)?;
    let level = d.level(k)?;
    let mut words = Vec::with_capacity(level.num_ranges);
    let mut max_error: f64 = 0.0;
    for (v, order) in level.in_order.iter().enumerate() {
        let word: Vec<usize> = order.iter().map(|&e| level.source(e)).collect();
        let total: f64 = word.iter().map(|&w| lower[w]).sum();
        let error = (total - renorm.lambda_mu * upper[v]).abs();
        if error > STRETCH_TOL {
            return Err(Error::StretchViolated { level: k, edge: v, error });
        }
        max_error = max_error.max(error);
        words.push(word);
    }
    Ok(WrappingMap { level: k, words, max_error })
}

impl WrappingMap {
    /// `γ_k(z)` for `z = (edge, offset)` on `Γ^k`.
    pub fn push(&self, lambda: f64, lower_lengths: &[f64], z: (usize, f64)) -> (usize, f64) {
        let word = &self.words[z.0];
        let mut t = lambda * z.1;
        for (i, &w) in word.iter().enumerate() {
            if t < lower_lengths[w] || i + 1 == word.len() {
                return (w, t.min(lower_lengths[w]));
            }
            t -= lower_lengths[w];
        }
        unreachable!("words are nonempty")
    }
}

/// Offsets `λ^{-k} Σ_{q < p, q ∈ E_{r(p)}} l_{s(q_1)}` for every `p ∈ E_{0,k}`.
pub fn conjugacy_offsets(space: &PathSpace, k: usize) -> Result<Vec<f64>> {
    space.require(k)?;
    let lvl = space.table.level(k);
    let scale = space.lambda().powi(-(k as i32));
    let mut out = vec![0.0; lvl.len()];
    for v in 0..lvl.num_vertices() {
        let mut acc = 0.0;
        for (i, slot) in out.iter_mut().enumerate().take(lvl.block_start[v + 1]).skip(lvl.block_start[v]) {
            *slot = acc * scale;
            acc += space.renorm.roof[space.table.source(k, i)];
        }
    }
    Ok(out)
}

/// `ϖ(p)` on `Γ^k` as `(edge, offset)`.
pub fn conjugacy_point(space: &PathSpace, k: usize, index: usize) -> Result<(usize, f64)> {
    let offsets = conjugacy_offsets(space, k)?;
    Ok((space.table.level(k).range[index], offsets[index]))
}

/// Coordinates `z_0, ..., z_n` of a point of the truncated solenoid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolenoidPoint {
    pub coords: Vec<(usize, f64)>,
}

impl SolenoidPoint {
    pub fn level(&self) -> usize {
        self.coords.len() - 1
    }
}

/// Precomputed conjugacy data up to level `n`.
pub struct Conjugacy {
    pub complexes: Vec<ApproxComplex>,
    offsets: Vec<Vec<f64>>,
}

impl Conjugacy {
    pub fn new(space: &PathSpace, n: usize) -> Result<Self> {
        let complexes = (0..=n)
            .map(|k| build_complex(&space.diagram, &space.renorm, k))
            .collect::<Result<_>>()?;
        let offsets = (0..=n).map(|k| conjugacy_offsets(space, k)).collect::<Result<_>>()?;
        Ok(Conjugacy { complexes, offsets })
    }

    /// `(ϖ(p_{≤i}))_{i ≤ n}` for `p` with index `index` in `E_{0,n}`.
    pub fn point(&self, space: &PathSpace, n: usize, index: usize) -> SolenoidPoint {
        let coords = (0..=n)
            .map(|i| {
                let j = space.table.ancestor(n, index, i);
                (space.table.level(i).range[j], self.offsets[i][j])
            })
            .collect();
        SolenoidPoint { coords }
    }

    /// `Σ_{k ≤ n} λ^{-k} d_k(y_k, z_k) / diam(Γ^k)`.
    pub fn metric(&self, y: &SolenoidPoint, z: &SolenoidPoint, lambda: f64) -> f64 {
        y.coords
            .iter()
            .zip(&z.coords)
            .enumerate()
            .map(|(k, (a, b))| {
                let c = &self.complexes[k];
                if c.diameter > 0.0 {
                    lambda.powi(-(k as i32)) * c.distance(*a, *b) / c.diameter
                } else {
                    0.0
                }
            })
            .sum()
    }
}

/// Bound on the omitted coordinates beyond level `n`.
pub fn tail_bound(lambda: f64, n: usize) -> f64 {
    lambda.powi(-(n as i32)) / (lambda - 1.0)
}

/// Extra levels used by [`bilip_check`]. Distinct cylinders can share all
/// coordinates up to their own level when their endpoints are glued, so the
/// points are taken from a deeper extension.
pub const BILIP_LOOKAHEAD: usize = 4;

/// Index in `E_{0,m}` of the extension of path `index` of `E_{0,n}` by the
/// first outgoing edge at each further level.
pub fn extension(space: &PathSpace, n: usize, index: usize, m: usize) -> Result<usize> {
    let mut edges = space.table.edges(n, index);
    let mut v = space.table.level(n).range[index];
    for k in n + 1..=m {
        let lv = space.diagram.level(k)?;
        let e = (0..lv.edges.len())
            .find(|&e| lv.source(e) == v)
            .ok_or_else(|| Error::Invalid(format!("vertex {v} has no out-edge at level {k}")))?;
        v = lv.range(e);
        edges.push(e);
    }
    space.table.index_of(&space.diagram, &edges)
}

#[derive(Clone, Debug, Serialize)]
pub struct BilipReport {
    pub pairs: usize,
    pub violations: usize,
    /// Largest `d̄ / (d / (λ - 1))`.
    pub worst_upper_ratio: f64,
    /// `min d̄ / d^{1+ε}` over distinct pairs.
    pub lower_constant: f64,
}

/// Checks `d̄(ϖp, ϖq) <= d(p, q) / (λ - 1)` and reports the lower constant for
/// pairs of paths in `E_{0,n}`.
pub fn bilip_check(
    space: &PathSpace,
    conj: &Conjugacy,
    n: usize,
    pairs: &[(usize, usize)],
    epsilon: f64,
) -> Result<BilipReport> {
    let lambda = space.lambda();
    let deep = (n + BILIP_LOOKAHEAD).min(conj.complexes.len() - 1).min(space.depth()).max(n);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    let mut lower = f64::INFINITY;
    for &(i, j) in pairs {
        let a = space.table.edges(n, i);
        let b = space.table.edges(n, j);
        let y = conj.point(space, deep, extension(space, n, i, deep)?);
        let z = conj.point(space, deep, extension(space, n, j, deep)?);
        let dbar = conj.metric(&y, &z, lambda);
        let Some(k) = a.iter().zip(&b).position(|(x, w)| x != w).map(|p| p + 1) else {
            if dbar != 0.0 {
                violations += 1;
            }
            continue;
        };
        let d = lambda.powi(1 - k as i32);
        let upper = d / (lambda - 1.0);
        let ratio = dbar / upper;
        worst = worst.max(ratio);
        if dbar > upper * (1.0 + 1e-12) {
            violations += 1;
        }
        lower = lower.min(dbar / d.powf(1.0 + epsilon));
    }
    if violations > 0 {
        return Err(Error::UpperBoundViolated(violations));
    }
    Ok(BilipReport { pairs: pairs.len(), violations, worst_upper_ratio: worst, lower_constant: lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn odo2_level_zero_is_a_circle() {
        let space = PathSpace::new(builtin::odo2(), 3).unwrap();
        let c = build_complex(&space.diagram, &space.renorm, 0).unwrap();
        assert_eq!(c.num_edges(), 1);
        assert_eq!(c.num_classes, 1);
        assert!((c.lengths[0] - 1.0).abs() < 1e-15);
        assert_eq!(c.betti1(), 1);
        assert!((c.diameter - 0.5).abs() < 1e-15);
    }

    #[test]
    fn odo2_wraps_twice() {
        let space = PathSpace::new(builtin::odo2(), 3).unwrap();
        let w = wrapping(&space.diagram, &space.renorm, 2).unwrap();
        assert_eq!(w.words, vec![vec![0, 0]]);
    }

    #[test]
    fn odo2_conjugacy_offset() {
        let space = PathSpace::new(builtin::odo2(), 3).unwrap();
        // binary 101 read with the top digit most significant
        let idx = space.table.index_of(&space.diagram, &[1, 0, 1]).unwrap();
        assert_eq!(idx, 5);
        let (e, off) = conjugacy_point(&space, 3, idx).unwrap();
        assert_eq!(e, 0);
        assert!((off - 5.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn fib_level_zero_is_a_wedge() {
        let space = PathSpace::new(builtin::fib(), 3).unwrap();
        let c = build_complex(&space.diagram, &space.renorm, 0).unwrap();
        assert_eq!(c.num_edges(), 2);
        assert_eq!(c.num_classes, 1);
        assert_eq!(c.betti1(), 2);
    }
}
