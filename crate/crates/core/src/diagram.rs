use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::{FinitePath, LazyPath, Tail};

/// How far past an explicit prefix the successor scan may look into a tail.
pub const SCAN_CAP: usize = 4096;

/// One level `E_k` of a diagram: edges from `V_{k-1}` to `V_k` and the
/// in-edge order at every range vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub num_sources: usize,
    pub num_ranges: usize,
    pub edges: Vec<(usize, usize)>,
    pub in_order: Vec<Vec<usize>>,
}

impl Level {
    pub fn source(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn range(&self, e: usize) -> usize {
        self.edges[e].1
    }

    /// `A_k` as a dense count matrix, `a[v][w]` = number of edges `w -> v`.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        let mut a = vec![vec![0u64; self.num_sources]; self.num_ranges];
        for &(s, r) in &self.edges {
            a[r][s] += 1;
        }
        a
    }
}

fn one() -> usize {
    1
}

fn is_one(p: &usize) -> bool {
    *p == 1
}

/// Serialized form of a diagram. When `stationary` is set, the last `period`
/// levels repeat forever.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramSpec {
    pub stationary: bool,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub period: usize,
    pub levels: Vec<Level>,
}

/// Diagnostics for every broken structural invariant; empty means valid.
pub fn validate(spec: &DiagramSpec) -> Vec<String> {
    let mut out = Vec::new();
    let n = spec.levels.len();
    if n == 0 {
        out.push("diagram has no levels".to_string());
        return out;
    }
    if spec.stationary && (spec.period == 0 || spec.period > n) {
        out.push(format!("period {} outside 1..={}", spec.period, n));
    }
    for (i, level) in spec.levels.iter().enumerate() {
        let k = i + 1;
        for (j, &(s, r)) in level.edges.iter().enumerate() {
            if s >= level.num_sources {
                out.push(format!("level {k} edge {j}: source {s} out of range"));
            }
            if r >= level.num_ranges {
                out.push(format!("level {k} edge {j}: range {r} out of range"));
            }
        }
        if level.in_order.len() != level.num_ranges {
            out.push(format!(
                "level {k}: {} order lists for {} range vertices",
                level.in_order.len(),
                level.num_ranges
            ));
        }
        for (v, order) in level.in_order.iter().enumerate() {
            let mut expected: Vec<usize> = level
                .edges
                .iter()
                .enumerate()
                .filter(|(_, &(_, r))| r == v)
                .map(|(e, _)| e)
                .collect();
            let mut got = order.clone();
            expected.sort_unstable();
            got.sort_unstable();
            if expected != got {
                out.push(format!("level {k} vertex {v}: order not a permutation of its in-edges"));
            }
            if expected.is_empty() {
                out.push(format!("level {k} vertex {v}: no in-edges"));
            }
        }
        let mut has_out = vec![false; level.num_sources];
        for &(s, _) in &level.edges {
            if s < level.num_sources {
                has_out[s] = true;
            }
        }
        for (w, ok) in has_out.iter().enumerate() {
            if !ok {
                out.push(format!("level {k} source {w}: no out-edges"));
            }
        }
        if let Some(next) = spec.levels.get(i + 1) {
            if next.num_sources != level.num_ranges {
                out.push(format!("vertex count mismatch between levels {k} and {}", k + 1));
            }
        }
    }
    if spec.stationary && spec.period >= 1 && spec.period <= n {
        let first = &spec.levels[n - spec.period];
        let last = &spec.levels[n - 1];
        if first.num_sources != last.num_ranges {
            out.push("vertex count mismatch where the repeating block wraps".to_string());
        }
    }
    out
}

/// Which extreme of the in-edge orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

/// Result of [`OrderedDiagram::extreme_paths`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremePaths {
    pub minimal: Vec<FinitePath>,
    pub maximal: Vec<FinitePath>,
    pub properly_ordered: bool,
}

/// A validated ordered Bratteli diagram.
#[derive(Clone, Debug)]
pub struct OrderedDiagram {
    levels: Vec<Level>,
    stationary: bool,
    period: usize,
    /// `rank[i][e]`: position of edge `e` in the order at its range vertex.
    rank: Vec<Vec<usize>>,
    /// Eventual images of the min/max source maps, levels `0..=n`.
    min_sets: Vec<Vec<usize>>,
    max_sets: Vec<Vec<usize>>,
}

impl PartialEq for OrderedDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels && self.stationary == other.stationary && self.period == other.period
    }
}

impl OrderedDiagram {
    pub fn new(spec: DiagramSpec) -> Result<Self> {
        let diagnostics = validate(&spec);
        if !diagnostics.is_empty() {
            return Err(Error::InvalidDiagram(diagnostics));
        }
        let period = if spec.stationary { spec.period } else { 1 };
        let rank = spec
            .levels
            .iter()
            .map(|level| {
                let mut r = vec![0; level.edges.len()];
                for order in &level.in_order {
                    for (i, &e) in order.iter().enumerate() {
                        r[e] = i;
                    }
                }
                r
            })
            .collect();
        let mut d = OrderedDiagram {
            levels: spec.levels,
            stationary: spec.stationary,
            period,
            rank,
            min_sets: Vec::new(),
            max_sets: Vec::new(),
        };
        d.min_sets = d.compute_sets(Extreme::Min);
        d.max_sets = d.compute_sets(Extreme::Max);
        Ok(d)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DiagramSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        OrderedDiagram::new(spec)
    }

    pub fn spec(&self) -> DiagramSpec {
        DiagramSpec { stationary: self.stationary, period: self.period, levels: self.levels.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.spec()).expect("diagram serializes")
    }

    /// Number of explicitly stored levels.
    pub fn materialized(&self) -> usize {
        self.levels.len()
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Whether level `k >= 1` exists.
    pub fn has_level(&self, k: usize) -> bool {
        k >= 1 && (self.stationary || k <= self.levels.len())
    }

    pub fn level_index(&self, k: usize) -> Result<usize> {
        let n = self.levels.len();
        if k == 0 {
            return Err(Error::Invalid("levels are numbered from 1".into()));
        }
        if k <= n {
            return Ok(k - 1);
        }
        if !self.stationary {
            return Err(Error::LevelOverflow { level: k, materialized: n });
        }
        let base = n - self.period;
        Ok(base + (k - 1 - base) % self.period)
    }

    /// Level `k >= 1` (periodically continued for stationary diagrams).
    pub fn level(&self, k: usize) -> Result<&Level> {
        Ok(&self.levels[self.level_index(k)?])
    }

    /// `|V_k|`.
    pub fn num_vertices(&self, k: usize) -> Result<usize> {
        if k == 0 {
            Ok(self.levels[0].num_sources)
        } else {
            Ok(self.level(k)?.num_ranges)
        }
    }

    pub fn max_vertices(&self) -> usize {
        self.levels
            .iter()
            .map(|l| l.num_ranges)
            .chain(std::iter::once(self.levels[0].num_sources))
            .max()
            .unwrap_or(0)
    }

    /// Position of edge `e` of level `k` in its in-edge order.
    pub fn edge_rank(&self, k: usize, e: usize) -> Result<usize> {
        Ok(self.rank[self.level_index(k)?][e])
    }

    pub fn is_extreme_edge(&self, k: usize, e: usize, which: Extreme) -> Result<bool> {
        let level = self.level(k)?;
        let r = self.edge_rank(k, e)?;
        Ok(match which {
            Extreme::Min => r == 0,
            Extreme::Max => r + 1 == level.in_order[level.range(e)].len(),
        })
    }

    /// Minimal (or maximal) in-edge of vertex `v` at level `k`.
    pub fn extreme_in_edge(&self, k: usize, v: usize, which: Extreme) -> Result<usize> {
        let order = &self.level(k)?.in_order[v];
        Ok(match which {
            Extreme::Min => order[0],
            Extreme::Max => order[order.len() - 1],
        })
    }

    /// Source of the extreme in-edge of `v`: the min (max) vertex map `V_k -> V_{k-1}`.
    pub fn extreme_map(&self, k: usize, v: usize, which: Extreme) -> Result<usize> {
        let level = self.level(k)?;
        Ok(level.source(self.extreme_in_edge(k, v, which)?))
    }

    fn compute_sets(&self, which: Extreme) -> Vec<Vec<usize>> {
        let n = self.levels.len();
        let top = if self.stationary { n + self.period * (self.max_vertices() + 1) } else { n };
        let mut sets = vec![Vec::new(); n + 1];
        let mut current: Vec<usize> = (0..self.num_vertices(top).expect("level in range")).collect();
        for k in (0..=top).rev() {
            if k <= n {
                sets[k] = current.clone();
            }
            if k == 0 {
                break;
            }
            let mut next: Vec<usize> = current
                .iter()
                .map(|&v| self.extreme_map(k, v, which).expect("level in range"))
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        sets
    }

    /// Vertices of `V_k` through which an all-extreme path passes.
    pub fn extreme_set(&self, k: usize, which: Extreme) -> Result<&[usize]> {
        let sets = match which {
            Extreme::Min => &self.min_sets,
            Extreme::Max => &self.max_sets,
        };
        let n = self.levels.len();
        if k <= n {
            return Ok(&sets[k]);
        }
        if !self.stationary {
            return Err(Error::LevelOverflow { level: k, materialized: n });
        }
        let base = n - self.period;
        Ok(&sets[base + (k - base) % self.period])
    }

    /// Vertex of the unique extreme path at level `k`.
    pub fn extreme_vertex(&self, k: usize, which: Extreme) -> Result<usize> {
        match self.extreme_set(k, which)? {
            [v] => Ok(*v),
            set => Err(Error::NotProperlyOrdered(format!(
                "{} {:?}-extreme paths through level {k}",
                set.len(),
                which
            ))),
        }
    }

    /// Edge at level `k >= 1` of the unique extreme path.
    pub fn extreme_edge(&self, k: usize, which: Extreme) -> Result<usize> {
        let v = self.extreme_vertex(k, which)?;
        self.extreme_in_edge(k, v, which)
    }

    /// Exact for stationary diagrams; a certificate up to the last stored level otherwise.
    pub fn is_properly_ordered(&self) -> bool {
        let n = self.levels.len();
        self.min_sets[n].len() == 1 && self.max_sets[n].len() == 1
    }

    fn chains(&self, horizon: usize, which: Extreme) -> Result<Vec<FinitePath>> {
        let mut out = Vec::new();
        for &v in self.extreme_set(horizon, which)? {
            let mut edges = vec![0; horizon];
            let mut w = v;
            for k in (1..=horizon).rev() {
                let e = self.extreme_in_edge(k, w, which)?;
                edges[k - 1] = e;
                w = self.level(k)?.source(e);
            }
            out.push(FinitePath::new(edges));
        }
        Ok(out)
    }

    /// All-minimal and all-maximal paths up to `horizon` that extend indefinitely.
    pub fn extreme_paths(&self, horizon: usize) -> Result<ExtremePaths> {
        if !self.stationary && horizon > self.levels.len() {
            return Err(Error::LevelOverflow { level: horizon, materialized: self.levels.len() });
        }
        let minimal = self.chains(horizon, Extreme::Min)?;
        let maximal = self.chains(horizon, Extreme::Max)?;
        let properly_ordered = minimal.len() == 1 && maximal.len() == 1;
        Ok(ExtremePaths { minimal, maximal, properly_ordered })
    }

    /// Edge at level `i >= 1` of an infinite path.
    pub fn edge_at(&self, p: &LazyPath, i: usize) -> Result<usize> {
        if i <= p.prefix.len() {
            return Ok(p.prefix[i - 1]);
        }
        match &p.tail {
            Tail::Min => self.extreme_edge(i, Extreme::Min),
            Tail::Max => self.extreme_edge(i, Extreme::Max),
            Tail::Periodic(word) => {
                if word.is_empty() {
                    return Err(Error::Invalid("empty periodic word".into()));
                }
                Ok(word[(i - 1) % word.len()])
            }
        }
    }

    /// First `k` edges of `p`.
    pub fn prefix_of(&self, p: &LazyPath, k: usize) -> Result<Vec<usize>> {
        (1..=k).map(|i| self.edge_at(p, i)).collect()
    }

    /// Checks that the prefix is a path and joins its tail.
    pub fn check_path(&self, p: &LazyPath) -> Result<()> {
        let extra = match p.tail {
            Tail::Periodic(ref w) => w.len().max(1) * 2,
            _ => 2,
        };
        let upto = p.prefix.len() + extra;
        let mut prev: Option<usize> = None;
        for i in 1..=upto {
            if !self.has_level(i) {
                break;
            }
            let e = self.edge_at(p, i)?;
            let level = self.level(i)?;
            if e >= level.edges.len() {
                return Err(Error::Invalid(format!("edge {e} does not exist at level {i}")));
            }
            if let Some(v) = prev {
                if level.source(e) != v {
                    return Err(Error::Invalid(format!("path breaks at level {i}")));
                }
            }
            prev = Some(level.range(e));
        }
        Ok(())
    }

    /// The Vershik map; sends the all-maximal path to the all-minimal one.
    pub fn successor(&self, p: &LazyPath) -> Result<LazyPath> {
        self.step(p, Extreme::Max)
    }

    /// The inverse Vershik map.
    pub fn predecessor(&self, p: &LazyPath) -> Result<LazyPath> {
        self.step(p, Extreme::Min)
    }

    fn step(&self, p: &LazyPath, top: Extreme) -> Result<LazyPath> {
        let bottom = match top {
            Extreme::Max => Extreme::Min,
            Extreme::Min => Extreme::Max,
        };
        let top_tail = match top {
            Extreme::Max => Tail::Max,
            Extreme::Min => Tail::Min,
        };
        if !self.is_properly_ordered() {
            return Err(Error::NotProperlyOrdered("extreme paths are not unique".into()));
        }
        let cap = p.prefix.len() + SCAN_CAP;
        let mut found = None;
        for i in 1..=cap {
            if i > p.prefix.len() && p.tail == top_tail {
                return Ok(match bottom {
                    Extreme::Min => LazyPath::min_path(),
                    Extreme::Max => LazyPath::max_path(),
                });
            }
            let e = self.edge_at(p, i)?;
            if !self.is_extreme_edge(i, e, top)? {
                found = Some((i, e));
                break;
            }
        }
        let (q, _) = found.ok_or(Error::HorizonExceeded(cap))?;
        let mut prefix = self.prefix_of(p, q.max(p.prefix.len()))?;
        self.increment(&mut prefix, q, top)?;
        Ok(LazyPath::new(prefix, p.tail.clone()))
    }

    /// Moves the edge at level `q` one step up (`top = Max`) or down in its
    /// order and resets the levels below to the opposite extreme.
    fn increment(&self, prefix: &mut [usize], q: usize, top: Extreme) -> Result<()> {
        let bottom = match top {
            Extreme::Max => Extreme::Min,
            Extreme::Min => Extreme::Max,
        };
        let level = self.level(q)?;
        let e = prefix[q - 1];
        let order = &level.in_order[level.range(e)];
        let r = self.edge_rank(q, e)?;
        let next = match top {
            Extreme::Max => order[r + 1],
            Extreme::Min => order[r - 1],
        };
        prefix[q - 1] = next;
        let mut w = level.source(next);
        for j in (1..q).rev() {
            let f = self.extreme_in_edge(j, w, bottom)?;
            prefix[j - 1] = f;
            w = self.level(j)?.source(f);
        }
        Ok(())
    }

    /// First `keep` edges of the image under the Vershik map (`forward`) or
    /// its inverse of any path beginning with `edges`. Exact once
    /// `edges.len()` reaches [`Self::carry_depth`] of `keep`.
    pub fn step_prefix(&self, edges: &[usize], keep: usize, forward: bool) -> Result<Vec<usize>> {
        let (top, bottom) = if forward { (Extreme::Max, Extreme::Min) } else { (Extreme::Min, Extreme::Max) };
        let mut q = None;
        for (i, &e) in edges.iter().enumerate() {
            if !self.is_extreme_edge(i + 1, e, top)? {
                q = Some(i + 1);
                break;
            }
        }
        match q {
            Some(q) => {
                let mut out = edges[..q.max(keep)].to_vec();
                self.increment(&mut out, q, top)?;
                out.truncate(keep);
                Ok(out)
            }
            None => (1..=keep).map(|k| self.extreme_edge(k, bottom)).collect(),
        }
    }

    /// `lambda^(1 - k)` with `k` the first level where `p` and `q` differ.
    pub fn metric(&self, p: &LazyPath, q: &LazyPath, lambda: f64) -> Result<f64> {
        match self.first_difference(p, q)? {
            None => Ok(0.0),
            Some(k) => Ok(lambda.powi(1 - k as i32)),
        }
    }

    /// First level where the paths differ, `None` if they are equal.
    pub fn first_difference(&self, p: &LazyPath, q: &LazyPath) -> Result<Option<usize>> {
        let lim = p.prefix.len().max(q.prefix.len());
        let same_tail = match (&p.tail, &q.tail) {
            (Tail::Min, Tail::Min) | (Tail::Max, Tail::Max) => true,
            (Tail::Periodic(a), Tail::Periodic(b)) => a == b,
            _ => false,
        };
        let cap = lim + SCAN_CAP;
        for i in 1..=cap {
            if i > lim && same_tail {
                return Ok(None);
            }
            if self.edge_at(p, i)? != self.edge_at(q, i)? {
                return Ok(Some(i));
            }
        }
        Err(Error::HorizonExceeded(cap))
    }

    /// `A_n ... A_{m+1}` with saturating `u64` arithmetic.
    pub fn product_u64(&self, m: usize, n: usize) -> Result<Vec<Vec<u64>>> {
        let size = self.num_vertices(m)?;
        let mut acc: Vec<Vec<u64>> =
            (0..size).map(|i| (0..size).map(|j| u64::from(i == j)).collect()).collect();
        for k in (m + 1)..=n {
            let a = self.level(k)?.matrix();
            acc = a
                .iter()
                .map(|row| {
                    (0..size)
                        .map(|j| {
                            row.iter()
                                .enumerate()
                                .fold(0u64, |s, (w, &x)| s.saturating_add(x.saturating_mul(acc[w][j])))
                        })
                        .collect()
                })
                .collect();
        }
        Ok(acc)
    }

    /// Every block product `A_(k..k+l)` with `k < horizon` has all entries `>= 2` for some `l`.
    pub fn is_strongly_minimal(&self, horizon: usize) -> bool {
        let n = self.levels.len();
        let (starts, reach) = if self.stationary {
            (n, horizon.max(n + 2 * self.period * (self.max_vertices() + 2)))
        } else {
            (horizon.min(n), n)
        };
        (0..starts).all(|k| {
            let mut acc: Option<Vec<Vec<u64>>> = None;
            for top in (k + 1)..=reach {
                let a = match self.level(top) {
                    Ok(l) => l.matrix(),
                    Err(_) => return false,
                };
                let next = match acc {
                    None => a,
                    Some(prev) => a
                        .iter()
                        .map(|row| {
                            (0..prev[0].len())
                                .map(|j| {
                                    row.iter().enumerate().fold(0u64, |s, (w, &x)| {
                                        s.saturating_add(x.saturating_mul(prev[w][j])).min(2)
                                    })
                                })
                                .collect()
                        })
                        .collect(),
                };
                if next.iter().flatten().all(|&x| x >= 2) {
                    return true;
                }
                acc = Some(next);
            }
            false
        })
    }

    /// `E_{m,n}` (or `E_v` for `target = Some(v)`) in lexicographic order.
    pub fn enumerate_paths(&self, m: usize, n: usize, target: Option<usize>) -> Result<Vec<FinitePath>> {
        if m >= n {
            return Err(Error::Invalid(format!("need m < n, got {m} and {n}")));
        }
        if !self.stationary && n > self.levels.len() {
            return Err(Error::LevelOverflow { level: n, materialized: self.levels.len() });
        }
        let mut by_vertex: Vec<Vec<Vec<usize>>> =
            (0..self.num_vertices(m)?).map(|_| vec![Vec::new()]).collect();
        for k in (m + 1)..=n {
            let level = self.level(k)?;
            let mut next = vec![Vec::new(); level.num_ranges];
            for (v, slot) in next.iter_mut().enumerate() {
                if k == n && target.is_some_and(|t| t != v) {
                    continue;
                }
                for &e in &level.in_order[v] {
                    for path in &by_vertex[level.source(e)] {
                        let mut p = path.clone();
                        p.push(e);
                        slot.push(p);
                    }
                }
            }
            by_vertex = next;
        }
        if let Some(t) = target {
            if t >= by_vertex.len() {
                return Err(Error::Invalid(format!("vertex {t} not in level {n}")));
            }
        }
        Ok(by_vertex
            .into_iter()
            .flatten()
            .map(|edges| FinitePath { start: m, edges })
            .collect())
    }

    /// Drops level 1. A purely periodic stationary diagram rotates its block.
    pub fn shift(&self) -> Result<OrderedDiagram> {
        let n = self.levels.len();
        let mut levels = self.levels.clone();
        if self.stationary && n == self.period {
            levels.rotate_left(1);
        } else if n >= 2 {
            levels.remove(0);
        } else {
            return Err(Error::CannotShift);
        }
        OrderedDiagram::new(DiagramSpec { stationary: self.stationary, period: self.period, levels })
    }

    /// Smallest `m' >= m` with `V_{m'} -> V_m` along extreme in-edges constant.
    pub fn carry_depth(&self, m: usize, which: Extreme, cap: usize) -> Result<usize> {
        for top in m..=cap {
            if !self.has_level(top) && top > 0 {
                return Err(Error::LevelOverflow { level: top, materialized: self.levels.len() });
            }
            let mut images: Vec<usize> = (0..self.num_vertices(top)?).collect();
            for k in ((m + 1)..=top).rev() {
                images = images.iter().map(|&v| self.extreme_map(k, v, which)).collect::<Result<_>>()?;
                images.sort_unstable();
                images.dedup();
            }
            if images.len() == 1 {
                return Ok(top);
            }
        }
        Err(Error::LevelCap { level: m, cap })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn missing_edge_in_order_is_reported() {
        let mut spec = builtin::odo2().spec();
        spec.levels[0].in_order[0] = vec![0];
        let diags = validate(&spec);
        assert!(diags.iter().any(|d| d.contains("order not a permutation")));
    }

    #[test]
    fn fib_is_properly_ordered_with_traced_chains() {
        let fib = builtin::fib();
        let ex = fib.extreme_paths(4).unwrap();
        assert!(ex.properly_ordered);
        assert_eq!(ex.minimal[0].edges, vec![2, 1, 2, 1]);
        assert_eq!(ex.maximal[0].edges, vec![1, 2, 1, 2]);
    }

    #[test]
    fn two_parallel_towers_are_not_proper() {
        let spec = DiagramSpec {
            stationary: true,
            period: 1,
            levels: vec![Level {
                num_sources: 2,
                num_ranges: 2,
                edges: vec![(0, 0), (0, 0), (1, 1), (1, 1)],
                in_order: vec![vec![0, 1], vec![2, 3]],
            }],
        };
        let d = OrderedDiagram::new(spec).unwrap();
        let ex = d.extreme_paths(5).unwrap();
        assert!(!ex.properly_ordered);
        assert_eq!(ex.minimal.len(), 2);
        assert!(matches!(d.successor(&LazyPath::min_path()), Err(Error::NotProperlyOrdered(_))));
    }

    #[test]
    fn odometer_adds_one_with_carry() {
        let d = builtin::odo2();
        let p = LazyPath::new(vec![1, 1, 0], Tail::Min);
        let s = d.successor(&p).unwrap();
        assert_eq!(d.prefix_of(&s, 5).unwrap(), vec![0, 0, 1, 0, 0]);
        assert_eq!(d.successor(&LazyPath::max_path()).unwrap(), LazyPath::min_path());
        assert_eq!(d.predecessor(&LazyPath::min_path()).unwrap(), LazyPath::max_path());
    }

    #[test]
    fn fib_path_counts() {
        let d = builtin::fib();
        let counts: Vec<usize> = (1..=5).map(|k| d.enumerate_paths(0, k, None).unwrap().len()).collect();
        assert_eq!(counts, vec![3, 5, 8, 13, 21]);
    }

    #[test]
    fn metric_examples() {
        let d = builtin::odo2();
        let p = LazyPath::new(vec![0], Tail::Max);
        let q = LazyPath::new(vec![1], Tail::Min);
        assert_eq!(d.metric(&p, &q, 2.0).unwrap(), 1.0);
        assert_eq!(d.metric(&p, &p, 2.0).unwrap(), 0.0);
        let fib = builtin::fib();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let a = LazyPath::new(vec![0, 0, 0, 0, 0, 0], Tail::Min);
        let b = LazyPath::new(vec![0, 0, 0, 0, 2, 1], Tail::Min);
        fib.check_path(&a).unwrap();
        fib.check_path(&b).unwrap();
        let dist = fib.metric(&a, &b, phi).unwrap();
        assert!((dist - phi.powi(-4)).abs() < 1e-15);
        assert!((dist - 0.1459).abs() < 1e-4);
    }

    #[test]
    fn strong_minimality() {
        assert!(builtin::odo2().is_strongly_minimal(10));
        assert!(builtin::fib().is_strongly_minimal(10));
        let perm = DiagramSpec {
            stationary: true,
            period: 1,
            levels: vec![Level {
                num_sources: 2,
                num_ranges: 2,
                edges: vec![(1, 0), (0, 1)],
                in_order: vec![vec![0], vec![1]],
            }],
        };
        assert!(!OrderedDiagram::new(perm).unwrap().is_strongly_minimal(10));
    }

    #[test]
    fn carry_depths() {
        assert_eq!(builtin::odo2().carry_depth(3, Extreme::Min, 20).unwrap(), 3);
        assert_eq!(builtin::fib().carry_depth(2, Extreme::Min, 20).unwrap(), 3);
    }

    #[test]
    fn shift_of_stationary_is_itself() {
        let d = builtin::odo2();
        assert_eq!(d.shift().unwrap(), d);
        let f = builtin::fib();
        assert_eq!(f.shift().unwrap().shift().unwrap(), f);
    }
}
