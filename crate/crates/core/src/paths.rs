use serde::{Deserialize, Serialize};

use crate::diagram::OrderedDiagram;
use crate::error::{Error, Result};

/// A finite path `(e_{start+1}, ..., e_{start+len})`, one edge index per level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinitePath {
    #[serde(default)]
    pub start: usize,
    pub edges: Vec<usize>,
}

impl FinitePath {
    pub fn new(edges: Vec<usize>) -> Self {
        FinitePath { start: 0, edges }
    }

    /// Level of the range vertex.
    pub fn level(&self) -> usize {
        self.start + self.edges.len()
    }
}

/// How an infinite path continues beyond its explicit prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tail {
    /// Agrees with the unique all-minimal path after the prefix.
    #[serde(rename = "MIN")]
    Min,
    /// Agrees with the unique all-maximal path after the prefix.
    #[serde(rename = "MAX")]
    Max,
    /// Edge at level `j` is `word[(j - 1) % word.len()]`; stationary period-1 diagrams only.
    #[serde(rename = "periodic")]
    Periodic(Vec<usize>),
}

/// An element of the path space: an explicit prefix plus a tail rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LazyPath {
    pub prefix: Vec<usize>,
    pub tail: Tail,
}

impl LazyPath {
    pub fn new(prefix: Vec<usize>, tail: Tail) -> Self {
        LazyPath { prefix, tail }
    }

    /// The all-minimal path.
    pub fn min_path() -> Self {
        LazyPath::new(Vec::new(), Tail::Min)
    }

    /// The all-maximal path.
    pub fn max_path() -> Self {
        LazyPath::new(Vec::new(), Tail::Max)
    }
}

/// Edges of one level of a [`PathTable`], indexed by path index.
#[derive(Clone, Debug)]
pub struct LevelPaths {
    /// Index of the prefix one level down (`usize::MAX` on level 0).
    pub parent: Vec<usize>,
    /// Last edge of the path (`usize::MAX` on level 0).
    pub edge: Vec<usize>,
    pub range: Vec<usize>,
    /// `block_start[v]..block_start[v + 1]` is the block `E_v`.
    pub block_start: Vec<usize>,
    /// First index of the sub-block of `E_{r(e)}` whose last edge is `e`.
    pub edge_offset: Vec<usize>,
}

impl LevelPaths {
    pub fn len(&self) -> usize {
        self.range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_empty()
    }

    pub fn block_len(&self, v: usize) -> usize {
        self.block_start[v + 1] - self.block_start[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.block_start.len() - 1
    }
}

/// Every path in `E_{0,k}` for `k <= depth`, in the global path order:
/// grouped by range vertex, then lexicographic in the in-edge orders with the
/// top edge most significant.
#[derive(Clone, Debug)]
pub struct PathTable {
    levels: Vec<LevelPaths>,
}

/// Refuse tables above this many paths on a single level.
pub const MAX_TABLE_PATHS: usize = 1 << 24;

impl PathTable {
    pub fn build(diagram: &OrderedDiagram, depth: usize) -> Result<Self> {
        let v0 = diagram.num_vertices(0)?;
        let mut levels = Vec::with_capacity(depth + 1);
        levels.push(LevelPaths {
            parent: vec![usize::MAX; v0],
            edge: vec![usize::MAX; v0],
            range: (0..v0).collect(),
            block_start: (0..=v0).collect(),
            edge_offset: Vec::new(),
        });
        for k in 1..=depth {
            let level = diagram.level(k)?;
            let prev = &levels[k - 1];
            let mut block_start = Vec::with_capacity(level.num_ranges + 1);
            let mut edge_offset = vec![0; level.edges.len()];
            let mut total = 0usize;
            for v in 0..level.num_ranges {
                block_start.push(total);
                for &e in &level.in_order[v] {
                    edge_offset[e] = total;
                    total += prev.block_len(level.edges[e].0);
                }
            }
            block_start.push(total);
            if total > MAX_TABLE_PATHS {
                return Err(Error::LevelCap { level: k, cap: MAX_TABLE_PATHS });
            }
            let mut parent = Vec::with_capacity(total);
            let mut edge = Vec::with_capacity(total);
            let mut range = Vec::with_capacity(total);
            for v in 0..level.num_ranges {
                for &e in &level.in_order[v] {
                    let s = level.edges[e].0;
                    for q in prev.block_start[s]..prev.block_start[s + 1] {
                        parent.push(q);
                        edge.push(e);
                        range.push(v);
                    }
                }
            }
            levels.push(LevelPaths { parent, edge, range, block_start, edge_offset });
        }
        Ok(PathTable { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> &LevelPaths {
        &self.levels[k]
    }

    /// `|E_{0,k}|`.
    pub fn count(&self, k: usize) -> usize {
        self.levels[k].len()
    }

    /// Index in `E_{0,k}` of the extension of path `parent` (level `k - 1`) by edge `e`.
    pub fn child(&self, diagram_level_source: usize, k: usize, parent: usize, e: usize) -> usize {
        let prev = &self.levels[k - 1];
        self.levels[k].edge_offset[e] + parent - prev.block_start[diagram_level_source]
    }

    /// Index of the level-`j` prefix of path `index` on level `k`.
    pub fn ancestor(&self, k: usize, mut index: usize, j: usize) -> usize {
        debug_assert!(j <= k);
        for level in ((j + 1)..=k).rev() {
            index = self.levels[level].parent[index];
        }
        index
    }

    /// Edge list of path `index` on level `k`.
    pub fn edges(&self, k: usize, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; k];
        for level in (1..=k).rev() {
            out[level - 1] = self.levels[level].edge[index];
            index = self.levels[level].parent[index];
        }
        out
    }

    /// Source vertex in `V_0` of path `index` on level `k`.
    pub fn source(&self, k: usize, index: usize) -> usize {
        self.ancestor(k, index, 0)
    }

    /// Index of an explicit edge list `edges` (levels `1..=edges.len()`).
    pub fn index_of(&self, diagram: &OrderedDiagram, edges: &[usize]) -> Result<usize> {
        if edges.len() > self.depth() {
            return Err(Error::LevelOverflow { level: edges.len(), materialized: self.depth() });
        }
        let first = match edges.first() {
            Some(&e) => diagram.level(1)?.edges[e].0,
            None => return Err(Error::Invalid("empty path has no index".into())),
        };
        let mut index = first;
        for (i, &e) in edges.iter().enumerate() {
            let level = diagram.level(i + 1)?;
            let (s, _) = level.edges[e];
            if self.levels[i].range[index] != s {
                return Err(Error::Invalid(format!("edges do not form a path at level {}", i + 1)));
            }
            index = self.child(s, i + 1, index, e);
        }
        Ok(index)
    }
}
