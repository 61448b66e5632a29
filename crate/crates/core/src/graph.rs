//! Simple undirected graphs, planted bisections and their text formats.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph on nodes `0..n`.
///
/// Edges are stored canonically as `(i, j)` with `i < j`, sorted
/// lexicographically. Membership tests go through a packed bit matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    words: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            edges: Vec::new(),
            neighbors: vec![Vec::new(); n],
            words,
            bits: vec![0; words * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::from_canonical_sorted(n, edges)
    }

    /// Builds a graph from arbitrary pairs. Pairs are canonicalised; self-loops,
    /// out-of-range endpoints and duplicates are rejected.
    pub fn from_edges<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_canonical_sorted(n, edges))
    }

    /// Like [`Graph::from_edges`] but silently drops duplicates.
    pub fn from_edges_dedup<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut v: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        v.sort_unstable();
        v.dedup();
        Self::from_edges(n, v)
    }

    pub(crate) fn from_canonical_sorted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut g = Graph::empty(n);
        for &(i, j) in &edges {
            debug_assert!(i < j && j < n);
            g.bits[i * g.words + j / 64] |= 1 << (j % 64);
            g.bits[j * g.words + i / 64] |= 1 << (i % 64);
            g.neighbors[i].push(j);
            g.neighbors[j].push(i);
        }
        for nb in &mut g.neighbors {
            nb.sort_unstable();
        }
        g.edges = edges;
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j
            && i < self.n
            && j < self.n
            && self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True when every edge of `self` is an edge of `other` (same node count).
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges.iter().all(|&(i, j)| other.has_edge(i, j))
    }

    pub fn with_edge_removed(&self, i: usize, j: usize) -> Graph {
        let (a, b) = (i.min(j), i.max(j));
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&e| e != (a, b))
            .collect();
        Self::from_canonical_sorted(self.n, edges)
    }

    pub fn with_edge_added(&self, i: usize, j: usize) -> Result<Graph> {
        Graph::from_edges(self.n, self.edges.iter().copied().chain([(i, j)]))
    }

    /// Writes the edge-list format: `n m` then one `i j` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_edge_list_string().as_bytes())?;
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut s = String::with_capacity(16 + 12 * self.edges.len());
        let _ = writeln!(s, "{} {}", self.n, self.edges.len());
        for &(i, j) in &self.edges {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph> {
        let mut lines = r.lines().enumerate().filter_map(|(k, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            other => Some((k + 1, other)),
        });
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let header = header?;
        let nums = parse_usizes(&header, hline)?;
        if nums.len() != 2 {
            return Err(Error::Parse {
                line: hline,
                msg: "header must be `n m`".into(),
            });
        }
        let (n, m) = (nums[0], nums[1]);
        let mut pairs = Vec::with_capacity(m);
        for (ln, l) in lines {
            let l = l?;
            let v = parse_usizes(&l, ln)?;
            if v.len() != 2 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "edge line must be `i j`".into(),
                });
            }
            if v[0] >= v[1] || v[1] >= n {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("edge must satisfy 0 <= i < j < n, got {} {}", v[0], v[1]),
                });
            }
            pairs.push((v[0], v[1]));
        }
        if pairs.len() != m {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header announces {m} edges, found {}", pairs.len()),
            });
        }
        Graph::from_edges(n, pairs)
    }
}

fn parse_usizes(s: &str, line: usize) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|e| Error::Parse {
                line,
                msg: format!("`{t}`: {e}"),
            })
        })
        .collect()
}

fn check_balanced(side: &[u8]) -> Result<()> {
    let n = side.len();
    if n % 2 != 0 {
        return Err(Error::InvalidPartition(format!("odd node count {n}")));
    }
    if let Some(&bad) = side.iter().find(|&&l| l > 1) {
        return Err(Error::InvalidPartition(format!(
            "label {bad} not in {{0,1}}"
        )));
    }
    let ones = side.iter().filter(|&&l| l == 1).count();
    if ones * 2 != n {
        return Err(Error::InvalidPartition(format!(
            "unbalanced labeling: {} zeros vs {ones} ones",
            n - ones
        )));
    }
    Ok(())
}

/// Balanced two-labeling of the nodes. A labeling and its complement are the
/// same bisection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bisection {
    side: Vec<u8>,
}

impl Bisection {
    pub fn new(side: Vec<u8>) -> Result<Self> {
        check_balanced(&side)?;
        Ok(Bisection { side })
    }

    /// `V1 = {0..n/2}`, `V2 = {n/2..n}`.
    pub fn halves(n: usize) -> Result<Self> {
        Self::new((0..n).map(|v| u8::from(v >= n / 2)).collect())
    }

    #[inline]
    pub fn side(&self) -> &[u8] {
        &self.side
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.side.len()
    }

    #[inline]
    pub fn label(&self, v: usize) -> u8 {
        self.side[v]
    }

    pub fn complement(&self) -> Bisection {
        Bisection {
            side: self.side.iter().map(|&l| 1 - l).collect(),
        }
    }

    /// Labeling normalised so node 0 carries label 0.
    pub fn canonical(&self) -> Vec<u8> {
        if self.side.first() == Some(&1) {
            self.side.iter().map(|&l| 1 - l).collect()
        } else {
            self.side.clone()
        }
    }

    pub fn members(&self, label: u8) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.side[v] == label).collect()
    }

    pub fn to_line(&self) -> String {
        let mut s = String::with_capacity(2 * self.side.len());
        for (k, l) in self.side.iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            s.push(if *l == 0 { '0' } else { '1' });
        }
        s.push('\n');
        s
    }

    pub fn read_line<R: BufRead>(r: R) -> Result<Bisection> {
        let mut labels = Vec::new();
        for (k, l) in r.lines().enumerate() {
            let l = l?;
            if l.trim().is_empty() {
                continue;
            }
            if !labels.is_empty() {
                return Err(Error::Parse {
                    line: k + 1,
                    msg: "partition file must contain a single line".into(),
                });
            }
            for t in l.split_whitespace() {
                match t {
                    "0" => labels.push(0u8),
                    "1" => labels.push(1u8),
                    other => {
                        return Err(Error::Parse {
                            line: k + 1,
                            msg: format!("label `{other}` not in {{0,1}}"),
                        })
                    }
                }
            }
        }
        Bisection::new(labels)
    }
}

impl PartialEq for Bisection {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for Bisection {}

/// Number of edges whose endpoints carry different labels.
pub fn bisection_cost(graph: &Graph, bisection: &Bisection) -> Result<usize> {
    if graph.n() != bisection.n() {
        return Err(Error::InvalidPartition(format!(
            "labeling has {} entries for a graph on {} nodes",
            bisection.n(),
            graph.n()
        )));
    }
    let s = bisection.side();
    Ok(graph.edges().iter().filter(|&&(i, j)| s[i] != s[j]).count())
}

/// A graph together with its hidden balanced labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedInstance {
    graph: Graph,
    planted: Bisection,
}

impl PlantedInstance {
    pub fn new(graph: Graph, side: Vec<u8>) -> Result<Self> {
        if graph.n() != side.len() {
            return Err(Error::InvalidPartition(format!(
                "labeling has {} entries for a graph on {} nodes",
                side.len(),
                graph.n()
            )));
        }
        Ok(PlantedInstance {
            graph,
            planted: Bisection::new(side)?,
        })
    }

    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    pub fn planted(&self) -> &Bisection {
        &self.planted
    }

    #[inline]
    pub fn side(&self) -> &[u8] {
        self.planted.side()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    #[inline]
    pub fn same_side(&self, i: usize, j: usize) -> bool {
        self.planted.side[i] == self.planted.side[j]
    }

    /// Edges inside side 0, inside side 1, and across.
    pub fn edge_classes(
        &self,
    ) -> (
        Vec<(usize, usize)>,
        Vec<(usize, usize)>,
        Vec<(usize, usize)>,
    ) {
        let s = self.side();
        let (mut e1, mut e2, mut e0) = (Vec::new(), Vec::new(), Vec::new());
        for &(i, j) in self.graph.edges() {
            match (s[i], s[j]) {
                (0, 0) => e1.push((i, j)),
                (1, 1) => e2.push((i, j)),
                _ => e0.push((i, j)),
            }
        }
        (e1, e2, e0)
    }

    /// |E0|, the cost of the planted bisection.
    pub fn cross_edges(&self) -> usize {
        let s = self.side();
        self.graph
            .edges()
            .iter()
            .filter(|&&(i, j)| s[i] != s[j])
            .count()
    }

    pub fn deg_in(&self, v: usize) -> usize {
        let s = self.side();
        self.graph
            .neighbors(v)
            .iter()
            .filter(|&&u| s[u] == s[v])
            .count()
    }

    pub fn deg_out(&self, v: usize) -> usize {
        self.graph.degree(v) - self.deg_in(v)
    }

    /// `(d_in, d_out)`: minimum within-side degree and maximum cross degree.
    pub fn degree_params(&self) -> (usize, usize) {
        let n = self.n();
        let d_in = (0..n).map(|v| self.deg_in(v)).min().unwrap_or(0);
        let d_out = (0..n).map(|v| self.deg_out(v)).max().unwrap_or(0);
        (d_in, d_out)
    }

    /// The graph induced by one side, relabelled to `0..n/2` in increasing
    /// node order; also returns the original ids.
    pub fn side_graph(&self, label: u8) -> (Graph, Vec<usize>) {
        let ids = self.planted.members(label);
        let mut pos = vec![usize::MAX; self.n()];
        for (k, &v) in ids.iter().enumerate() {
            pos[v] = k;
        }
        let s = self.side();
        let edges: Vec<_> = self
            .graph
            .edges()
            .iter()
            .filter(|&&(i, j)| s[i] == label && s[j] == label)
            .map(|&(i, j)| (pos[i].min(pos[j]), pos[i].max(pos[j])))
            .collect();
        (
            Graph::from_edges(ids.len(), edges).expect("induced subgraph is simple"),
            ids,
        )
    }

    /// The bipartite cross graph G0 on all `n` nodes.
    pub fn cross_graph(&self) -> Graph {
        let s = self.side();
        let edges = self
            .graph
            .edges()
            .iter()
            .copied()
            .filter(|&(i, j)| s[i] != s[j])
            .collect();
        Graph::from_canonical_sorted(self.n(), edges)
    }

    pub fn with_graph(&self, graph: Graph) -> Result<PlantedInstance> {
        PlantedInstance::new(graph, self.side().to_vec())
    }
}

/// `(d_in, d_out)` of a planted instance.
pub fn degree_params(instance: &PlantedInstance) -> (usize, usize) {
    instance.degree_params()
}
