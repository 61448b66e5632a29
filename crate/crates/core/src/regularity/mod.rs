//! Exact degree-constrained subgraphs: bipartite b-factors by maximum flow
//! and general f-factors through Tutte's gadget and blossom matching.

mod blossom;
mod flow;

pub use blossom::{blossom_max_matching, matching_size};

use crate::error::{Error, Result};
use crate::graph::Graph;
use blossom::{Csr, Matcher};
use flow::FlowNetwork;

/// Largest Tutte gadget, in nodes, that [`general_f_factor`] will build.
pub const GADGET_NODE_CAP: usize = 400_000;
/// Largest Tutte gadget, in edges.
pub const GADGET_EDGE_CAP: usize = 40_000_000;

/// Exact degree target per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeDemand(Vec<usize>);

impl DegreeDemand {
    pub fn new(b: Vec<usize>) -> Result<Self> {
        let n = b.len();
        if let Some(v) = b.iter().position(|&x| x + 1 > n.max(1)) {
            return Err(Error::InvalidParameter(format!(
                "demand {} at node {v} exceeds n - 1 = {}",
                b[v],
                n.saturating_sub(1)
            )));
        }
        Ok(Self(b))
    }

    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// True when every node of `f` has exactly its demanded degree in `g`.
pub fn has_degrees(g: &Graph, b: &DegreeDemand) -> bool {
    g.n() == b.0.len() && (0..g.n()).all(|v| g.degree(v) == b.0[v])
}

fn check_sides(g: &Graph, side: &[u8]) -> Result<()> {
    if side.len() != g.n() {
        return Err(Error::InvalidPartition(format!(
            "{} labels for {} nodes",
            side.len(),
            g.n()
        )));
    }
    if let Some(&(i, j)) = g.edges().iter().find(|&&(i, j)| side[i] == side[j]) {
        return Err(Error::InvalidGraph(format!(
            "edge ({i}, {j}) joins two nodes on side {}",
            side[i]
        )));
    }
    Ok(())
}

/// Subset of the edges of a bipartite `g` meeting the demand `b` exactly,
/// or `None` if there is none.
///
/// `side[v]` is 0 or 1 and every edge must join the two sides.
pub fn bipartite_b_factor(
    g: &Graph,
    side: &[u8],
    b: &DegreeDemand,
) -> Result<Option<Vec<(usize, usize)>>> {
    check_sides(g, side)?;
    let n = g.n();
    if b.0.len() != n {
        return Err(Error::InvalidParameter(
            "demand length differs from node count".into(),
        ));
    }
    let need = |s: u8| -> usize { (0..n).filter(|&v| side[v] == s).map(|v| b.0[v]).sum() };
    let total = need(0);
    if total != need(1) || (0..n).any(|v| b.0[v] > g.degree(v)) {
        return Ok(None);
    }
    let (src, sink) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    for v in 0..n {
        if b.0[v] > 0 {
            if side[v] == 0 {
                net.add_arc(src, v, b.0[v] as i64);
            } else {
                net.add_arc(v, sink, b.0[v] as i64);
            }
        }
    }
    let arcs: Vec<(usize, (usize, usize))> = g
        .edges()
        .iter()
        .map(|&(i, j)| {
            let (l, r) = if side[i] == 0 { (i, j) } else { (j, i) };
            (net.add_arc(l, r, 1), (i, j))
        })
        .collect();
    if net.max_flow(src, sink) as usize != total {
        return Ok(None);
    }
    Ok(Some(
        arcs.into_iter()
            .filter(|&(a, _)| net.flow(a) == 1)
            .map(|(_, e)| e)
            .collect(),
    ))
}

/// Smallest `d_target`-regular bipartite supergraph of `g0` obtained by
/// adding cross edges, or `None` if the flow finds no completion.
pub fn regularize_bipartite_add(g0: &Graph, side: &[u8], d_target: usize) -> Result<Option<Graph>> {
    check_sides(g0, side)?;
    let n = g0.n();
    let m = side.iter().filter(|&&s| s == 0).count();
    if 2 * m != n {
        return Err(Error::InvalidPartition(format!(
            "sides of sizes {m} and {}",
            n - m
        )));
    }
    if d_target > m {
        return Err(Error::InvalidParameter(format!(
            "target degree {d_target} exceeds side size {m}"
        )));
    }
    if g0.max_degree() > d_target {
        return Err(Error::InvalidParameter(format!(
            "target degree {d_target} is below the maximum degree {}",
            g0.max_degree()
        )));
    }
    let mut missing = Vec::new();
    for i in (0..n).filter(|&i| side[i] == 0) {
        for j in (0..n).filter(|&j| side[j] == 1) {
            if !g0.has_edge(i, j) {
                missing.push((i.min(j), i.max(j)));
            }
        }
    }
    let complement = Graph::from_edges_dedup(n, missing)?;
    let b = DegreeDemand::new((0..n).map(|v| d_target - g0.degree(v)).collect())?;
    let Some(extra) = bipartite_b_factor(&complement, side, &b)? else {
        return Ok(None);
    };
    let mut edges = g0.edges().to_vec();
    edges.extend(extra);
    Ok(Some(Graph::from_edges_dedup(n, edges)?))
}

/// Subset of the edges of `g` meeting the demand `f` exactly, or `None`.
///
/// Node `v` becomes one stub per incident edge plus `deg(v) - f(v)`
/// absorbers joined to all of its stubs; the two stubs of an edge are
/// joined to each other. Perfect matchings of this gadget are exactly the
/// f-factors: an edge is kept iff its stubs are matched together.
pub fn general_f_factor(g: &Graph, f: &DegreeDemand) -> Result<Option<Vec<(usize, usize)>>> {
    let n = g.n();
    if f.0.len() != n {
        return Err(Error::InvalidParameter(
            "demand length differs from node count".into(),
        ));
    }
    if f.total() % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "demands sum to {}, which is odd",
            f.total()
        )));
    }
    if (0..n).any(|v| f.0[v] > g.degree(v)) {
        return Ok(None);
    }
    let edges = g.edges();
    let m = edges.len();
    let mut absorber_start = vec![0usize; n + 1];
    for v in 0..n {
        absorber_start[v + 1] = absorber_start[v] + g.degree(v) - f.0[v];
    }
    let nodes = 2 * m + absorber_start[n];
    let gadget_edges: usize = m
        + (0..n)
            .map(|v| g.degree(v) * (g.degree(v) - f.0[v]))
            .sum::<usize>();
    if nodes > GADGET_NODE_CAP || gadget_edges > GADGET_EDGE_CAP {
        return Err(Error::InvalidParameter(format!(
            "Tutte gadget would have {nodes} nodes and {gadget_edges} edges, above the caps \
             {GADGET_NODE_CAP} / {GADGET_EDGE_CAP}; use a smaller or sparser instance"
        )));
    }
    let absorber = |v: usize, t: usize| (2 * m + absorber_start[v] + t) as u32;
    // stub of edge k at its first endpoint is 2k, at its second 2k + 1
    let mut stubs: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut list: Vec<(u32, u32)> = Vec::with_capacity(gadget_edges);
    for (k, &(i, j)) in edges.iter().enumerate() {
        stubs[i].push(2 * k as u32);
        stubs[j].push(2 * k as u32 + 1);
        list.push((2 * k as u32, 2 * k as u32 + 1));
    }
    for v in 0..n {
        for &s in &stubs[v] {
            for t in 0..g.degree(v) - f.0[v] {
                list.push((s, absorber(v, t)));
            }
        }
    }
    let csr = Csr::from_edges(nodes, &list);
    drop(list);

    // greedy start: keep an edge while both ends still have room, then let
    // the absorbers take as many dropped stubs as they can
    let mut room = f.0.clone();
    let mut mate: Vec<Option<u32>> = vec![None; nodes];
    let mut free_absorber = vec![0usize; n];
    let mut kept = vec![false; m];
    for (k, &(i, j)) in edges.iter().enumerate() {
        if room[i] > 0 && room[j] > 0 {
            room[i] -= 1;
            room[j] -= 1;
            kept[k] = true;
            mate[2 * k] = Some(2 * k as u32 + 1);
            mate[2 * k + 1] = Some(2 * k as u32);
        }
    }
    for (k, &(i, j)) in edges.iter().enumerate() {
        if kept[k] {
            continue;
        }
        for (stub, v) in [(2 * k, i), (2 * k + 1, j)] {
            if free_absorber[v] < g.degree(v) - f.0[v] {
                let a = absorber(v, free_absorber[v]);
                free_absorber[v] += 1;
                mate[stub] = Some(a);
                mate[a as usize] = Some(stub as u32);
            }
        }
    }
    let mut matcher = Matcher::new(&csr, &mate);
    if !matcher.run(true) {
        return Ok(None);
    }
    let mate = matcher.mates();
    Ok(Some(
        edges
            .iter()
            .enumerate()
            .filter(|&(k, _)| mate[2 * k] == Some(2 * k as u32 + 1))
            .map(|(_, &e)| e)
            .collect(),
    ))
}

/// Spanning `d_target`-regular subgraph of `g`, or `None` if there is none.
pub fn regularize_subgraph(g: &Graph, d_target: usize) -> Result<Option<Graph>> {
    let n = g.n();
    if d_target > g.min_degree() {
        return Err(Error::InvalidParameter(format!(
            "target degree {d_target} exceeds the minimum degree {}",
            g.min_degree()
        )));
    }
    if (n * d_target) % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "no {d_target}-regular graph on {n} nodes: n·d is odd"
        )));
    }
    let f = DegreeDemand::uniform(n, d_target)?;
    Ok(
        general_f_factor(g, &f)?
            .map(|e| Graph::from_edges(n, e).expect("subset of a simple graph")),
    )
}
