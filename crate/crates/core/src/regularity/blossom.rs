//! Maximum-cardinality matching in general graphs by Edmonds' blossom
//! shrinking, with blossom bases kept in a union-find.

use std::collections::VecDeque;

use crate::graph::Graph;

/// Adjacency in compressed rows over vertices `1..=n`; `0` is a sentinel.
#[derive(Debug, Clone)]
pub(crate) struct Csr {
    start: Vec<usize>,
    adj: Vec<u32>,
}

impl Csr {
    /// Builds from 0-based undirected edges on `n` vertices.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut deg = vec![0usize; n + 1];
        for &(u, v) in edges {
            deg[u as usize + 1] += 1;
            deg[v as usize + 1] += 1;
        }
        let mut start = vec![0usize; n + 2];
        for v in 0..=n {
            start[v + 1] = start[v] + deg[v];
        }
        let mut fill = start.clone();
        let mut adj = vec![0u32; 2 * edges.len()];
        for &(u, v) in edges {
            let (a, b) = (u + 1, v + 1);
            adj[fill[a as usize]] = b;
            fill[a as usize] += 1;
            adj[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        Self { start, adj }
    }

    fn n(&self) -> usize {
        self.start.len() - 2
    }

    fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[self.start[v as usize]..self.start[v as usize + 1]]
    }
}

pub(crate) struct Matcher<'a> {
    g: &'a Csr,
    mate: Vec<u32>,
    base: Vec<u32>,
    pre: Vec<u32>,
    // 0 unreached, 1 even, 2 odd
    label: Vec<u8>,
    mark: Vec<u32>,
    stamp: u32,
    queue: VecDeque<u32>,
}

impl<'a> Matcher<'a> {
    /// `mate` is 0-based with `None` for free vertices and must be a matching.
    pub fn new(g: &'a Csr, mate: &[Option<u32>]) -> Self {
        let n = g.n();
        let mut m = vec![0u32; n + 1];
        for (v, w) in mate.iter().enumerate() {
            if let Some(w) = w {
                m[v + 1] = w + 1;
            }
        }
        Self {
            g,
            mate: m,
            base: (0..=n as u32).collect(),
            pre: vec![0; n + 1],
            label: vec![0; n + 1],
            mark: vec![0; n + 1],
            stamp: 0,
            queue: VecDeque::new(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.base[r as usize] != r {
            r = self.base[r as usize];
        }
        let mut y = x;
        while self.base[y as usize] != r {
            let next = self.base[y as usize];
            self.base[y as usize] = r;
            y = next;
        }
        r
    }

    fn lca(&mut self, x: u32, y: u32) -> u32 {
        self.stamp += 1;
        let (mut x, mut y) = (self.find(x), self.find(y));
        while self.mark[x as usize] != self.stamp {
            self.mark[x as usize] = self.stamp;
            let p = self.pre[self.mate[x as usize] as usize];
            x = self.find(p);
            if y != 0 {
                std::mem::swap(&mut x, &mut y);
            }
        }
        x
    }

    fn shrink(&mut self, mut x: u32, mut y: u32, z: u32) {
        while self.find(x) != z {
            self.pre[x as usize] = y;
            y = self.mate[x as usize];
            if self.label[y as usize] == 2 {
                self.label[y as usize] = 1;
                self.queue.push_back(y);
            }
            if self.find(x) == x {
                self.base[x as usize] = z;
            }
            if self.find(y) == y {
                self.base[y as usize] = z;
            }
            x = self.pre[y as usize];
        }
    }

    /// Searches for an augmenting path from the free vertex `s` and applies it.
    fn augment_from(&mut self, s: u32) -> bool {
        for v in 0..self.base.len() {
            self.base[v] = v as u32;
        }
        self.label.fill(0);
        self.pre.fill(0);
        self.queue.clear();
        self.queue.push_back(s);
        self.label[s as usize] = 1;
        let g = self.g;
        while let Some(x) = self.queue.pop_front() {
            for &y in g.neighbors(x) {
                if self.label[y as usize] == 2 || self.find(x) == self.find(y) {
                    continue;
                }
                if self.label[y as usize] == 0 {
                    self.label[y as usize] = 2;
                    self.pre[y as usize] = x;
                    if self.mate[y as usize] == 0 {
                        let mut u = y;
                        while u != 0 {
                            let p = self.pre[u as usize];
                            let last = self.mate[p as usize];
                            self.mate[u as usize] = p;
                            self.mate[p as usize] = u;
                            u = last;
                        }
                        return true;
                    }
                    let m = self.mate[y as usize];
                    self.label[m as usize] = 1;
                    self.queue.push_back(m);
                } else {
                    let z = self.lca(x, y);
                    self.shrink(x, y, z);
                    self.shrink(y, x, z);
                }
            }
        }
        false
    }

    /// Grows the matching to maximum size. With `stop_on_miss`, gives up at
    /// the first free vertex that cannot be matched and returns `false`.
    pub fn run(&mut self, stop_on_miss: bool) -> bool {
        let mut all = true;
        for v in 1..=self.g.n() as u32 {
            if self.mate[v as usize] == 0 && !self.augment_from(v) {
                all = false;
                if stop_on_miss {
                    return false;
                }
            }
        }
        all
    }

    /// 0-based partner of each vertex.
    pub fn mates(&self) -> Vec<Option<u32>> {
        self.mate[1..]
            .iter()
            .map(|&m| (m != 0).then(|| m - 1))
            .collect()
    }
}

/// Maximum-cardinality matching of `g` as a partner per node.
pub fn blossom_max_matching(g: &Graph) -> Vec<Option<usize>> {
    let n = g.n();
    let edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .map(|&(i, j)| (i as u32, j as u32))
        .collect();
    let csr = Csr::from_edges(n, &edges);
    let mut init = vec![None; n];
    for &(i, j) in &edges {
        if init[i as usize].is_none() && init[j as usize].is_none() {
            init[i as usize] = Some(j);
            init[j as usize] = Some(i);
        }
    }
    let mut m = Matcher::new(&csr, &init);
    m.run(false);
    m.mates()
        .into_iter()
        .map(|o| o.map(|v| v as usize))
        .collect()
}

/// Number of edges in a matching given as partners.
pub fn matching_size(mate: &[Option<usize>]) -> usize {
    mate.iter().flatten().count() / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn check_matching(g: &Graph, mate: &[Option<usize>]) {
        for (v, &m) in mate.iter().enumerate() {
            if let Some(w) = m {
                assert_eq!(mate[w], Some(v));
                assert!(g.has_edge(v, w));
            }
        }
    }

    /// Maximum matching by memoised recursion over vertex subsets.
    fn brute_force(g: &Graph) -> usize {
        fn best(g: &Graph, mask: usize, memo: &mut [Option<usize>]) -> usize {
            if mask == 0 {
                return 0;
            }
            if let Some(v) = memo[mask] {
                return v;
            }
            let v = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << v);
            let mut b = best(g, rest, memo);
            for &u in g.neighbors(v) {
                if rest >> u & 1 == 1 {
                    b = b.max(1 + best(g, rest & !(1 << u), memo));
                }
            }
            memo[mask] = Some(b);
            b
        }
        let n = g.n();
        best(g, (1 << n) - 1, &mut vec![None; 1 << n])
    }

    #[test]
    fn small_cases() {
        let c5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let m = blossom_max_matching(&c5);
        check_matching(&c5, &m);
        assert_eq!(matching_size(&m), 2);
        let k4 = Graph::complete(4);
        assert_eq!(matching_size(&blossom_max_matching(&k4)), 2);
        assert_eq!(matching_size(&blossom_max_matching(&Graph::empty(3))), 0);
    }

    #[test]
    fn needs_a_blossom() {
        // triangle 0-1-2 with pendant paths; greedy picks (0,1) first
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 4), (4, 5)]).unwrap();
        let m = blossom_max_matching(&g);
        check_matching(&g, &m);
        assert_eq!(matching_size(&m), 3);
    }

    #[test]
    fn random_graphs_match_brute_force() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..200 {
            let n = 1 + rng.below(12) as usize;
            let p = rng.next_f64();
            let mut e = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.bernoulli(p) {
                        e.push((i, j));
                    }
                }
            }
            let g = Graph::from_edges(n, e).unwrap();
            let m = blossom_max_matching(&g);
            check_matching(&g, &m);
            assert_eq!(matching_size(&m), brute_force(&g), "{g:?}");
        }
    }
}
