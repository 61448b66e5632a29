//! Deterministic regular graphs and worst-case planted instances.

use crate::error::{Error, Result};
use crate::graph::{Bisection, Graph, PlantedInstance};

/// `d`-regular graph on `t` nodes (t even) from circulant shifts.
///
/// Node `i` is joined to `i ± s (mod t)` for `s = 1..=d/2`; odd `d` adds the
/// antipodal matching `i ↔ i + t/2`.
pub fn circulant_regular(t: usize, d: usize) -> Result<Graph> {
    if t == 0 || t % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "circulant needs an even positive node count, got {t}"
        )));
    }
    if d >= t {
        return Err(Error::InvalidParameter(format!(
            "degree {d} impossible on {t} nodes"
        )));
    }
    let mut edges = Vec::with_capacity(t * d / 2);
    for i in 0..t {
        for s in 1..=d / 2 {
            let j = (i + s) % t;
            edges.push((i.min(j), i.max(j)));
        }
        if d % 2 == 1 && i < t / 2 {
            edges.push((i, i + t / 2));
        }
    }
    Graph::from_edges(t, edges)
}

/// `d`-regular bipartite graph with sides `0..t/2` and `t/2..t`.
///
/// Node `i` of the first side is joined to `t/2 + (i + s) mod t/2` for
/// `s = 0..d`.
pub fn circulant_bipartite_regular(t: usize, d: usize) -> Result<Graph> {
    if t == 0 || t % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "bipartite circulant needs an even positive node count, got {t}"
        )));
    }
    let h = t / 2;
    if d > h {
        return Err(Error::InvalidParameter(format!(
            "bipartite degree {d} exceeds side size {h}"
        )));
    }
    let mut edges = Vec::with_capacity(h * d);
    for i in 0..h {
        for s in 0..d {
            edges.push((i, h + (i + s) % h));
        }
    }
    Graph::from_edges(t, edges)
}

/// Planted instance on sides `0..n/2` and `n/2..n` whose sides are
/// `d_in`-regular and whose cross edges form a `d_out`-regular bipartite graph.
pub fn regular_planted(n: usize, d_in: usize, d_out: usize) -> Result<PlantedInstance> {
    let h = n / 2;
    let side = circulant_regular(h, d_in)?;
    let cross = circulant_bipartite_regular(n, d_out)?;
    let mut edges: Vec<(usize, usize)> = side.edges().to_vec();
    edges.extend(side.edges().iter().map(|&(i, j)| (i + h, j + h)));
    edges.extend_from_slice(cross.edges());
    let mut labels = vec![0u8; n];
    labels[h..].fill(1);
    PlantedInstance::new(Graph::from_edges(n, edges)?, labels)
}

/// Which construction produced a tight instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TightCase {
    /// `d_in <= d_out - 1`.
    SparseInside,
    /// `d_out <= d_in <= n/4 - 1`.
    QuarterBlocks,
    /// `d_out <= d_in`, `d_in >= n/4`.
    DenseQuarterBlocks,
}

#[derive(Debug, Clone)]
pub struct TightInstance {
    pub instance: PlantedInstance,
    /// A bisection different from the planted one whose cost does not exceed it.
    pub alternative: Bisection,
    pub case: TightCase,
}

/// Worst-case instance with prescribed `(d_in, d_out)` on which minimum
/// bisection does not single out the planted bisection.
///
/// The planted sides are `V1 = 0..n/2` and `V2 = n/2..n`. The alternative
/// bisection swaps the blocks `W1 ⊂ V1` and `W2 ⊂ V2`.
pub fn construct_tight_instance(n: usize, d_in: usize, d_out: usize) -> Result<TightInstance> {
    if n == 0 || n % 8 != 0 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} must be a positive multiple of 8"
        )));
    }
    if d_in + 1 > n / 2 {
        return Err(Error::InvalidParameter(format!(
            "d_in = {d_in} violates d_in <= n/2 - 1 = {}",
            n / 2 - 1
        )));
    }
    if d_out > n / 2 {
        return Err(Error::InvalidParameter(format!(
            "d_out = {d_out} violates d_out <= n/2 = {}",
            n / 2
        )));
    }
    // d_in - d_out <= n/4 - 1
    if d_in + 1 > d_out + n / 4 {
        return Err(Error::InvalidParameter(format!(
            "d_in - d_out = {} violates d_in - d_out <= n/4 - 1 = {}",
            d_in as i64 - d_out as i64,
            n / 4 - 1
        )));
    }

    let half = n / 2;
    let quarter = n / 4;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Embed `g` on the node ids `map[0..]`.
    let mut embed = |g: &Graph, map: &dyn Fn(usize) -> usize| {
        for &(i, j) in g.edges() {
            let (a, b) = (map(i), map(j));
            edges.push((a.min(b), a.max(b)));
        }
    };

    let (case, in_u) = if d_in < d_out {
        let inside = circulant_regular(half, d_in)?;
        embed(&inside, &|v| v);
        embed(&inside, &|v| half + v);
        embed(&circulant_bipartite_regular(n, d_out)?, &|v| v);
        // U1 = {0}, U2 = {n/2}
        let in_u: Box<dyn Fn(usize) -> bool> = Box::new(move |v| v == 0 || v == half);
        (TightCase::SparseInside, in_u)
    } else {
        // U1 = 0..q, W1 = q..2q, U2 = 2q..3q, W2 = 3q..4q
        let (u1, w1, u2, w2) = (0, quarter, 2 * quarter, 3 * quarter);
        let block = |start: usize| move |v: usize| start + v;
        let pair =
            |a: usize, b: usize| move |v: usize| if v < quarter { a + v } else { b + v - quarter };
        let case = if d_in < quarter {
            let inside = circulant_regular(quarter, d_in)?;
            for s in [u1, w1, u2, w2] {
                embed(&inside, &block(s));
            }
            let t = circulant_bipartite_regular(2 * quarter, d_out)?;
            embed(&t, &pair(u1, u2));
            embed(&t, &pair(w1, w2));
            TightCase::QuarterBlocks
        } else {
            let k = Graph::complete(quarter);
            for s in [u1, w1, u2, w2] {
                embed(&k, &block(s));
            }
            let extra = d_in + 1 - quarter;
            let sr = circulant_bipartite_regular(2 * quarter, extra)?;
            embed(&sr, &pair(u1, w1));
            embed(&sr, &pair(u2, w2));
            embed(&sr, &pair(u1, w2));
            embed(&sr, &pair(u2, w1));
            let t = circulant_bipartite_regular(2 * quarter, d_out + quarter - 1 - d_in)?;
            embed(&t, &pair(u1, u2));
            embed(&t, &pair(w1, w2));
            TightCase::DenseQuarterBlocks
        };
        let in_u: Box<dyn Fn(usize) -> bool> =
            Box::new(move |v| v < quarter || (2 * quarter..3 * quarter).contains(&v));
        (case, in_u)
    };

    let graph = Graph::from_edges(n, edges)?;
    let planted: Vec<u8> = (0..n).map(|v| u8::from(v >= half)).collect();
    // alternative: U1 ∪ W2 vs U2 ∪ W1
    let alt: Vec<u8> = (0..n)
        .map(|v| {
            let in_v1 = v < half;
            u8::from(in_v1 != in_u(v))
        })
        .collect();
    Ok(TightInstance {
        instance: PlantedInstance::new(graph, planted)?,
        alternative: Bisection::new(alt)?,
        case,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bisection_cost;

    #[test]
    fn regular_planted_degrees() {
        for (n, d_in, d_out) in [(8, 3, 1), (16, 6, 2), (24, 9, 3), (12, 2, 6)] {
            let inst = regular_planted(n, d_in, d_out).unwrap();
            assert!((0..n).all(|v| inst.deg_in(v) == d_in && inst.deg_out(v) == d_out));
        }
        assert!(regular_planted(10, 2, 1).is_err());
        assert!(regular_planted(12, 6, 1).is_err());
    }

    fn is_regular(g: &Graph, d: usize) -> bool {
        g.degrees().iter().all(|&x| x == d)
    }

    #[test]
    fn circulant_small_cases() {
        assert_eq!(circulant_regular(4, 3).unwrap(), Graph::complete(4));
        assert_eq!(circulant_regular(6, 0).unwrap().num_edges(), 0);
        let g = circulant_regular(8, 3).unwrap();
        assert!(is_regular(&g, 3));
        assert_eq!(g.num_edges(), 12);
        assert!(circulant_regular(6, 6).is_err());
        assert!(circulant_regular(5, 2).is_err());
    }

    #[test]
    fn circulant_all_degrees() {
        for t in (2..=20).step_by(2) {
            for d in 0..t {
                let g = circulant_regular(t, d).unwrap();
                assert!(is_regular(&g, d), "t={t} d={d}");
            }
        }
    }

    #[test]
    fn bipartite_circulant_cases() {
        let c4 = circulant_bipartite_regular(4, 2).unwrap();
        assert_eq!(c4.num_edges(), 4);
        assert!(is_regular(&c4, 2));
        let m = circulant_bipartite_regular(8, 1).unwrap();
        assert!(is_regular(&m, 1));
        assert_eq!(m.num_edges(), 4);
        let g = circulant_bipartite_regular(12, 3).unwrap();
        assert!(is_regular(&g, 3));
        assert_eq!(g.num_edges(), 18);
        assert!(g.edges().iter().all(|&(i, j)| i < 6 && j >= 6));
        assert!(circulant_bipartite_regular(8, 5).is_err());
    }

    #[test]
    fn tight_examples() {
        let t = construct_tight_instance(16, 2, 4).unwrap();
        assert_eq!(t.case, TightCase::SparseInside);
        let g = t.instance.graph();
        let planted = bisection_cost(g, t.instance.planted()).unwrap();
        assert!(bisection_cost(g, &t.alternative).unwrap() <= planted);
        assert_eq!(planted, t.instance.cross_edges());

        let t = construct_tight_instance(16, 3, 3).unwrap();
        assert_eq!(t.case, TightCase::QuarterBlocks);
        let g = t.instance.graph();
        assert_eq!(
            bisection_cost(g, &t.alternative).unwrap(),
            bisection_cost(g, t.instance.planted()).unwrap()
        );
        // T1 and T2 each carry (n/4) * d_out edges
        assert_eq!(t.instance.cross_edges(), 2 * 4 * 3);

        let t = construct_tight_instance(16, 5, 4).unwrap();
        assert_eq!(t.case, TightCase::DenseQuarterBlocks);
        let g = t.instance.graph();
        assert_eq!(
            bisection_cost(g, &t.alternative).unwrap(),
            bisection_cost(g, t.instance.planted()).unwrap()
        );
    }

    #[test]
    fn tight_parameters_are_exact() {
        for n in [8usize, 16, 24] {
            for d_in in 0..n / 2 {
                for d_out in 0..=n / 2 {
                    if d_in + 1 > d_out + n / 4 {
                        assert!(construct_tight_instance(n, d_in, d_out).is_err());
                        continue;
                    }
                    let t = construct_tight_instance(n, d_in, d_out).unwrap();
                    let inst = &t.instance;
                    assert_eq!(inst.degree_params(), (d_in, d_out), "n={n} {d_in} {d_out}");
                    for v in 0..n {
                        assert_eq!(inst.deg_in(v), d_in);
                        assert_eq!(inst.deg_out(v), d_out);
                    }
                    assert_ne!(&t.alternative, inst.planted());
                    let g = inst.graph();
                    assert!(
                        bisection_cost(g, &t.alternative).unwrap()
                            <= bisection_cost(g, inst.planted()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn tight_rejects_violations() {
        assert!(construct_tight_instance(12, 1, 1).is_err());
        assert!(construct_tight_instance(16, 8, 8).is_err());
        assert!(construct_tight_instance(16, 2, 9).is_err());
        let e = construct_tight_instance(16, 4, 0).unwrap_err().to_string();
        assert!(e.contains("n/4 - 1"), "{e}");
    }
}
