//! Exhaustive minimum bisection for small graphs, and the degree-based
//! sufficient condition for the planted bisection to be the unique optimum.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Bisection, Graph, PlantedInstance};

pub const DEFAULT_CAP: usize = 20;

/// Hard ceiling for the enumeration (bitmask width).
const MAX_ENUMERABLE: usize = 40;

#[derive(Debug, Clone, Serialize)]
pub struct ExactResult {
    pub optimal_cost: usize,
    /// Every optimal bisection, one per complement pair, node 0 on side 0.
    #[serde(skip)]
    pub optimizers: Vec<Bisection>,
    pub num_optimizers: usize,
    pub planted_is_unique_optimum: Option<bool>,
}

/// Enumerates the `C(n, n/2) / 2` bisections with node 0 fixed to side 0.
pub fn exact_min_bisection(graph: &Graph, cap: usize) -> Result<ExactResult> {
    let n = graph.n();
    if n > cap {
        return Err(Error::AboveCap { n, cap });
    }
    if n > MAX_ENUMERABLE {
        return Err(Error::InvalidParameter(format!(
            "enumeration supports at most {MAX_ENUMERABLE} nodes"
        )));
    }
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "bisection needs an even positive node count, got {n}"
        )));
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let half = n / 2;

    let cost = |side0: u64| -> usize {
        let other = full & !side0;
        let mut c = 0;
        let mut m = side0;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            c += (adj[v] & other).count_ones() as usize;
            m &= m - 1;
        }
        c
    };

    // Side 0 = {0} ∪ (half-1 nodes from 1..n). Blocks are keyed by the largest
    // chosen node so they can be scanned independently.
    let k = half - 1;
    let blocks: Vec<usize> = if k == 0 { vec![0] } else { (k..n).collect() };
    let per_block: Vec<(usize, Vec<u64>)> = blocks
        .into_par_iter()
        .map(|top| {
            let mut best = usize::MAX;
            let mut arg = Vec::new();
            let mut visit = |mask: u64| {
                let side0 = mask | 1;
                let c = cost(side0);
                if c < best {
                    best = c;
                    arg.clear();
                }
                if c == best {
                    arg.push(side0);
                }
            };
            if k == 0 {
                visit(0);
            } else {
                // choose k-1 of nodes 1..top, plus `top`
                let lower = top - 1;
                let r = k - 1;
                let top_bit = 1u64 << top;
                if r == 0 {
                    visit(top_bit);
                } else {
                    let mut comb: u64 = (1u64 << r) - 1;
                    let limit = 1u64 << lower;
                    while comb < limit {
                        visit((comb << 1) | top_bit);
                        // Gosper's hack
                        let c = comb & comb.wrapping_neg();
                        let rr = comb + c;
                        comb = (((rr ^ comb) >> 2) / c) | rr;
                    }
                }
            }
            (best, arg)
        })
        .collect();

    let optimal_cost = per_block.iter().map(|b| b.0).min().unwrap_or(0);
    let mut masks: Vec<u64> = per_block
        .into_iter()
        .filter(|b| b.0 == optimal_cost)
        .flat_map(|b| b.1)
        .collect();
    masks.sort_unstable();
    let optimizers: Vec<Bisection> = masks
        .iter()
        .map(|&m| {
            Bisection::new((0..n).map(|v| u8::from(m >> v & 1 == 0)).collect())
                .expect("balanced by construction")
        })
        .collect();
    Ok(ExactResult {
        optimal_cost,
        num_optimizers: optimizers.len(),
        optimizers,
        planted_is_unique_optimum: None,
    })
}

/// Exact result with the planted bisection compared against the optimizers.
pub fn exact_for_instance(instance: &PlantedInstance, cap: usize) -> Result<ExactResult> {
    let mut r = exact_min_bisection(instance.graph(), cap)?;
    let unique = r.optimizers.len() == 1 && &r.optimizers[0] == instance.planted();
    r.planted_is_unique_optimum = Some(unique);
    Ok(r)
}

/// True iff the planted bisection is the unique minimum bisection.
pub fn ip_recovery(instance: &PlantedInstance, cap: usize) -> Result<bool> {
    Ok(exact_for_instance(instance, cap)?
        .planted_is_unique_optimum
        .unwrap_or(false))
}

/// `d_in - d_out > n/4 - 1`, evaluated as `4 (d_in - d_out) > n - 4`.
pub fn ip_sufficient_condition(instance: &PlantedInstance) -> bool {
    let (d_in, d_out) = instance.degree_params();
    degree_condition_holds(instance.n(), d_in, d_out)
}

pub fn degree_condition_holds(n: usize, d_in: usize, d_out: usize) -> bool {
    4 * (d_in as i64 - d_out as i64) > n as i64 - 4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::construct_tight_instance;
    use crate::graph::bisection_cost;
    use crate::sampling::sample_sbm;

    fn path4() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    fn two_k4_matching() -> PlantedInstance {
        let mut e = Vec::new();
        for s in [0usize, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    e.push((s + i, s + j));
                }
            }
        }
        for i in 0..4 {
            e.push((i, i + 4));
        }
        PlantedInstance::new(
            Graph::from_edges(8, e).unwrap(),
            vec![0, 0, 0, 0, 1, 1, 1, 1],
        )
        .unwrap()
    }

    #[test]
    fn k4_all_three_bisections_tie() {
        let r = exact_min_bisection(&Graph::complete(4), DEFAULT_CAP).unwrap();
        assert_eq!(r.optimal_cost, 4);
        assert_eq!(r.optimizers.len(), 3);
        let inst = PlantedInstance::new(Graph::complete(4), vec![0, 0, 1, 1]).unwrap();
        assert!(!ip_recovery(&inst, DEFAULT_CAP).unwrap());
    }

    #[test]
    fn path_has_unique_cut() {
        let r = exact_min_bisection(&path4(), DEFAULT_CAP).unwrap();
        assert_eq!(r.optimal_cost, 1);
        assert_eq!(
            r.optimizers,
            vec![Bisection::new(vec![0, 0, 1, 1]).unwrap()]
        );
    }

    #[test]
    fn two_cliques_recovered() {
        let inst = two_k4_matching();
        let r = exact_for_instance(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(r.optimal_cost, 4);
        assert_eq!(r.planted_is_unique_optimum, Some(true));
        assert!(ip_sufficient_condition(&inst));
    }

    #[test]
    fn condition_arithmetic() {
        assert!(degree_condition_holds(8, 3, 1));
        assert!(!degree_condition_holds(16, 3, 3));
        // boundary d_in - d_out = n/4 - 1 exactly
        assert!(!degree_condition_holds(16, 5, 2));
        assert!(degree_condition_holds(16, 6, 2));
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::empty(22);
        let e = exact_min_bisection(&g, DEFAULT_CAP).unwrap_err();
        assert!(matches!(e, Error::AboveCap { n: 22, cap: 20 }));
        assert!(exact_min_bisection(&Graph::empty(5), DEFAULT_CAP).is_err());
    }

    #[test]
    fn matches_naive_enumeration() {
        for seed in 0..30 {
            let inst = sample_sbm(10, 0.6, 0.3, seed).unwrap();
            let g = inst.graph();
            let r = exact_min_bisection(g, DEFAULT_CAP).unwrap();
            let mut best = usize::MAX;
            let mut count = 0;
            for mask in 0u32..(1 << 10) {
                if mask.count_ones() != 5 || mask & 1 == 0 {
                    continue;
                }
                let b = Bisection::new((0..10).map(|v| u8::from(mask >> v & 1 == 1)).collect())
                    .unwrap();
                let c = bisection_cost(g, &b).unwrap();
                if c < best {
                    best = c;
                    count = 0;
                }
                if c == best {
                    count += 1;
                }
            }
            assert_eq!(r.optimal_cost, best);
            assert_eq!(r.optimizers.len(), count);
            for b in &r.optimizers {
                assert_eq!(bisection_cost(g, b).unwrap(), best);
            }
        }
    }

    #[test]
    fn complement_symmetry() {
        let inst = sample_sbm(10, 0.7, 0.2, 4).unwrap();
        let flipped = PlantedInstance::new(
            inst.graph().clone(),
            inst.planted().complement().side().to_vec(),
        )
        .unwrap();
        assert_eq!(
            ip_recovery(&inst, DEFAULT_CAP).unwrap(),
            ip_recovery(&flipped, DEFAULT_CAP).unwrap()
        );
        let g = inst.graph();
        assert_eq!(
            bisection_cost(g, inst.planted()).unwrap(),
            bisection_cost(g, flipped.planted()).unwrap()
        );
    }

    #[test]
    fn tight_case_two_a_not_recovered() {
        let t = construct_tight_instance(16, 3, 3).unwrap();
        assert!(!ip_recovery(&t.instance, DEFAULT_CAP).unwrap());
    }
}
