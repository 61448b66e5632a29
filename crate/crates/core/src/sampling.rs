//! Seeded Erdős–Rényi, planted-bisection and coupled samplers.
//!
//! Every sampler draws from a single [`SplitMix64`] stream. Pair decisions are
//! taken in lexicographic order over `(i, j)`, `i < j`. A random planted
//! labeling is drawn first, by Fisher–Yates over the node ids: the first `n/2`
//! ids of the shuffled order get label 0.

use crate::error::{Error, Result};
use crate::graph::{Graph, PlantedInstance};
use crate::rng::SplitMix64;

/// How the planted labeling of a sampled instance is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Labeling {
    /// Uniformly random balanced labeling (consumes `n - 1` draws).
    #[default]
    Random,
    /// `V1 = {0..n/2}`; no draws consumed.
    Halves,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {p} is not a probability"
        )));
    }
    Ok(())
}

fn draw_labeling(n: usize, labeling: Labeling, rng: &mut SplitMix64) -> Vec<u8> {
    match labeling {
        Labeling::Halves => (0..n).map(|v| u8::from(v >= n / 2)).collect(),
        Labeling::Random => {
            let mut order: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut order);
            let mut side = vec![1u8; n];
            for &v in &order[..n / 2] {
                side[v] = 0;
            }
            side
        }
    }
}

/// G(n, p).
pub fn sample_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    check_probability("p", p)?;
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.bernoulli(p) {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::from_canonical_sorted(n, edges))
}

/// Planted bisection model: within-side pairs w.p. `p`, cross pairs w.p. `q`.
pub fn sample_sbm(n: usize, p: f64, q: f64, seed: u64) -> Result<PlantedInstance> {
    sample_sbm_with(n, p, q, seed, Labeling::Random)
}

pub fn sample_sbm_with(
    n: usize,
    p: f64,
    q: f64,
    seed: u64,
    labeling: Labeling,
) -> Result<PlantedInstance> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "planted bisection needs an even positive node count, got {n}"
        )));
    }
    check_probability("p", p)?;
    check_probability("q", q)?;
    let mut rng = SplitMix64::new(seed);
    let side = draw_labeling(n, labeling, &mut rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let prob = if side[i] == side[j] { p } else { q };
            if rng.bernoulli(prob) {
                edges.push((i, j));
            }
        }
    }
    PlantedInstance::new(Graph::from_canonical_sorted(n, edges), side)
}

/// Three graphs on one node set with `lower ⊆ middle ⊆ upper` edge sets.
#[derive(Debug, Clone)]
pub struct CoupledTriple {
    pub lower: Graph,
    pub middle: PlantedInstance,
    pub upper: Graph,
}

/// Coupled triple with marginals ER(n, q), SBM with within-probability `q`
/// and cross-probability `p`, and ER(n, p), where `q <= p`.
///
/// `lower ~ G(n, q)` is drawn first. Cross pairs are then OR-ed with
/// independent `Ber(a)` draws, `a = (p - q) / (1 - q)`, giving `middle`;
/// within-side pairs are OR-ed the same way, giving `upper`.
pub fn sample_coupled_triple(n: usize, p: f64, q: f64, seed: u64) -> Result<CoupledTriple> {
    coupled(n, p, q, seed, true)
}

/// The same coupling in the assortative orientation: `middle` has
/// within-probability `p` and cross-probability `q`.
pub fn sample_coupled_triple_assortative(
    n: usize,
    p: f64,
    q: f64,
    seed: u64,
) -> Result<CoupledTriple> {
    coupled(n, p, q, seed, false)
}

fn coupled(n: usize, p: f64, q: f64, seed: u64, cross_first: bool) -> Result<CoupledTriple> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "coupled sampler needs an even positive node count, got {n}"
        )));
    }
    check_probability("p", p)?;
    check_probability("q", q)?;
    if q > p {
        return Err(Error::InvalidParameter(format!(
            "coupling needs q <= p, got q = {q} > p = {p}"
        )));
    }
    if q >= 1.0 {
        return Err(Error::InvalidParameter("coupling needs q < 1".into()));
    }
    let a = (p - q) / (1.0 - q);
    let mut rng = SplitMix64::new(seed);
    let side = draw_labeling(n, Labeling::Random, &mut rng);

    let mut lower = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.bernoulli(q) {
                lower.push((i, j));
            }
        }
    }
    let mut present = vec![false; n * n];
    for &(i, j) in &lower {
        present[i * n + j] = true;
    }
    let augment = |want_cross: bool, present: &mut Vec<bool>, rng: &mut SplitMix64| {
        for i in 0..n {
            for j in i + 1..n {
                if (side[i] != side[j]) == want_cross && rng.bernoulli(a) {
                    present[i * n + j] = true;
                }
            }
        }
    };
    let collect = |present: &Vec<bool>| -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if present[i * n + j] {
                    e.push((i, j));
                }
            }
        }
        e
    };
    augment(cross_first, &mut present, &mut rng);
    let middle = collect(&present);
    augment(!cross_first, &mut present, &mut rng);
    let upper = collect(&present);

    Ok(CoupledTriple {
        lower: Graph::from_canonical_sorted(n, lower),
        middle: PlantedInstance::new(Graph::from_canonical_sorted(n, middle), side)?,
        upper: Graph::from_canonical_sorted(n, upper),
    })
}
