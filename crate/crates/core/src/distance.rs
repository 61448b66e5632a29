//! Shortest-path statistics, the distance-based non-recovery certificate
//! and asymptotic distance predictions for random block models.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, PlantedInstance};
use crate::metric::{max_metric_violation, num_pairs, pidx, CutVector};

const UNREACHED: u32 = u32::MAX;

/// Hop distances from `s`, `UNREACHED` where there is no path.
pub fn bfs_distances(g: &Graph, s: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.n()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &u in g.neighbors(v) {
            if dist[u] == UNREACHED {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceStats {
    pub n: usize,
    pub connected: bool,
    /// Diameter; `None` when disconnected.
    pub rho_max: Option<u32>,
    /// `(2/n²) Σ_{i<j} ρ(i, j)`; `None` when disconnected.
    pub rho_avg: Option<f64>,
    /// `None` when disconnected or `n < 5`.
    pub c: Option<f64>,
    pub b: Option<f64>,
}

/// `max{0, (3ρ_max - 4ρ_avg) / (1 - 4/n)}`.
pub fn c_of(n: usize, rho_max: f64, rho_avg: f64) -> f64 {
    ((3.0 * rho_max - 4.0 * rho_avg) / (1.0 - 4.0 / n as f64)).max(0.0)
}

/// `(1 + c) / (2ρ_avg + 2c(1 - 1/n))`.
pub fn b_of(n: usize, rho_avg: f64, c: f64) -> f64 {
    (1.0 + c) / (2.0 * rho_avg + 2.0 * c * (1.0 - 1.0 / n as f64))
}

pub fn distance_stats(g: &Graph) -> DistanceStats {
    let n = g.n();
    // per source: (max distance, sum over larger targets, all reached)
    let per: Vec<(u32, u64, bool)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let d = bfs_distances(g, s);
            let reached = d.iter().all(|&x| x != UNREACHED);
            let max = d
                .iter()
                .copied()
                .filter(|&x| x != UNREACHED)
                .max()
                .unwrap_or(0);
            let sum = d[s + 1..]
                .iter()
                .filter(|&&x| x != UNREACHED)
                .map(|&x| u64::from(x))
                .sum();
            (max, sum, reached)
        })
        .collect();
    let connected = per.iter().all(|p| p.2);
    if !connected {
        return DistanceStats {
            n,
            connected,
            rho_max: None,
            rho_avg: None,
            c: None,
            b: None,
        };
    }
    let rho_max = per.iter().map(|p| p.0).max().unwrap_or(0);
    let total: u64 = per.iter().map(|p| p.1).sum();
    let rho_avg = if n == 0 {
        0.0
    } else {
        2.0 * total as f64 / (n * n) as f64
    };
    let (c, b) = if n >= 5 {
        let c = c_of(n, f64::from(rho_max), rho_avg);
        (Some(c), Some(b_of(n, rho_avg, c)))
    } else {
        (None, None)
    };
    DistanceStats {
        n,
        connected,
        rho_max: Some(rho_max),
        rho_avg: Some(rho_avg),
        c,
        b,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NonRecoveryCertificate {
    /// `b(G)·|E| < |E0|`.
    pub applies: bool,
    #[serde(skip)]
    pub x_tilde: CutVector,
    pub lhs: f64,
    pub rhs: f64,
    /// Cost of `x_tilde`, at most `lhs`.
    pub objective: f64,
    pub stats: DistanceStats,
    /// `|Σ x̃ - n²/4|`.
    pub balance_error: f64,
    /// Largest triangle or box violation of `x_tilde`.
    pub max_violation: f64,
}

impl NonRecoveryCertificate {
    pub fn feasible(&self, tol: f64) -> bool {
        self.balance_error <= tol && self.max_violation <= tol
    }
}

/// The point `x̃ ∝ ρ + c` scaled onto the balance hyperplane, with its
/// feasibility audit and the cost bound it certifies.
pub fn nonrecovery_certificate(inst: &PlantedInstance) -> Result<NonRecoveryCertificate> {
    let g = inst.graph();
    let n = g.n();
    if n < 5 {
        return Err(Error::Precondition(format!("need n >= 5, got {n}")));
    }
    let stats = distance_stats(g);
    let (Some(c), Some(b)) = (stats.c, stats.b) else {
        return Err(Error::Precondition("graph is disconnected".into()));
    };
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|s| bfs_distances(g, s))
        .collect();
    let mut values = vec![0.0; num_pairs(n)];
    for i in 0..n {
        for j in i + 1..n {
            values[pidx(i, j, n)] = f64::from(rows[i][j]) + c;
        }
    }
    let total: f64 = values.iter().sum();
    let scale = (n * n) as f64 / 4.0 / total;
    for v in &mut values {
        *v *= scale;
    }
    let x_tilde = CutVector::new(n, values)?;
    let balance_error = (x_tilde.sum() - (n * n) as f64 / 4.0).abs();
    let max_violation = max_metric_violation(&x_tilde);
    let lhs = b * g.num_edges() as f64;
    let rhs = inst.cross_edges() as f64;
    Ok(NonRecoveryCertificate {
        applies: lhs < rhs,
        objective: x_tilde.objective(g),
        x_tilde,
        lhs,
        rhs,
        stats,
        balance_error,
        max_violation,
    })
}

/// Parameter regime of a two-block model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Regime {
    /// Constant `p > q`.
    VeryDense { p: f64, q: f64 },
    /// `p = α n^-ω`, `q = β n^-ω`.
    Dense { omega: f64, alpha: f64, beta: f64 },
    /// `p = α log n / n`, `q = β log n / n`.
    Log { alpha: f64, beta: f64 },
}

/// Predicted diameter and average-distance band at size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimePrediction {
    pub rho_max: f64,
    /// Whether `rho_max` is a point prediction or only an upper bound.
    pub rho_max_exact: bool,
    pub rho_avg_low: f64,
    pub rho_avg_high: f64,
}

impl RegimePrediction {
    pub fn contains(&self, s: &DistanceStats) -> bool {
        let (Some(max), Some(avg)) = (s.rho_max, s.rho_avg) else {
            return false;
        };
        let max = f64::from(max);
        let max_ok = if self.rho_max_exact {
            max == self.rho_max
        } else {
            max <= self.rho_max
        };
        max_ok && avg >= self.rho_avg_low && avg <= self.rho_avg_high
    }
}

fn near_integer(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= 1e-9 * x.abs().max(1.0)).then_some(r)
}

/// Distance predictions for a two-block model, loosened by `eps`.
pub fn predicted_regime(n: usize, regime: Regime, eps: f64) -> Result<RegimePrediction> {
    let nf = n as f64;
    match regime {
        Regime::VeryDense { p, q } => {
            if !(0.0 < q && q < p && p < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "need 0 < q < p < 1, got p = {p}, q = {q}"
                )));
            }
            Ok(RegimePrediction {
                rho_max: 2.0,
                rho_max_exact: true,
                rho_avg_low: (1.0 - eps) * (2.0 - (p + q) / 2.0),
                rho_avg_high: 2.0,
            })
        }
        Regime::Dense { omega, alpha, beta } => {
            if !(0.0 < omega && omega < 1.0 && alpha > 0.0 && beta > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "need 0 < ω < 1 and positive α, β; got ω = {omega}, α = {alpha}, β = {beta}"
                )));
            }
            let k = 1.0 / (1.0 - omega);
            let (rho_max, mu) = match near_integer(k) {
                Some(k) => (k + 1.0, k + (-alpha.powf(k)).exp()),
                None => (k.ceil(), k.ceil()),
            };
            Ok(RegimePrediction {
                rho_max,
                rho_max_exact: true,
                rho_avg_low: (1.0 - eps) * mu,
                rho_avg_high: rho_max,
            })
        }
        Regime::Log { alpha, beta } => {
            if !(alpha > beta && beta > 0.0) || (alpha + beta) / 2.0 <= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "need α > β > 0 with (α + β)/2 > 1, got α = {alpha}, β = {beta}"
                )));
            }
            if n < 16 {
                return Err(Error::InvalidParameter(format!(
                    "n = {n} is too small for log n / log log n"
                )));
            }
            let ln = nf.ln();
            let pn = alpha * ln;
            let top = (1.0 + eps) * ln / ln.ln();
            Ok(RegimePrediction {
                rho_max: top,
                rho_max_exact: false,
                rho_avg_low: (1.0 - eps) * ln / pn.ln(),
                rho_avg_high: top,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n)))).unwrap()
    }

    #[test]
    fn five_cycle() {
        let s = distance_stats(&cycle(5));
        assert_eq!(s.rho_max, Some(2));
        assert_relative_eq!(s.rho_avg.unwrap(), 1.2, epsilon = 1e-15);
        assert_relative_eq!(s.c.unwrap(), 6.0, epsilon = 1e-12);
        assert_relative_eq!(s.b.unwrap(), 7.0 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn complete_graphs() {
        for n in 5..12 {
            let s = distance_stats(&Graph::complete(n));
            let nf = n as f64;
            assert_eq!(s.rho_max, Some(1));
            assert_relative_eq!(s.rho_avg.unwrap(), 1.0 - 1.0 / nf, epsilon = 1e-14);
            assert_eq!(s.c, Some(0.0));
            assert_relative_eq!(
                s.b.unwrap(),
                1.0 / (2.0 * (1.0 - 1.0 / nf)),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn disconnected_and_tiny() {
        let g = Graph::from_edges(6, [(0, 1), (2, 3)]).unwrap();
        let s = distance_stats(&g);
        assert!(!s.connected);
        assert_eq!((s.rho_max, s.c, s.b), (None, None, None));
        let s = distance_stats(&cycle(4));
        assert_eq!(s.rho_max, Some(2));
        assert_eq!(s.c, None);
    }

    #[test]
    fn diameter_two_average() {
        // wheel graphs have diameter 2
        for n in 6..14 {
            let mut e: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
            e.extend((1..n - 1).map(|v| (v, v + 1)));
            e.push((1, n - 1));
            let g = Graph::from_edges(n, e).unwrap();
            let s = distance_stats(&g);
            let nf = n as f64;
            assert_eq!(s.rho_max, Some(2));
            let expected = 2.0 * (1.0 - 1.0 / nf) - 2.0 / (nf * nf) * g.num_edges() as f64;
            assert_relative_eq!(s.rho_avg.unwrap(), expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn b_is_monotone() {
        let n = 30;
        for rho_avg in [1.1, 1.5, 2.0, 3.5] {
            for c in [0.0, 0.5, 2.0, 7.0] {
                let h = 1e-6;
                assert!(b_of(n, rho_avg, c + h) > b_of(n, rho_avg, c));
                assert!(b_of(n, rho_avg + h, c) < b_of(n, rho_avg, c));
            }
        }
    }

    #[test]
    fn certificate_on_small_graphs() {
        let c6 = PlantedInstance::new(cycle(6), vec![0, 0, 0, 1, 1, 1]).unwrap();
        let cert = nonrecovery_certificate(&c6).unwrap();
        assert!(cert.feasible(1e-12), "{cert:?}");
        let kn = PlantedInstance::new(Graph::complete(8), vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
        let cert = nonrecovery_certificate(&kn).unwrap();
        assert!(cert.feasible(1e-12));
        // b|E| equals |E0| exactly on a complete graph
        assert_relative_eq!(cert.lhs, cert.rhs, epsilon = 1e-12);
        let split = PlantedInstance::new(
            Graph::from_edges(6, [(0, 1), (3, 4)]).unwrap(),
            vec![0, 0, 0, 1, 1, 1],
        )
        .unwrap();
        assert!(nonrecovery_certificate(&split).is_err());
    }

    #[test]
    fn audit_passes_on_random_connected_graphs() {
        let mut seen = 0;
        for seed in 0..60 {
            let p = 0.15 + 0.8 * (seed as f64 / 60.0);
            let inst = crate::sampling::sample_sbm(12, p, p * 0.7, seed).unwrap();
            let Ok(cert) = nonrecovery_certificate(&inst) else {
                continue;
            };
            seen += 1;
            assert!(cert.feasible(1e-9), "seed {seed}: {cert:?}");
            assert!(cert.objective <= cert.lhs + 1e-9);
        }
        assert!(seen > 40);
    }

    #[test]
    fn predictions() {
        let v = predicted_regime(100, Regime::VeryDense { p: 0.9, q: 0.7 }, 0.0).unwrap();
        assert_eq!(v.rho_max, 2.0);
        assert_relative_eq!(v.rho_avg_low, 1.2, epsilon = 1e-15);
        let d = predicted_regime(
            1000,
            Regime::Dense {
                omega: 0.5,
                alpha: 1.0,
                beta: 0.5,
            },
            0.0,
        )
        .unwrap();
        assert_eq!(d.rho_max, 3.0);
        assert_relative_eq!(d.rho_avg_low, 2.0 + (-1.0f64).exp(), epsilon = 1e-15);
        let d = predicted_regime(
            1000,
            Regime::Dense {
                omega: 0.4,
                alpha: 1.0,
                beta: 0.5,
            },
            0.0,
        )
        .unwrap();
        assert_eq!(d.rho_max, 2.0);
        assert_eq!(d.rho_avg_low, 2.0);
        assert!(predicted_regime(
            1000,
            Regime::Log {
                alpha: 1.2,
                beta: 0.5
            },
            0.1
        )
        .is_err());
        let l = predicted_regime(
            1000,
            Regime::Log {
                alpha: 4.0,
                beta: 1.0,
            },
            0.1,
        )
        .unwrap();
        assert!(!l.rho_max_exact && l.rho_avg_low < l.rho_avg_high);
    }
}
