//! Closed-form dual certificates for regular planted instances, their
//! verification against the triangle-constrained dual, and a uniqueness
//! check for the planted cut vector.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::PlantedInstance;
use crate::lp::{cone_has_nonzero, SparseRow};
use crate::metric::{cut_vector, num_pairs, Triangle};
use crate::regularity::{regularize_bipartite_add, regularize_subgraph};

/// Multipliers at or below this count as zero when splitting tight rows.
const POSITIVE: f64 = 1e-9;

/// Dual solution of the metric relaxation for a regular planted instance.
///
/// Only `omega_bar` and `gamma` are stored; the triangle multipliers are
/// computed on demand from them and the instance.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub n: usize,
    pub d_in: usize,
    pub d_out: usize,
    /// Multiplier of the balance row.
    pub omega_bar: f64,
    /// Shared offset of the two rooted multipliers attached to each
    /// within-side edge `(i, j)`, `i < j`.
    pub gamma: BTreeMap<(usize, usize), f64>,
}

impl DualCertificate {
    /// `ω̄ / d_out`, taken as zero when there are no cross edges.
    fn ratio(&self) -> f64 {
        if self.d_out == 0 {
            0.0
        } else {
            self.omega_bar / self.d_out as f64
        }
    }

    /// Multiplier of the row `x_ab <= x_ac + x_bc`.
    pub fn lambda(&self, inst: &PlantedInstance, a: usize, b: usize, c: usize) -> f64 {
        let s = inst.side();
        if s[a] == s[b] {
            return 0.0;
        }
        let (u, w) = if s[a] == s[c] { (a, b) } else { (b, a) };
        let Some(&g) = self.gamma.get(&(u.min(c), u.max(c))) else {
            return 0.0;
        };
        let adj = |x, y| f64::from(u8::from(inst.graph().has_edge(x, y)));
        (0.5 * (adj(u, w) - adj(c, w)) * self.ratio()).max(0.0) + g
    }

    /// Multiplier of the perimeter row on `{i, j, k}`.
    pub fn mu(&self, inst: &PlantedInstance, i: usize, j: usize, k: usize) -> f64 {
        let s = inst.side();
        let (u, v, w) = if s[i] == s[j] {
            (i, j, k)
        } else if s[i] == s[k] {
            (i, k, j)
        } else {
            (j, k, i)
        };
        if s[w] == s[u] || inst.graph().has_edge(u, v) {
            return 0.0;
        }
        let adj = |x, y| f64::from(u8::from(inst.graph().has_edge(x, y)));
        -0.5 * (adj(u, w) + adj(v, w)) * self.ratio()
    }

    /// Multiplier of a triangle row.
    pub fn multiplier(&self, inst: &PlantedInstance, t: Triangle) -> f64 {
        match t {
            Triangle::Rooted { i, j, k, apex: 0 } => self.lambda(inst, i, j, k),
            Triangle::Rooted { i, j, k, apex: 1 } => self.lambda(inst, i, k, j),
            Triangle::Rooted { i, j, k, .. } => self.lambda(inst, j, k, i),
            Triangle::Perimeter { i, j, k } => self.mu(inst, i, j, k),
        }
    }

    /// Dual objective `-2 Σ μ - (n²/4) ω̄`.
    pub fn dual_objective(&self, inst: &PlantedInstance) -> f64 {
        let n = self.n;
        let mu: f64 = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for j in i + 1..n {
                    for k in j + 1..n {
                        acc += self.mu(inst, i, j, k);
                    }
                }
                acc
            })
            .sum();
        -2.0 * mu - (n * n) as f64 / 4.0 * self.omega_bar
    }
}

/// Checks that the planted instance is regular and returns `(d_in, d_out)`.
fn regular_params(inst: &PlantedInstance) -> Result<(usize, usize)> {
    let n = inst.n();
    let d_in = inst.deg_in(0);
    let d_out = inst.deg_out(0);
    for v in 0..n {
        if inst.deg_in(v) != d_in || inst.deg_out(v) != d_out {
            return Err(Error::Precondition(format!(
                "node {v} has within/cross degrees ({}, {}), expected ({d_in}, {d_out})",
                inst.deg_in(v),
                inst.deg_out(v)
            )));
        }
    }
    Ok((d_in, d_out))
}

/// `d_in - d_out >= n/4 - 1`, in integers.
pub fn certificate_condition(n: usize, d_in: usize, d_out: usize) -> bool {
    4 * d_in + 4 >= n + 4 * d_out
}

/// Builds the closed-form dual certificate of a regular planted instance.
///
/// Without cross edges the balance multiplier is zero and each rooted
/// multiplier on a within-side edge equals `1/n`.
pub fn build_dual_certificate(inst: &PlantedInstance) -> Result<DualCertificate> {
    let n = inst.n();
    if n < 4 {
        return Err(Error::Precondition(format!("need n >= 4, got {n}")));
    }
    let (d_in, d_out) = regular_params(inst)?;
    if d_out > 0 && !certificate_condition(n, d_in, d_out) {
        return Err(Error::Precondition(format!(
            "d_in - d_out = {} is below n/4 - 1 = {}",
            d_in as i64 - d_out as i64,
            n as f64 / 4.0 - 1.0
        )));
    }
    let omega_bar = if d_out == 0 {
        0.0
    } else {
        2.0 * d_out as f64 / (n as f64 - 4.0 * d_in as f64 - 4.0)
    };
    let ratio = if d_out == 0 {
        0.0
    } else {
        omega_bar / d_out as f64
    };
    let graph = inst.graph();
    let side = inst.side();
    let mut gamma = BTreeMap::new();
    for &(i, j) in graph.edges() {
        if side[i] != side[j] {
            continue;
        }
        let s: usize = (0..n)
            .filter(|&k| side[k] != side[i])
            .filter(|&k| graph.has_edge(i, k) != graph.has_edge(j, k))
            .count();
        let g = (1.0 + omega_bar + 0.5 * ratio * s as f64) / n as f64;
        // exact zero at the boundary may come out as -1e-17
        gamma.insert((i, j), if g.abs() < 1e-15 { 0.0 } else { g });
    }
    if let Some((e, g)) = gamma.iter().find(|e| *e.1 < 0.0) {
        return Err(Error::Solver(format!("negative gamma {g} on edge {e:?}")));
    }
    Ok(DualCertificate {
        n,
        d_in,
        d_out,
        omega_bar,
        gamma,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DualReport {
    /// Largest violation of a dual equality over all pairs.
    pub max_residual: f64,
    /// Most negative multiplier (zero if none is negative).
    pub min_multiplier: f64,
    /// Positive multipliers sitting on rows that are slack at the planted cut.
    pub slackness_violations: usize,
    pub dual_objective: f64,
    pub planted_value: f64,
    pub passed: bool,
}

/// Substitutes the certificate into the dual of the relaxation.
pub fn verify_dual(cert: &DualCertificate, inst: &PlantedInstance, tol: f64) -> DualReport {
    let n = inst.n();
    let graph = inst.graph();
    let xbar = cut_vector(inst.planted());
    let per_node: Vec<(f64, f64, usize)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            let mut min_mult = 0.0f64;
            let mut slack = 0;
            for j in i + 1..n {
                let mut r = f64::from(u8::from(graph.has_edge(i, j))) + cert.omega_bar;
                for k in (0..n).filter(|&k| k != i && k != j) {
                    r += cert.lambda(inst, i, j, k)
                        - cert.lambda(inst, i, k, j)
                        - cert.lambda(inst, j, k, i)
                        + cert.mu(inst, i, j, k);
                }
                worst = worst.max(r.abs());
                // each triple once, from its smallest node
                for k in j + 1..n {
                    let rows = [
                        Triangle::Rooted { i, j, k, apex: 0 },
                        Triangle::Rooted { i, j, k, apex: 1 },
                        Triangle::Rooted { i, j, k, apex: 2 },
                        Triangle::Perimeter { i, j, k },
                    ];
                    for t in rows {
                        let m = cert.multiplier(inst, t);
                        min_mult = min_mult.min(m);
                        if m > tol && t.value(&xbar) < -0.5 {
                            slack += 1;
                        }
                    }
                }
            }
            (worst, min_mult, slack)
        })
        .collect();
    let max_residual = per_node.iter().fold(0.0f64, |m, p| m.max(p.0));
    let min_multiplier = per_node.iter().fold(0.0f64, |m, p| m.min(p.1));
    let slackness_violations = per_node.iter().map(|p| p.2).sum();
    let dual_objective = cert.dual_objective(inst);
    let planted_value = inst.cross_edges() as f64;
    let passed = max_residual <= tol
        && min_multiplier >= -tol
        && slackness_violations == 0
        && (dual_objective - planted_value).abs() <= tol * (1.0 + planted_value);
    DualReport {
        max_residual,
        min_multiplier,
        slackness_violations,
        dual_objective,
        planted_value,
        passed,
    }
}

/// Decides whether the planted cut vector is the unique optimum of the
/// relaxation, given an optimal dual.
///
/// Tight rows split by the sign of their multiplier: positive ones must stay
/// tight along any optimal direction, zero ones may only loosen. The planted
/// point is unique iff no nonzero direction respects both and the balance row.
pub fn mangasarian_unique_check(inst: &PlantedInstance, cert: &DualCertificate) -> Result<bool> {
    let n = inst.n();
    if n < 8 {
        return Err(Error::Precondition(format!(
            "uniqueness check needs n >= 8, got {n}"
        )));
    }
    let report = verify_dual(cert, inst, 1e-8);
    if !report.passed {
        return Err(Error::Precondition(format!(
            "certificate does not verify (residual {:.3e}, min multiplier {:.3e}, {} slack rows)",
            report.max_residual, report.min_multiplier, report.slackness_violations
        )));
    }
    let xbar = cut_vector(inst.planted());
    let balance: SparseRow = (0..num_pairs(n)).map(|p| (p, 1.0)).collect();
    let mut c_k = Vec::new();
    let mut c_l = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let rows = [
                    Triangle::Rooted { i, j, k, apex: 0 },
                    Triangle::Rooted { i, j, k, apex: 1 },
                    Triangle::Rooted { i, j, k, apex: 2 },
                    Triangle::Perimeter { i, j, k },
                ];
                for t in rows {
                    if t.value(&xbar).abs() > 0.5 {
                        continue;
                    }
                    // rows are stored as `coefs·x <= rhs`; the cone wants `>=`
                    let row: SparseRow = t.row(n).0.into_iter().map(|(p, v)| (p, -v)).collect();
                    if cert.multiplier(inst, t) > POSITIVE {
                        c_k.push(row);
                    } else {
                        c_l.push(row);
                    }
                }
            }
        }
    }
    let probe = cone_has_nonzero(num_pairs(n), &[balance], &c_k, &c_l)?;
    Ok(!probe.nonzero)
}

#[derive(Debug, Clone, Serialize)]
pub struct DeterReport {
    pub applies: bool,
    pub d_in_reg: usize,
    pub d_out_reg: usize,
    pub reasons: Vec<String>,
}

/// Tries to sandwich the instance between regular ones with its own
/// `(d_in, d_out)`: a `d_in`-regular spanning subgraph inside each side and a
/// `d_out`-regular bipartite supergraph of the cross edges. The sufficient
/// condition applies when all three exist and `d_in - d_out >= n/4`.
pub fn check_thm_deter(inst: &PlantedInstance) -> DeterReport {
    let n = inst.n();
    let (d_in, d_out) = inst.degree_params();
    let mut reasons = Vec::new();
    if 4 * d_in < n + 4 * d_out {
        reasons.push(format!(
            "d_in - d_out = {} is below n/4",
            d_in as i64 - d_out as i64
        ));
    }
    for label in [0u8, 1] {
        let (g, _) = inst.side_graph(label);
        match regularize_subgraph(&g, d_in) {
            Ok(Some(_)) => {}
            Ok(None) => reasons.push(format!(
                "side {label} has no {d_in}-regular spanning subgraph"
            )),
            Err(e) => reasons.push(format!("side {label}: {e}")),
        }
    }
    match regularize_bipartite_add(&inst.cross_graph(), inst.side(), d_out) {
        Ok(Some(_)) => {}
        Ok(None) => reasons.push(format!(
            "cross edges have no {d_out}-regular bipartite completion"
        )),
        Err(e) => reasons.push(format!("cross edges: {e}")),
    }
    DeterReport {
        applies: reasons.is_empty(),
        d_in_reg: d_in,
        d_out_reg: d_out,
        reasons,
    }
}
