//! Exponential-time oracles shared by the integration tests.
#![allow(dead_code)]

use bisect_core::lp::LpProblem;
use bisect_core::rng::SplitMix64;
use bisect_core::Graph;

/// Equality rows and `<=` rows (bounds included) as dense (coefficients, rhs).
fn hyperplanes(p: &LpProblem) -> (Vec<(Vec<f64>, f64)>, Vec<(Vec<f64>, f64)>) {
    let n = p.num_vars();
    let dense = |r: &Vec<(usize, f64)>| {
        let mut v = vec![0.0; n];
        for &(j, a) in r {
            v[j] = a;
        }
        v
    };
    let eqs =
        p.eq.iter()
            .zip(&p.eq_rhs)
            .map(|(r, &b)| (dense(r), b))
            .collect();
    let mut ineqs: Vec<(Vec<f64>, f64)> =
        p.le.iter()
            .zip(&p.le_rhs)
            .map(|(r, &b)| (dense(r), b))
            .collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        ineqs.push((e.clone(), p.upper[j]));
        e[j] = -1.0;
        ineqs.push((e, -p.lower[j]));
    }
    (eqs, ineqs)
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(p, col);
        b.swap(p, col);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::new(), f);
}

/// Minimum over all basic feasible points, or `None` if there is none.
pub fn vertex_oracle(p: &LpProblem) -> Option<f64> {
    let n = p.num_vars();
    let (all_eqs, ineqs) = hyperplanes(p);
    let eqs = independent_rows(all_eqs)?;
    let k = n - eqs.len();
    let mut best: Option<f64> = None;
    combinations(ineqs.len(), k, &mut |pick| {
        let mut a: Vec<Vec<f64>> = eqs.iter().map(|e| e.0.clone()).collect();
        let mut b: Vec<f64> = eqs.iter().map(|e| e.1).collect();
        for &i in pick {
            a.push(ineqs[i].0.clone());
            b.push(ineqs[i].1);
        }
        let Some(x) = solve_square(a, b) else { return };
        let feasible = eqs
            .iter()
            .all(|(r, rhs)| (dot(r, &x) - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()))
            && ineqs
                .iter()
                .all(|(r, rhs)| dot(r, &x) <= rhs + 1e-9 * (1.0 + rhs.abs()));
        if feasible {
            let v = dot(&p.c, &x);
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    });
    best
}

/// Keeps a maximal independent subset of equality rows; `None` if the
/// dropped rows contradict the kept ones.
fn independent_rows(rows: Vec<(Vec<f64>, f64)>) -> Option<Vec<(Vec<f64>, f64)>> {
    let mut kept: Vec<(Vec<f64>, f64)> = Vec::new();
    // reduced copies of kept rows with their pivot column
    let mut reduced: Vec<(Vec<f64>, f64, usize)> = Vec::new();
    for (row, rhs) in rows {
        let (mut r, mut b) = (row.clone(), rhs);
        for (pr, pb, pc) in &reduced {
            let f = r[*pc] / pr[*pc];
            for (x, y) in r.iter_mut().zip(pr) {
                *x -= f * y;
            }
            b -= f * pb;
        }
        let pc = (0..r.len()).max_by(|&i, &j| r[i].abs().total_cmp(&r[j].abs()));
        match pc {
            Some(c) if r[c].abs() > 1e-10 => {
                reduced.push((r, b, c));
                kept.push((row, rhs));
            }
            _ if b.abs() > 1e-9 => return None,
            _ => {}
        }
    }
    Some(kept)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn random_problem(rng: &mut SplitMix64) -> LpProblem {
    let n = 1 + rng.below(6) as usize;
    let rows = rng.below(9) as usize;
    let coef = |rng: &mut SplitMix64| (rng.below(11) as f64 - 5.0) / (1.0 + rng.below(3) as f64);
    let c = (0..n).map(|_| coef(rng)).collect();
    let lower: Vec<f64> = (0..n).map(|_| -(rng.below(4) as f64)).collect();
    let upper: Vec<f64> = lower
        .iter()
        .map(|l| l + 1.0 + rng.below(4) as f64)
        .collect();
    // right-hand sides are anchored at a box point, except now and then
    let anchor: Vec<f64> = lower
        .iter()
        .zip(&upper)
        .map(|(l, u)| l + (u - l) * rng.below(5) as f64 / 4.0)
        .collect();
    let mut p = LpProblem::new(c).with_bounds(lower, upper);
    let mut eq_count = 0;
    for _ in 0..rows {
        let row: Vec<f64> = (0..n)
            .map(|_| if rng.below(3) == 0 { 0.0 } else { coef(rng) })
            .collect();
        let rhs = if rng.below(8) == 0 {
            coef(rng) * 2.0
        } else {
            dot(&row, &anchor) + rng.below(3) as f64
        };
        if eq_count + 1 < n && rng.below(4) == 0 {
            p.add_eq_dense(&row, dot(&row, &anchor));
            eq_count += 1;
        } else {
            p.add_le_dense(&row, rhs);
        }
    }
    p
}

pub fn random_graph(rng: &mut SplitMix64, n: usize, p: f64) -> Graph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.bernoulli(p) {
                e.push((i, j));
            }
        }
    }
    Graph::from_edges(n, e).unwrap()
}

pub fn degrees_in(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut d = vec![0; n];
    for &(i, j) in edges {
        d[i] += 1;
        d[j] += 1;
    }
    d
}

fn components(g: &Graph, keep: &[bool]) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !keep[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            k += 1;
            for &u in g.neighbors(v) {
                if keep[u] && !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Bipartite b-factor existence: `2 N(U, U) + b(V) >= 2 b(U)` for every node
/// subset `U`.
pub fn bipartite_condition(g: &Graph, b: &[usize]) -> bool {
    let n = g.n();
    let bv: usize = b.iter().sum();
    (0u32..1 << n).all(|u| {
        let inside = |v: usize| u >> v & 1 == 1;
        let nuu = g
            .edges()
            .iter()
            .filter(|&&(i, j)| inside(i) && inside(j))
            .count();
        let bu: usize = (0..n).filter(|&v| inside(v)).map(|v| b[v]).sum();
        2 * nuu + bv >= 2 * bu
    })
}

/// Tutte's f-factor criterion over every pair of disjoint sets `(S, T)`.
pub fn tutte_condition(g: &Graph, f: &[usize]) -> bool {
    let n = g.n();
    let mut code = vec![0u8; n];
    loop {
        let in_s = |v: usize| code[v] == 1;
        let in_t = |v: usize| code[v] == 2;
        let mut lhs: i64 = 0;
        for v in 0..n {
            if in_s(v) {
                lhs += f[v] as i64;
            }
            if in_t(v) {
                lhs += g.degree(v) as i64 - f[v] as i64;
            }
        }
        let nst = g
            .edges()
            .iter()
            .filter(|&&(i, j)| (in_s(i) && in_t(j)) || (in_t(i) && in_s(j)))
            .count() as i64;
        let rest: Vec<bool> = (0..n).map(|v| code[v] == 0).collect();
        let odd = components(g, &rest)
            .into_iter()
            .filter(|c| {
                let fc: usize = c.iter().map(|&v| f[v]).sum();
                let ct = c
                    .iter()
                    .map(|&v| g.neighbors(v).iter().filter(|&&u| in_t(u)).count())
                    .sum::<usize>();
                (fc + ct) % 2 == 1
            })
            .count() as i64;
        if lhs - nst - odd < 0 {
            return false;
        }
        let mut k = 0;
        while k < n && code[k] == 2 {
            code[k] = 0;
            k += 1;
        }
        if k == n {
            return true;
        }
        code[k] += 1;
    }
}
