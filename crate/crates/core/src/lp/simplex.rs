//! Bounded-variable revised simplex.
//!
//! Every row `i` carries an activity variable `s_i = a_i · x` with bounds
//! `[row_lo, row_hi]`. A basis is described by the set `S` of basic
//! structurals and the set `T` of tight rows (activity nonbasic, at a bound);
//! all other rows have a basic activity. Nonsingularity of the basis is
//! equivalent to nonsingularity of the square kernel `K = A[T, S]`, so only
//! `K⁻¹` is stored, which keeps the factor small when many rows are slack.

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;
const REFACTOR_INTERVAL: usize = 400;
const DEVEX_RESET: f64 = 1e6;

/// Primal drift tolerated inside the primal phase; the ratio test pulls
/// slightly infeasible basics back onto their bounds.
const GROSS_INFEASIBILITY: f64 = 1e-6;

/// Relative size of the cost shifts used by the dual phase.
const PERTURBATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub feasibility: f64,
    pub optimality: f64,
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-9,
            optimality: 1e-9,
            pivot: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column held at zero.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    /// Activity is basic.
    Loose,
    AtLower,
    AtUpper,
}

/// Warm-start descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub cols: Vec<ColStatus>,
    pub rows: Vec<RowStatus>,
}

#[derive(Debug, Clone)]
struct Row {
    coefs: Vec<(usize, f64)>,
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Col(usize),
    Row(usize),
}

enum Phase {
    Done,
    Unbounded,
    Infeasible,
    Restart,
}

#[derive(Debug, Clone)]
pub struct Simplex {
    tol: Tolerances,
    c: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    rows: Vec<Row>,
    col_status: Vec<ColStatus>,
    row_status: Vec<RowStatus>,
    s_list: Vec<usize>,
    s_pos: Vec<usize>,
    t_list: Vec<usize>,
    t_pos: Vec<usize>,
    /// `K⁻¹`, rows indexed by position in `s_list`, columns by `t_list`.
    inv: Vec<Vec<f64>>,
    x: Vec<f64>,
    act: Vec<f64>,
    pivots_since_refactor: usize,
    iterations: usize,
    max_iterations: usize,
    stall_threshold: usize,
    // scratch
    dense: Vec<f64>,
}

fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

impl Simplex {
    /// Minimize `c · x` over `lo <= x <= hi` (no rows yet).
    pub fn new(c: Vec<f64>, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let n = c.len();
        if lo.len() != n || hi.len() != n {
            return Err(Error::InvalidParameter(
                "objective and bound lengths differ".into(),
            ));
        }
        for j in 0..n {
            if !(lo[j] <= hi[j]) || lo[j] == f64::INFINITY || hi[j] == f64::NEG_INFINITY {
                return Err(Error::InvalidParameter(format!(
                    "bad bounds [{}, {}] on column {j}",
                    lo[j], hi[j]
                )));
            }
        }
        let col_status = (0..n).map(|j| default_status(c[j], lo[j], hi[j])).collect();
        Ok(Self {
            tol: Tolerances::default(),
            c,
            lo,
            hi,
            rows: Vec::new(),
            col_status,
            row_status: Vec::new(),
            s_list: Vec::new(),
            s_pos: vec![NONE; n],
            t_list: Vec::new(),
            t_pos: Vec::new(),
            inv: Vec::new(),
            x: vec![0.0; n],
            act: Vec::new(),
            pivots_since_refactor: 0,
            iterations: 0,
            max_iterations: 200_000 + 200 * n,
            stall_threshold: 500,
            dense: vec![0.0; n],
        })
    }

    pub fn set_tolerances(&mut self, tol: Tolerances) {
        self.tol = tol;
    }

    pub fn set_max_iterations(&mut self, cap: usize) {
        self.max_iterations = cap;
    }

    pub fn num_cols(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Adds `lo <= coefs · x <= hi` with a basic activity. Returns the row index.
    pub fn add_row(&mut self, coefs: Vec<(usize, f64)>, lo: f64, hi: f64) -> Result<usize> {
        if !(lo <= hi) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!(
                "bad row bounds [{lo}, {hi}]"
            )));
        }
        let mut coefs: Vec<(usize, f64)> = coefs.into_iter().filter(|e| e.1 != 0.0).collect();
        coefs.sort_by_key(|e| e.0);
        for w in coefs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameter(format!(
                    "column {} repeated in a row",
                    w[0].0
                )));
            }
        }
        if let Some(&(j, _)) = coefs.last() {
            if j >= self.c.len() {
                return Err(Error::InvalidParameter(format!("column {j} out of range")));
            }
        }
        let act = coefs.iter().map(|&(j, a)| a * self.x[j]).sum();
        self.rows.push(Row { coefs, lo, hi });
        self.row_status.push(RowStatus::Loose);
        self.t_pos.push(NONE);
        self.act.push(act);
        Ok(self.rows.len() - 1)
    }

    /// Removes rows whose activity is basic. Tight rows in `idx` are kept.
    /// Returns the old-to-new index map (`None` for removed rows).
    pub fn remove_loose_rows(&mut self, idx: &[usize]) -> Vec<Option<usize>> {
        let mut drop = vec![false; self.rows.len()];
        for &i in idx {
            if i < self.rows.len() && self.row_status[i] == RowStatus::Loose {
                drop[i] = true;
            }
        }
        let mut map = vec![None; self.rows.len()];
        let mut next = 0;
        for (i, m) in map.iter_mut().enumerate() {
            if !drop[i] {
                *m = Some(next);
                next += 1;
            }
        }
        let mut k = 0;
        self.rows.retain(|_| {
            k += 1;
            !drop[k - 1]
        });
        let mut k = 0;
        self.row_status.retain(|_| {
            k += 1;
            !drop[k - 1]
        });
        let mut k = 0;
        self.act.retain(|_| {
            k += 1;
            !drop[k - 1]
        });
        for r in self.t_list.iter_mut() {
            *r = map[*r].expect("tight rows are never dropped");
        }
        self.t_pos = vec![NONE; self.rows.len()];
        for (a, &r) in self.t_list.iter().enumerate() {
            self.t_pos[r] = a;
        }
        map
    }

    /// Changes the bounds of a column; a nonbasic column moves to the
    /// nearest finite bound.
    pub fn set_col_bounds(&mut self, j: usize, lo: f64, hi: f64) -> Result<()> {
        if !(lo <= hi) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!("bad bounds [{lo}, {hi}]")));
        }
        self.lo[j] = lo;
        self.hi[j] = hi;
        if self.col_status[j] != ColStatus::Basic {
            self.col_status[j] = nearest_bound(self.x[j], lo, hi);
        }
        Ok(())
    }

    pub fn set_row_bounds(&mut self, r: usize, lo: f64, hi: f64) -> Result<()> {
        if !(lo <= hi) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!(
                "bad row bounds [{lo}, {hi}]"
            )));
        }
        self.rows[r].lo = lo;
        self.rows[r].hi = hi;
        let st = self.row_status[r];
        if (st == RowStatus::AtLower && !lo.is_finite())
            || (st == RowStatus::AtUpper && !hi.is_finite())
        {
            self.row_status[r] = if lo.is_finite() {
                RowStatus::AtLower
            } else {
                RowStatus::AtUpper
            };
        }
        Ok(())
    }

    /// Replaces the objective; the basis is kept.
    pub fn set_objective(&mut self, c: Vec<f64>) -> Result<()> {
        if c.len() != self.c.len() {
            return Err(Error::InvalidParameter("objective length changed".into()));
        }
        self.c = c;
        Ok(())
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn activity(&self, row: usize) -> f64 {
        self.act[row]
    }

    pub fn row_bounds(&self, row: usize) -> (f64, f64) {
        (self.rows[row].lo, self.rows[row].hi)
    }

    pub fn row_status(&self, row: usize) -> RowStatus {
        self.row_status[row]
    }

    pub fn objective(&self) -> f64 {
        self.c.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    pub fn basis(&self) -> Basis {
        Basis {
            cols: self.col_status.clone(),
            rows: self.row_status.clone(),
        }
    }

    /// Installs a basis descriptor. A structurally inconsistent descriptor is
    /// repaired at the next factorization.
    pub fn set_basis(&mut self, basis: &Basis) -> Result<()> {
        if basis.cols.len() != self.c.len() || basis.rows.len() != self.rows.len() {
            return Err(Error::InvalidParameter("basis dimensions mismatch".into()));
        }
        self.col_status = basis.cols.clone();
        for j in 0..self.c.len() {
            let st = self.col_status[j];
            let ok = match st {
                ColStatus::Basic => true,
                ColStatus::AtLower => self.lo[j].is_finite(),
                ColStatus::AtUpper => self.hi[j].is_finite(),
                ColStatus::Free => !self.lo[j].is_finite() && !self.hi[j].is_finite(),
            };
            if !ok {
                self.col_status[j] = default_status(self.c[j], self.lo[j], self.hi[j]);
            }
        }
        self.row_status = basis.rows.clone();
        for i in 0..self.rows.len() {
            let r = &self.rows[i];
            let ok = match self.row_status[i] {
                RowStatus::Loose => true,
                RowStatus::AtLower => r.lo.is_finite(),
                RowStatus::AtUpper => r.hi.is_finite(),
            };
            if !ok {
                self.row_status[i] = RowStatus::Loose;
            }
        }
        self.rebuild_lists();
        self.inv.clear();
        self.pivots_since_refactor = usize::MAX;
        Ok(())
    }

    /// Row duals `y` (zero on rows with basic activity) for the current basis.
    pub fn duals(&self) -> Vec<f64> {
        let y_t = self.tight_duals(&self.c);
        let mut y = vec![0.0; self.rows.len()];
        for (a, &r) in self.t_list.iter().enumerate() {
            y[r] = y_t[a];
        }
        y
    }

    /// Reduced costs of all columns for the current basis.
    pub fn reduced_costs(&self) -> Vec<f64> {
        let y_t = self.tight_duals(&self.c);
        let mut d = self.c.clone();
        for (a, &r) in self.t_list.iter().enumerate() {
            for &(j, v) in &self.rows[r].coefs {
                d[j] -= y_t[a] * v;
            }
        }
        d
    }

    fn rebuild_lists(&mut self) {
        self.s_list = (0..self.c.len())
            .filter(|&j| self.col_status[j] == ColStatus::Basic)
            .collect();
        self.s_pos = vec![NONE; self.c.len()];
        for (b, &j) in self.s_list.iter().enumerate() {
            self.s_pos[j] = b;
        }
        self.t_list = (0..self.rows.len())
            .filter(|&i| self.row_status[i] != RowStatus::Loose)
            .collect();
        self.t_pos = vec![NONE; self.rows.len()];
        for (a, &r) in self.t_list.iter().enumerate() {
            self.t_pos[r] = a;
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.col_status[j] {
            ColStatus::AtLower => self.lo[j],
            ColStatus::AtUpper => self.hi[j],
            ColStatus::Free => 0.0,
            ColStatus::Basic => self.x[j],
        }
    }

    fn tight_value(&self, r: usize) -> f64 {
        match self.row_status[r] {
            RowStatus::AtLower => self.rows[r].lo,
            RowStatus::AtUpper => self.rows[r].hi,
            RowStatus::Loose => self.act[r],
        }
    }

    /// Rebuilds `K⁻¹` from scratch. Columns or rows that make `K` singular are
    /// swapped out of the basis.
    fn refactor(&mut self) {
        self.rebuild_lists();
        let nt = self.t_list.len();
        let ns = self.s_list.len();
        // Gauss-Jordan on [K | I] with K = A[T, S]; columns without an
        // acceptable pivot and rows never used as pivots leave the basis.
        let mut k = vec![vec![0.0; ns]; nt];
        let mut scale = 1.0f64;
        for (a, &r) in self.t_list.iter().enumerate() {
            for &(j, v) in &self.rows[r].coefs {
                let b = self.s_pos[j];
                if b != NONE {
                    k[a][b] = v;
                    scale = scale.max(v.abs());
                }
            }
        }
        let mut aug: Vec<Vec<f64>> = (0..nt)
            .map(|a| {
                let mut e = vec![0.0; nt];
                e[a] = 1.0;
                e
            })
            .collect();
        let mut pivot_row = vec![NONE; ns];
        let mut row_used = vec![false; nt];
        for b in 0..ns {
            let mut best = NONE;
            let mut best_val = 1e-9 * scale;
            for a in 0..nt {
                if !row_used[a] && k[a][b].abs() > best_val {
                    best_val = k[a][b].abs();
                    best = a;
                }
            }
            if best == NONE {
                continue;
            }
            row_used[best] = true;
            pivot_row[b] = best;
            let piv = k[best][b];
            let prow: Vec<f64> = k[best][b + 1..].iter().map(|v| v / piv).collect();
            let paug: Vec<f64> = aug[best].iter().map(|v| v / piv).collect();
            for a in 0..nt {
                let f = k[a][b];
                if a == best || f == 0.0 {
                    continue;
                }
                k[a][b] = 0.0;
                for (v, p) in k[a][b + 1..].iter_mut().zip(&prow) {
                    *v -= f * p;
                }
                for (v, p) in aug[a].iter_mut().zip(&paug) {
                    *v -= f * p;
                }
            }
            k[best][b] = 1.0;
            k[best][b + 1..].copy_from_slice(&prow);
            aug[best] = paug;
        }
        let kept_rows: Vec<usize> = (0..nt).filter(|&a| row_used[a]).collect();
        let mut inv = Vec::with_capacity(kept_rows.len());
        for b in 0..ns {
            let a = pivot_row[b];
            if a == NONE {
                let j = self.s_list[b];
                self.col_status[j] = nearest_bound(self.x[j], self.lo[j], self.hi[j]);
            } else {
                inv.push(kept_rows.iter().map(|&c| aug[a][c]).collect::<Vec<f64>>());
            }
        }
        for a in 0..nt {
            if !row_used[a] {
                self.row_status[self.t_list[a]] = RowStatus::Loose;
            }
        }
        if inv.len() != ns || kept_rows.len() != nt {
            self.rebuild_lists();
        }
        debug_assert_eq!(self.s_list.len(), self.t_list.len());
        self.inv = inv;
        self.pivots_since_refactor = 0;
    }

    fn compute_primal(&mut self) {
        let n = self.c.len();
        for j in 0..n {
            if self.col_status[j] != ColStatus::Basic {
                self.x[j] = self.nonbasic_value(j);
            }
        }
        let k = self.t_list.len();
        let mut rhs = vec![0.0; k];
        for (a, &r) in self.t_list.iter().enumerate() {
            let mut v = self.tight_value(r);
            for &(j, coef) in &self.rows[r].coefs {
                if self.s_pos[j] == NONE {
                    v -= coef * self.x[j];
                }
            }
            rhs[a] = v;
        }
        for b in 0..k {
            let row = &self.inv[b];
            let mut v = 0.0;
            for a in 0..k {
                v += row[a] * rhs[a];
            }
            self.x[self.s_list[b]] = v;
        }
        for (i, row) in self.rows.iter().enumerate() {
            self.act[i] = row.coefs.iter().map(|&(j, a)| a * self.x[j]).sum();
        }
    }

    /// Largest relative residual of the tight rows.
    fn tight_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for &r in &self.t_list {
            let target = self.tight_value(r);
            worst = worst.max((self.act[r] - target).abs() / (1.0 + target.abs()));
        }
        worst
    }

    fn tight_duals(&self, cost: &[f64]) -> Vec<f64> {
        let k = self.t_list.len();
        let mut y = vec![0.0; k];
        for b in 0..k {
            let cb = cost[self.s_list[b]];
            if cb != 0.0 {
                for (ya, m) in y.iter_mut().zip(&self.inv[b]) {
                    *ya += cb * m;
                }
            }
        }
        y
    }

    /// Reduced costs of nonbasic columns and tight rows for `cost`.
    fn pricing_vectors(&self, cost: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let y = self.tight_duals(cost);
        let mut d = cost.to_vec();
        for (a, &r) in self.t_list.iter().enumerate() {
            if y[a] != 0.0 {
                for &(j, v) in &self.rows[r].coefs {
                    d[j] -= y[a] * v;
                }
            }
        }
        (d, y)
    }

    fn basic_infeasibility(&self, var: Var) -> f64 {
        let (v, lo, hi) = match var {
            Var::Col(j) => (self.x[j], self.lo[j], self.hi[j]),
            Var::Row(r) => (self.act[r], self.rows[r].lo, self.rows[r].hi),
        };
        if v < lo {
            lo - v
        } else if v > hi {
            v - hi
        } else {
            0.0
        }
    }

    fn max_primal_infeasibility(&self) -> f64 {
        let mut worst = 0.0f64;
        for &j in &self.s_list {
            worst = worst.max(self.basic_infeasibility(Var::Col(j)));
        }
        for r in 0..self.rows.len() {
            if self.row_status[r] == RowStatus::Loose {
                worst = worst.max(self.basic_infeasibility(Var::Row(r)));
            }
        }
        worst
    }

    fn is_dual_feasible(&self, d: &[f64], y: &[f64]) -> bool {
        self.is_dual_feasible_within(d, y, self.tol.optimality)
    }

    fn is_dual_feasible_within(&self, d: &[f64], y: &[f64], tol: f64) -> bool {
        for j in 0..self.c.len() {
            let ok = match self.col_status[j] {
                ColStatus::Basic => true,
                _ if self.lo[j] == self.hi[j] => true,
                ColStatus::AtLower => d[j] >= -tol,
                ColStatus::AtUpper => d[j] <= tol,
                ColStatus::Free => d[j].abs() <= tol,
            };
            if !ok {
                return false;
            }
        }
        for &r in &self.t_list {
            let row = &self.rows[r];
            if row.lo == row.hi {
                continue;
            }
            let ok = match self.row_status[r] {
                RowStatus::AtLower => y[r] >= -tol,
                RowStatus::AtUpper => y[r] <= tol,
                RowStatus::Loose => true,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Derivative of every basic variable when `enter` increases by one.
    /// Returns (d x_S by position, d act by row for loose rows).
    fn column_direction(&mut self, enter: Var) -> (Vec<f64>, Vec<f64>) {
        let k = self.t_list.len();
        let mut gs = vec![0.0; k];
        match enter {
            Var::Col(j) => {
                let u = self.tight_column(j);
                for b in 0..k {
                    let row = &self.inv[b];
                    let mut v = 0.0;
                    for &(a, ua) in &u {
                        v += row[a] * ua;
                    }
                    gs[b] = -v;
                }
            }
            Var::Row(r) => {
                let a = self.t_pos[r];
                for b in 0..k {
                    gs[b] = self.inv[b][a];
                }
            }
        }
        let dense = &mut self.dense;
        for (b, &j) in self.s_list.iter().enumerate() {
            dense[j] = gs[b];
        }
        if let Var::Col(j) = enter {
            dense[j] = 1.0;
        }
        let mut gr = vec![0.0; self.rows.len()];
        for (r, row) in self.rows.iter().enumerate() {
            if self.row_status[r] == RowStatus::Loose {
                gr[r] = row.coefs.iter().map(|&(j, a)| a * dense[j]).sum();
            }
        }
        for &j in &self.s_list {
            dense[j] = 0.0;
        }
        if let Var::Col(j) = enter {
            dense[j] = 0.0;
        }
        (gs, gr)
    }

    /// Sparse `A[T, j]` as (T position, coefficient).
    fn tight_column(&self, j: usize) -> Vec<(usize, f64)> {
        let mut u = Vec::new();
        for (a, &r) in self.t_list.iter().enumerate() {
            if let Ok(p) = self.rows[r].coefs.binary_search_by_key(&j, |e| e.0) {
                u.push((a, self.rows[r].coefs[p].1));
            }
        }
        u
    }

    /// `A[r, S] · K⁻¹`, indexed by T position.
    fn row_times_inverse(&self, r: usize) -> Vec<f64> {
        let k = self.t_list.len();
        let mut z = vec![0.0; k];
        for &(j, v) in &self.rows[r].coefs {
            let b = self.s_pos[j];
            if b != NONE {
                for (za, m) in z.iter_mut().zip(&self.inv[b]) {
                    *za += v * m;
                }
            }
        }
        z
    }

    /// Exchanges `enter` into the basis for `leave`, which becomes nonbasic
    /// at the bound given by `at_upper`. `gs` is the entering direction from
    /// [`Self::column_direction`] and `rho` the tableau row of `leave`.
    fn pivot(&mut self, enter: Var, leave: Var, at_upper: bool, gs: &[f64], rho: &[f64]) {
        match (enter, leave) {
            (Var::Col(j), Var::Col(l)) => {
                let b = self.s_pos[l];
                let piv = -gs[b];
                let mb: Vec<f64> = self.inv[b].iter().map(|v| v / piv).collect();
                for (i, row) in self.inv.iter_mut().enumerate() {
                    if i == b {
                        row.copy_from_slice(&mb);
                    } else if gs[i] != 0.0 {
                        let f = -gs[i];
                        for (m, p) in row.iter_mut().zip(&mb) {
                            *m -= f * p;
                        }
                    }
                }
                self.s_list[b] = j;
                self.s_pos[j] = b;
                self.s_pos[l] = NONE;
            }
            (Var::Col(j), Var::Row(r)) => {
                let mut kappa = 0.0;
                let mut vw = 0.0;
                for &(c, v) in &self.rows[r].coefs {
                    if c == j {
                        kappa = v;
                    }
                    let b = self.s_pos[c];
                    if b != NONE {
                        vw -= v * gs[b];
                    }
                }
                let sigma = kappa - vw;
                for (i, row) in self.inv.iter_mut().enumerate() {
                    let f = -gs[i] / sigma;
                    if f != 0.0 {
                        for (m, za) in row.iter_mut().zip(rho) {
                            *m += f * za;
                        }
                    }
                    row.push(gs[i] / sigma);
                }
                let mut last: Vec<f64> = rho.iter().map(|za| -za / sigma).collect();
                last.push(1.0 / sigma);
                self.inv.push(last);
                self.s_pos[j] = self.s_list.len();
                self.s_list.push(j);
                self.t_pos[r] = self.t_list.len();
                self.t_list.push(r);
            }
            (Var::Row(t), Var::Col(l)) => {
                let a = self.t_pos[t];
                let b = self.s_pos[l];
                let piv = self.inv[b][a];
                let pb = std::mem::take(&mut self.inv[b]);
                for row in self.inv.iter_mut() {
                    if row.is_empty() {
                        continue;
                    }
                    let f = row[a] / piv;
                    if f != 0.0 {
                        for (m, p) in row.iter_mut().zip(&pb) {
                            *m -= f * p;
                        }
                    }
                }
                self.inv.swap_remove(b);
                for row in self.inv.iter_mut() {
                    row.swap_remove(a);
                }
                self.s_list.swap_remove(b);
                self.s_pos[l] = NONE;
                if b < self.s_list.len() {
                    self.s_pos[self.s_list[b]] = b;
                }
                self.t_list.swap_remove(a);
                self.t_pos[t] = NONE;
                if a < self.t_list.len() {
                    self.t_pos[self.t_list[a]] = a;
                }
            }
            (Var::Row(t), Var::Row(r)) => {
                let a = self.t_pos[t];
                let piv = rho[a];
                for row in self.inv.iter_mut() {
                    let ma = row[a] / piv;
                    if ma != 0.0 {
                        for (m, zc) in row.iter_mut().zip(rho) {
                            *m -= ma * zc;
                        }
                    }
                    row[a] = ma;
                }
                self.t_list[a] = r;
                self.t_pos[r] = a;
                self.t_pos[t] = NONE;
            }
        }
        match enter {
            Var::Col(j) => self.col_status[j] = ColStatus::Basic,
            Var::Row(t) => self.row_status[t] = RowStatus::Loose,
        }
        match leave {
            Var::Col(l) => {
                self.col_status[l] = if at_upper {
                    ColStatus::AtUpper
                } else {
                    ColStatus::AtLower
                };
            }
            Var::Row(r) => {
                self.row_status[r] = if at_upper {
                    RowStatus::AtUpper
                } else {
                    RowStatus::AtLower
                };
            }
        }
        self.pivots_since_refactor = self.pivots_since_refactor.saturating_add(1);
    }

    /// Counts an iteration; returns true when the factorization was rebuilt
    /// and primal values recomputed.
    fn bookkeeping(&mut self) -> Result<bool> {
        self.iterations += 1;
        if self.iterations > self.max_iterations {
            return Err(Error::SolverStall {
                iterations: self.iterations,
            });
        }
        let drifted = self.iterations % 25 == 0 && self.tight_residual() > 1e-9;
        let interval = REFACTOR_INTERVAL.max(2 * self.s_list.len());
        if self.pivots_since_refactor >= interval || drifted {
            self.refactor();
            self.compute_primal();
            return Ok(true);
        }
        Ok(false)
    }

    /// Reduced costs: per column, and per row (nonzero only on tight rows).
    fn reduced(&self, cost: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (d, y_t) = self.pricing_vectors(cost);
        let mut y = vec![0.0; self.rows.len()];
        for (a, &r) in self.t_list.iter().enumerate() {
            y[r] = y_t[a];
        }
        (d, y)
    }

    /// Tableau row of the basic variable `leave`: its derivative with respect
    /// to each tight row activity (by T position) and each column.
    fn tableau_row(&self, leave: Var) -> (Vec<f64>, Vec<f64>) {
        let rho: Vec<f64> = match leave {
            Var::Col(j) => self.inv[self.s_pos[j]].clone(),
            Var::Row(r) => self.row_times_inverse(r),
        };
        let mut alpha = vec![0.0; self.c.len()];
        for (a, &r) in self.t_list.iter().enumerate() {
            if rho[a] != 0.0 {
                for &(j, v) in &self.rows[r].coefs {
                    alpha[j] -= rho[a] * v;
                }
            }
        }
        if let Var::Row(r) = leave {
            for &(j, v) in &self.rows[r].coefs {
                alpha[j] += v;
            }
        }
        for &j in &self.s_list {
            alpha[j] = 0.0;
        }
        (rho, alpha)
    }

    /// Moves `enter` by `step` and every basic variable along `(gs, gr)`.
    fn shift_primal(&mut self, enter: Var, step: f64, gs: &[f64], gr: &[f64]) {
        if step == 0.0 {
            return;
        }
        match enter {
            Var::Col(j) => self.x[j] += step,
            Var::Row(r) => self.act[r] += step,
        }
        for (b, &j) in self.s_list.iter().enumerate() {
            self.x[j] += step * gs[b];
        }
        for (r, g) in gr.iter().enumerate() {
            if *g != 0.0 && self.row_status[r] == RowStatus::Loose {
                self.act[r] += step * g;
            }
        }
    }

    /// Dual update after a pivot of `enter` against the tableau row
    /// `(rho, alpha)` of `leave`. `theta = d_enter / alpha_enter`.
    fn shift_dual(&self, d: &mut [f64], y: &mut [f64], theta: f64, rho: &[f64], alpha: &[f64]) {
        if theta == 0.0 {
            return;
        }
        for (dj, a) in d.iter_mut().zip(alpha) {
            if *a != 0.0 {
                *dj -= theta * a;
            }
        }
        for (a, &r) in self.t_list.iter().enumerate() {
            y[r] -= theta * rho[a];
        }
    }

    fn value_of(&self, v: Var) -> f64 {
        match v {
            Var::Col(j) => self.x[j],
            Var::Row(r) => self.act[r],
        }
    }

    fn bounds_of(&self, v: Var) -> (f64, f64) {
        match v {
            Var::Col(j) => (self.lo[j], self.hi[j]),
            Var::Row(r) => (self.rows[r].lo, self.rows[r].hi),
        }
    }

    /// Entry of the entering direction at the basic variable `v`.
    fn direction_at(&self, v: Var, gs: &[f64], gr: &[f64]) -> f64 {
        match v {
            Var::Col(j) => gs[self.s_pos[j]],
            Var::Row(r) => gr[r],
        }
    }

    /// Completes a pivot: `leave` lands on its bound, duals are shifted and
    /// the kernel is updated.
    #[allow(clippy::too_many_arguments)]
    fn exchange(
        &mut self,
        enter: Var,
        leave: Var,
        at_upper: bool,
        (gs, gr): (&[f64], &[f64]),
        (rho, alpha): (&[f64], &[f64]),
        d: &mut [f64],
        y: &mut [f64],
    ) {
        let (lo, hi) = self.bounds_of(leave);
        let target = if at_upper { hi } else { lo };
        let g = self.direction_at(leave, gs, gr);
        let step = (target - self.value_of(leave)) / g;
        self.shift_primal(enter, step, gs, gr);
        match leave {
            Var::Col(l) => self.x[l] = target,
            Var::Row(r) => self.act[r] = target,
        }
        let (d_enter, a_enter) = match enter {
            Var::Col(j) => (d[j], alpha[j]),
            Var::Row(r) => (y[r], rho[self.t_pos[r]]),
        };
        let theta = d_enter / a_enter;
        self.shift_dual(d, y, theta, rho, alpha);
        match enter {
            Var::Col(j) => d[j] = 0.0,
            Var::Row(r) => y[r] = 0.0,
        }
        match leave {
            Var::Col(l) => d[l] = theta,
            Var::Row(r) => y[r] = theta,
        }
        self.pivot(enter, leave, at_upper, gs, rho);
    }

    pub fn solve(&mut self) -> Result<Status> {
        // row additions, loose-row removals and bound or cost changes leave
        // the kernel intact
        if self.pivots_since_refactor == usize::MAX {
            self.refactor();
        }
        self.compute_primal();
        if self.tight_residual() > 1e-9 {
            self.refactor();
            self.compute_primal();
        }
        let zero = vec![0.0; self.c.len()];
        let (d, y) = self.reduced(&self.c);
        if !self.is_dual_feasible(&d, &y) && self.flip_to_dual_feasible(&d, &y) {
            self.compute_primal();
        }
        for _ in 0..50 {
            if self.max_primal_infeasibility() <= self.tol.feasibility {
                let cost = self.c.clone();
                match self.primal(&cost)? {
                    Phase::Done => return Ok(Status::Optimal),
                    Phase::Unbounded => return Ok(Status::Unbounded),
                    Phase::Infeasible | Phase::Restart => continue,
                }
            }
            let (d, y) = self.reduced(&self.c);
            let base = if self.is_dual_feasible(&d, &y) || self.flip_to_dual_feasible(&d, &y) {
                self.compute_primal();
                &self.c
            } else {
                &zero
            };
            let cost = self.perturbed(base);
            match self.dual(&cost)? {
                Phase::Infeasible => return Ok(Status::Infeasible),
                Phase::Done | Phase::Restart | Phase::Unbounded => continue,
            }
        }
        Err(Error::Solver("phase alternation did not settle".into()))
    }

    /// Moves every nonbasic column and tight row whose reduced cost has the
    /// wrong sign to its other bound. Returns `false`, changing nothing, if
    /// some such variable has no finite other bound.
    fn flip_to_dual_feasible(&mut self, d: &[f64], y: &[f64]) -> bool {
        let tol = self.tol.optimality;
        let mut cols = Vec::new();
        for j in 0..self.c.len() {
            if self.lo[j] == self.hi[j] {
                continue;
            }
            match self.col_status[j] {
                ColStatus::AtLower if d[j] < -tol => {
                    if !self.hi[j].is_finite() {
                        return false;
                    }
                    cols.push((j, ColStatus::AtUpper));
                }
                ColStatus::AtUpper if d[j] > tol => {
                    if !self.lo[j].is_finite() {
                        return false;
                    }
                    cols.push((j, ColStatus::AtLower));
                }
                ColStatus::Free if d[j].abs() > tol => return false,
                _ => {}
            }
        }
        let mut rows = Vec::new();
        for &r in &self.t_list {
            let row = &self.rows[r];
            if row.lo == row.hi {
                continue;
            }
            match self.row_status[r] {
                RowStatus::AtLower if y[r] < -tol => {
                    if !row.hi.is_finite() {
                        return false;
                    }
                    rows.push((r, RowStatus::AtUpper));
                }
                RowStatus::AtUpper if y[r] > tol => {
                    if !row.lo.is_finite() {
                        return false;
                    }
                    rows.push((r, RowStatus::AtLower));
                }
                _ => {}
            }
        }
        for (j, st) in cols {
            self.col_status[j] = st;
            self.x[j] = self.nonbasic_value(j);
        }
        for (r, st) in rows {
            self.row_status[r] = st;
            self.act[r] = self.tight_value(r);
        }
        true
    }

    /// Costs pushed away from dual degeneracy: every movable nonbasic column
    /// and tight row gets a small shift in the direction that keeps its
    /// reduced cost dual feasible.
    fn perturbed(&self, base: &[f64]) -> Vec<f64> {
        let mut c = base.to_vec();
        for (j, cj) in c.iter_mut().enumerate() {
            if self.lo[j] == self.hi[j] {
                continue;
            }
            let delta = PERTURBATION * (1.0 + cj.abs()) * (0.5 + 0.5 * unit(j as u64));
            match self.col_status[j] {
                ColStatus::AtLower => *cj += delta,
                ColStatus::AtUpper => *cj -= delta,
                _ => {}
            }
        }
        for &r in &self.t_list {
            let row = &self.rows[r];
            if row.lo == row.hi {
                continue;
            }
            let delta = PERTURBATION * (0.5 + 0.5 * unit(!(r as u64)));
            let e = match self.row_status[r] {
                RowStatus::AtLower => delta,
                RowStatus::AtUpper => -delta,
                RowStatus::Loose => continue,
            };
            for &(j, v) in &row.coefs {
                c[j] += e * v;
            }
        }
        c
    }

    fn primal(&mut self, cost: &[f64]) -> Result<Phase> {
        let ftol = self.tol.feasibility;
        let dtol = self.tol.optimality;
        let ptol = self.tol.pivot;
        let mut degenerate = 0usize;
        let (mut d, mut y) = self.reduced(cost);
        loop {
            if self.bookkeeping()? {
                (d, y) = self.reduced(cost);
            }
            let mut infeasibility = self.max_primal_infeasibility();
            if infeasibility > GROSS_INFEASIBILITY && self.pivots_since_refactor > 0 {
                // drift in the incremental updates, not a lost basis
                self.refactor();
                self.compute_primal();
                (d, y) = self.reduced(cost);
                infeasibility = self.max_primal_infeasibility();
            }
            if infeasibility > GROSS_INFEASIBILITY {
                return Ok(Phase::Restart);
            }
            let bland = degenerate > self.stall_threshold;
            // entering: (var, direction)
            let mut best: Option<(Var, f64)> = None;
            let mut best_score = dtol;
            for j in 0..self.c.len() {
                let st = self.col_status[j];
                if st == ColStatus::Basic || self.lo[j] == self.hi[j] {
                    continue;
                }
                let dir = match st {
                    ColStatus::AtLower if d[j] < -dtol => 1.0,
                    ColStatus::AtUpper if d[j] > dtol => -1.0,
                    ColStatus::Free if d[j].abs() > dtol => -d[j].signum(),
                    _ => continue,
                };
                if bland {
                    best = Some((Var::Col(j), dir));
                    break;
                }
                if d[j].abs() > best_score {
                    best_score = d[j].abs();
                    best = Some((Var::Col(j), dir));
                }
            }
            if best.is_none() || !bland {
                for &r in &self.t_list {
                    let row = &self.rows[r];
                    if row.lo == row.hi {
                        continue;
                    }
                    let dir = match self.row_status[r] {
                        RowStatus::AtLower if y[r] < -dtol => 1.0,
                        RowStatus::AtUpper if y[r] > dtol => -1.0,
                        _ => continue,
                    };
                    if bland {
                        if best.is_none() || var_order(Var::Row(r)) < var_order(best.unwrap().0) {
                            best = Some((Var::Row(r), dir));
                        }
                        continue;
                    }
                    if y[r].abs() > best_score {
                        best_score = y[r].abs();
                        best = Some((Var::Row(r), dir));
                    }
                }
            }
            let Some((enter, dir)) = best else {
                return Ok(if infeasibility > ftol {
                    Phase::Restart
                } else {
                    Phase::Done
                });
            };
            let (gs, gr) = self.column_direction(enter);
            // candidates: (var, rate, value, lo, hi)
            let mut cands: Vec<(Var, f64, f64, f64, f64)> = Vec::new();
            for (b, &j) in self.s_list.iter().enumerate() {
                let rate = dir * gs[b];
                if rate.abs() > ptol {
                    cands.push((Var::Col(j), rate, self.x[j], self.lo[j], self.hi[j]));
                }
            }
            for (r, row) in self.rows.iter().enumerate() {
                if self.row_status[r] == RowStatus::Loose {
                    let rate = dir * gr[r];
                    if rate.abs() > ptol {
                        cands.push((Var::Row(r), rate, self.act[r], row.lo, row.hi));
                    }
                }
            }
            let mut theta_max = f64::INFINITY;
            for &(_, rate, v, lo, hi) in &cands {
                let t = if rate < 0.0 {
                    (v - lo + ftol) / -rate
                } else {
                    (hi - v + ftol) / rate
                };
                theta_max = fmin(theta_max, t.max(0.0));
            }
            let (elo, ehi) = self.bounds_of(enter);
            let range = ehi - elo;
            if range <= theta_max && range.is_finite() {
                // bound flip
                self.shift_primal(enter, dir * range, &gs, &gr);
                match enter {
                    Var::Col(j) => {
                        self.col_status[j] = if dir > 0.0 {
                            ColStatus::AtUpper
                        } else {
                            ColStatus::AtLower
                        };
                        self.x[j] = self.nonbasic_value(j);
                    }
                    Var::Row(r) => {
                        self.row_status[r] = if dir > 0.0 {
                            RowStatus::AtUpper
                        } else {
                            RowStatus::AtLower
                        };
                        self.act[r] = self.tight_value(r);
                    }
                }
                degenerate = 0;
                continue;
            }
            if !theta_max.is_finite() {
                return Ok(Phase::Unbounded);
            }
            let mut chosen: Option<(Var, f64, bool, f64)> = None;
            for &(var, rate, v, lo, hi) in &cands {
                let (t, upper) = if rate < 0.0 {
                    ((v - lo) / -rate, false)
                } else {
                    ((hi - v) / rate, true)
                };
                if t > theta_max {
                    continue;
                }
                let better = match chosen {
                    None => true,
                    Some((cv, crate_, _, _)) => {
                        if bland {
                            var_order(var) < var_order(cv)
                        } else {
                            rate.abs() > crate_.abs()
                        }
                    }
                };
                if better {
                    chosen = Some((var, rate, upper, t.max(0.0)));
                }
            }
            let (leave, _, upper, step) = chosen.expect("finite ratio has a candidate");
            if step * best_score.max(dtol) <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            let (rho, alpha) = self.tableau_row(leave);
            self.exchange(
                enter,
                leave,
                upper,
                (&gs, &gr),
                (&rho, &alpha),
                &mut d,
                &mut y,
            );
        }
    }

    fn dual(&mut self, cost: &[f64]) -> Result<Phase> {
        let ftol = self.tol.feasibility;
        let dtol = self.tol.optimality;
        let ptol = self.tol.pivot;
        let mut degenerate = 0usize;
        let (mut d, mut y) = self.reduced(cost);
        // Devex reference weights of the basic variables
        let mut wcol = vec![1.0; self.c.len()];
        let mut wrow = vec![1.0; self.rows.len()];
        loop {
            if self.bookkeeping()? {
                (d, y) = self.reduced(cost);
                if !self.is_dual_feasible_within(&d, &y, GROSS_INFEASIBILITY) {
                    if self.max_primal_infeasibility() <= ftol {
                        return Ok(Phase::Done);
                    }
                    if self.flip_to_dual_feasible(&d, &y) {
                        self.compute_primal();
                    } else if cost.iter().any(|&c| c != 0.0) {
                        return Ok(Phase::Restart);
                    }
                }
            }
            let bland = degenerate > self.stall_threshold;
            // leaving
            let mut leave: Option<Var> = None;
            let mut worst = ftol;
            for &j in &self.s_list {
                let inf = self.basic_infeasibility(Var::Col(j));
                let inf = if inf > ftol {
                    ftol + inf * inf / wcol[j]
                } else {
                    inf
                };
                if inf > worst {
                    worst = inf;
                    leave = Some(Var::Col(j));
                    if bland {
                        break;
                    }
                }
            }
            if leave.is_none() || !bland {
                for r in 0..self.rows.len() {
                    if self.row_status[r] != RowStatus::Loose {
                        continue;
                    }
                    let inf = self.basic_infeasibility(Var::Row(r));
                    let inf = if inf > ftol {
                        ftol + inf * inf / wrow[r]
                    } else {
                        inf
                    };
                    if inf > worst {
                        worst = inf;
                        leave = Some(Var::Row(r));
                        if bland {
                            break;
                        }
                    }
                }
            }
            let Some(leave) = leave else {
                return Ok(Phase::Done);
            };
            let (lo, _) = self.bounds_of(leave);
            let increase = self.value_of(leave) < lo;
            let sgn = if increase { 1.0 } else { -1.0 };
            let (rho, alpha) = self.tableau_row(leave);
            // candidates (var, |alpha|, oriented reduced cost)
            let mut cands: Vec<(Var, f64, f64)> = Vec::new();
            for (j, &aj) in alpha.iter().enumerate() {
                if aj == 0.0 {
                    continue;
                }
                let st = self.col_status[j];
                if st == ColStatus::Basic || self.lo[j] == self.hi[j] {
                    continue;
                }
                let a = sgn * aj;
                let (up, down) = match st {
                    ColStatus::AtLower => (true, false),
                    ColStatus::AtUpper => (false, true),
                    _ => (true, true),
                };
                if up && a > ptol {
                    cands.push((Var::Col(j), a, d[j]));
                } else if down && a < -ptol {
                    cands.push((Var::Col(j), -a, -d[j]));
                }
            }
            for (a, &r) in self.t_list.iter().enumerate() {
                let row = &self.rows[r];
                if row.lo == row.hi {
                    continue;
                }
                let al = sgn * rho[a];
                match self.row_status[r] {
                    RowStatus::AtLower if al > ptol => cands.push((Var::Row(r), al, y[r])),
                    RowStatus::AtUpper if al < -ptol => cands.push((Var::Row(r), -al, -y[r])),
                    _ => {}
                }
            }
            if cands.is_empty() {
                return Ok(Phase::Infeasible);
            }
            let mut theta_max = f64::INFINITY;
            for &(_, a, dj) in &cands {
                theta_max = fmin(theta_max, (dj.max(0.0) + dtol) / a);
            }
            let mut chosen: Option<(Var, f64, f64)> = None;
            for &(var, a, dj) in &cands {
                let t = dj.max(0.0) / a;
                if t > theta_max {
                    continue;
                }
                let better = match chosen {
                    None => true,
                    Some((cv, ca, _)) => {
                        if bland {
                            var_order(var) < var_order(cv)
                        } else {
                            a > ca
                        }
                    }
                };
                if better {
                    chosen = Some((var, a, t));
                }
            }
            let (enter, _, step) = chosen.expect("nonempty");
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            // a reduced cost inside the Harris band is treated as zero
            match enter {
                Var::Col(j) if d[j] * sgn * alpha[j] < 0.0 => d[j] = 0.0,
                Var::Row(r) if y[r] * sgn * rho[self.t_pos[r]] < 0.0 => y[r] = 0.0,
                _ => {}
            }
            let (gs, gr) = self.column_direction(enter);
            let pivot_row = match enter {
                Var::Col(j) => alpha[j],
                Var::Row(r) => rho[self.t_pos[r]],
            };
            let pivot_col = self.direction_at(leave, &gs, &gr);
            if (pivot_row - pivot_col).abs() > 1e-7 * (1.0 + pivot_row.abs()) {
                // the factorization disagrees with itself: rebuild and retry
                self.pivots_since_refactor = usize::MAX;
                continue;
            }
            let wp = match leave {
                Var::Col(l) => wcol[l],
                Var::Row(r) => wrow[r],
            };
            let ratio = wp / (pivot_col * pivot_col);
            let mut reset = false;
            for (b, &j) in self.s_list.iter().enumerate() {
                let w = gs[b] * gs[b] * ratio;
                if w > wcol[j] {
                    wcol[j] = w;
                    reset |= w > DEVEX_RESET;
                }
            }
            for (r, g) in gr.iter().enumerate() {
                if *g != 0.0 && self.row_status[r] == RowStatus::Loose {
                    let w = g * g * ratio;
                    if w > wrow[r] {
                        wrow[r] = w;
                        reset |= w > DEVEX_RESET;
                    }
                }
            }
            match enter {
                Var::Col(j) => wcol[j] = ratio.max(1.0),
                Var::Row(r) => wrow[r] = ratio.max(1.0),
            }
            if reset {
                wcol.fill(1.0);
                wrow.fill(1.0);
            }
            self.exchange(
                enter,
                leave,
                !increase,
                (&gs, &gr),
                (&rho, &alpha),
                &mut d,
                &mut y,
            );
        }
    }
}

fn unit(seed: u64) -> f64 {
    (crate::rng::mix64(seed) >> 11) as f64 / (1u64 << 53) as f64
}

fn var_order(v: Var) -> (usize, usize) {
    match v {
        Var::Col(j) => (0, j),
        Var::Row(r) => (1, r),
    }
}

fn default_status(c: f64, lo: f64, hi: f64) -> ColStatus {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            if c < 0.0 {
                ColStatus::AtUpper
            } else {
                ColStatus::AtLower
            }
        }
        (true, false) => ColStatus::AtLower,
        (false, true) => ColStatus::AtUpper,
        (false, false) => ColStatus::Free,
    }
}

fn nearest_bound(v: f64, lo: f64, hi: f64) -> ColStatus {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            if (v - lo).abs() <= (hi - v).abs() {
                ColStatus::AtLower
            } else {
                ColStatus::AtUpper
            }
        }
        (true, false) => ColStatus::AtLower,
        (false, true) => ColStatus::AtUpper,
        (false, false) => ColStatus::Free,
    }
}
