//! Linear programming: a bounded-variable simplex, rank and kernel
//! computation, and a probe for nonzero points of polyhedral cones.

mod dense;
mod simplex;

pub use dense::{nullspace_rank, DenseMatrix};
pub use simplex::{Basis, ColStatus, RowStatus, Simplex, Status, Tolerances};

use crate::error::{Error, Result};

pub type SparseRow = Vec<(usize, f64)>;

/// `min c·x` s.t. `eq · x = eq_rhs`, `le · x <= le_rhs`, `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub c: Vec<f64>,
    pub eq: Vec<SparseRow>,
    pub eq_rhs: Vec<f64>,
    pub le: Vec<SparseRow>,
    pub le_rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// Nonnegative columns with the given costs and no rows.
    pub fn new(c: Vec<f64>) -> Self {
        let n = c.len();
        Self {
            c,
            eq: Vec::new(),
            eq_rhs: Vec::new(),
            le: Vec::new(),
            le_rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn add_eq(&mut self, row: SparseRow, rhs: f64) {
        self.eq.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn add_le(&mut self, row: SparseRow, rhs: f64) {
        self.le.push(row);
        self.le_rhs.push(rhs);
    }

    pub fn add_eq_dense(&mut self, row: &[f64], rhs: f64) {
        self.add_eq(sparse(row), rhs);
    }

    pub fn add_le_dense(&mut self, row: &[f64], rhs: f64) {
        self.add_le(sparse(row), rhs);
    }

    fn validate(&self) -> Result<()> {
        let n = self.c.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidParameter(
                "bound vectors have wrong length".into(),
            ));
        }
        if self.eq.len() != self.eq_rhs.len() || self.le.len() != self.le_rhs.len() {
            return Err(Error::InvalidParameter("row and rhs counts differ".into()));
        }
        for row in self.eq.iter().chain(&self.le) {
            if row.iter().any(|&(j, _)| j >= n) {
                return Err(Error::InvalidParameter(
                    "row refers to a missing column".into(),
                ));
            }
        }
        for j in 0..n {
            if !(self.lower[j] <= self.upper[j]) {
                return Err(Error::InvalidParameter(format!(
                    "lower > upper on column {j}"
                )));
            }
        }
        Ok(())
    }
}

fn sparse(row: &[f64]) -> SparseRow {
    row.iter()
        .enumerate()
        .filter(|e| *e.1 != 0.0)
        .map(|(j, &v)| (j, v))
        .collect()
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: Status,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals, equality rows first.
    pub duals: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

pub fn solve(problem: &LpProblem, warm: Option<&Basis>) -> Result<LpOutcome> {
    solve_with(problem, warm, Tolerances::default())
}

pub fn solve_with(problem: &LpProblem, warm: Option<&Basis>, tol: Tolerances) -> Result<LpOutcome> {
    problem.validate()?;
    let mut s = Simplex::new(
        problem.c.clone(),
        problem.lower.clone(),
        problem.upper.clone(),
    )?;
    s.set_tolerances(tol);
    for (row, &b) in problem.eq.iter().zip(&problem.eq_rhs) {
        s.add_row(row.clone(), b, b)?;
    }
    for (row, &b) in problem.le.iter().zip(&problem.le_rhs) {
        s.add_row(row.clone(), f64::NEG_INFINITY, b)?;
    }
    if let Some(b) = warm {
        s.set_basis(b)?;
    }
    let status = s.solve()?;
    Ok(LpOutcome {
        status,
        x: s.x().to_vec(),
        objective: s.objective(),
        duals: s.duals(),
        basis: s.basis(),
        iterations: s.iterations(),
    })
}

/// Result of [`cone_has_nonzero`].
#[derive(Debug, Clone)]
pub struct ConeProbe {
    pub nonzero: bool,
    pub witness: Option<Vec<f64>>,
}

/// Decides whether some `x != 0` satisfies `A x = 0`, `C_K x = 0`, `C_L x >= 0`.
pub fn cone_has_nonzero(
    num_vars: usize,
    a: &[SparseRow],
    c_k: &[SparseRow],
    c_l: &[SparseRow],
) -> Result<ConeProbe> {
    let n = num_vars;
    let all: Vec<&SparseRow> = a.iter().chain(c_k).chain(c_l).collect();
    if all.iter().any(|r| r.iter().any(|&(j, _)| j >= n)) {
        return Err(Error::InvalidParameter(
            "cone row refers to a missing column".into(),
        ));
    }
    let mut m = DenseMatrix::zeros(all.len(), n);
    for (i, r) in all.iter().enumerate() {
        for &(j, v) in r.iter() {
            m.set(i, j, v);
        }
    }
    let (_, kernel) = nullspace_rank(&m);
    if let Some(w) = kernel.into_iter().next() {
        return Ok(ConeProbe {
            nonzero: true,
            witness: Some(w),
        });
    }
    if c_l.is_empty() {
        return Ok(ConeProbe {
            nonzero: false,
            witness: None,
        });
    }
    // max Σ C_L x  s.t.  A x = 0, C_K x = 0, 0 <= C_L x <= 1
    let mut c = vec![0.0; n];
    for r in c_l {
        for &(j, v) in r {
            c[j] -= v;
        }
    }
    let mut s = Simplex::new(c, vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])?;
    for r in a.iter().chain(c_k) {
        s.add_row(r.clone(), 0.0, 0.0)?;
    }
    for r in c_l {
        s.add_row(r.clone(), 0.0, 1.0)?;
    }
    match s.solve()? {
        Status::Optimal => {
            let value = -s.objective();
            let nonzero = value > 1e-7;
            Ok(ConeProbe {
                nonzero,
                witness: nonzero.then(|| s.x().to_vec()),
            })
        }
        // A bounded feasible region containing 0 cannot be unbounded or empty.
        other => Err(Error::Solver(format!("cone probe LP ended {other:?}"))),
    }
}
