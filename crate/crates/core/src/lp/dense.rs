//! Small dense matrices and rank-revealing elimination.

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a != 0.0 {
                    for j in 0..other.cols {
                        out.data[i * other.cols + j] += a * other.get(k, j);
                    }
                }
            }
        }
        out
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Rank by Gauss-Jordan elimination with partial pivoting, treating entries
/// below `1e-10 · max|entry|` as zero, and a basis of the kernel (one vector
/// per free column).
pub fn nullspace_rank(m: &DenseMatrix) -> (usize, Vec<Vec<f64>>) {
    let (r, c) = (m.rows, m.cols);
    let tol = 1e-10 * m.max_abs();
    if m.max_abs() == 0.0 {
        let basis = (0..c)
            .map(|j| {
                let mut v = vec![0.0; c];
                v[j] = 1.0;
                v
            })
            .collect();
        return (0, basis);
    }
    let mut a = m.clone();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..c {
        if row == r {
            break;
        }
        let mut p = row;
        for i in row + 1..r {
            if a.get(i, col).abs() > a.get(p, col).abs() {
                p = i;
            }
        }
        if a.get(p, col).abs() <= tol {
            for i in row..r {
                a.set(i, col, 0.0);
            }
            continue;
        }
        if p != row {
            for j in 0..c {
                a.data.swap(p * c + j, row * c + j);
            }
        }
        let piv = a.get(row, col);
        for j in col..c {
            let v = a.get(row, j) / piv;
            a.set(row, j, v);
        }
        for i in 0..r {
            if i == row {
                continue;
            }
            let f = a.get(i, col);
            if f != 0.0 {
                for j in col..c {
                    let v = a.get(i, j) - f * a.get(row, j);
                    a.set(i, j, v);
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let rank = pivot_cols.len();
    let mut is_pivot = vec![false; c];
    for &pc in &pivot_cols {
        is_pivot[pc] = true;
    }
    let basis = (0..c)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![0.0; c];
            v[f] = 1.0;
            for (i, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a.get(i, f);
            }
            v
        })
        .collect();
    (rank, basis)
}
