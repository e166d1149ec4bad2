//! Structural matrices of the degenerate curve and the small dense complex
//! linear algebra they need.
//!
//! | matrix | entry                                  |
//! |--------|----------------------------------------|
//! | `W`    | `W[i][j] = chi_{i, j}` (row `i` = `pi_i`) |
//! | `M`    | unit lower triangular, `M[r][c] = mu_{g-(r-c)}` |
//! | `K(l)` | `K(l)[i][j] = k_i^{2(g-j-1)+l}` (zero-based `j`) |
//! | `V`    | Vandermonde, `V[i][j] = a_j^i`         |
//! | `Pd`   | `diag(P'(a_i))`                        |
//!
//! They satisfy `W = K(0) M` and `W^{-1} = V Pd^{-1}`.

use crate::curve::SolitonCurve;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Index, IndexMut};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular matrix")]
    SingularMatrix,
}

/// Pivots smaller than this, after scaling every row to unit norm, are
/// treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows).expect("rectangular input")
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} - {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Solves `self * X = rhs` by Gaussian elimination with partial pivoting.
    ///
    /// Rows are first scaled to unit norm (together with `rhs`), so the
    /// singularity threshold is relative to each row's own size; structural
    /// matrices mix entries of very different magnitude across rows.
    pub fn solve(&self, rhs: &Self) -> Result<Self, LinalgError> {
        let n = self.rows;
        if self.cols != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "solve with {}x{} matrix",
                n, self.cols
            )));
        }
        if rhs.rows != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs has {} rows, expected {n}",
                rhs.rows
            )));
        }
        let mut a = self.clone();
        let mut b = rhs.clone();
        for i in 0..n {
            let norm = self.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(LinalgError::SingularMatrix);
            }
            for j in 0..n {
                a[(i, j)] /= norm;
            }
            for j in 0..b.cols {
                b[(i, j)] /= norm;
            }
        }
        let threshold = SINGULAR_THRESHOLD;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .expect("non-empty range");
            let size = a[(pivot, col)].norm();
            if size.is_nan() || size < threshold || size == 0.0 {
                return Err(LinalgError::SingularMatrix);
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                b.swap_rows(pivot, col);
            }
            let p = a[(col, col)];
            for i in col + 1..n {
                let factor = a[(i, col)] / p;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(i, j)] -= factor * v;
                }
                for j in 0..b.cols {
                    let v = b[(col, j)];
                    b[(i, j)] -= factor * v;
                }
            }
        }
        let mut x = Self::zeros(n, b.cols);
        for j in 0..b.cols {
            for i in (0..n).rev() {
                let mut s = b[(i, j)];
                for l in i + 1..n {
                    s -= a[(i, l)] * x[(l, j)];
                }
                x[(i, j)] = s / a[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn invert(&self) -> Result<Self, LinalgError> {
        self.solve(&Self::identity(self.rows))
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for (j, z) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                if z.im == 0.0 {
                    write!(f, "{}", z.re)?;
                } else {
                    write!(f, "{z}")?;
                }
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// `W[i][j] = chi_{i,j}`.
pub fn build_w(c: &SolitonCurve) -> ComplexMatrix {
    c.precise().w().to_complex()
}

/// Unit lower triangular, `M[r][c] = mu_{g-(r-c)}` below the diagonal.
pub fn build_m(c: &SolitonCurve) -> ComplexMatrix {
    c.precise().m().to_complex()
}

/// `K(l)[i][j] = k_i^{2(g-j-1)+l}`.
pub fn build_k(c: &SolitonCurve, l: usize) -> ComplexMatrix {
    c.precise().k_matrix(l).to_complex()
}

/// `V[i][j] = a_j^i`.
pub fn build_v(c: &SolitonCurve) -> ComplexMatrix {
    c.precise().v().to_complex()
}

pub fn build_pdiag(c: &SolitonCurve) -> ComplexMatrix {
    ComplexMatrix::diagonal(c.p_prime_at_a())
}

/// `W^{-1}` in closed form: the Vandermonde matrix with column `j` divided
/// by `P'(a_j)`. Row `i` of `W` evaluated at `a_j` is `pi_i(a_j)`, which is
/// `P'(a_j)` when `i == j` and zero otherwise.
pub fn w_inverse(c: &SolitonCurve) -> ComplexMatrix {
    c.precise().w_inverse().to_complex()
}
