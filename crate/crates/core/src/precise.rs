//! Double-double versions of the curve data and structural matrices.
//!
//! Entries of `W`, `M` and `C` arise from sums of large terms that cancel
//! when wavenumbers cluster (a Lagrange-interpolation structure). Working
//! from the exact input `k` in double-double keeps about 32 significant
//! digits, so the `f64` matrices handed out are correctly rounded for all
//! practical purposes and the structural identities can be checked to
//! far below `f64` resolution.

use crate::structmat::ComplexMatrix;
use num_complex::Complex64;
use twofloat::TwoFloat;

pub type Dd = TwoFloat;

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

/// `a / b` to double-double accuracy. The crate's own division only
/// reaches `f64` accuracy, so the quotient is refined by one Newton step.
pub fn div(a: Dd, b: Dd) -> Dd {
    let q = dd(a.hi() / b.hi());
    q + (a - b * q) * dd(1.0 / b.hi())
}

/// Dense real matrix in double-double.
#[derive(Clone, Debug, PartialEq)]
pub struct DdMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Dd>,
}

impl DdMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Dd) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| dd(if i == j { 1.0 } else { 0.0 }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Dd {
        self.data[i * self.cols + j]
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(dd(0.0), |acc, l| acc + self.get(i, l) * other.get(l, j))
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "sub shape mismatch"
        );
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) - other.get(i, j)
        })
    }

    /// Largest entry magnitude, rounded to `f64`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.hi().abs()).fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            Complex64::new(self.get(i, j).hi(), 0.0)
        })
    }
}

/// Curve data computed in double-double from wavenumbers sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct PreciseCurve {
    k: Vec<Dd>,
    a: Vec<Dd>,
    /// `mu_0 .. mu_g` with `mu_g = 1`.
    mu: Vec<Dd>,
    /// `lambda_0 .. lambda_{2g+1}`.
    lambda: Vec<Dd>,
    /// `P'(a_j) = prod_{l != j} (k_j - k_l)(k_j + k_l)`.
    p_prime: Vec<Dd>,
}

impl PreciseCurve {
    pub fn new(k_desc: &[f64]) -> Self {
        let g = k_desc.len();
        let k: Vec<Dd> = k_desc.iter().map(|&x| dd(x)).collect();
        let a: Vec<Dd> = k.iter().map(|&x| x * x).collect();

        let mut mu = vec![dd(1.0)];
        for &r in &a {
            mu.push(dd(0.0));
            for j in (0..mu.len()).rev() {
                let lower = if j > 0 { mu[j - 1] } else { dd(0.0) };
                mu[j] = lower - r * mu[j];
            }
        }

        let mut lambda = vec![dd(0.0); 2 * g + 2];
        for (i, &x) in mu.iter().enumerate() {
            for (j, &y) in mu.iter().enumerate() {
                lambda[i + j + 1] += x * y;
            }
        }

        let p_prime = (0..g)
            .map(|j| {
                (0..g).filter(|&l| l != j).fold(dd(1.0), |acc, l| {
                    acc * (Dd::new_sub(k_desc[j], k_desc[l]) * Dd::new_add(k_desc[j], k_desc[l]))
                })
            })
            .collect();
        Self {
            k,
            a,
            mu,
            lambda,
            p_prime,
        }
    }

    pub fn genus(&self) -> usize {
        self.k.len()
    }

    pub fn mu(&self) -> &[Dd] {
        &self.mu
    }

    pub fn lambda(&self) -> &[Dd] {
        &self.lambda
    }

    pub fn p_prime(&self) -> &[Dd] {
        &self.p_prime
    }

    /// `W[i][j] = chi_{i,j}`, the coefficients of `P(x) / (x - a_i)`.
    pub fn w(&self) -> DdMatrix {
        let g = self.genus();
        let mut rows = vec![vec![dd(0.0); g]; g];
        for (i, row) in rows.iter_mut().enumerate() {
            row[g - 1] = dd(1.0);
            for j in (0..g - 1).rev() {
                row[j] = self.mu[j + 1] + self.a[i] * row[j + 1];
            }
        }
        DdMatrix::from_fn(g, g, |i, j| rows[i][j])
    }

    pub fn m(&self) -> DdMatrix {
        let g = self.genus();
        DdMatrix::from_fn(g, g, |r, c| {
            if r == c {
                dd(1.0)
            } else if r > c {
                self.mu[g - (r - c)]
            } else {
                dd(0.0)
            }
        })
    }

    /// `K(l)[i][j] = k_i^{2(g-j-1)+l}`.
    pub fn k_matrix(&self, l: usize) -> DdMatrix {
        let g = self.genus();
        DdMatrix::from_fn(g, g, |i, j| pow(self.k[i], 2 * (g - j - 1) + l))
    }

    pub fn v(&self) -> DdMatrix {
        let g = self.genus();
        DdMatrix::from_fn(g, g, |i, j| pow(self.a[j], i))
    }

    /// `V P^{-1}`: column `j` of `V` divided by `P'(a_j)`.
    pub fn w_inverse(&self) -> DdMatrix {
        let g = self.genus();
        DdMatrix::from_fn(g, g, |i, j| div(pow(self.a[j], i), self.p_prime[j]))
    }

    /// `[d/dx (f(x) / x^{2m})_+]` at `x`.
    fn truncated_derivative(&self, m: usize, x: Dd) -> Dd {
        let top = self.lambda.len() - 1;
        let mut acc = dd(0.0);
        for n in (2 * m + 1..=top).rev() {
            acc = acc * x + self.lambda[n] * dd((n - 2 * m) as f64);
        }
        acc
    }

    /// `C = ((k_j / (pi i)) eta_i(k_j)) W`, which is real:
    /// `(k_j / (pi i)) eta_i(k_j) = k_j^{2i-2} / P'(a_j) * [d/dx (f/x^{2i})_+](a_j)`.
    pub fn c_matrix(&self) -> DdMatrix {
        let g = self.genus();
        let s = DdMatrix::from_fn(g, g, |i, j| {
            div(
                pow(self.k[j], 2 * i) * self.truncated_derivative(i + 1, self.a[j]),
                self.p_prime[j],
            )
        });
        s.matmul(&self.w())
    }
}

fn pow(x: Dd, n: usize) -> Dd {
    (0..n).fold(dd(1.0), |acc, _| acc * x)
}
