//! Dense univariate polynomials with complex coefficients.
//!
//! Coefficients are stored in ascending degree order and trimmed exactly:
//! the highest stored coefficient is never zero, and the zero polynomial
//! is the empty list. Curves handled here have degree at most `2g + 1`, so
//! nothing sparse is needed.

use num_complex::Complex64;
use std::fmt;
use std::ops::Mul;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `x`, the identity monomial.
    pub fn x() -> Self {
        Self::from_coeffs(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_real_coeffs(coeffs: &[f64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial `(x - r_1)(x - r_2)...(x - r_n)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            // multiply in place by (x - r)
            coeffs.push(Complex64::new(0.0, 0.0));
            for j in (0..coeffs.len()).rev() {
                let lower = if j > 0 {
                    coeffs[j - 1]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                coeffs[j] = lower - r * coeffs[j];
            }
        }
        Self::from_coeffs(coeffs)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if *c == Complex64::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `x^j`, zero beyond the stored degree.
    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::from_coeffs((0..n).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// The polynomial part of `f(x) / x^m`: coefficients below degree `m`
    /// are dropped and the rest shift down by `m`.
    pub fn polynomial_part_over_power(&self, m: usize) -> Polynomial {
        if self.coeffs.len() <= m {
            return Polynomial::zero();
        }
        Polynomial::from_coeffs(self.coeffs[m..].to_vec())
    }

    /// Synthetic division by `(x - r)`, returning quotient and remainder.
    pub fn div_linear(&self, r: Complex64) -> (Polynomial, Complex64) {
        let Some(deg) = self.degree() else {
            return (Polynomial::zero(), Complex64::new(0.0, 0.0));
        };
        if deg == 0 {
            return (Polynomial::zero(), self.coeffs[0]);
        }
        let mut q = vec![Complex64::new(0.0, 0.0); deg];
        let mut carry = Complex64::new(0.0, 0.0);
        for j in (0..=deg).rev() {
            let c = self.coeffs[j] + carry * r;
            if j == 0 {
                return (Polynomial::from_coeffs(q), c);
            }
            q[j - 1] = c;
            carry = c;
        }
        unreachable!()
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c_str = if c.im == 0.0 {
                format!("{}", c.re)
            } else {
                format!("({})", c)
            };
            match j {
                0 => write!(f, "{c_str}")?,
                1 => write!(f, "{c_str}*x")?,
                _ => write!(f, "{c_str}*x^{j}")?,
            }
        }
        Ok(())
    }
}
