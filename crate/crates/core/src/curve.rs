//! The degenerate curve `y^2 = x P(x)^2` built from soliton wavenumbers.
//!
//! Each wavenumber `k_i` contributes a double branch point `a_i = k_i^2`.
//! `P` is the monic polynomial with roots `a_i` and `f = x P^2` is the
//! (degenerate) hyperelliptic polynomial of degree `2g + 1`.

use crate::polynomial::Polynomial;
use crate::precise::PreciseCurve;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("empty wavenumber list")]
    EmptyWavenumbers,
    #[error("wavenumber {0} is not a finite number")]
    NonFiniteWavenumber(usize),
    #[error("wavenumber {0} is not positive")]
    NonPositiveWavenumber(usize),
    #[error("duplicate wavenumber: entries {0} and {1} coincide")]
    DuplicateWavenumber(usize, usize),
}

/// Relative tolerance under which two wavenumbers count as equal.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SolitonCurve {
    k: Vec<f64>,
    a: Vec<f64>,
    p: Polynomial,
    f: Polynomial,
    p_prime_at_a: Vec<Complex64>,
    precise: PreciseCurve,
}

impl SolitonCurve {
    /// Validates the wavenumbers and derives all curve data.
    ///
    /// Input order is irrelevant; wavenumbers are stored strictly descending.
    /// Error indices refer to positions in the caller's list.
    pub fn new(k: &[f64]) -> Result<Self, CurveError> {
        if k.is_empty() {
            return Err(CurveError::EmptyWavenumbers);
        }
        for (i, &ki) in k.iter().enumerate() {
            if !ki.is_finite() {
                return Err(CurveError::NonFiniteWavenumber(i));
            }
            if ki <= 0.0 {
                return Err(CurveError::NonPositiveWavenumber(i));
            }
        }
        let mut order: Vec<usize> = (0..k.len()).collect();
        order.sort_by(|&i, &j| k[j].total_cmp(&k[i]));
        let kmax = k[order[0]];
        for w in order.windows(2) {
            if (k[w[0]] - k[w[1]]).abs() <= DUPLICATE_TOLERANCE * kmax {
                let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(CurveError::DuplicateWavenumber(i, j));
            }
        }

        let k: Vec<f64> = order.iter().map(|&i| k[i]).collect();
        let a: Vec<f64> = k.iter().map(|&ki| ki * ki).collect();
        let precise = PreciseCurve::new(&k);
        let round = |v: &[crate::precise::Dd]| {
            Polynomial::from_real_coeffs(&v.iter().map(|x| x.hi()).collect::<Vec<_>>())
        };
        let p = round(precise.mu());
        let f = round(precise.lambda());
        let p_prime_at_a = precise
            .p_prime()
            .iter()
            .map(|x| Complex64::new(x.hi(), 0.0))
            .collect();
        Ok(Self {
            k,
            a,
            p,
            f,
            p_prime_at_a,
            precise,
        })
    }

    pub fn genus(&self) -> usize {
        self.k.len()
    }

    /// Wavenumbers, strictly descending.
    pub fn k(&self) -> &[f64] {
        &self.k
    }

    /// Branch points `a_i = k_i^2`, in the same order as `k`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn p(&self) -> &Polynomial {
        &self.p
    }

    /// `f(x) = x P(x)^2`.
    pub fn f(&self) -> &Polynomial {
        &self.f
    }

    /// `mu_0 .. mu_{g-1}`: the non-leading coefficients of `P`.
    pub fn mu(&self) -> Vec<Complex64> {
        (0..self.genus()).map(|j| self.p.coeff(j)).collect()
    }

    /// `mu_j` for `j <= g`, with `mu_g = 1`.
    pub fn mu_at(&self, j: usize) -> Complex64 {
        self.p.coeff(j)
    }

    /// `lambda_0 .. lambda_{2g+1}`: all coefficients of `f`.
    pub fn lambda(&self) -> Vec<Complex64> {
        (0..=2 * self.genus() + 1)
            .map(|j| self.f.coeff(j))
            .collect()
    }

    pub fn lambda_at(&self, j: usize) -> Complex64 {
        self.f.coeff(j)
    }

    pub fn p_prime_at_a(&self) -> &[Complex64] {
        &self.p_prime_at_a
    }

    /// Double-double curve data, from which the `f64` values are rounded.
    pub fn precise(&self) -> &PreciseCurve {
        &self.precise
    }

    /// Coefficients of `pi_i(x) = P(x) / (x - a_i)`, from the recursion
    /// `chi_{i,g-1} = 1`, `chi_{i,j} = mu_{j+1} + a_i chi_{i,j+1}`.
    pub fn chi_table(&self) -> ChiTable {
        let w = self.precise.w();
        let g = self.genus();
        let chi = (0..g)
            .map(|i| {
                (0..g)
                    .map(|j| Complex64::new(w.get(i, j).hi(), 0.0))
                    .collect()
            })
            .collect();
        ChiTable { chi }
    }
}

/// `chi[i][j]` is the coefficient of `x^j` in `pi_i(x)`, zero-based in both
/// indices.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiTable {
    pub chi: Vec<Vec<Complex64>>,
}

impl ChiTable {
    pub fn pi(&self, i: usize) -> Polynomial {
        Polynomial::from_coeffs(self.chi[i].clone())
    }
}
