//! Period data of the degenerate curve.
//!
//! In the degenerate limit every cycle integral has a closed form in the
//! wavenumbers. The diagonal of the second period matrix (and of `tau`)
//! diverges; it is stored as zero with `diag_divergent` set, never as an
//! infinity, since the regularized theta sum does not read it.

use crate::curve::SolitonCurve;
use crate::polynomial::Polynomial;
use crate::structmat::{w_inverse, ComplexMatrix, LinalgError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I_PI: Complex64 = Complex64::new(0.0, PI);

/// Integrals of `dv_i` and `dv~_i` over one family of cycles; entry
/// `[i][j]` is the integral of form `i` over cycle `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleIntegrals {
    pub dv: ComplexMatrix,
    pub dv_tilde: ComplexMatrix,
    pub diag_divergent: bool,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `log |(k_i - k_j) / (k_i + k_j)|`, negative for distinct positive `k`.
fn log_ratio(ki: f64, kj: f64) -> f64 {
    ((ki - kj) / (ki + kj)).abs().ln()
}

pub fn alpha_integrals(c: &SolitonCurve) -> CycleIntegrals {
    let g = c.genus();
    let k = c.k();
    let dv = ComplexMatrix::diagonal(&k.iter().map(|&ki| I_PI / ki).collect::<Vec<_>>());
    let dv_tilde = ComplexMatrix::diagonal(
        &k.iter()
            .map(|&ki| I_PI * ki.powi(2 * g as i32 - 1))
            .collect::<Vec<_>>(),
    );
    CycleIntegrals {
        dv,
        dv_tilde,
        diag_divergent: false,
    }
}

pub fn beta_integrals(c: &SolitonCurve) -> CycleIntegrals {
    let g = c.genus();
    let k = c.k();
    let dv = ComplexMatrix::from_fn(g, g, |i, j| {
        if i == j {
            real(0.0)
        } else {
            real(log_ratio(k[i], k[j]) / k[i])
        }
    });
    let dv_tilde = ComplexMatrix::from_fn(g, g, |i, j| {
        if i == j {
            return real(0.0);
        }
        let finite: f64 = (0..g)
            .map(|r| {
                k[i].powi(2 * r as i32) * k[j].powi((2 * g - 2 * r - 1) as i32)
                    / (g as f64 - r as f64 - 0.5)
            })
            .sum();
        real(finite + k[i].powi(2 * g as i32 - 1) * log_ratio(k[i], k[j]))
    });
    CycleIntegrals {
        dv,
        dv_tilde,
        diag_divergent: true,
    }
}

/// `omega' = W^{-1} diag(pi i / k_i)`.
pub fn omega_prime(c: &SolitonCurve) -> ComplexMatrix {
    let winv = w_inverse(c);
    let k = c.k();
    ComplexMatrix::from_fn(winv.rows(), winv.cols(), |i, j| winv[(i, j)] * I_PI / k[j])
}

/// Off-diagonal part of `omega'' = W^{-1} ((1/k_i) log|(k_i-k_j)/(k_i+k_j)|)`;
/// the divergent diagonal of the inner matrix is replaced by zero.
pub fn omega_second_off(c: &SolitonCurve) -> ComplexMatrix {
    w_inverse(c)
        .matmul(&beta_integrals(c).dv)
        .expect("square matrices of genus size")
}

/// Off-diagonal `tau_ij = (i/pi) log|(k_i+k_j)/(k_i-k_j)|`; zero diagonal.
pub fn tau_off(c: &SolitonCurve) -> ComplexMatrix {
    let g = c.genus();
    let k = c.k();
    ComplexMatrix::from_fn(g, g, |i, j| {
        if i == j {
            real(0.0)
        } else {
            Complex64::new(0.0, -log_ratio(k[i], k[j]) / PI)
        }
    })
}

/// `eta_i(k)` for one-based `i`:
/// `pi i k^{2i-3} / P'(k^2) * [d/dx (f(x)/x^{2i})_+]` at `x = k^2`.
pub fn eta_component(c: &SolitonCurve, i: usize, k: f64) -> Complex64 {
    assert!(i >= 1, "eta index is one-based");
    let x = real(k * k);
    let truncated: Polynomial = c.f().polynomial_part_over_power(2 * i).derivative();
    let dp = c.p().derivative().eval(x);
    I_PI * k.powi(2 * i as i32 - 2) / k / dp * truncated.eval(x)
}

/// `eta'[i][j] = eta_{i+1}(k_j)`.
pub fn eta_prime(c: &SolitonCurve) -> ComplexMatrix {
    let g = c.genus();
    let k = c.k();
    ComplexMatrix::from_fn(g, g, |i, j| eta_component(c, i + 1, k[j]))
}

/// `C = ((k_j / (pi i)) eta_i(k_j)) W`.
/// Evaluated in double-double: the product cancels heavily for clustered `k`.
pub fn c_matrix(c: &SolitonCurve) -> ComplexMatrix {
    c.precise().c_matrix().to_complex()
}

/// `C = eta' omega'^{-1}`, inverting `omega'` by elimination. Independent of
/// [`c_matrix`] apart from the shared inputs.
pub fn c_matrix_via_inverse(c: &SolitonCurve) -> Result<ComplexMatrix, LinalgError> {
    eta_prime(c).matmul(&omega_prime(c).invert()?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodData {
    pub omega1: ComplexMatrix,
    pub omega2_off: ComplexMatrix,
    pub tau_off: ComplexMatrix,
    pub diag_divergent: bool,
    pub eta1: ComplexMatrix,
    pub c: ComplexMatrix,
}

impl PeriodData {
    pub fn compute(c: &SolitonCurve) -> Self {
        Self {
            omega1: omega_prime(c),
            omega2_off: omega_second_off(c),
            tau_off: tau_off(c),
            diag_divergent: true,
            eta1: eta_prime(c),
            c: c_matrix(c),
        }
    }
}
