//! Finite exponential sums `sum_j A_j exp(<kappa_j, t>)` with exact
//! differentiation.
//!
//! The regularized theta function of a degenerate curve and every Hirota tau
//! function are sums of this form, so derivatives are obtained by scaling
//! amplitudes and no series truncation is involved. Evaluation subtracts the
//! largest exponent before exponentiating; all quantities evaluated at one
//! point share that shift.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SumError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies on the zero set of the sum")]
    ThetaZero,
    #[error("direction index {index} out of range for genus {genus}")]
    IndexOutOfRange { index: usize, genus: usize },
    #[error("non-finite coordinate in phase point")]
    NonFinitePoint,
}

/// Largest number of directions accepted by [`ExponentialSum::log_derivative`].
pub const MAX_LOG_DERIVATIVE_ORDER: usize = 6;

/// Shifted magnitude below which a point counts as a zero of the sum.
pub const ZERO_THRESHOLD: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub amplitude: Complex64,
    pub wavevector: Vec<f64>,
}

/// Hierarchy times `t = (t_1, ..., t_g)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub t: Vec<f64>,
}

impl PhasePoint {
    pub fn new(t: Vec<f64>) -> Self {
        Self { t }
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }
}

/// A linear differential operator `sum_m w_m d/dt_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction {
    pub weights: Vec<Complex64>,
}

impl Direction {
    /// `d/dt_m` for zero-based `m`.
    pub fn unit(genus: usize, m: usize) -> Self {
        let mut weights = vec![Complex64::new(0.0, 0.0); genus];
        weights[m] = Complex64::new(1.0, 0.0);
        Self { weights }
    }

    pub fn rate(&self, wavevector: &[f64]) -> Complex64 {
        self.weights
            .iter()
            .zip(wavevector)
            .map(|(w, k)| w * k)
            .sum()
    }
}

/// A value `mantissa * exp(shift)` kept unexpanded to avoid overflow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub shift: f64,
}

impl Scaled {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.shift.exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialSum {
    genus: usize,
    terms: Vec<Term>,
}

impl ExponentialSum {
    /// Builds a sum, merging terms whose wavevectors are bitwise equal.
    pub fn new(genus: usize, terms: Vec<Term>) -> Result<Self, SumError> {
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for term in terms {
            if term.wavevector.len() != genus {
                return Err(SumError::DimensionMismatch {
                    expected: genus,
                    got: term.wavevector.len(),
                });
            }
            match merged.iter_mut().find(|t| t.wavevector == term.wavevector) {
                Some(existing) => existing.amplitude += term.amplitude,
                None => merged.push(term),
            }
        }
        Ok(Self {
            genus,
            terms: merged,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_point(&self, p: &PhasePoint) -> Result<(), SumError> {
        if p.dim() != self.genus {
            return Err(SumError::DimensionMismatch {
                expected: self.genus,
                got: p.dim(),
            });
        }
        if p.t.iter().any(|x| !x.is_finite()) {
            return Err(SumError::NonFinitePoint);
        }
        Ok(())
    }

    fn exponents(&self, p: &PhasePoint) -> (Vec<f64>, f64) {
        let xs: Vec<f64> = self
            .terms
            .iter()
            .map(|term| term.wavevector.iter().zip(&p.t).map(|(k, t)| k * t).sum())
            .collect();
        let shift = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (xs, if shift.is_finite() { shift } else { 0.0 })
    }

    /// The sum at `p` as `mantissa * exp(shift)`.
    pub fn eval_scaled(&self, p: &PhasePoint) -> Result<Scaled, SumError> {
        self.check_point(p)?;
        let (xs, shift) = self.exponents(p);
        let mantissa = self
            .terms
            .iter()
            .zip(&xs)
            .map(|(term, x)| term.amplitude * (x - shift).exp())
            .sum();
        Ok(Scaled { mantissa, shift })
    }

    /// The sum at `p`. Overflows to infinity for very large exponents; use
    /// [`eval_scaled`](Self::eval_scaled) when that matters.
    pub fn eval(&self, p: &PhasePoint) -> Result<Complex64, SumError> {
        self.eval_scaled(p).map(|s| s.value())
    }

    /// `|sum| / sum |terms|` at `p`, both under the common shift. Near zero on
    /// the zero set of the sum, one where no cancellation happens.
    pub fn conditioning(&self, p: &PhasePoint) -> Result<f64, SumError> {
        self.check_point(p)?;
        let (xs, shift) = self.exponents(p);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for (term, x) in self.terms.iter().zip(&xs) {
            let v = term.amplitude * (x - shift).exp();
            sum += v;
            abs += v.norm();
        }
        Ok(if abs > 0.0 { sum.norm() / abs } else { 0.0 })
    }

    fn dominant_term(&self, xs: &[f64], shift: f64) -> Option<usize> {
        self.terms
            .iter()
            .zip(xs)
            .map(|(term, x)| term.amplitude.norm() * (x - shift).exp())
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(j, _)| j)
    }

    /// Applies `f(wavevector)` as a multiplier to every amplitude.
    pub fn map_amplitudes(&self, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        Self {
            genus: self.genus,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    amplitude: t.amplitude * f(&t.wavevector),
                    wavevector: t.wavevector.clone(),
                })
                .collect(),
        }
    }

    /// `d/dt_m` for zero-based `m`.
    pub fn derive(&self, m: usize) -> Result<Self, SumError> {
        if m >= self.genus {
            return Err(SumError::IndexOutOfRange {
                index: m,
                genus: self.genus,
            });
        }
        Ok(self.map_amplitudes(|k| Complex64::new(k[m], 0.0)))
    }

    pub fn derive_along(&self, d: &Direction) -> Result<Self, SumError> {
        if d.weights.len() != self.genus {
            return Err(SumError::DimensionMismatch {
                expected: self.genus,
                got: d.weights.len(),
            });
        }
        Ok(self.map_amplitudes(|k| d.rate(k)))
    }

    /// Mixed derivative of `log(sum)` along the given directions at `p`.
    ///
    /// Uses the moment-cumulant relation: with `m_B = (prod_{d in B} D_d) S / S`
    /// for each subset `B` of the directions, the derivative is
    /// `sum over set partitions pi of (-1)^{|pi|-1} (|pi|-1)! prod_{B in pi} m_B`.
    /// For two directions this is `(S_mn S - S_m S_n) / S^2`.
    pub fn log_derivative(
        &self,
        dirs: &[Direction],
        p: &PhasePoint,
    ) -> Result<Complex64, SumError> {
        let n = dirs.len();
        assert!(
            n <= MAX_LOG_DERIVATIVE_ORDER,
            "log derivative order {n} exceeds supported maximum"
        );
        for d in dirs {
            if d.weights.len() != self.genus {
                return Err(SumError::DimensionMismatch {
                    expected: self.genus,
                    got: d.weights.len(),
                });
            }
        }
        self.check_point(p)?;
        let (xs, shift) = self.exponents(p);

        // joint cumulants of order >= 2 do not change when each direction's
        // rates are shifted by a constant; centring on the dominant term keeps
        // the moments small so they do not cancel to the cumulant
        let centre: Vec<Complex64> = match self.dominant_term(&xs, shift) {
            Some(j) if n >= 2 => dirs
                .iter()
                .map(|d| d.rate(&self.terms[j].wavevector))
                .collect(),
            _ => vec![Complex64::new(0.0, 0.0); n],
        };

        let subsets = 1usize << n;
        let mut sums = vec![Complex64::new(0.0, 0.0); subsets];
        for (term, x) in self.terms.iter().zip(&xs) {
            let base = term.amplitude * (x - shift).exp();
            let rates: Vec<Complex64> = dirs
                .iter()
                .zip(&centre)
                .map(|(d, c)| d.rate(&term.wavevector) - c)
                .collect();
            for (mask, slot) in sums.iter_mut().enumerate() {
                let mut v = base;
                for (bit, r) in rates.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        v *= r;
                    }
                }
                *slot += v;
            }
        }
        let s0 = sums[0];
        if s0.norm() < ZERO_THRESHOLD {
            return Err(SumError::ThetaZero);
        }
        let moments: Vec<Complex64> = sums.iter().map(|s| s / s0).collect();
        if n == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for_each_partition(n, &mut |blocks| {
            let nb = blocks.len();
            let mut prod = Complex64::new(partition_weight(nb), 0.0);
            for &b in blocks {
                prod *= moments[b];
            }
            total += prod;
        });
        Ok(total)
    }

    /// `d^2 log S / dt_m dt_n` for zero-based `m`, `n`.
    pub fn log_second_derivative(
        &self,
        m: usize,
        n: usize,
        p: &PhasePoint,
    ) -> Result<Complex64, SumError> {
        for idx in [m, n] {
            if idx >= self.genus {
                return Err(SumError::IndexOutOfRange {
                    index: idx,
                    genus: self.genus,
                });
            }
        }
        self.log_derivative(
            &[
                Direction::unit(self.genus, m),
                Direction::unit(self.genus, n),
            ],
            p,
        )
    }
}

/// `(-1)^{b-1} (b-1)!` for a partition into `b` blocks.
fn partition_weight(blocks: usize) -> f64 {
    let fact: f64 = (1..blocks).map(|x| x as f64).product();
    if blocks % 2 == 1 {
        fact
    } else {
        -fact
    }
}

/// Calls `f` with the block bitmasks of every set partition of `{0..n}`.
fn for_each_partition(n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(i: usize, n: usize, blocks: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if i == n {
            f(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            rec(i + 1, n, blocks, f);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        rec(i + 1, n, blocks, f);
        blocks.pop();
    }
    rec(0, n, &mut Vec::new(), f);
}
