//! The regularized theta function of a degenerate curve, its Hirota gauge,
//! the functions `wp~_{mn}` and the KdV field `U`.
//!
//! For the curve `y^2 = x P(x)^2` the theta series collapses to
//!
//! ```text
//! theta~(t) = sum_{eps in {+-1}^g} prod_{i<j} rho_ij^{eps_i eps_j / 2}
//!             * exp(pi i <eps, delta'>) * exp(<eps, K(1) t>)
//! ```
//!
//! with `rho_ij = (k_i - k_j)/(k_i + k_j)` and `delta'_i = (g - i + 1)/2`.

use crate::curve::SolitonCurve;
use crate::expsum::{Direction, ExponentialSum, PhasePoint, SumError, Term};
use crate::kdvcheck::ChainRule;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error(transparent)]
    Sum(#[from] SumError),
    #[error("field is not real: imaginary part {im:e} at value {re:e}")]
    NonRealField { re: f64, im: f64 },
    #[error("cannot bring sum to Hirota gauge: {0}")]
    GaugeAmbiguous(String),
}

/// Offset sign `s0` in `wp_gg = -d^2 log theta / dt_1^2 + s0`, fixed by the
/// KdV residual test at genus 2.
pub const OFFSET_SIGN: f64 = 1.0;

/// Relative tolerance for the imaginary part of `U`.
pub const REALITY_TOLERANCE: f64 = 1e-9;

/// `(k, k^3, ..., k^{2g-1})`: the exponent rates of one soliton in `t`.
pub fn soliton_rates(k: f64, genus: usize) -> Vec<f64> {
    let k2 = k * k;
    let mut out = Vec::with_capacity(genus);
    let mut v = k;
    for _ in 0..genus {
        out.push(v);
        v *= k2;
    }
    out
}

/// `i^n` without rounding.
fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub fn build_theta(c: &SolitonCurve) -> ExponentialSum {
    let g = c.genus();
    let k = c.k();
    let rates: Vec<Vec<f64>> = k.iter().map(|&ki| soliton_rates(ki, g)).collect();
    let sqrt_rho: Vec<Vec<f64>> = (0..g)
        .map(|i| {
            (0..g)
                .map(|j| ((k[i] - k[j]) / (k[i] + k[j])).abs().sqrt())
                .collect()
        })
        .collect();

    let terms = (0..1usize << g)
        .map(|mask| {
            let eps: Vec<f64> = (0..g)
                .map(|i| if mask & (1 << i) != 0 { 1.0 } else { -1.0 })
                .collect();
            let mut amp = 1.0;
            for i in 0..g {
                for j in i + 1..g {
                    amp *= if eps[i] * eps[j] > 0.0 {
                        sqrt_rho[i][j]
                    } else {
                        1.0 / sqrt_rho[i][j]
                    };
                }
            }
            // exp(pi i eps_i (g - i)/2) with zero-based i is i^{eps_i (g - i)}
            let quarter_turns: i64 = (0..g).map(|i| eps[i] as i64 * (g - i) as i64).sum();
            let wavevector = (0..g)
                .map(|m| (0..g).map(|i| eps[i] * rates[i][m]).sum())
                .collect();
            Term {
                amplitude: i_pow(quarter_turns) * amp,
                wavevector,
            }
        })
        .collect();
    ExponentialSum::new(g, terms).expect("theta terms have genus-length wavevectors")
}

fn approx_eq(a: &[f64], b: &[f64]) -> bool {
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * scale)
}

fn reference_index(s: &ExponentialSum) -> Result<usize, ThetaError> {
    if s.genus() == 0 || s.is_empty() {
        return Err(ThetaError::GaugeAmbiguous("empty sum".into()));
    }
    let terms = s.terms();
    let mut best = 0;
    for (j, t) in terms.iter().enumerate() {
        if t.wavevector[0] < terms[best].wavevector[0] {
            best = j;
        }
    }
    let ties = terms
        .iter()
        .filter(|t| t.wavevector[0] == terms[best].wavevector[0])
        .count();
    if ties > 1 {
        return Err(ThetaError::GaugeAmbiguous(
            "no unique lowest term in t_1".into(),
        ));
    }
    if terms[best].amplitude.norm() == 0.0 {
        return Err(ThetaError::GaugeAmbiguous(
            "reference amplitude is zero".into(),
        ));
    }
    Ok(best)
}

/// Divides the sum by its lowest term in `t_1` (the all-minus term for
/// theta~). Second log-derivatives are unchanged.
pub fn gauge_normalize(s: &ExponentialSum) -> Result<ExponentialSum, ThetaError> {
    let r = reference_index(s)?;
    let reference = s.terms()[r].clone();
    let terms = s
        .terms()
        .iter()
        .map(|t| Term {
            amplitude: t.amplitude / reference.amplitude,
            wavevector: t
                .wavevector
                .iter()
                .zip(&reference.wavevector)
                .map(|(a, b)| a - b)
                .collect(),
        })
        .collect();
    Ok(ExponentialSum::new(s.genus(), terms)?)
}

/// A sum written as a Hirota tau function with shifted phases:
/// `S ~ sum_S prod_{i<j in S} rho_ij^2 exp(sum_{i in S} (<g_i, t> + 2 phi_i))`,
/// up to a constant and linear exponential factor.
#[derive(Clone, Debug, PartialEq)]
pub struct HirotaForm {
    /// Unit-amplitude tau: constant term 1, single-soliton terms of amplitude 1.
    pub tau: ExponentialSum,
    /// `phi_i`, one per soliton, such that the pure-gauge form equals `tau`
    /// with `t` shifted by these phases.
    pub phases: Vec<Complex64>,
    /// Single-soliton wavevectors `g_i`, ordered by descending first component.
    pub generators: Vec<Vec<f64>>,
    /// Bitmask (over `generators`) of each term of `tau`.
    pub masks: Vec<usize>,
}

/// Brings a theta-type sum to Hirota gauge.
///
/// After dividing by the lowest term, every wavevector must be a sum of a
/// unique subset of `N` single-soliton wavevectors and there must be `2^N`
/// terms. Single-soliton amplitudes `c_i` are absorbed into phases
/// `phi_i = log(c_i)/2`; this is a shift of origin, not a gauge, so
/// log-derivatives of `tau` are those of the input at a shifted point.
pub fn to_hirota_gauge(s: &ExponentialSum) -> Result<HirotaForm, ThetaError> {
    let normalized = gauge_normalize(s)?;
    let mut order: Vec<usize> = (0..normalized.len()).collect();
    order.sort_by(|&a, &b| {
        normalized.terms()[a].wavevector[0].total_cmp(&normalized.terms()[b].wavevector[0])
    });

    let g = s.genus();
    let mut generators: Vec<Vec<f64>> = Vec::new();
    let mut reachable: Vec<(usize, Vec<f64>)> = vec![(0, vec![0.0; g])];
    let mut assigned: Vec<Option<usize>> = vec![None; normalized.len()];
    for &j in &order {
        let w = &normalized.terms()[j].wavevector;
        if let Some((mask, _)) = reachable.iter().find(|(_, r)| approx_eq(r, w)) {
            if assigned.contains(&Some(*mask)) {
                return Err(ThetaError::GaugeAmbiguous(
                    "two terms share a soliton subset".into(),
                ));
            }
            assigned[j] = Some(*mask);
            continue;
        }
        // a full subset lattice on n + 1 generators needs more than 2^n terms
        if generators.len() >= usize::BITS as usize - 1
            || 1usize << generators.len() >= normalized.len()
        {
            return Err(ThetaError::GaugeAmbiguous(
                "terms do not form a soliton subset lattice".into(),
            ));
        }
        let bit = 1usize << generators.len();
        let extended: Vec<(usize, Vec<f64>)> = reachable
            .iter()
            .map(|(mask, r)| (mask | bit, r.iter().zip(w).map(|(a, b)| a + b).collect()))
            .collect();
        reachable.extend(extended);
        generators.push(w.clone());
        assigned[j] = Some(bit);
    }
    let n = generators.len();
    if normalized.len() != 1 << n {
        return Err(ThetaError::GaugeAmbiguous(format!(
            "{} terms for {} solitons",
            normalized.len(),
            n
        )));
    }

    // reorder generators by descending first component and remap masks
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| generators[b][0].total_cmp(&generators[a][0]));
    let remap = |mask: usize| -> usize {
        perm.iter()
            .enumerate()
            .filter(|(_, &old)| mask & (1 << old) != 0)
            .map(|(new, _)| 1 << new)
            .sum()
    };
    let generators: Vec<Vec<f64>> = perm.iter().map(|&old| generators[old].clone()).collect();
    let masks: Vec<usize> = assigned
        .iter()
        .map(|m| remap(m.expect("every term assigned")))
        .collect();

    let single: Vec<Complex64> = (0..n)
        .map(|i| {
            let j = masks
                .iter()
                .position(|&m| m == 1 << i)
                .expect("generator term exists");
            normalized.terms()[j].amplitude
        })
        .collect();
    if single.iter().any(|a| a.norm() == 0.0) {
        return Err(ThetaError::GaugeAmbiguous(
            "single-soliton amplitude is zero".into(),
        ));
    }
    let terms = normalized
        .terms()
        .iter()
        .zip(&masks)
        .map(|(t, &mask)| {
            let scale: Complex64 = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| single[i])
                .product();
            Term {
                amplitude: t.amplitude / scale,
                wavevector: t.wavevector.clone(),
            }
        })
        .collect();
    Ok(HirotaForm {
        tau: ExponentialSum::new(g, terms)?,
        phases: single.iter().map(|a| a.ln() / 2.0).collect(),
        generators,
        masks,
    })
}

/// theta~ of a curve together with the operators needed for `wp~` and `U`.
/// Immutable; evaluation may be shared across threads.
#[derive(Clone, Debug)]
pub struct SolitonField {
    theta: ExponentialSum,
    chain: ChainRule,
    lambda_2g: f64,
    offset: f64,
}

impl SolitonField {
    pub fn new(c: &SolitonCurve) -> Self {
        Self::with_offset(c, OFFSET_SIGN)
    }

    pub fn with_offset(c: &SolitonCurve, offset: f64) -> Self {
        Self {
            theta: build_theta(c),
            chain: ChainRule::new(c),
            lambda_2g: c.lambda_at(2 * c.genus()).re,
            offset,
        }
    }

    /// Same field computed from a different (gauge-equivalent) sum.
    pub fn with_sum(&self, theta: ExponentialSum) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    pub fn theta(&self) -> &ExponentialSum {
        &self.theta
    }

    pub fn chain(&self) -> &ChainRule {
        &self.chain
    }

    pub fn genus(&self) -> usize {
        self.theta.genus()
    }

    pub fn lambda_2g(&self) -> f64 {
        self.lambda_2g
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `wp~_{mn} = -d^2 log theta~ / du_m du_n`, zero-based (`g - 1` is `u_g`).
    pub fn wp_tilde(&self, m: usize, n: usize, p: &PhasePoint) -> Result<Complex64, ThetaError> {
        let dirs = [self.chain.u_direction(m), self.chain.u_direction(n)];
        Ok(-self.theta.log_derivative(&dirs, p)?)
    }

    /// `d^n log theta~ / du_g^n` (n >= 2) at `p`, optionally with one extra
    /// `d/du_{g-1}`.
    pub fn log_derivative_x(
        &self,
        n: usize,
        with_u_prev: bool,
        p: &PhasePoint,
    ) -> Result<Complex64, ThetaError> {
        let g = self.genus();
        let mut dirs: Vec<Direction> = vec![self.chain.u_direction(g - 1); n];
        if with_u_prev {
            dirs.push(self.chain.u_direction(g - 2));
        }
        Ok(self.theta.log_derivative(&dirs, p)?)
    }

    /// Complex `U = 2(-d^2 log theta~/dt_1^2 + s0) + lambda_2g / 6`.
    pub fn u_complex(&self, p: &PhasePoint) -> Result<Complex64, ThetaError> {
        let l2 = self.theta.log_second_derivative(0, 0, p)?;
        Ok(2.0 * (-l2 + self.offset) + self.lambda_2g / 6.0)
    }

    /// Real `U`; fails when the imaginary part exceeds the tolerance.
    pub fn u(&self, p: &PhasePoint) -> Result<f64, ThetaError> {
        let z = self.u_complex(p)?;
        if z.im.abs() > REALITY_TOLERANCE * (1.0 + z.re.abs()) {
            return Err(ThetaError::NonRealField { re: z.re, im: z.im });
        }
        Ok(z.re)
    }

    /// `lim U` as all solitons move away: `2 s0 + lambda_2g / 6`.
    pub fn baseline(&self) -> f64 {
        2.0 * self.offset + self.lambda_2g / 6.0
    }
}

/// `wp~_{mn}` at `p`, zero-based indices.
pub fn wp_tilde(
    c: &SolitonCurve,
    m: usize,
    n: usize,
    p: &PhasePoint,
) -> Result<Complex64, ThetaError> {
    SolitonField::new(c).wp_tilde(m, n, p)
}

pub fn u_field(c: &SolitonCurve, p: &PhasePoint) -> Result<f64, ThetaError> {
    SolitonField::new(c).u(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(k: &[f64]) -> SolitonCurve {
        SolitonCurve::new(k).unwrap()
    }

    #[test]
    fn genus_one_theta() {
        let s = build_theta(&curve(&[0.7]));
        assert_eq!(s.len(), 2);
        let mut terms = s.terms().to_vec();
        terms.sort_by(|a, b| a.wavevector[0].total_cmp(&b.wavevector[0]));
        assert_eq!(terms[0].wavevector, vec![-0.7]);
        assert_eq!(terms[0].amplitude, Complex64::new(0.0, -1.0));
        assert_eq!(terms[1].wavevector, vec![0.7]);
        assert_eq!(terms[1].amplitude, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn genus_two_amplitudes() {
        let s = build_theta(&curve(&[2.0, 1.0]));
        assert_eq!(s.len(), 4);
        for t in s.terms() {
            // |kappa_1| = 3 when both signs agree, 1 otherwise
            let same_sign = t.wavevector[0].abs() > 2.0;
            let expect = if same_sign {
                (1.0f64 / 3.0).sqrt()
            } else {
                3.0f64.sqrt()
            };
            assert!((t.amplitude.norm() - expect).abs() < 1e-15, "{t:?}");
        }
    }

    #[test]
    fn term_count_and_wavevectors() {
        for g in 1..=6 {
            let k: Vec<f64> = (1..=g).map(|i| 0.4 * i as f64).collect();
            let c = curve(&k);
            let s = build_theta(&c);
            assert_eq!(s.len(), 1 << g);
            let all_plus: Vec<f64> = (0..g)
                .map(|m| c.k().iter().map(|ki| ki.powi(2 * m + 1)).sum())
                .collect();
            assert!(s
                .terms()
                .iter()
                .any(|t| approx_eq(&t.wavevector, &all_plus)));
        }
    }

    #[test]
    fn hirota_gauge_genus_one() {
        let form = to_hirota_gauge(&build_theta(&curve(&[1.5]))).unwrap();
        assert_eq!(form.tau.len(), 2);
        for t in form.tau.terms() {
            assert!((t.amplitude - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        assert_eq!(form.generators, vec![vec![3.0]]);
        // c_1 = -1, so phi = i pi / 2
        assert!((form.phases[0] - Complex64::new(0.0, std::f64::consts::FRAC_PI_2)).norm() < 1e-15);
    }

    #[test]
    fn hirota_gauge_genus_two() {
        let form = to_hirota_gauge(&build_theta(&curve(&[2.0, 1.0]))).unwrap();
        assert_eq!(form.generators.len(), 2);
        assert!(approx_eq(&form.generators[0], &[4.0, 16.0]));
        assert!(approx_eq(&form.generators[1], &[2.0, 2.0]));
        let pair = form.masks.iter().position(|&m| m == 3).unwrap();
        assert!((form.tau.terms()[pair].amplitude - Complex64::new(1.0 / 9.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gauge_rejects_unstructured_sums() {
        let s = ExponentialSum::new(
            1,
            vec![
                Term {
                    amplitude: Complex64::new(1.0, 0.0),
                    wavevector: vec![0.0],
                },
                Term {
                    amplitude: Complex64::new(1.0, 0.0),
                    wavevector: vec![1.0],
                },
                Term {
                    amplitude: Complex64::new(1.0, 0.0),
                    wavevector: vec![3.0],
                },
            ],
        )
        .unwrap();
        assert!(matches!(
            to_hirota_gauge(&s),
            Err(ThetaError::GaugeAmbiguous(_))
        ));
        let zero_ref = ExponentialSum::new(
            1,
            vec![Term {
                amplitude: Complex64::new(0.0, 0.0),
                wavevector: vec![0.0],
            }],
        )
        .unwrap();
        assert!(matches!(
            gauge_normalize(&zero_ref),
            Err(ThetaError::GaugeAmbiguous(_))
        ));
    }

    #[test]
    fn genus_one_field_on_divisor() {
        // theta~ = 2i sinh(kappa t_1) vanishes at the origin
        let c = curve(&[1.0]);
        assert_eq!(
            u_field(&c, &PhasePoint::new(vec![0.0])).unwrap_err(),
            ThetaError::Sum(SumError::ThetaZero)
        );
    }

    #[test]
    fn wp_gg_is_t1_derivative() {
        let c = curve(&[2.0, 1.0]);
        let f = SolitonField::new(&c);
        let p = PhasePoint::new(vec![0.25, -0.5]);
        let direct = -f.theta().log_second_derivative(0, 0, &p).unwrap();
        assert!((f.wp_tilde(1, 1, &p).unwrap() - direct).norm() < 1e-13);
        assert!((f.wp_tilde(0, 1, &p).unwrap() - f.wp_tilde(1, 0, &p).unwrap()).norm() < 1e-12);
    }

    fn distinct_k(max_g: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.5f64..2.5, 1..=max_g).prop_filter("distinct", |k| {
            let mut s = k.clone();
            s.sort_by(f64::total_cmp);
            s.windows(2).all(|w| w[1] - w[0] > 0.05)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hirota_structure(k in distinct_k(5)) {
            let c = curve(&k);
            let form = to_hirota_gauge(&build_theta(&c)).unwrap();
            let g = c.genus();
            prop_assert_eq!(form.tau.len(), 1 << g);
            for (t, &mask) in form.tau.terms().iter().zip(&form.masks) {
                let mut expect = 1.0;
                for i in 0..g {
                    for j in i + 1..g {
                        if mask & (1 << i) != 0 && mask & (1 << j) != 0 {
                            let r = (c.k()[i] - c.k()[j]) / (c.k()[i] + c.k()[j]);
                            expect *= r * r;
                        }
                    }
                }
                prop_assert!((t.amplitude - Complex64::new(expect, 0.0)).norm() <= 1e-10);
                let mut w = vec![0.0; g];
                for i in 0..g {
                    if mask & (1 << i) != 0 {
                        for (wm, r) in w.iter_mut().zip(soliton_rates(c.k()[i], g)) {
                            *wm += 2.0 * r;
                        }
                    }
                }
                prop_assert!(approx_eq(&t.wavevector, &w));
            }
        }

        #[test]
        fn second_log_derivative_is_gauge_invariant(k in distinct_k(5), t1 in -3.0f64..3.0, t2 in -1.0f64..1.0) {
            let c = curve(&k);
            let theta = build_theta(&c);
            let norm = gauge_normalize(&theta).unwrap();
            let mut t = vec![0.0; c.genus()];
            t[0] = t1;
            if t.len() > 1 {
                t[1] = t2;
            }
            let p = PhasePoint::new(t);
            prop_assume!(theta.conditioning(&p).unwrap() > 1e-6);
            let a = theta.log_second_derivative(0, 0, &p).unwrap();
            let b = norm.log_second_derivative(0, 0, &p).unwrap();
            prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
        }
    }
}
