//! Values checked against closed forms and against a computer-algebra
//! evaluation frozen here.

use num_complex::Complex64;
use sigma_soliton::expsum::PhasePoint;
use sigma_soliton::kdvcheck::{chain_rule, hirota_tau};
use sigma_soliton::periods::{c_matrix, tau_off};
use sigma_soliton::structmat::{build_m, build_w};
use sigma_soliton::theta::{build_theta, to_hirota_gauge, SolitonField};
use sigma_soliton::SolitonCurve;
use std::f64::consts::PI;

fn curve(k: &[f64]) -> SolitonCurve {
    SolitonCurve::new(k).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

// (t1, t2, d^2/dt1^2 log theta~, d^2/dt1 dt2 log theta~) for k = (2, 1),
// evaluated symbolically to 20 digits.
#[allow(clippy::excessive_precision)]
const FROZEN_21: [(f64, f64, f64, f64); 3] = [
    (0.25, -0.5, -10.863181774721338921, -10.832755860328635507),
    (-1.0, 0.3, 1.3770160813453161525, 5.8348125947484212227),
    (0.7, 0.1, -10.820308404542267110, -4.6918429985811722839),
];

#[test]
fn frozen_log_derivatives_two_solitons() {
    let theta = build_theta(&curve(&[2.0, 1.0]));
    for (t1, t2, d11, d12) in FROZEN_21 {
        let p = PhasePoint::new(vec![t1, t2]);
        let a = theta.log_second_derivative(0, 0, &p).unwrap();
        let b = theta.log_second_derivative(0, 1, &p).unwrap();
        assert!(
            close(a.re, d11, 1e-12) && a.im.abs() < 1e-12,
            "({t1},{t2}): {a} vs {d11}"
        );
        assert!(
            close(b.re, d12, 1e-12) && b.im.abs() < 1e-12,
            "({t1},{t2}): {b} vs {d12}"
        );
    }
}

#[test]
fn curve_data_for_two_solitons() {
    let c = curve(&[2.0, 1.0]);
    let lambda: Vec<f64> = c.lambda().iter().map(|z| z.re).collect();
    assert_eq!(lambda, vec![0.0, 16.0, -40.0, 33.0, -10.0, 1.0]);
    assert_eq!(
        build_w(&c).to_rows(),
        [[-1.0, 1.0], [-4.0, 1.0]]
            .map(|r| r.map(|x| Complex64::new(x, 0.0)).to_vec())
            .to_vec()
    );
    assert_eq!(build_m(&c)[(1, 0)], Complex64::new(-5.0, 0.0));
    assert!((tau_off(&c)[(0, 1)] - Complex64::new(0.0, 3f64.ln() / PI)).norm() < 1e-15);
    assert!((c_matrix(&c)[(1, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
}

/// `d^2/dt1^2 log tau` for `tau = 1 + e^{e1} + e^{e2} + A e^{e1 + e2}`,
/// `e_i = 2 k_i t1 + 2 k_i^3 t2 + 2 phi_i`, written out by hand.
fn two_soliton_closed_form(k: [f64; 2], phi: [Complex64; 2], t1: f64, t2: f64) -> Complex64 {
    let a = ((k[0] - k[1]) / (k[0] + k[1])).powi(2);
    let e = |i: usize| {
        (Complex64::new(2.0 * k[i] * t1 + 2.0 * k[i].powi(3) * t2, 0.0) + 2.0 * phi[i]).exp()
    };
    let (e1, e2) = (e(0), e(1));
    let (p1, p2) = (2.0 * k[0], 2.0 * k[1]);
    let tau = 1.0 + e1 + e2 + a * e1 * e2;
    let d1 = p1 * e1 + p2 * e2 + a * (p1 + p2) * e1 * e2;
    let d2 = p1 * p1 * e1 + p2 * p2 * e2 + a * (p1 + p2).powi(2) * e1 * e2;
    (d2 * tau - d1 * d1) / (tau * tau)
}

#[test]
fn hirota_tau_matches_hand_written_two_soliton() {
    let phi = [Complex64::new(0.3, 0.2), Complex64::new(-0.4, 1.1)];
    let tau = hirota_tau(&[2.0, 1.0], &phi).unwrap();
    for (t1, t2) in [(0.1, 0.2), (-1.3, 0.7), (2.0, -0.4)] {
        let got = tau
            .log_second_derivative(0, 0, &PhasePoint::new(vec![t1, t2]))
            .unwrap();
        let want = two_soliton_closed_form([2.0, 1.0], phi, t1, t2);
        assert!(
            (got - want).norm() < 1e-11 * want.norm().max(1.0),
            "{got} vs {want}"
        );
    }
}

#[test]
fn theta_equals_hirota_closed_form_with_gauge_phases() {
    let c = curve(&[2.0, 1.0]);
    let theta = build_theta(&c);
    let form = to_hirota_gauge(&theta).unwrap();
    // generators are ordered by descending first component, as k is
    let phi = [form.phases[0], form.phases[1]];
    for (t1, t2, d11, _) in FROZEN_21 {
        let want = two_soliton_closed_form([2.0, 1.0], phi, t1, t2);
        assert!(
            close(want.re, d11, 1e-12) && want.im.abs() < 1e-10,
            "({t1},{t2}): {want}"
        );
    }
}

#[test]
fn single_soliton_profile_closed_form() {
    // theta~ = 1 - e^{2 k t}, so U - baseline = -2 d^2 log theta~ = 2 k^2 csch^2(k t)
    for k in [0.5, 1.0, 2.0] {
        let field = SolitonField::new(&curve(&[k]));
        for t in [-3.0, -0.7, 0.4, 2.5] {
            let t = t / k;
            let u = field.u(&PhasePoint::new(vec![t])).unwrap();
            let want = 2.0 * k * k / (k * t).sinh().powi(2);
            assert!(
                close(u - field.baseline(), want, 1e-12),
                "k={k} t={t}: {} vs {want}",
                u - field.baseline()
            );
        }
    }
}

#[test]
fn wp_tilde_by_central_differences_in_u() {
    // d^2 log theta~ along u-directions against a second difference of log theta~
    // in u-space, with t = M u
    let c = curve(&[1.3, 0.9, 0.4]);
    let theta = build_theta(&c);
    let chain = chain_rule(&c);
    let field = SolitonField::new(&c);
    let u0 = [0.3, -0.2, 0.5];
    let log_theta = |u: &[f64]| {
        theta
            .eval(&PhasePoint::new(chain.t_from_u(u)))
            .unwrap()
            .ln()
    };
    let h = 1e-3;
    for m in 0..3 {
        let mut up = u0;
        let mut dn = u0;
        up[m] += h;
        dn[m] -= h;
        let fd = (log_theta(&up) - 2.0 * log_theta(&u0) + log_theta(&dn)) / (h * h);
        let wp = field
            .wp_tilde(m, m, &PhasePoint::new(chain.t_from_u(&u0)))
            .unwrap();
        assert!(
            (-wp - fd).norm() < 1e-5 * fd.norm().max(1.0),
            "m={m}: {wp} vs {fd}"
        );
    }
}
