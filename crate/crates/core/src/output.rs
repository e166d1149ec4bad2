//! Serializable documents emitted by the command-line tool.
//!
//! Complex numbers are `[re, im]` arrays in JSON and `re+imi` strings in CSV.
//! Struct field order fixes the JSON key order.

use crate::config::RunConfig;
use crate::expsum::SumError;
use crate::periods::PeriodData;
use crate::structmat::ComplexMatrix;
use crate::theta::{build_theta, to_hirota_gauge, SolitonField, ThetaError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// `re+imi` with shortest round-tripping decimals.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Inverse of [`format_complex`].
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let body = s.trim().strip_suffix('i')?;
    // split at the sign that starts the imaginary part, skipping a leading
    // sign and exponent signs
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&j| {
        (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E')
    })?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    Some(Complex64::new(re, im))
}

fn rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    m.to_rows()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodsDoc {
    pub genus: usize,
    pub k: Vec<f64>,
    pub omega1: Vec<Vec<Complex64>>,
    /// Off-diagonal `tau`; diagonal entries are stored as zero.
    pub tau_off: Vec<Vec<Complex64>>,
    /// Marks the divergent diagonal of `tau`.
    pub tau_diag_divergent: bool,
    pub eta1: Vec<Vec<Complex64>>,
    pub c: Vec<Vec<Complex64>>,
}

impl PeriodsDoc {
    pub fn new(k: &[f64], data: &PeriodData) -> Self {
        Self {
            genus: k.len(),
            k: k.to_vec(),
            omega1: rows(&data.omega1),
            tau_off: rows(&data.tau_off),
            tau_diag_divergent: data.diag_divergent,
            eta1: rows(&data.eta1),
            c: rows(&data.c),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite values serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// `matrix,row,col,value` with one-based indices; divergent diagonal
    /// entries of `tau` read `divergent`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("matrix,row,col,value\n");
        let mats: [(&str, &Vec<Vec<Complex64>>); 4] = [
            ("omega1", &self.omega1),
            ("tau_off", &self.tau_off),
            ("eta1", &self.eta1),
            ("c", &self.c),
        ];
        for (name, m) in mats {
            for (i, row) in m.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    let value = if name == "tau_off" && i == j && self.tau_diag_divergent {
                        "divergent".to_string()
                    } else {
                        format_complex(*z)
                    };
                    writeln!(out, "{name},{},{},{value}", i + 1, j + 1).expect("string write");
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauTermDoc {
    /// One-based soliton indices present in the term.
    pub subset: Vec<usize>,
    pub amplitude: Complex64,
    pub wavevector: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauDoc {
    pub genus: usize,
    pub k: Vec<f64>,
    /// Phases absorbed by the change of origin, one per soliton.
    pub phases: Vec<Complex64>,
    pub terms: Vec<TauTermDoc>,
}

impl TauDoc {
    pub fn from_curve(cfg: &RunConfig) -> Result<Self, ThetaError> {
        let form = to_hirota_gauge(&build_theta(&cfg.curve))?;
        let n = form.generators.len();
        let mut terms: Vec<(usize, TauTermDoc)> = form
            .tau
            .terms()
            .iter()
            .zip(&form.masks)
            .map(|(t, &mask)| {
                let subset = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| i + 1)
                    .collect();
                (
                    mask,
                    TauTermDoc {
                        subset,
                        amplitude: t.amplitude,
                        wavevector: t.wavevector.clone(),
                    },
                )
            })
            .collect();
        terms.sort_by_key(|(mask, _)| (mask.count_ones(), *mask));
        Ok(Self {
            genus: cfg.curve.genus(),
            k: cfg.curve.k().to_vec(),
            phases: form.phases,
            terms: terms.into_iter().map(|(_, t)| t).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite values serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// `subset,amplitude,kappa_1,...,kappa_g`; subsets are `+`-joined
    /// indices, empty for the constant term.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subset,amplitude");
        for m in 1..=self.genus {
            write!(out, ",kappa_{m}").expect("string write");
        }
        out.push('\n');
        for t in &self.terms {
            let subset: Vec<String> = t.subset.iter().map(|i| i.to_string()).collect();
            write!(out, "{},{}", subset.join("+"), format_complex(t.amplitude))
                .expect("string write");
            for w in &t.wavevector {
                write!(out, ",{w}").expect("string write");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub t1: f64,
    pub t2: f64,
    /// `None` where the point lies on the theta divisor.
    #[serde(rename = "U")]
    pub u: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldDoc {
    pub genus: usize,
    pub k: Vec<f64>,
    pub higher_times: Vec<f64>,
    pub rows: Vec<FieldRow>,
}

/// Samples `U` on the configured grid, `t2` outer and `t1` inner. Points on
/// the theta divisor give `None`; any other failure is returned.
pub fn sample_field(cfg: &RunConfig) -> Result<FieldDoc, ThetaError> {
    let field = SolitonField::new(&cfg.curve);
    let t1s = cfg.grid.t1.values();
    let t2s = cfg.grid.t2.values();
    let coords: Vec<(f64, f64)> = t2s
        .iter()
        .flat_map(|&t2| t1s.iter().map(move |&t1| (t1, t2)))
        .collect();
    let rows: Result<Vec<FieldRow>, ThetaError> = coords
        .par_iter()
        .map(|&(t1, t2)| match field.u(&cfg.point(t1, t2)) {
            Ok(u) => Ok(FieldRow { t1, t2, u: Some(u) }),
            Err(ThetaError::Sum(SumError::ThetaZero)) => Ok(FieldRow { t1, t2, u: None }),
            Err(e) => Err(e),
        })
        .collect();
    Ok(FieldDoc {
        genus: cfg.curve.genus(),
        k: cfg.curve.k().to_vec(),
        higher_times: cfg.higher_times.clone(),
        rows: rows?,
    })
}

impl FieldDoc {
    pub fn missing(&self) -> usize {
        self.rows.iter().filter(|r| r.u.is_none()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite values serialize")
    }

    /// `t1,t2,U` with `nan` for divisor points.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 40);
        out.push_str("t1,t2,U\n");
        for r in &self.rows {
            match r.u {
                Some(u) => writeln!(out, "{},{},{}", r.t1, r.t2, u),
                None => writeln!(out, "{},{},nan", r.t1, r.t2),
            }
            .expect("string write");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{FileConfig, Overrides};
    use crate::curve::SolitonCurve;
    use proptest::prelude::*;

    fn cfg(k: &str, grid: &str) -> RunConfig {
        RunConfig::resolve(
            FileConfig::default(),
            Overrides {
                wavenumbers: Some(k.into()),
                grid: Some(grid.into()),
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn complex_strings() {
        assert_eq!(format_complex(Complex64::new(1.5, -2.0)), "1.5-2i");
        assert_eq!(
            format_complex(Complex64::new(-1e-20, 3.0)),
            "-0.00000000000000000001+3i"
        );
        assert_eq!(parse_complex("1.5-2i"), Some(Complex64::new(1.5, -2.0)));
        assert_eq!(
            parse_complex("-1e-5+2E+3i"),
            Some(Complex64::new(-1e-5, 2000.0))
        );
        assert_eq!(parse_complex("1.5"), None);
        assert_eq!(parse_complex("i"), None);
    }

    #[test]
    fn periods_document() {
        let c = SolitonCurve::new(&[2.0, 1.0]).unwrap();
        let doc = PeriodsDoc::new(c.k(), &PeriodData::compute(&c));
        assert!(
            (doc.tau_off[0][1] - Complex64::new(0.0, 3f64.ln() / std::f64::consts::PI)).norm()
                < 1e-15
        );
        assert!((doc.c[1][1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(PeriodsDoc::from_json(&doc.to_json()).unwrap(), doc);
        assert!(doc.to_csv().contains("tau_off,1,1,divergent"));
    }

    #[test]
    fn tau_document() {
        let doc = TauDoc::from_curve(&cfg("2,1", "t1:0:1:2,t2:0:1:2")).unwrap();
        assert_eq!(doc.terms.len(), 4);
        assert_eq!(doc.terms[3].subset, vec![1, 2]);
        assert!((doc.terms[3].amplitude - Complex64::new(1.0 / 9.0, 0.0)).norm() < 1e-15);
        assert_eq!(TauDoc::from_json(&doc.to_json()).unwrap(), doc);

        let doc = TauDoc::from_curve(&cfg("0.7", "t1:0:1:2,t2:0:1:2")).unwrap();
        assert_eq!(doc.terms.len(), 2);
        assert!(doc
            .terms
            .iter()
            .all(|t| (t.amplitude - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn field_marks_divisor_points() {
        let doc = sample_field(&cfg("1", "t1:-1:1:3,t2:0:1:2")).unwrap();
        assert_eq!(doc.rows.len(), 6);
        assert_eq!(doc.missing(), 2);
        let csv = doc.to_csv();
        assert!(csv.starts_with("t1,t2,U\n-1,0,"));
        assert!(csv.contains("\n0,0,nan\n"));
    }

    proptest! {
        #[test]
        fn complex_round_trip(re in prop::num::f64::NORMAL | prop::num::f64::ZERO, im in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
            let z = Complex64::new(re, im);
            prop_assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }

        #[test]
        fn parse_complex_is_total(s in ".*") {
            let _ = parse_complex(&s);
        }
    }
}
