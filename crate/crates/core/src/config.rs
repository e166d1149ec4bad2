//! Run configuration: a flat TOML file plus command-line overrides.
//!
//! ```toml
//! wavenumbers = [2.0, 1.0]
//! grid = "t1:-3:3:121,t2:-3:3:121"
//! higher_times = []          # t_3 .. t_g, missing entries are 0
//! format = "csv"             # or "json"
//! out = "field.csv"          # stdout when absent
//! seed = 1234
//! samples = 200
//!
//! [tolerances]
//! "kdv.residual" = 1e-8
//! ```

use crate::curve::{CurveError, SolitonCurve};
use crate::kdvcheck::{default_tolerance, SuiteConfig, DEFAULT_SEED};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("invalid wavenumbers: {0}")]
    Wavenumbers(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid format '{0}': expected csv or json")]
    Format(String),
    #[error("invalid tolerance for '{0}': {1}")]
    Tolerance(String, String),
    #[error("too many higher times: {got} given, genus {genus} allows {max}")]
    HigherTimes {
        got: usize,
        genus: usize,
        max: usize,
    },
    #[error("invalid sample count: {0}")]
    Samples(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Largest number of grid points accepted, to bound memory use.
pub const MAX_GRID_POINTS: usize = 1 << 24;

/// Largest accepted number of solitons; theta~ has `2^g` terms.
pub const MAX_GENUS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(ConfigError::Format(other.into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    /// `count` equally spaced values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub t1: Axis,
    pub t2: Axis,
}

impl Default for Grid {
    fn default() -> Self {
        let axis = Axis {
            min: -3.0,
            max: 3.0,
            count: 121,
        };
        Self { t1: axis, t2: axis }
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{what} '{}' is not a number", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("{what} '{}' is not finite", s.trim()));
    }
    Ok(v)
}

/// Parses `"2,1"` into `[2.0, 1.0]`. An empty string gives an empty list.
pub fn parse_wavenumbers(s: &str) -> Result<Vec<f64>, ConfigError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| parse_f64(item, "wavenumber").map_err(ConfigError::Wavenumbers))
        .collect()
}

/// Parses `"t1:-3:3:121,t2:-3:3:121"`. Both axes are required, in any order.
pub fn parse_grid(s: &str) -> Result<Grid, ConfigError> {
    let mut t1 = None;
    let mut t2 = None;
    for item in s.split(',') {
        let parts: Vec<&str> = item.trim().split(':').collect();
        let [name, min, max, count] = parts.as_slice() else {
            return Err(ConfigError::Grid(format!(
                "'{}' is not name:min:max:count",
                item.trim()
            )));
        };
        let axis = Axis {
            min: parse_f64(min, "min").map_err(ConfigError::Grid)?,
            max: parse_f64(max, "max").map_err(ConfigError::Grid)?,
            count: count.trim().parse().map_err(|_| {
                ConfigError::Grid(format!("count '{}' is not an integer", count.trim()))
            })?,
        };
        let slot = match name.trim() {
            "t1" => &mut t1,
            "t2" => &mut t2,
            other => return Err(ConfigError::Grid(format!("unknown axis '{other}'"))),
        };
        if slot.replace(axis).is_some() {
            return Err(ConfigError::Grid(format!(
                "axis '{}' given twice",
                name.trim()
            )));
        }
    }
    let (Some(t1), Some(t2)) = (t1, t2) else {
        return Err(ConfigError::Grid("both t1 and t2 axes are required".into()));
    };
    let grid = Grid { t1, t2 };
    validate_grid(&grid)?;
    Ok(grid)
}

fn validate_grid(grid: &Grid) -> Result<(), ConfigError> {
    for (name, a) in [("t1", grid.t1), ("t2", grid.t2)] {
        if a.count < 2 {
            return Err(ConfigError::Grid(format!(
                "{name} count must be at least 2"
            )));
        }
        if a.min >= a.max {
            return Err(ConfigError::Grid(format!("{name} min must be below max")));
        }
    }
    if grid
        .t1
        .count
        .checked_mul(grid.t2.count)
        .is_none_or(|n| n > MAX_GRID_POINTS)
    {
        return Err(ConfigError::Grid(format!(
            "more than {MAX_GRID_POINTS} points"
        )));
    }
    Ok(())
}

/// The config file as written; every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub wavenumbers: Option<Vec<f64>>,
    pub grid: Option<String>,
    pub higher_times: Option<Vec<f64>>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Command-line values that replace file keys.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub wavenumbers: Option<String>,
    pub grid: Option<String>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub wavenumbers: Vec<f64>,
    pub curve: SolitonCurve,
    pub grid: Grid,
    /// `t_3 .. t_g`, padded with zeros to length `g - 2`.
    pub higher_times: Vec<f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub samples: usize,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, over: Overrides) -> Result<Self, ConfigError> {
        let wavenumbers = match over.wavenumbers {
            Some(s) => parse_wavenumbers(&s)?,
            None => file
                .wavenumbers
                .ok_or_else(|| ConfigError::Wavenumbers("no wavenumbers given".into()))?,
        };
        if wavenumbers.len() > MAX_GENUS {
            return Err(ConfigError::Wavenumbers(format!(
                "at most {MAX_GENUS} wavenumbers are supported"
            )));
        }
        let curve = SolitonCurve::new(&wavenumbers)?;
        let g = curve.genus();

        let grid = match over.grid.or(file.grid) {
            Some(s) => parse_grid(&s)?,
            None => Grid::default(),
        };

        let mut higher_times = file.higher_times.unwrap_or_default();
        let max = g.saturating_sub(2);
        if higher_times.len() > max {
            return Err(ConfigError::HigherTimes {
                got: higher_times.len(),
                genus: g,
                max,
            });
        }
        if higher_times.iter().any(|t| !t.is_finite()) {
            return Err(ConfigError::Syntax("higher_times must be finite".into()));
        }
        higher_times.resize(max, 0.0);

        for (id, &tol) in &file.tolerances {
            if default_tolerance(id).is_none() {
                return Err(ConfigError::Tolerance(id.clone(), "unknown check".into()));
            }
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(ConfigError::Tolerance(
                    id.clone(),
                    "must be positive and finite".into(),
                ));
            }
        }

        let format = match over.format.or(file.format) {
            Some(s) => s.parse()?,
            None => Format::default(),
        };
        let samples = file.samples.unwrap_or(200);
        if samples == 0 || samples > 1_000_000 {
            return Err(ConfigError::Samples(format!(
                "{samples} is outside 1..=1000000"
            )));
        }

        Ok(Self {
            wavenumbers,
            curve,
            grid,
            higher_times,
            tolerances: file.tolerances,
            format,
            out: over.out.or(file.out),
            seed: over.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            samples,
        })
    }

    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            samples: self.samples,
            fd_samples: 100,
            tolerances: self.tolerances.clone(),
        }
    }

    /// Phase point for grid coordinates `(t1, t2)`; `t2` is dropped at genus 1.
    pub fn point(&self, t1: f64, t2: f64) -> crate::expsum::PhasePoint {
        let g = self.curve.genus();
        let mut t = vec![t1];
        if g >= 2 {
            t.push(t2);
        }
        t.extend_from_slice(&self.higher_times);
        crate::expsum::PhasePoint::new(t)
    }
}
