//! Multi-soliton solutions of the KdV hierarchy from degenerate hyperelliptic
//! curves `y^2 = x P(x)^2`.
//!
//! The pipeline runs from wavenumbers to curve data ([`curve`]), structural
//! matrices ([`structmat`]), period matrices ([`periods`]), the regularized
//! theta function and its log-derivatives ([`theta`], built on [`expsum`]),
//! and finally the KdV consistency checks ([`kdvcheck`]).

pub mod config;
pub mod curve;
pub mod expsum;
pub mod kdvcheck;
pub mod output;
pub mod periods;
pub mod polynomial;
pub mod precise;
pub mod structmat;
pub mod theta;

pub use curve::{CurveError, SolitonCurve};
pub use expsum::{Direction, ExponentialSum, PhasePoint, SumError, Term};
pub use structmat::{ComplexMatrix, LinalgError};
pub use theta::ThetaError;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
}
