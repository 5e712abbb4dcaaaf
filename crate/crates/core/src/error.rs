use alloc::string::String;

use crate::units::Unit;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("cannot convert {from} to {to}: different physical dimensions")]
    DimensionMismatch { from: Unit, to: Unit },

    #[error("unknown unit `{0}`")]
    UnknownUnit(String),

    #[error("invalid radial grid: {0}")]
    InvalidGrid(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: R values must be strictly increasing")]
    NonMonotone { line: usize },

    #[error("curve table has {found} rows, at least {needed} required")]
    TooFewPoints { found: usize, needed: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("channel {0} is not an excited channel (expected 2, 3 or 4)")]
    InvalidChannel(usize),

    #[error("no nonadiabatic-tunneling crossing found: {0}")]
    TopologyNotFound(String),

    #[error("degenerate crossing geometry: |x_b - x_t| = {separation:e} bohr")]
    DegenerateGeometry { separation: f64 },

    #[error("crossing parameter alpha = {alpha} is not positive (gamma = {gamma})")]
    NonPositiveAlpha { alpha: f64, gamma: f64 },

    #[error("{what} at R = {r} bohr lies outside the data range [{lo}, {hi}]")]
    OutOfRange { what: &'static str, r: f64, lo: f64, hi: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no valid frequency window: {0}")]
    EmptyWindow(String),

    #[error("grid too small for state v = {state}: boundary amplitude {amplitude:e}")]
    Resolution { state: usize, amplitude: f64 },

    #[error("propagation unstable at t = {time} a.u. (dt = {dt} a.u.): norm = {norm}")]
    Instability { time: f64, dt: f64, norm: f64 },

    #[error("flux probe at index {index} is too close to the grid boundary (N = {len})")]
    ProbeOutOfRange { index: usize, len: usize },
}
