//! Complete-reflection control of diatomic photodissociation branching.
//!
//! This crate is the pure numerical core: unit handling, radial grids,
//! potential curves and their Floquet-dressed two-state pairs, the
//! Zhu-Nakamura transmission engine, a Fourier-grid vibrational eigensolver
//! and a sixth-order symplectic multi-channel wavepacket propagator with
//! flux analysis. It is `no_std` and only needs `alloc`; file formats,
//! configuration and the command line live in the `reflectal` crate.
//!
//! All internal quantities are in atomic units (hbar = m_e = e = 1).
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bound;
pub mod curves;
pub mod error;
pub mod fft;
pub mod grid;
pub mod numeric;
pub mod observe;
pub mod spline;
pub mod tdse;
pub mod units;
pub mod zn;

pub use error::{Error, Result};
pub use grid::RadialGrid;
pub use num_complex::Complex64;
