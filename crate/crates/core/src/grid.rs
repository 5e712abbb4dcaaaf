use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

// libm-backed math; shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Uniform radial grid including both end points.
///
/// For spectral work the grid is treated as periodic with period `n * dr`,
/// so the conjugate momenta are `2 pi j / (n dr)` in FFT order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    n: usize,
    dr: f64,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite()) || r_max <= r_min {
            return Err(Error::InvalidGrid(format!(
                "need R_max > R_min, got [{r_min}, {r_max}]"
            )));
        }
        if n < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {} points, got {n}",
                Self::MIN_POINTS
            )));
        }
        if !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {n} is not a power of two")));
        }
        Ok(Self { r_min, r_max, n, dr: (r_max - r_min) / (n - 1) as f64 })
    }

    /// Grid with spacing as close as possible to `dr` (rounded up to the next
    /// power-of-two point count) starting at `r_min` and reaching `r_max`.
    pub fn with_spacing(r_min: f64, r_max: f64, dr: f64) -> Result<Self> {
        if !(dr > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {dr}")));
        }
        let needed = ((r_max - r_min) / dr).ceil() as usize + 1;
        Self::new(r_min, r_max, needed.next_power_of_two().max(Self::MIN_POINTS))
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn r(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.r_max
        } else {
            self.r_min + i as f64 * self.dr
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.r(i)).collect()
    }

    /// Index of the grid point nearest to `r` (clamped to the grid).
    pub fn nearest_index(&self, r: f64) -> usize {
        let x = ((r - self.r_min) / self.dr).round();
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(self.n - 1)
        }
    }

    /// Largest representable momentum, pi / dR.
    pub fn k_max(&self) -> f64 {
        PI / self.dr
    }

    /// Conjugate momenta in FFT order: 0, dk, ..., (n/2 - 1) dk, -n/2 dk, ..., -dk.
    pub fn momenta(&self) -> Vec<f64> {
        let dk = 2.0 * PI / (self.n as f64 * self.dr);
        let half = self.n / 2;
        (0..self.n)
            .map(|j| if j < half { j as f64 * dk } else { (j as f64 - self.n as f64) * dk })
            .collect()
    }

    /// Rectangle-rule integral `sum f_i dR` of grid samples.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        values.into_iter().sum::<f64>() * self.dr
    }
}
