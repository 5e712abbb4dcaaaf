//! Electronic structure of the four-channel diatomic: potential curves,
//! transition dipoles, tabulated data ingestion, Floquet dressing and the
//! crossing geometry consumed by the Zhu-Nakamura engine.

mod dressed;
mod surrogate;
mod table;

pub use dressed::{extract_features, CrossingFeatures, DressedPair, FeatureSearch};
pub use surrogate::{DipoleParams, ExcitedParams, MorseParams, SurrogateParams};
pub use table::{parse_table, CurveTable, ValueKind};

use alloc::format;
use alloc::string::String;

// libm-backed math; shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// A smooth scalar function of the internuclear distance.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    /// `de (1 - exp(-a (R - re)))^2 + offset`
    Morse { de: f64, a: f64, re: f64, offset: f64 },
    /// `amplitude exp(-decay R) + asymptote`
    Exponential { amplitude: f64, decay: f64, asymptote: f64 },
    /// `peak exp(-((R - center) / width)^2)`
    Gaussian { peak: f64, center: f64, width: f64 },
    /// `0.5 k (R - center)^2 + offset`
    Harmonic { k: f64, center: f64, offset: f64 },
    /// `slope R + intercept`
    Linear { slope: f64, intercept: f64 },
    Constant(f64),
    Spline(CubicSpline),
}

impl Curve {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Curve::Morse { de, a, re, offset } => {
                let y = 1.0 - (-a * (r - re)).exp();
                de * y * y + offset
            }
            Curve::Exponential { amplitude, decay, asymptote } => {
                amplitude * (-decay * r).exp() + asymptote
            }
            Curve::Gaussian { peak, center, width } => {
                let s = (r - center) / width;
                peak * (-s * s).exp()
            }
            Curve::Harmonic { k, center, offset } => 0.5 * k * (r - center) * (r - center) + offset,
            Curve::Linear { slope, intercept } => slope * r + intercept,
            Curve::Constant(c) => *c,
            Curve::Spline(s) => s.value(r),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            Curve::Morse { de, a, re, .. } => {
                let e = (-a * (r - re)).exp();
                2.0 * de * a * (1.0 - e) * e
            }
            Curve::Exponential { amplitude, decay, .. } => -decay * amplitude * (-decay * r).exp(),
            Curve::Gaussian { peak, center, width } => {
                let s = (r - center) / width;
                -2.0 * s / width * peak * (-s * s).exp()
            }
            Curve::Harmonic { k, center, .. } => k * (r - center),
            Curve::Linear { slope, .. } => *slope,
            Curve::Constant(_) => 0.0,
            Curve::Spline(s) => s.derivative(r),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Curve::Constant(c) => *c == 0.0,
            Curve::Gaussian { peak, .. } => *peak == 0.0,
            _ => false,
        }
    }
}

/// Atomic product an excited channel correlates with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fragment {
    /// H + I(2P3/2)
    Iodine,
    /// H + I*(2P1/2)
    IodineExcited,
}

/// The ground curve V1, three excited curves V2..V4 and the transition
/// dipoles mu_12, mu_13, mu_14, valid on `[r_min, r_max]`.
///
/// Channels are numbered 1..=4 throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    mass: f64,
    potentials: [Curve; 4],
    dipoles: [Curve; 3],
    labels: [String; 4],
    fragments: [Fragment; 3],
    r_min: f64,
    r_max: f64,
}

impl CurveSet {
    pub const GROUND: usize = 1;
    pub const EXCITED: [usize; 3] = [2, 3, 4];

    pub fn new(
        mass: f64,
        potentials: [Curve; 4],
        dipoles: [Curve; 3],
        range: (f64, f64),
    ) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::InvalidParameters(format!("mass must be positive, got {mass}")));
        }
        let (r_min, r_max) = range;
        if !(r_max > r_min) {
            return Err(Error::InvalidParameters(format!(
                "curve range [{r_min}, {r_max}] is empty"
            )));
        }
        let set = Self {
            mass,
            potentials,
            dipoles,
            labels: [
                String::from("1Sigma"),
                String::from("1Pi1"),
                String::from("3Pi0+"),
                String::from("3Pi1"),
            ],
            fragments: [Fragment::Iodine, Fragment::IodineExcited, Fragment::Iodine],
            r_min,
            r_max,
        };
        set.check_bound()?;
        Ok(set)
    }

    pub fn with_labels(mut self, labels: [String; 4]) -> Self {
        self.labels = labels;
        self
    }

    pub fn with_fragments(mut self, fragments: [Fragment; 3]) -> Self {
        self.fragments = fragments;
        self
    }

    fn check_bound(&self) -> Result<()> {
        let (r, vmin) = self.ground_minimum();
        let lowest_asymptote = Self::EXCITED
            .iter()
            .map(|&i| self.potential(i).value(self.r_max))
            .fold(self.potential(1).value(self.r_max), f64::min);
        if !(vmin < lowest_asymptote) || r <= self.r_min || r >= self.r_max {
            return Err(Error::InvalidParameters(format!(
                "ground curve has no interior minimum below the asymptotes (min {vmin} at R = {r})"
            )));
        }
        Ok(())
    }

    /// Position and value of the ground-curve minimum on a fine scan.
    pub fn ground_minimum(&self) -> (f64, f64) {
        let v1 = self.potential(1);
        let n = 4000;
        let h = (self.r_max - self.r_min) / n as f64;
        let (mut best_r, mut best_v) = (self.r_min, v1.value(self.r_min));
        for i in 1..=n {
            let r = self.r_min + i as f64 * h;
            let v = v1.value(r);
            if v < best_v {
                best_r = r;
                best_v = v;
            }
        }
        (best_r, best_v)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn range(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    /// Potential of channel `i` (1..=4).
    pub fn potential(&self, i: usize) -> &Curve {
        &self.potentials[i - 1]
    }

    /// Transition dipole between the ground channel and excited channel `i` (2..=4).
    pub fn dipole(&self, i: usize) -> &Curve {
        &self.dipoles[i - 2]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i - 1]
    }

    pub fn fragment(&self, i: usize) -> Fragment {
        self.fragments[i - 2]
    }

    pub fn check_excited(i: usize) -> Result<()> {
        if Self::EXCITED.contains(&i) {
            Ok(())
        } else {
            Err(Error::InvalidChannel(i))
        }
    }

    /// Same curves with excited channel `i` decoupled (zero dipole).
    pub fn without_coupling(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.dipoles[i - 2] = Curve::Constant(0.0);
        out
    }

    pub fn set_potential(&mut self, i: usize, curve: Curve) {
        self.potentials[i - 1] = curve;
    }

    pub fn set_dipole(&mut self, i: usize, curve: Curve) {
        self.dipoles[i - 2] = curve;
    }

    /// Positions where the dressed ground curve `V1 + omega` crosses `V_i`,
    /// located by sign changes on a uniform scan with `samples` intervals.
    pub fn diabatic_crossings(&self, i: usize, omega: f64, samples: usize) -> alloc::vec::Vec<f64> {
        let v1 = self.potential(1);
        let vi = self.potential(i);
        let d = |r: f64| v1.value(r) + omega - vi.value(r);
        let h = (self.r_max - self.r_min) / samples as f64;
        let mut out = alloc::vec::Vec::new();
        let mut prev = d(self.r_min);
        for k in 1..=samples {
            let r = self.r_min + k as f64 * h;
            let cur = d(r);
            if prev == 0.0 || (prev.signum() != cur.signum() && cur != 0.0) {
                if let Some(x) = crate::numeric::find_root(d, r - h, r, 1e-12) {
                    out.push(x);
                }
            }
            prev = cur;
        }
        out
    }
}
