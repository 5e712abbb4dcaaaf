use alloc::format;
use alloc::vec::Vec;

// libm-backed math; shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use super::CurveSet;
use crate::error::{Error, Result};
use crate::numeric::find_root;

/// Two-state dressed block `{V1 + omega, V_i}` coupled by `mu_1i F0 / 2`.
#[derive(Debug, Clone, Copy)]
pub struct DressedPair<'a> {
    curves: &'a CurveSet,
    channel: usize,
    omega: f64,
    f0: f64,
}

impl<'a> DressedPair<'a> {
    /// Dress ground channel 1 by one photon `omega` (hartree) and couple it
    /// to excited channel `channel` with peak field `f0` (a.u.).
    pub fn dress(curves: &'a CurveSet, channel: usize, omega: f64, f0: f64) -> Result<Self> {
        CurveSet::check_excited(channel)?;
        if !(omega > 0.0) {
            return Err(Error::InvalidParameters(format!("photon energy must be positive, got {omega}")));
        }
        if !(f0 >= 0.0) {
            return Err(Error::InvalidParameters(format!("field amplitude must be >= 0, got {f0}")));
        }
        Ok(Self { curves, channel, omega, f0 })
    }

    pub fn curves(&self) -> &'a CurveSet {
        self.curves
    }

    pub fn channel(&self) -> usize {
        self.channel
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn field(&self) -> f64 {
        self.f0
    }

    pub fn mass(&self) -> f64 {
        self.curves.mass()
    }

    pub fn diabat1(&self, r: f64) -> f64 {
        self.curves.potential(1).value(r) + self.omega
    }

    pub fn diabat2(&self, r: f64) -> f64 {
        self.curves.potential(self.channel).value(r)
    }

    pub fn coupling(&self, r: f64) -> f64 {
        0.5 * self.f0 * self.curves.dipole(self.channel).value(r)
    }

    fn split(&self, r: f64) -> (f64, f64, f64) {
        let h11 = self.diabat1(r);
        let h22 = self.diabat2(r);
        let mean = 0.5 * (h11 + h22);
        let half = 0.5 * (h11 - h22);
        (mean, half, self.coupling(r))
    }

    /// Lower and upper adiabats `(E1, E2)` at `r`.
    pub fn adiabats(&self, r: f64) -> (f64, f64) {
        let (mean, half, c) = self.split(r);
        let root = half.hypot(c);
        (mean - root, mean + root)
    }

    pub fn lower(&self, r: f64) -> f64 {
        self.adiabats(r).0
    }

    pub fn upper(&self, r: f64) -> f64 {
        self.adiabats(r).1
    }

    /// Radial derivatives `(dE1/dR, dE2/dR)`.
    pub fn adiabat_slopes(&self, r: f64) -> (f64, f64) {
        let (_, half, c) = self.split(r);
        let d1 = self.curves.potential(1).derivative(r);
        let d2 = self.curves.potential(self.channel).derivative(r);
        let dc = 0.5 * self.f0 * self.curves.dipole(self.channel).derivative(r);
        let dmean = 0.5 * (d1 + d2);
        let dhalf = 0.5 * (d1 - d2);
        let root = half.hypot(c);
        let droot = if root > 0.0 {
            (half * dhalf + c * dc) / root
        } else {
            dhalf.abs()
        };
        (dmean - droot, dmean + droot)
    }

    /// Diabatic crossings `diabat1 = diabat2` found on a uniform scan with
    /// spacing `step`, each tagged with whether the slopes have opposite sign
    /// (diabat1 rising, diabat2 falling).
    pub fn crossings(&self, step: f64) -> Vec<(f64, bool)> {
        let (lo, hi) = self.curves.range();
        let n = ((hi - lo) / step).ceil().max(1.0) as usize;
        let h = (hi - lo) / n as f64;
        let d = |r: f64| self.diabat1(r) - self.diabat2(r);
        let mut out = Vec::new();
        let mut prev = d(lo);
        for k in 1..=n {
            let r = lo + k as f64 * h;
            let cur = d(r);
            if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() || cur == 0.0 {
                if let Some(x) = find_root(d, r - h, r, 1e-13) {
                    let s1 = self.curves.potential(1).derivative(x);
                    let s2 = self.curves.potential(self.channel).derivative(x);
                    out.push((x, s1 > 0.0 && s2 < 0.0));
                }
            }
            prev = cur;
        }
        out
    }
}

/// Geometry of one nonadiabatic-tunneling avoided crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingFeatures {
    /// Diabatic crossing point, bohr.
    pub r_x: f64,
    /// Top of the lower adiabat, bohr.
    pub x_t: f64,
    /// Bottom of the upper adiabat, bohr.
    pub x_b: f64,
    pub e_t: f64,
    pub e_b: f64,
    pub gamma: f64,
    pub alpha: f64,
}

/// Controls for the bracketed extremum search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureSearch {
    /// Coarse scan spacing, bohr.
    pub step: f64,
    /// Extrema are sought within this distance of the diabatic crossing, bohr.
    pub window: f64,
    /// Absolute tolerance of the refined extremum positions, bohr.
    pub tolerance: f64,
    /// Minimum accepted `|x_b - x_t|`, bohr.
    pub min_separation: f64,
}

impl Default for FeatureSearch {
    fn default() -> Self {
        Self { step: 7.8e-3, window: 1.5, tolerance: 1e-10, min_separation: 1e-4 }
    }
}

/// Locate `x_t`, `x_b`, `E_t`, `E_b`, `gamma` and `alpha` for the
/// nonadiabatic-tunneling crossing of `pair`.
///
/// Extrema are bracketed by sign changes of the analytic adiabat slope on a
/// scan of spacing `search.step` and then refined by Brent's method on the
/// slope itself.
pub fn extract_features(pair: &DressedPair<'_>, search: &FeatureSearch) -> Result<CrossingFeatures> {
    let (lo, hi) = pair.curves().range();
    let r_x = pair
        .crossings(search.step)
        .into_iter()
        .find_map(|(x, nt)| nt.then_some(x))
        .ok_or_else(|| {
            Error::TopologyNotFound(format!(
                "dressed ground state does not cross channel {} with opposite slopes",
                pair.channel()
            ))
        })?;

    let a = (r_x - search.window).max(lo);
    let b = (r_x + search.window).min(hi);
    let x_t = nearest_extremum(|r| pair.adiabat_slopes(r).0, a, b, r_x, true, search).ok_or_else(|| {
        Error::TopologyNotFound(format!("lower adiabat has no barrier top near R = {r_x:.4} bohr"))
    })?;
    let x_b = nearest_extremum(|r| pair.adiabat_slopes(r).1, a, b, r_x, false, search).ok_or_else(|| {
        Error::TopologyNotFound(format!("upper adiabat has no well bottom near R = {r_x:.4} bohr"))
    })?;

    let separation = (x_b - x_t).abs();
    if separation < search.min_separation {
        return Err(Error::DegenerateGeometry { separation });
    }
    let e_t = pair.lower(x_t);
    let e_b = pair.upper(x_b);
    if !(e_b > e_t) {
        return Err(Error::TopologyNotFound(format!("E_b = {e_b} does not exceed E_t = {e_t}")));
    }
    let x_bar = 0.5 * (x_t + x_b);
    if x_bar <= lo || x_bar >= hi {
        return Err(Error::OutOfRange { what: "crossing midpoint", r: x_bar, lo, hi });
    }
    let (e1, e2) = pair.adiabats(x_bar);
    let gamma = (e_b - e_t) / (e2 - e1);
    let alpha = (1.0 - gamma * gamma) / (pair.mass() * separation * separation * (e_b - e_t));
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveAlpha { alpha, gamma });
    }
    Ok(CrossingFeatures { r_x, x_t, x_b, e_t, e_b, gamma, alpha })
}

/// Root of `slope` in `[a, b]` closest to `center` at which the slope goes
/// from positive to negative (`maximum`) or negative to positive.
fn nearest_extremum(
    slope: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    center: f64,
    maximum: bool,
    search: &FeatureSearch,
) -> Option<f64> {
    let n = ((b - a) / search.step).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut best: Option<f64> = None;
    let mut prev = slope(a);
    for k in 1..=n {
        let r = a + k as f64 * h;
        let cur = slope(r);
        let hit = if maximum { prev > 0.0 && cur <= 0.0 } else { prev < 0.0 && cur >= 0.0 };
        if hit {
            if let Some(x) = find_root(&slope, r - h, r, search.tolerance) {
                if best.is_none_or(|y| (x - center).abs() < (y - center).abs()) {
                    best = Some(x);
                }
            }
        }
        prev = cur;
    }
    best
}
