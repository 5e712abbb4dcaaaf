use alloc::format;

// libm-backed math; shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use super::{Curve, CurveSet};
use crate::error::{Error, Result};
use crate::units::{amu, ev};

/// Morse ground state `de (1 - exp(-a (R - re)))^2`, zero at the minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    pub de: f64,
    pub a: f64,
    pub re: f64,
}

/// Repulsive excited curve `amplitude exp(-decay R) + asymptote`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitedParams {
    pub amplitude: f64,
    pub decay: f64,
    pub asymptote: f64,
}

impl ExcitedParams {
    /// Curve passing through `vertical` at `r0` with the given decay rate.
    pub fn through(vertical: f64, r0: f64, decay: f64, asymptote: f64) -> Self {
        Self { amplitude: (vertical - asymptote) * (decay * r0).exp(), decay, asymptote }
    }

    /// Value at `r`.
    pub fn at(&self, r: f64) -> f64 {
        self.amplitude * (-self.decay * r).exp() + self.asymptote
    }
}

/// Gaussian transition dipole `mu0 exp(-((R - center) / width)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleParams {
    pub mu0: f64,
    pub center: f64,
    pub width: f64,
}

/// Analytic four-channel HI-like model: Morse ground state, three
/// exponential repulsive states and Gaussian transition dipoles.
///
/// Channels 2 and 4 share the H + I asymptote; channel 3 goes to H + I*,
/// one spin-orbit splitting higher.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateParams {
    /// Reduced mass in electron masses.
    pub mass: f64,
    pub ground: MorseParams,
    pub excited: [ExcitedParams; 3],
    pub dipoles: [DipoleParams; 3],
    /// Validity range of the analytic forms, bohr.
    pub range: (f64, f64),
}

impl SurrogateParams {
    /// Ground-state harmonic frequency used for the defaults (2309 cm^-1).
    pub const OMEGA_E_CM: f64 = 2309.0;
    /// I(2P1/2) - I(2P3/2) splitting, eV.
    pub const SPIN_ORBIT_EV: f64 = 0.943;

    /// Spin-orbit splitting C3 - C2 in hartree.
    pub fn spin_orbit(&self) -> f64 {
        self.excited[1].asymptote - self.excited[0].asymptote
    }

    /// Move the I* asymptote to `C2 + splitting`, keeping the vertical
    /// energy of channel 3 at the ground-state equilibrium.
    pub fn with_spin_orbit(mut self, splitting: f64) -> Self {
        let re = self.ground.re;
        let e3 = self.excited[1];
        self.excited[1] =
            ExcitedParams::through(e3.at(re), re, e3.decay, self.excited[0].asymptote + splitting);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.ground;
        if !(g.de > 0.0) {
            return Err(Error::InvalidParameters(format!("Morse D_e must be positive, got {}", g.de)));
        }
        if !(g.a > 0.0) {
            return Err(Error::InvalidParameters(format!("Morse a must be positive, got {}", g.a)));
        }
        let [c2, c3, c4] = [0, 1, 2].map(|k| self.excited[k].asymptote);
        let tol = 1e-12 * (1.0 + c2.abs());
        if (c2 - c4).abs() > tol || !(c3 > c2) {
            return Err(Error::InvalidParameters(format!(
                "asymptotes must satisfy C2 = C4 < C3, got C2 = {c2}, C3 = {c3}, C4 = {c4}"
            )));
        }
        for (k, d) in self.dipoles.iter().enumerate() {
            if !(d.width > 0.0) {
                return Err(Error::InvalidParameters(format!(
                    "dipole width for channel {} must be positive",
                    k + 2
                )));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<CurveSet> {
        self.validate()?;
        let g = self.ground;
        let exc = |p: &ExcitedParams| Curve::Exponential {
            amplitude: p.amplitude,
            decay: p.decay,
            asymptote: p.asymptote,
        };
        let dip = |d: &DipoleParams| Curve::Gaussian { peak: d.mu0, center: d.center, width: d.width };
        CurveSet::new(
            self.mass,
            [
                Curve::Morse { de: g.de, a: g.a, re: g.re, offset: 0.0 },
                exc(&self.excited[0]),
                exc(&self.excited[1]),
                exc(&self.excited[2]),
            ],
            [dip(&self.dipoles[0]), dip(&self.dipoles[1]), dip(&self.dipoles[2])],
            self.range,
        )
    }

    /// Two-channel variant: ground state plus channel 2 only.
    pub fn two_channel(&self) -> Self {
        let mut out = *self;
        out.dipoles[1].mu0 = 0.0;
        out.dipoles[2].mu0 = 0.0;
        out
    }
}

impl Default for SurrogateParams {
    fn default() -> Self {
        let mass = amu(126.904 / 127.912);
        let de = ev(3.2);
        let re = 3.04;
        let we = Self::OMEGA_E_CM * 4.556_335e-6;
        let a = we * (mass / (2.0 * de)).sqrt();
        let so = ev(Self::SPIN_ORBIT_EV);
        Self {
            mass,
            ground: MorseParams { de, a, re },
            excited: [
                ExcitedParams::through(ev(5.15), re, 1.6, de),
                ExcitedParams::through(ev(5.15), re, 2.3, de + so),
                ExcitedParams::through(ev(4.381_294_295), re, 1.705_005_45, de),
            ],
            dipoles: [
                DipoleParams { mu0: 0.15, center: 3.3, width: 4.0 },
                DipoleParams { mu0: 0.18, center: 3.0, width: 4.0 },
                DipoleParams { mu0: 0.12, center: 3.4, width: 4.0 },
            ],
            range: (1.0, 12.0),
        }
    }
}
