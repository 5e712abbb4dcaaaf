//! Probability current at an asymptotic probe, its time integral and the
//! I / I* branching derived from it.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `(1/m) Im(phi* dphi/dR)` at grid index `index`, with the derivative from
/// the five-point central stencil.
pub fn instantaneous_flux(phi: &[Complex64], index: usize, mass: f64, dr: f64) -> Result<f64> {
    if index < 2 || index + 2 >= phi.len() {
        return Err(Error::ProbeOutOfRange { index, len: phi.len() });
    }
    let d = (-phi[index + 2] + phi[index + 1] * 8.0 - phi[index - 1] * 8.0 + phi[index - 2]) / (12.0 * dr);
    let f = phi[index];
    // Im(conj(f) d) written out so a real-valued phi gives exactly zero
    Ok((f.re * d.im - f.im * d.re) / mass)
}

/// Time-integrated fluxes `J_2, J_3, J_4` through the probe.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxRecord {
    /// Probe position, bohr.
    pub probe: f64,
    /// Output times, a.u.
    pub times: Vec<f64>,
    /// Instantaneous flux at each output time, 1/a.u. time.
    pub rates: Vec<[f64; 3]>,
    /// Running integrals at each output time.
    pub integrated: Vec<[f64; 3]>,
}

impl FluxRecord {
    pub fn new(probe: f64) -> Self {
        Self { probe, times: Vec::new(), rates: Vec::new(), integrated: Vec::new() }
    }

    /// Append the instantaneous fluxes at time `t`, integrating by the
    /// trapezoid rule from the previous output time.
    pub fn accumulate(&mut self, t: f64, rates: [f64; 3]) {
        let next = match (self.times.last(), self.rates.last(), self.integrated.last()) {
            (Some(&t0), Some(r0), Some(j0)) => {
                let h = t - t0;
                [0, 1, 2].map(|k| j0[k] + 0.5 * h * (r0[k] + rates[k]))
            }
            _ => [0.0; 3],
        };
        self.times.push(t);
        self.rates.push(rates);
        self.integrated.push(next);
    }

    /// `(J2, J3, J4)` at the last output time.
    pub fn final_values(&self) -> [f64; 3] {
        self.integrated.last().copied().unwrap_or([0.0; 3])
    }

    pub fn total(&self) -> f64 {
        self.final_values().iter().sum()
    }
}

/// Product branching at the end of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branching {
    /// H + I yield, `J2 + J4`.
    pub p_i: f64,
    /// H + I* yield, `J3`.
    pub p_istar: f64,
    /// `p_istar / p_i`; `+inf` when `p_i` is below [`Branching::P_I_FLOOR`].
    pub ratio: f64,
}

impl Branching {
    pub const P_I_FLOOR: f64 = 1e-12;

    pub fn from_yields(j: [f64; 3]) -> Self {
        let p_i = j[0] + j[2];
        let p_istar = j[1];
        let ratio = if p_i < Self::P_I_FLOOR { f64::INFINITY } else { p_istar / p_i };
        Self { p_i, p_istar, ratio }
    }

    pub fn ratio_is_infinite(&self) -> bool {
        self.ratio.is_infinite()
    }
}

pub fn branching(record: &FluxRecord) -> Branching {
    Branching::from_yields(record.final_values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;
    #[allow(unused_imports)]
    use num_traits::Float;

    fn grid(n: usize, dr: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dr).collect()
    }

    #[test]
    fn plane_wave_current() {
        let (m, dr) = (1800.0, 0.01);
        for &k in &[1.0, 2.0, 5.0, 15.0, 29.0] {
            let phi: Vec<Complex64> = grid(64, dr).iter().map(|&r| Complex64::from_polar(1.0, k * r)).collect();
            let j = instantaneous_flux(&phi, 30, m, dr).unwrap();
            // the stencil's exact symbol for e^{ikR}
            let kh = k * dr;
            let symbol = (8.0 * kh.sin() - (2.0 * kh).sin()) / (6.0 * dr);
            assert!(((j - symbol / m) / (symbol / m)).abs() < 1e-12, "k = {k}");
            let rel = ((j - k / m) / (k / m)).abs();
            assert!(rel <= kh.powi(4) / 30.0 * 1.01);
            if kh <= 0.02 {
                assert!(rel < 1e-8, "k = {k}: {rel:e}");
            }
        }
    }

    #[test]
    fn real_wavefunction_carries_no_current() {
        let phi: Vec<Complex64> = grid(32, 0.1).iter().map(|&r| Complex64::new(r.sin(), 0.0)).collect();
        assert_eq!(instantaneous_flux(&phi, 10, 1.0, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_packet_current_and_sign() {
        let (m, dr, k0, rc, w) = (1800.0, 0.005, 12.0, 6.0, 0.5);
        let rs: Vec<f64> = (0..2400).map(|i| i as f64 * dr).collect();
        let packet = |k: f64| -> Vec<Complex64> {
            rs.iter()
                .map(|&r| Complex64::from_polar((-(r - rc).powi(2) / (2.0 * w * w)).exp(), k * r))
                .collect()
        };
        let idx = 1200;
        let out = packet(k0);
        let j = instantaneous_flux(&out, idx, m, dr).unwrap();
        let want = out[idx].norm_sqr() * k0 / m;
        assert!(((j - want) / want).abs() < 0.01);
        let incoming = packet(-k0);
        assert!(instantaneous_flux(&incoming, idx, m, dr).unwrap() < 0.0);
    }

    #[test]
    fn probe_must_be_interior() {
        let phi = vec![Complex64::new(1.0, 0.0); 10];
        assert_eq!(instantaneous_flux(&phi, 1, 1.0, 0.1), Err(Error::ProbeOutOfRange { index: 1, len: 10 }));
        assert!(instantaneous_flux(&phi, 8, 1.0, 0.1).is_err());
        assert!(instantaneous_flux(&phi, 7, 1.0, 0.1).is_ok());
    }

    #[test]
    fn trapezoid_integration() {
        let mut rec = FluxRecord::new(6.0);
        for k in 0..=100 {
            rec.accumulate(k as f64 * 0.5, [0.0, 0.0, 0.0]);
        }
        assert_eq!(rec.final_values(), [0.0; 3]);
        let mut rec = FluxRecord::new(6.0);
        for k in 0..=100 {
            rec.accumulate(k as f64 * 0.5, [2e-3, 0.0, 1e-4]);
        }
        let j = rec.final_values();
        assert!((j[0] - 2e-3 * 50.0).abs() < 1e-15 && (j[2] - 5e-3).abs() < 1e-15);
        // trapezoid on sin^2 over full periods is exact
        let mut rec = FluxRecord::new(6.0);
        for k in 0..=64 {
            let t = k as f64 * PI / 16.0;
            rec.accumulate(t, [t.sin().powi(2), 0.0, 0.0]);
        }
        assert!((rec.final_values()[0] - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn branching_ratios() {
        let b = Branching::from_yields([0.0, 0.3, 0.0]);
        assert!(b.ratio_is_infinite());
        assert_eq!(b.p_istar, 0.3);
        let b = Branching::from_yields([0.1, 0.1, 0.1]);
        assert!((b.ratio - 0.5).abs() < 1e-15);
        assert!((b.p_i - 0.2).abs() < 1e-15);
    }
}
