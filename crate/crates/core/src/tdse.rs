//! Four-channel wavepacket propagation in a CW laser field.
//!
//! `i d/dt phi = (-1/(2m) d^2/dR^2 + V(t)) phi` with `V(t)` the potential
//! matrix whose ground row and column carry `-mu_1j(R) F(t)`. Time stepping
//! is a sixth-order composition of Strang steps (Yoshida's solution A);
//! kinetic factors are applied in momentum space, potential factors by
//! pointwise diagonalisation of the 4x4 matrix.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// libm-backed math; shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::bound::VibrationalState;
use crate::curves::CurveSet;
use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::grid::RadialGrid;
use crate::numeric::jacobi_eigen;
use crate::observe::{instantaneous_flux, FluxRecord};

/// Continuous-wave field `F0 cos(omega t) Theta(t)` with a sin^2 ramp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    /// Peak field, a.u.
    pub f0: f64,
    /// Photon energy, hartree.
    pub omega: f64,
    /// Envelope ramp duration, a.u. time.
    pub ramp: f64,
    /// Total propagation time, a.u. time.
    pub duration: f64,
}

impl FieldSpec {
    pub const DEFAULT_RAMP_CYCLES: f64 = 10.0;
    pub const MIN_RAMP_CYCLES: f64 = 5.0;

    /// Field with the default ramp of ten optical cycles.
    pub fn new(f0: f64, omega: f64, duration: f64) -> Self {
        Self { f0, omega, ramp: Self::DEFAULT_RAMP_CYCLES * 2.0 * PI / omega, duration }
    }

    pub fn optical_period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn ramp_cycles(&self) -> f64 {
        self.ramp / self.optical_period()
    }
}

/// Callable field built from a [`FieldSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Field {
    spec: FieldSpec,
}

impl Field {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// `Theta(t)`: `sin^2(pi t / (2 ramp))` during the ramp, then 1.
    pub fn envelope(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t >= self.spec.ramp {
            1.0
        } else {
            let s = (PI * t / (2.0 * self.spec.ramp)).sin();
            s * s
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if self.spec.f0 == 0.0 {
            return 0.0;
        }
        self.spec.f0 * (self.spec.omega * t).cos() * self.envelope(t)
    }

    pub fn ramp_too_short(&self) -> bool {
        self.spec.ramp_cycles() < FieldSpec::MIN_RAMP_CYCLES
    }
}

/// Build the field; a ramp shorter than five optical cycles is accepted with
/// a warning.
pub fn build_field(spec: FieldSpec) -> Field {
    let field = Field { spec };
    if field.ramp_too_short() {
        log::warn!(
            "envelope ramp of {:.2} optical cycles is shorter than {} cycles; expect nonadiabatic switch-on artefacts",
            spec.ramp_cycles(),
            FieldSpec::MIN_RAMP_CYCLES
        );
    }
    field
}

/// Quadratic absorbing potential `-i eta ((R - onset) / width)^2` for `R >= onset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cap {
    /// Onset, bohr.
    pub onset: f64,
    /// Ramp width, bohr.
    pub width: f64,
    /// Strength eta, hartree.
    pub strength: f64,
    /// Channels (1..=4 mapped to 0..4) the absorber acts on.
    pub channels: [bool; 4],
}

impl Cap {
    pub const DEFAULT_STRENGTH: f64 = 0.15;

    /// Absorber acting on the excited channels only.
    pub fn excited(onset: f64, width: f64, strength: f64) -> Self {
        Self { onset, width, strength, channels: [false, true, true, true] }
    }

    pub fn disabled() -> Self {
        Self { onset: f64::INFINITY, width: 1.0, strength: 0.0, channels: [false; 4] }
    }

    pub fn is_enabled(&self) -> bool {
        self.strength > 0.0 && self.channels.iter().any(|&c| c)
    }

    /// Per-step attenuation factor at `r`.
    pub fn factor(&self, r: f64, dt: f64) -> f64 {
        if r < self.onset || self.strength == 0.0 {
            return 1.0;
        }
        let x = (r - self.onset) / self.width;
        (-self.strength * x * x * dt).exp()
    }
}

impl Default for Cap {
    fn default() -> Self {
        Self::excited(9.0, 1.0, Self::DEFAULT_STRENGTH)
    }
}

/// Numerical controls of one propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    /// Time step, a.u. time.
    pub dt: f64,
    pub cap: Cap,
    /// Flux probe position R_c, bohr.
    pub probe: f64,
    /// Steps between observable records.
    pub stride: usize,
}

impl PropagationConfig {
    pub fn validate(&self, grid: &RadialGrid) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameters(format!("time step must be positive, got {}", self.dt)));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameters("output stride must be at least 1".into()));
        }
        if self.cap.is_enabled() {
            if self.cap.onset + self.cap.width > grid.r_max() + 1e-12 {
                return Err(Error::InvalidParameters(format!(
                    "absorber [{}, {}] extends past R_max = {}",
                    self.cap.onset,
                    self.cap.onset + self.cap.width,
                    grid.r_max()
                )));
            }
            if !(self.probe < self.cap.onset) {
                return Err(Error::InvalidParameters(format!(
                    "flux probe R_c = {} must lie before the absorber onset {}",
                    self.probe, self.cap.onset
                )));
            }
        }
        let idx = grid.nearest_index(self.probe);
        if idx < 2 || idx + 2 >= grid.len() {
            return Err(Error::ProbeOutOfRange { index: idx, len: grid.len() });
        }
        Ok(())
    }
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self { dt: 0.043 * crate::units::fs(1.0), cap: Cap::default(), probe: 6.0, stride: 50 }
    }
}

/// Channel amplitudes `phi_1..phi_4` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavepacketState {
    pub t: f64,
    pub channels: [Vec<Complex64>; 4],
}

impl WavepacketState {
    /// Ground-channel packet from a real vibrational eigenstate.
    pub fn from_ground(state: &VibrationalState) -> Self {
        let n = state.chi.len();
        let ground = state.chi.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        Self { t: 0.0, channels: [ground, vec![Complex64::default(); n], vec![Complex64::default(); n], vec![Complex64::default(); n]] }
    }

    pub fn norms(&self, grid: &RadialGrid) -> [f64; 4] {
        [0, 1, 2, 3].map(|c| grid.integrate(self.channels[c].iter().map(|z| z.norm_sqr())))
    }

    pub fn total_norm(&self, grid: &RadialGrid) -> f64 {
        self.norms(grid).iter().sum()
    }

    /// Norm on the points with `R < r_c`, summed over channels.
    pub fn interior_norm(&self, grid: &RadialGrid, r_c: f64) -> f64 {
        let k = (0..grid.len()).take_while(|&i| grid.r(i) < r_c).count();
        self.channels.iter().map(|ch| grid.integrate(ch[..k].iter().map(|z| z.norm_sqr()))).sum()
    }
}

// Yoshida sixth-order composition, solution A.
const W1: f64 = -1.177_679_984_178_87;
const W2: f64 = 0.235_573_213_359_357;
const W3: f64 = 0.784_513_610_477_560;
const W0: f64 = 1.0 - 2.0 * (W1 + W2 + W3);

/// Kinetic coefficients `c_1..c_8`.
pub const KINETIC_COEFFS: [f64; 8] = [
    0.5 * W3,
    0.5 * (W3 + W2),
    0.5 * (W2 + W1),
    0.5 * (W1 + W0),
    0.5 * (W0 + W1),
    0.5 * (W1 + W2),
    0.5 * (W2 + W3),
    0.5 * W3,
];
/// Potential coefficients `d_1..d_7`.
pub const POTENTIAL_COEFFS: [f64; 7] = [W3, W2, W1, W0, W1, W2, W3];

/// `exp(-i tau M)` for a real symmetric 4x4 matrix, via its eigenvectors.
pub fn potential_factor(m: [[f64; 4]; 4], tau: f64) -> [[Complex64; 4]; 4] {
    let (w, u) = jacobi_eigen(m);
    let phases = w.map(|l| Complex64::from_polar(1.0, -l * tau));
    let mut out = [[Complex64::default(); 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            *o = (0..4).map(|k| phases[k] * (u[i][k] * u[j][k])).sum();
        }
    }
    out
}

/// Precomputed operators for stepping at a fixed time step.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: RadialGrid,
    dt: f64,
    fft: Fft,
    /// Kinetic phase arrays (including the 1/N of the inverse FFT), one per c_k.
    kinetic: [Vec<Complex64>; 8],
    potentials: Vec<[f64; 4]>,
    dipoles: Vec<[f64; 3]>,
    field: Field,
    scratch: Vec<Complex64>,
}

impl Stepper {
    pub fn new(curves: &CurveSet, grid: &RadialGrid, field: Field, dt: f64) -> Self {
        let n = grid.len();
        let mass = curves.mass();
        let ks = grid.momenta();
        let kinetic = KINETIC_COEFFS.map(|c| {
            ks.iter()
                .map(|&k| Complex64::from_polar(1.0 / n as f64, -c * dt * k * k / (2.0 * mass)))
                .collect()
        });
        let potentials = (0..n)
            .map(|i| {
                let r = grid.r(i);
                [1, 2, 3, 4].map(|c| curves.potential(c).value(r))
            })
            .collect();
        let dipoles = (0..n)
            .map(|i| {
                let r = grid.r(i);
                [2, 3, 4].map(|c| curves.dipole(c).value(r))
            })
            .collect();
        Self { grid: *grid, dt, fft: Fft::new(n), kinetic, potentials, dipoles, field, scratch: vec![Complex64::default(); n] }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Potential matrix at grid index `i` for field value `f`.
    pub fn potential_matrix(&self, i: usize, f: f64) -> [[f64; 4]; 4] {
        let v = self.potentials[i];
        let mu = self.dipoles[i];
        let c = [-mu[0] * f, -mu[1] * f, -mu[2] * f];
        [
            [v[0], c[0], c[1], c[2]],
            [c[0], v[1], 0.0, 0.0],
            [c[1], 0.0, v[2], 0.0],
            [c[2], 0.0, 0.0, v[3]],
        ]
    }

    fn kinetic(&mut self, state: &mut WavepacketState, k: usize) {
        for ch in state.channels.iter_mut() {
            if ch.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            self.scratch.copy_from_slice(ch);
            self.fft.forward(&mut self.scratch);
            for (z, p) in self.scratch.iter_mut().zip(&self.kinetic[k]) {
                *z *= p;
            }
            self.fft.inverse(&mut self.scratch);
            ch.copy_from_slice(&self.scratch);
        }
    }

    fn potential(&self, state: &mut WavepacketState, t: f64, tau: f64) {
        let f = self.field.value(t);
        let [c1, c2, c3, c4] = &mut state.channels;
        for i in 0..self.grid.len() {
            let m = self.potential_matrix(i, f);
            let psi = [c1[i], c2[i], c3[i], c4[i]];
            let out = if f == 0.0 {
                [0, 1, 2, 3].map(|k| psi[k] * Complex64::from_polar(1.0, -m[k][k] * tau))
            } else {
                let (w, u) = jacobi_eigen(m);
                let mut y = [Complex64::default(); 4];
                for (k, yk) in y.iter_mut().enumerate() {
                    let proj: Complex64 = (0..4).map(|j| psi[j] * u[j][k]).sum();
                    *yk = proj * Complex64::from_polar(1.0, -w[k] * tau);
                }
                [0, 1, 2, 3].map(|j| (0..4).map(|k| y[k] * u[j][k]).sum())
            };
            c1[i] = out[0];
            c2[i] = out[1];
            c3[i] = out[2];
            c4[i] = out[3];
        }
    }

    /// One composite step from `state.t` to `state.t + dt`.
    pub fn step(&mut self, state: &mut WavepacketState) {
        let (t0, dt) = (state.t, self.dt);
        let mut t = t0;
        for k in 0..7 {
            self.kinetic(state, k);
            t += KINETIC_COEFFS[k] * dt;
            self.potential(state, t, POTENTIAL_COEFFS[k] * dt);
        }
        self.kinetic(state, 7);
        state.t = t0 + dt;
    }
}

/// Multiply the absorbed channels by the absorber attenuation for one step.
pub fn apply_cap(state: &mut WavepacketState, grid: &RadialGrid, cap: &Cap, dt: f64) {
    if !cap.is_enabled() {
        return;
    }
    let start = (0..grid.len()).find(|&i| grid.r(i) >= cap.onset).unwrap_or(grid.len());
    let factors: Vec<f64> = (start..grid.len()).map(|i| cap.factor(grid.r(i), dt)).collect();
    for (c, ch) in state.channels.iter_mut().enumerate() {
        if cap.channels[c] {
            for (z, f) in ch[start..].iter_mut().zip(&factors) {
                *z *= *f;
            }
        }
    }
}

/// Time series produced by [`propagate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub norms: Vec<[f64; 4]>,
    pub flux: FluxRecord,
    /// Ground-channel time-integrated flux through the probe.
    pub ground_flux: f64,
    pub final_state: WavepacketState,
}

/// Propagate `initial` (placed on channel 1) for the field duration.
pub fn propagate(
    initial: &VibrationalState,
    curves: &CurveSet,
    field: &Field,
    config: &PropagationConfig,
) -> Result<Trajectory> {
    let grid = initial.grid;
    config.validate(&grid)?;
    let steps = (field.spec().duration / config.dt).round() as usize;
    let mut state = WavepacketState::from_ground(initial);
    let mut stepper = Stepper::new(curves, &grid, *field, config.dt);
    let probe = grid.nearest_index(config.probe);
    let mass = curves.mass();
    let threshold = 1.0 + 1e-6;

    let mut times = Vec::new();
    let mut norms = Vec::new();
    let mut flux = FluxRecord::new(grid.r(probe));
    let mut ground = (0.0, 0.0, 0.0);
    let mut record = |s: &WavepacketState, times: &mut Vec<f64>, norms: &mut Vec<[f64; 4]>, flux: &mut FluxRecord| -> Result<()> {
        let nm = s.norms(&grid);
        let total: f64 = nm.iter().sum();
        if !(total <= threshold) {
            return Err(Error::Instability { time: s.t, dt: config.dt, norm: total });
        }
        let j = [0, 1, 2, 3].map(|c| instantaneous_flux(&s.channels[c], probe, mass, grid.dr()));
        let j = [j[0].clone()?, j[1].clone()?, j[2].clone()?, j[3].clone()?];
        let (t_prev, j_prev, acc) = ground;
        ground = if times.is_empty() { (s.t, j[0], 0.0) } else { (s.t, j[0], acc + 0.5 * (s.t - t_prev) * (j_prev + j[0])) };
        times.push(s.t);
        norms.push(nm);
        flux.accumulate(s.t, [j[1], j[2], j[3]]);
        Ok(())
    };

    record(&state, &mut times, &mut norms, &mut flux)?;
    for k in 1..=steps {
        stepper.step(&mut state);
        apply_cap(&mut state, &grid, &config.cap, config.dt);
        if k % config.stride == 0 || k == steps {
            record(&state, &mut times, &mut norms, &mut flux)?;
        }
    }
    let ground_flux = ground.2;
    Ok(Trajectory { times, norms, flux, ground_flux, final_state: state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Curve;

    #[test]
    fn composition_coefficients_are_consistent() {
        let sc: f64 = KINETIC_COEFFS.iter().sum();
        let sd: f64 = POTENTIAL_COEFFS.iter().sum();
        assert!((sc - 1.0).abs() < 1e-14 && (sd - 1.0).abs() < 1e-14);
        // symmetric composition
        for k in 0..4 {
            assert_eq!(KINETIC_COEFFS[k], KINETIC_COEFFS[7 - k]);
        }
        // third- and fifth-order conditions of the weights
        let w = POTENTIAL_COEFFS;
        let s3: f64 = w.iter().map(|x| x * x * x).sum();
        let s5: f64 = w.iter().map(|x| x.powi(5)).sum();
        assert!(s3.abs() < 1e-13 && s5.abs() < 1e-12, "{s3:e} {s5:e}");
    }

    #[test]
    fn field_envelope() {
        let spec = FieldSpec::new(0.01, 0.15, 5000.0);
        let f = build_field(spec);
        assert_eq!(f.value(0.0), 0.0);
        let period = spec.optical_period();
        let k = (spec.ramp / period).ceil() + 3.0;
        assert!((f.value(k * period) - 0.01).abs() < 1e-15);
        let mut last = 0.0;
        for i in 0..=100 {
            let e = f.envelope(spec.ramp * i as f64 / 100.0);
            assert!(e >= last);
            last = e;
        }
        assert!(!f.ramp_too_short());
        let short = build_field(FieldSpec { ramp: 2.0 * period, ..spec });
        assert!(short.ramp_too_short());
        let zero = build_field(FieldSpec { f0: 0.0, ..spec });
        for i in 0..100 {
            assert_eq!(zero.value(i as f64 * 13.7), 0.0);
        }
    }

    #[test]
    fn potential_factor_is_unitary_pointwise() {
        let m = [
            [0.12, -1e-3, 2e-3, -5e-4],
            [-1e-3, 0.2, 0.0, 0.0],
            [2e-3, 0.0, 0.23, 0.0],
            [-5e-4, 0.0, 0.0, 0.19],
        ];
        let u = potential_factor(m, 1.78);
        for i in 0..4 {
            for j in 0..4 {
                let s: Complex64 = (0..4).map(|k| u[k][i].conj() * u[k][j]).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((s - id).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cap_leaves_interior_untouched() {
        let grid = RadialGrid::new(1.0, 10.0, 256).unwrap();
        let mut s = WavepacketState {
            t: 0.0,
            channels: [0, 1, 2, 3].map(|_| {
                (0..256).map(|i| if grid.r(i) < 8.9 { Complex64::new(1.0, 0.5) } else { Complex64::default() }).collect()
            }),
        };
        let before = s.clone();
        apply_cap(&mut s, &grid, &Cap::default(), 1.7);
        assert_eq!(s, before);
        let mut t = s.clone();
        t.channels[1].iter_mut().for_each(|z| *z = Complex64::new(1.0, 0.0));
        let before = t.clone();
        apply_cap(&mut t, &grid, &Cap::excited(9.0, 1.0, 0.0), 1.7);
        assert_eq!(t, before);
    }

    #[test]
    fn config_validation() {
        let grid = RadialGrid::new(1.0, 10.0, 256).unwrap();
        assert!(PropagationConfig::default().validate(&grid).is_ok());
        let bad = PropagationConfig { dt: 0.0, ..Default::default() };
        assert!(bad.validate(&grid).is_err());
        let bad = PropagationConfig { probe: 9.5, ..Default::default() };
        assert!(bad.validate(&grid).is_err());
        let bad = PropagationConfig { cap: Cap::excited(9.5, 1.0, 0.02), ..Default::default() };
        assert!(bad.validate(&grid).is_err());
    }

    fn harmonic_pair(m: f64, k: f64, gap: f64, mu: f64) -> CurveSet {
        let h = |offset| Curve::Harmonic { k, center: 3.0, offset };
        CurveSet::new(
            m,
            [h(-1.0), h(gap - 1.0), Curve::Constant(10.0), Curve::Constant(10.0)],
            [Curve::Constant(mu), Curve::Constant(0.0), Curve::Constant(0.0)],
            (0.0, 30.0),
        )
        .unwrap()
    }

    fn moments(grid: &RadialGrid, phi: &[Complex64]) -> (f64, f64, f64) {
        let w: Vec<f64> = phi.iter().map(|z| z.norm_sqr()).collect();
        let n = grid.integrate(w.iter().copied());
        let mean = grid.integrate(w.iter().enumerate().map(|(i, p)| p * grid.r(i))) / n;
        let var = grid.integrate(w.iter().enumerate().map(|(i, p)| p * (grid.r(i) - mean).powi(2))) / n;
        (n, mean, var)
    }

    #[test]
    fn free_gaussian_spreads_analytically() {
        let (m, s0, k0, c) = (1000.0, 0.5, 3.0, 12.0);
        let grid = RadialGrid::new(0.0, 30.0, 1024).unwrap();
        let mut set = harmonic_pair(m, 0.1, 0.5, 0.0);
        set.set_potential(2, Curve::Constant(0.0));
        let field = build_field(FieldSpec::new(0.0, 0.1, 1e4));
        let mut stepper = Stepper::new(&set, &grid, field, 1.0);
        let zero = vec![Complex64::default(); grid.len()];
        let packet = (0..grid.len())
            .map(|i| {
                let r = grid.r(i);
                Complex64::from_polar((-(r - c).powi(2) / (4.0 * s0 * s0)).exp(), k0 * r)
            })
            .collect();
        let mut state = WavepacketState { t: 0.0, channels: [zero.clone(), packet, zero.clone(), zero] };
        let (n0, _, v0) = moments(&grid, &state.channels[1]);
        assert!((v0 / (s0 * s0) - 1.0).abs() < 1e-12);
        for _ in 0..1000 {
            stepper.step(&mut state);
        }
        let t = state.t;
        let (n1, mean, var) = moments(&grid, &state.channels[1]);
        let want = s0 * s0 * (1.0 + (t / (2.0 * m * s0 * s0)).powi(2));
        assert!((var / want - 1.0).abs() < 1e-8, "{var} vs {want}");
        assert!((mean - (c + k0 * t / m)).abs() < 1e-8);
        assert!((n1 / n0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_revives_after_one_period() {
        let (m, om) = (2000.0, 0.01);
        let set = harmonic_pair(m, m * om * om, 0.5, 0.0);
        let grid = RadialGrid::new(0.0, 6.0, 256).unwrap();
        let period = 2.0 * PI / om;
        let width = 1.0 / (m * om).sqrt();
        let packet: Vec<Complex64> = (0..grid.len())
            .map(|i| Complex64::new((-(grid.r(i) - 3.4).powi(2) / (2.0 * width * width)).exp(), 0.0))
            .collect();
        let norm = grid.integrate(packet.iter().map(|z| z.norm_sqr())).sqrt();
        let packet: Vec<Complex64> = packet.into_iter().map(|z| z / norm).collect();
        let zero = vec![Complex64::default(); grid.len()];
        let mut state = WavepacketState { t: 0.0, channels: [packet.clone(), zero.clone(), zero.clone(), zero] };
        let steps = 400;
        let field = build_field(FieldSpec::new(0.0, 0.1, period));
        let mut stepper = Stepper::new(&set, &grid, field, period / steps as f64);
        for _ in 0..steps {
            stepper.step(&mut state);
        }
        // the zero-point phase gives -1 after one period
        let overlap = packet.iter().zip(&state.channels[0]).map(|(a, b)| a.conj() * b).sum::<Complex64>() * grid.dr();
        assert!(overlap.norm() > 1.0 - 1e-6, "{}", overlap.norm());
        assert!((overlap + 1.0).norm() < 1e-5);
    }

    #[test]
    fn resonant_two_level_rabi_cycle() {
        // identical vibrational Hamiltonians, so the electronic populations
        // follow the two-level problem exactly
        let (m, om, gap, mu, f0) = (2000.0, 0.01, 1.0, 0.5, 5e-4);
        let set = harmonic_pair(m, m * om * om, gap, mu);
        let grid = RadialGrid::new(0.0, 6.0, 32).unwrap();
        let v1 = set.potential(1).clone();
        let ground = crate::bound::eigensolve(|r| v1.value(r), m, &grid, 1).unwrap().remove(0);
        let rabi = mu * f0;
        let ramp = 200.0;
        let duration = PI / rabi + ramp / 2.0;
        let field = build_field(FieldSpec { f0, omega: gap, ramp, duration });
        let dt = 0.5;
        let mut stepper = Stepper::new(&set, &grid, field, dt);
        let mut state = WavepacketState::from_ground(&ground);
        let steps = (duration / dt).round() as usize;
        let mut worst = 0.0f64;
        for k in 1..=steps {
            stepper.step(&mut state);
            if k % 100 == 0 || k == steps {
                let t = state.t;
                let area = if t < ramp { t / 2.0 - ramp / (2.0 * PI) * (PI * t / ramp).sin() } else { t - ramp / 2.0 };
                let want = (rabi * area / 2.0).sin().powi(2);
                worst = worst.max((state.norms(&grid)[1] - want).abs());
            }
        }
        assert!(worst < 1e-3, "{worst:e}");
        assert!(state.norms(&grid)[1] > 0.99);
    }

    #[test]
    fn zero_field_never_populates_excited_channels() {
        let set = crate::curves::SurrogateParams::default().build().unwrap();
        let grid = RadialGrid::new(1.5, 10.0, 256).unwrap();
        let v1 = set.potential(1).clone();
        let ground = crate::bound::eigensolve(|r| v1.value(r), set.mass(), &grid, 1).unwrap().remove(0);
        let field = build_field(FieldSpec::new(0.0, 0.15, 2000.0));
        let traj = propagate(&ground, &set, &field, &PropagationConfig::default()).unwrap();
        for n in &traj.norms {
            assert!(n[1] < 1e-12 && n[2] < 1e-12 && n[3] < 1e-12);
            assert!((n[0] - 1.0).abs() < 1e-10);
        }
        assert!(traj.flux.final_values().iter().all(|j| j.abs() < 1e-12));
    }

    #[test]
    fn zero_duration_gives_zero_yield() {
        let set = crate::curves::SurrogateParams::default().build().unwrap();
        let grid = RadialGrid::new(1.5, 10.0, 256).unwrap();
        let v1 = set.potential(1).clone();
        let ground = crate::bound::eigensolve(|r| v1.value(r), set.mass(), &grid, 1).unwrap().remove(0);
        let field = build_field(FieldSpec::new(5.4e-3, 0.15, 0.0));
        let traj = propagate(&ground, &set, &field, &PropagationConfig::default()).unwrap();
        assert_eq!(traj.times.len(), 1);
        assert_eq!(traj.flux.final_values(), [0.0; 3]);
    }

    #[test]
    fn unitary_without_absorber() {
        let set = crate::curves::SurrogateParams::default().build().unwrap();
        let grid = RadialGrid::new(1.5, 10.0, 256).unwrap();
        let v1 = set.potential(1).clone();
        let ground = crate::bound::eigensolve(|r| v1.value(r), set.mass(), &grid, 1).unwrap().remove(0);
        let field = build_field(FieldSpec::new(0.05, 0.17, 400.0));
        let config = PropagationConfig { cap: Cap::disabled(), ..Default::default() };
        let traj = propagate(&ground, &set, &field, &config).unwrap();
        let excited: f64 = traj.norms.last().unwrap()[1..].iter().sum();
        assert!(excited > 1e-4);
        for n in &traj.norms {
            assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
}
