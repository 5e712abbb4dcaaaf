//! Vibrational eigenstates of a single potential curve.
//!
//! The Hamiltonian is the sinc-function (Fourier-grid) discretisation on the
//! uniform radial grid: the kinetic operator is `k^2 / 2m` on the band
//! `|k| < pi / dR`, the potential is diagonal. Only a window of the grid that
//! contains the requested states is diagonalised; it is widened until every
//! state has decayed at the window edges.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
// libm-backed math; shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Edge amplitude below which a window is accepted as converged.
const WINDOW_EDGE: f64 = 1e-11;
/// Edge amplitude above which a state is declared unresolved on the grid.
const GRID_EDGE: f64 = 1e-6;

/// One bound vibrational level.
#[derive(Debug, Clone, PartialEq)]
pub struct VibrationalState {
    pub v: usize,
    /// Energy, hartree.
    pub energy: f64,
    /// Real amplitude on the grid, `sum chi^2 dR = 1`.
    pub chi: Vec<f64>,
    pub grid: RadialGrid,
}

impl VibrationalState {
    pub fn norm(&self) -> f64 {
        self.grid.integrate(self.chi.iter().map(|c| c * c))
    }

    pub fn overlap(&self, other: &VibrationalState) -> f64 {
        self.grid.integrate(self.chi.iter().zip(&other.chi).map(|(a, b)| a * b))
    }

    /// Sign changes of `chi` over the classically allowed points `V(R) < E`.
    pub fn nodes(&self, potential: impl Fn(f64) -> f64) -> usize {
        let peak = self.chi.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut last = 0.0f64;
        let mut count = 0;
        for (i, &c) in self.chi.iter().enumerate() {
            if potential(self.grid.r(i)) >= self.energy || c.abs() < 1e-9 * peak {
                continue;
            }
            if last != 0.0 && last.signum() != c.signum() {
                count += 1;
            }
            last = c;
        }
        count
    }
}

/// Lowest `n_states` eigenpairs of `-1/(2m) d^2/dR^2 + V(R)` on `grid`,
/// ascending in energy.
pub fn eigensolve(
    potential: impl Fn(f64) -> f64,
    mass: f64,
    grid: &RadialGrid,
    n_states: usize,
) -> Result<Vec<VibrationalState>> {
    if n_states == 0 {
        return Ok(Vec::new());
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidParameters(format!("mass must be positive, got {mass}")));
    }
    let n = grid.len();
    let values: Vec<f64> = (0..n).map(|i| potential(grid.r(i))).collect();
    let (imin, vmin) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });

    // Initial window: points within a few level spacings of the minimum.
    let curvature = if imin > 0 && imin + 1 < n {
        (values[imin + 1] - 2.0 * vmin + values[imin - 1]) / (grid.dr() * grid.dr())
    } else {
        0.0
    };
    let quantum = if curvature > 0.0 { (curvature / mass).sqrt() } else { 1e-3 };
    let cutoff = vmin + 2.0 * (n_states as f64 + 1.0) * quantum;
    let mut lo = imin;
    while lo > 0 && values[lo - 1] < cutoff {
        lo -= 1;
    }
    let mut hi = imin;
    while hi + 1 < n && values[hi + 1] < cutoff {
        hi += 1;
    }

    loop {
        let m = hi - lo + 1;
        if m < n_states && m == n {
            // more states requested than grid points
            return Err(Error::Resolution { state: m, amplitude: f64::INFINITY });
        }
        if m < n_states {
            widen(&mut lo, &mut hi, n, n_states);
            continue;
        }
        let (energies, vectors) = diagonalize(&values[lo..=hi], mass, grid.dr());
        let full = lo == 0 && hi == n - 1;
        let mut edge_worst = 0.0f64;
        let mut states = Vec::with_capacity(n_states);
        for (v, (energy, vec)) in energies.into_iter().zip(vectors).take(n_states).enumerate() {
            let scale = 1.0 / grid.dr().sqrt();
            let mut chi = vec![0.0; n];
            for (k, c) in vec.iter().enumerate() {
                chi[lo + k] = c * scale;
            }
            let edge = chi[lo].abs().max(chi[hi].abs());
            edge_worst = edge_worst.max(edge);
            if full && edge > GRID_EDGE {
                return Err(Error::Resolution { state: v, amplitude: edge });
            }
            orient(&mut chi);
            states.push(VibrationalState { v, energy, chi, grid: *grid });
        }
        if edge_worst < WINDOW_EDGE || full {
            let asymptote = values[n - 1];
            if let Some(s) = states.iter().find(|s| s.energy >= asymptote) {
                let amplitude = s.chi[n - 1].abs().max(s.chi[0].abs());
                return Err(Error::Resolution { state: s.v, amplitude });
            }
            return Ok(states);
        }
        widen(&mut lo, &mut hi, n, m / 4);
    }
}

fn widen(lo: &mut usize, hi: &mut usize, n: usize, by: usize) {
    let by = by.max(8);
    *lo = lo.saturating_sub(by);
    *hi = (*hi + by).min(n - 1);
}

/// Make the first appreciable lobe positive.
fn orient(chi: &mut [f64]) {
    let peak = chi.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if let Some(first) = chi.iter().find(|c| c.abs() > 1e-3 * peak) {
        if *first < 0.0 {
            chi.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

/// Sinc-DVR Hamiltonian on consecutive points; returns ascending energies
/// with unit-norm (discrete) eigenvectors.
fn diagonalize(values: &[f64], mass: f64, dr: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = values.len();
    let t0 = 1.0 / (2.0 * mass * dr * dr);
    let h = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            t0 * PI * PI / 3.0 + values[i]
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            t0 * 2.0 * sign / (d * d)
        }
    });
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order.iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect();
    (energies, vectors)
}
