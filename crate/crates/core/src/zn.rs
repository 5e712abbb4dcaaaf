//! Zhu-Nakamura transmission through a nonadiabatic-tunneling crossing,
//! complete-reflection manifolds and control-frequency search.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// libm-backed math; shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::curves::{extract_features, CrossingFeatures, CurveSet, DressedPair, FeatureSearch};
use crate::error::{Error, Result};
use crate::numeric::{bisect, find_root, GaussLegendre};

/// Continuous branch of `arg Gamma(i y)` for `y > 0`, i.e. `Im ln Gamma(i y)`.
///
/// Tends to `-pi/2` as `y -> 0+`. Evaluated by shifting the argument to
/// `Re z >= 10` with the recurrence and summing the Stirling series there.
pub fn arg_gamma_i(y: f64) -> f64 {
    const SHIFT: usize = 10;
    // B_2k / (2k (2k - 1))
    const STIRLING: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let w = Complex64::new(SHIFT as f64, y);
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    // Im[(w - 1/2) ln w - w] + Im(series); the 0.5 ln(2 pi) term is real.
    let lnw = Complex64::new(w.norm().ln(), y.atan2(SHIFT as f64));
    let big = (w - 0.5) * lnw - w;
    let shifted = big.im + series.im;
    let mut chain = 0.0;
    for k in 0..SHIFT {
        chain += y.atan2(k as f64);
    }
    shifted - chain
}

/// Stokes phase `phi_s(delta)`.
pub fn stokes_phase(delta: f64) -> f64 {
    let y = delta / PI;
    y * y.ln() - y - arg_gamma_i(y) - PI / 4.0
}

/// `cos(pi x)`, exactly zero at half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let r = num_traits::Euclid::rem_euclid(&x, &2.0);
    // r in [0, 2): fold to [0, 0.5] with sign.
    let (r, sign) = if r > 1.0 { (2.0 - r, 1.0) } else { (r, 1.0) };
    let (r, sign) = if r > 0.5 { (1.0 - r, -sign) } else { (r, sign) };
    if r == 0.5 {
        return 0.0;
    }
    sign * if r <= 0.25 { (PI * r).cos() } else { (PI * (0.5 - r)).sin() }
}

/// All Zhu-Nakamura quantities at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZnParameters {
    /// Total energy, hartree.
    pub energy: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub f: f64,
    pub phi_s: f64,
    pub sigma: f64,
    pub g: f64,
    /// Single-passage nonadiabatic transition probability.
    pub p: f64,
    /// Phase `sigma - phi_s - g`, radians.
    pub psi: f64,
}

impl ZnParameters {
    /// Assemble every quantity from the crossing geometry, the action
    /// `sigma` on the upper adiabat and the energy.
    pub fn from_parts(features: &CrossingFeatures, sigma: f64, energy: f64) -> Result<Self> {
        let CrossingFeatures { alpha, gamma, e_t, e_b, .. } = *features;
        if !(alpha > 0.0) {
            return Err(Error::NonPositiveAlpha { alpha, gamma });
        }
        let beta = (energy - 0.5 * (e_b + e_t)) / (0.5 * (e_b - e_t));
        if !(beta > 1.0) {
            return Err(Error::Domain(format!("beta = {beta} <= 1: energy below the upper-adiabat bottom")));
        }
        let f = 0.72 - 0.62 * alpha.powf(0.715);
        let inv_b2 = 1.0 / (beta * beta);
        let under = 1.0 - inv_b2 * f;
        if under < 0.0 {
            return Err(Error::Domain(format!(
                "1 - f / beta^2 = {under} < 0 (alpha = {alpha}, beta = {beta}, f = {f})"
            )));
        }
        let sab = (alpha * beta).sqrt();
        let p = (-PI / (4.0 * sab) * (2.0 / (1.0 + under.sqrt())).sqrt()).exp();
        let s = (1.0 - inv_b2).sqrt();
        let delta = PI / (16.0 * sab) * (6.0 + 10.0 * s).sqrt() / (1.0 + s);
        let phi_s = stokes_phase(delta);
        let a4 = alpha.powf(0.25);
        let g = 0.23 * a4 / (a4 + 0.75) * 40f64.powf(-sigma);
        let psi = sigma - phi_s - g;
        Ok(Self { energy, alpha, beta, gamma, delta, f, phi_s, sigma, g, p, psi })
    }

    pub fn psi_over_pi(&self) -> f64 {
        self.psi / PI
    }
}

/// Overall transmission probability through the crossing.
pub fn transmission(params: &ZnParameters) -> f64 {
    transmission_at(params.p, params.psi_over_pi())
}

/// Transmission for single-passage probability `p` and phase `pi * psi_over_pi`.
pub fn transmission_at(p: f64, psi_over_pi: f64) -> f64 {
    let c = cos_pi(psi_over_pi);
    let num = 4.0 * c * c;
    if num == 0.0 {
        return 0.0;
    }
    num / (num + p * p / (1.0 - p))
}

/// Turning points and action of one classically allowed well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Action {
    pub t1: f64,
    pub t2: f64,
    /// `integral sqrt(2 m (E - E2(x))) dx`, radians (hbar = 1).
    pub sigma: f64,
}

/// Action on an upper adiabat `e2` with bottom `(x_b, e_b)` at energy `energy`.
///
/// Turning points are bracketed by stepping outward from `x_b` and refined
/// by Brent's method; the two halves `[t1, x_b]` and `[x_b, t2]` are each
/// integrated by Gauss-Legendre after `x = mid + half sin(theta)`, doubling
/// the order until the result changes by less than `1e-12` relative.
pub fn action_sigma(
    e2: impl Fn(f64) -> f64,
    x_b: f64,
    e_b: f64,
    energy: f64,
    mass: f64,
    range: (f64, f64),
) -> Result<Action> {
    if !(energy > e_b) {
        return Err(Error::Domain(format!("energy {energy} is not above the well bottom {e_b}")));
    }
    let g = |x: f64| e2(x) - energy;
    let turn = |dir: f64| -> Result<f64> {
        let limit = if dir < 0.0 { range.0 } else { range.1 };
        let mut step = 1e-3;
        let mut inner = x_b;
        loop {
            let outer = (inner + dir * step).clamp(range.0, range.1);
            if g(outer) >= 0.0 {
                let (a, b) = if dir < 0.0 { (outer, inner) } else { (inner, outer) };
                // Brent's xtol plus its built-in 2 eps |x| floor
                return find_root(g, a, b, 1e-14).ok_or_else(|| {
                    Error::Domain(format!("turning point not bracketed in [{a}, {b}]"))
                });
            }
            if outer == limit {
                return Err(Error::Domain(format!(
                    "no turning point on the upper adiabat before R = {limit} bohr at E = {energy}"
                )));
            }
            inner = outer;
            step *= 1.6;
        }
    };
    let t1 = turn(-1.0)?;
    let t2 = turn(1.0)?;

    let integrand = |x: f64| (2.0 * mass * (energy - e2(x)).max(0.0)).sqrt();
    let piece = |a: f64, b: f64, rule: &GaussLegendre| {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        rule.integrate(-PI / 2.0, PI / 2.0, |th| integrand(mid + half * th.sin()) * half * th.cos())
    };
    let mut order = 16;
    let mut prev = f64::NAN;
    loop {
        let rule = GaussLegendre::new(order);
        let s = piece(t1, x_b, &rule) + piece(x_b, t2, &rule);
        if (s - prev).abs() <= 1e-12 * s.abs() || order >= 4096 {
            return Ok(Action { t1, t2, sigma: s });
        }
        prev = s;
        order *= 2;
    }
}

/// Zhu-Nakamura parameters for `pair` at total energy `energy`.
pub fn zn_assemble(pair: &DressedPair<'_>, features: &CrossingFeatures, energy: f64) -> Result<ZnParameters> {
    let beta = (energy - 0.5 * (features.e_b + features.e_t)) / (0.5 * (features.e_b - features.e_t));
    if !(beta > 1.0) {
        return Err(Error::Domain(format!("beta = {beta} <= 1: energy below the upper-adiabat bottom")));
    }
    let action = action_sigma(
        |x| pair.upper(x),
        features.x_b,
        features.e_b,
        energy,
        pair.mass(),
        pair.curves().range(),
    )?;
    ZnParameters::from_parts(features, action.sigma, energy)
}

/// Complete-reflection manifold `Psi_v(omega)` for one excited channel.
#[derive(Debug, Clone, Copy)]
pub struct ManifoldProblem<'a> {
    pub curves: &'a CurveSet,
    pub channel: usize,
    pub v: usize,
    /// Bound-state energy of the initial level, hartree.
    pub e_v: f64,
    /// Peak field, a.u.
    pub f0: f64,
    pub search: FeatureSearch,
}

impl<'a> ManifoldProblem<'a> {
    pub fn new(curves: &'a CurveSet, channel: usize, v: usize, e_v: f64, f0: f64) -> Result<Self> {
        CurveSet::check_excited(channel)?;
        Ok(Self { curves, channel, v, e_v, f0, search: FeatureSearch::default() })
    }

    /// Parameters on the dressed pair at `E = E_v + omega`.
    pub fn evaluate(&self, omega: f64) -> Result<ZnParameters> {
        let pair = DressedPair::dress(self.curves, self.channel, omega, self.f0)?;
        let features = extract_features(&pair, &self.search)?;
        zn_assemble(&pair, &features, self.e_v + omega)
    }

    /// `nsamples` evenly spaced photon energies covering `range` inclusive.
    pub fn sample_grid(range: (f64, f64), nsamples: usize) -> Vec<f64> {
        let n = nsamples.max(2);
        (0..n).map(|k| range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64).collect()
    }

    /// Sample sequentially and locate roots.
    pub fn manifold(&self, range: (f64, f64), nsamples: usize) -> Result<ManifoldCurve<'a>> {
        let omegas = Self::sample_grid(range, nsamples);
        let results = omegas.iter().map(|&w| self.evaluate(w)).collect();
        ManifoldCurve::from_samples(*self, omegas, results)
    }
}

/// One sampled photon energy on a manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSample {
    pub omega: f64,
    pub params: Result<ZnParameters>,
}

impl ManifoldSample {
    pub fn psi_over_pi(&self) -> Option<f64> {
        self.params.as_ref().ok().map(ZnParameters::psi_over_pi)
    }

    pub fn transmission(&self) -> Option<f64> {
        self.params.as_ref().ok().map(transmission)
    }
}

/// Complete-reflection root `Psi = (n + 1/2) pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub n: i64,
    pub omega: f64,
    pub psi_over_pi: f64,
    pub transmission: f64,
}

/// Sampled manifold with gap intervals and located roots.
#[derive(Debug, Clone)]
pub struct ManifoldCurve<'a> {
    pub problem: ManifoldProblem<'a>,
    pub samples: Vec<ManifoldSample>,
    /// Closed intervals of photon energy whose samples all failed, hartree.
    pub gaps: Vec<(f64, f64)>,
    pub roots: Vec<Root>,
}

impl<'a> ManifoldCurve<'a> {
    /// Assemble a manifold from precomputed samples (in increasing omega)
    /// and locate every root between adjacent valid samples.
    pub fn from_samples(
        problem: ManifoldProblem<'a>,
        omegas: Vec<f64>,
        results: Vec<Result<ZnParameters>>,
    ) -> Result<Self> {
        let samples: Vec<ManifoldSample> =
            omegas.into_iter().zip(results).map(|(omega, params)| ManifoldSample { omega, params }).collect();
        if samples.iter().all(|s| s.params.is_err()) {
            let why = samples
                .first()
                .and_then(|s| s.params.as_ref().err())
                .map(|e| format!("{e}"))
                .unwrap_or_else(|| "no samples".into());
            return Err(Error::EmptyWindow(format!(
                "channel {} v = {}: every sample failed ({why})",
                problem.channel, problem.v
            )));
        }

        let mut gaps = Vec::new();
        let mut open: Option<f64> = None;
        for (k, s) in samples.iter().enumerate() {
            match (&s.params, open) {
                (Err(_), None) => open = Some(s.omega),
                (Ok(_), Some(start)) => {
                    gaps.push((start, samples[k - 1].omega));
                    open = None;
                }
                _ => {}
            }
        }
        if let (Some(start), Some(last)) = (open, samples.last()) {
            gaps.push((start, last.omega));
        }

        let mut roots = Vec::new();
        for w in samples.windows(2) {
            let (Some(a), Some(b)) = (w[0].psi_over_pi(), w[1].psi_over_pi()) else {
                continue;
            };
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let first = (lo - 0.5).ceil() as i64;
            let mut n = first.max(0);
            while (n as f64 + 0.5) <= hi {
                let target = n as f64 + 0.5;
                if (target - lo) * (hi - target) >= 0.0 && !(a == target && roots_contains(&roots, w[0].omega)) {
                    if let Some(root) = refine_root(&problem, w[0].omega, w[1].omega, target, n) {
                        roots.push(root);
                    }
                }
                n += 1;
            }
        }
        Ok(Self { problem, samples, gaps, roots })
    }

    /// Valid `(omega, psi_over_pi)` pairs in sample order.
    pub fn valid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().filter_map(|s| s.psi_over_pi().map(|p| (s.omega, p)))
    }
}

fn roots_contains(roots: &[Root], omega: f64) -> bool {
    roots.iter().any(|r| r.omega == omega)
}

fn refine_root(problem: &ManifoldProblem<'_>, a: f64, b: f64, target: f64, n: i64) -> Option<Root> {
    let h = |w: f64| problem.evaluate(w).map(|p| p.psi_over_pi() - target).unwrap_or(f64::NAN);
    // bisect to the float resolution of omega; 1e-9 hartree alone leaves
    // psi/pi off by ~1e-7 on steep manifolds
    let omega = bisect(h, a, b, 0.0)?;
    let params = problem.evaluate(omega).ok()?;
    Some(Root { n, omega, psi_over_pi: params.psi_over_pi(), transmission: transmission(&params) })
}

/// Photon energy at which roots of both H + I manifolds coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlFrequency {
    /// Midpoint of the two aligned roots, hartree.
    pub omega: f64,
    /// Summed predicted transmission of both channels at `omega`.
    pub quality: f64,
    pub roots: [Root; 2],
}

/// Pairs of roots from two manifolds (same initial level) lying within
/// `tolerance` of each other, sorted by summed transmission at the midpoint.
pub fn find_control_frequency(manifolds: [&ManifoldCurve<'_>; 2], tolerance: f64) -> Vec<ControlFrequency> {
    let mut out = Vec::new();
    for ra in &manifolds[0].roots {
        for rb in &manifolds[1].roots {
            if (ra.omega - rb.omega).abs() > tolerance {
                continue;
            }
            let omega = 0.5 * (ra.omega + rb.omega);
            let q: Result<f64> = manifolds
                .iter()
                .map(|m| m.problem.evaluate(omega).map(|p| transmission(&p)))
                .sum();
            if let Ok(quality) = q {
                out.push(ControlFrequency { omega, quality, roots: [*ra, *rb] });
            }
        }
    }
    out.sort_by(|a, b| a.quality.total_cmp(&b.quality).then(a.omega.total_cmp(&b.omega)));
    out
}
