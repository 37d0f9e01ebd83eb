use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::ops::ControlFlow;

use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::numerics::bisect;

use super::hamiltonian::{hstar, hstar_rhs, separatrix_level, RegimeParams, ReducedState};
use super::ode::{DenseStep, Dopri5};

/// Model-time cap used when waiting for an orbit to come back.
pub const DEFAULT_TIME_CAP: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSample {
    pub t: f64,
    pub state: ReducedState,
    pub h: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<OrbitSample>,
}

impl Trajectory {
    /// `max |H⋆(t) - H⋆(0)|`.
    pub fn max_energy_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else { return 0.0 };
        self.samples.iter().map(|s| (s.h - first.h).abs()).fold(0.0, f64::max)
    }

    /// State at time `t` by linear interpolation between samples.
    pub fn state_at(&self, t: f64) -> Option<ReducedState> {
        let s = &self.samples;
        let i = s.partition_point(|x| x.t <= t);
        if i == 0 || i > s.len() {
            return None;
        }
        if i == s.len() {
            return (s[i - 1].t == t).then_some(s[i - 1].state);
        }
        let (a, b) = (&s[i - 1], &s[i]);
        let w = (t - a.t) / (b.t - a.t);
        Some(ReducedState::new(
            a.state.phi + w * (b.state.phi - a.state.phi),
            a.state.k + w * (b.state.k - a.state.k),
        ))
    }
}

fn solver() -> Dopri5 {
    Dopri5 { rtol: 1e-13, atol: 1e-15, h_max: 0.05, ..Dopri5::default() }
}

fn field(p: RegimeParams) -> impl FnMut(f64, &[f64; 3]) -> Result<[f64; 3]> {
    move |_, y| {
        let (dphi, dk) = hstar_rhs(&ReducedState::new(y[0], y[1]), &p)?;
        Ok([dphi, dk, y[1] * dphi / TAU])
    }
}

fn sample(t: f64, y: [f64; 3], p: &RegimeParams) -> Result<OrbitSample> {
    let state = ReducedState::new(y[0], y[1]);
    Ok(OrbitSample { t, state, h: hstar(&state, p)? })
}

/// Integrates the `(φ, K)` system from `s0`, sampling every `dt` on `[0, t_max]`.
pub fn integrate_orbit(s0: ReducedState, p: &RegimeParams, dt: f64, t_max: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && t_max >= 0.0) {
        return Err(CoreError::InvalidArgument("dt must be positive and t_max nonnegative"));
    }
    let y0 = [s0.phi, s0.k, 0.0];
    let mut traj = Trajectory { samples: alloc::vec![sample(0.0, y0, p)?] };
    let mut next = 1usize;
    let mut failure = None;
    let (t_end, y_end) = solver().integrate(field(*p), 0.0, y0, t_max, |step: &DenseStep<3>| {
        while (next as f64) * dt <= step.t1() && (next as f64) * dt < t_max {
            let t = next as f64 * dt;
            match sample(t, step.eval(t), p) {
                Ok(s) => traj.samples.push(s),
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
            next += 1;
        }
        ControlFlow::Continue(())
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if t_end > 0.0 {
        traj.samples.push(sample(t_end, y_end, p)?);
    }
    Ok(traj)
}

/// Successive times where `φ` passes through its initial value (or, with `modulo_pi`,
/// through any translate of it by a multiple of `π`), with the augmented state
/// `(φ, K, L)` there; `L` accumulates `(1/2π)∫ K dφ`.
fn crossings(
    s0: ReducedState,
    p: &RegimeParams,
    count: usize,
    cap: f64,
    modulo_pi: bool,
) -> Result<Vec<(f64, [f64; 3])>> {
    hstar(&s0, p)?;
    let target = s0.phi;
    let gap = |phi: f64| if modulo_pi { Float::sin(phi - target) } else { phi - target };
    let mut out = Vec::with_capacity(count);
    let mut failure = None;
    solver().integrate(field(*p), 0.0, [s0.phi, s0.k, 0.0], cap, |step: &DenseStep<3>| {
        let g0 = gap(step.y0[0]);
        let g1 = gap(step.y1[0]);
        let leaving = step.t0 == 0.0 && g0 == 0.0;
        if !leaving && (g1 == 0.0 || g0 * g1 < 0.0) {
            let t = if g1 == 0.0 {
                Ok(step.t1())
            } else {
                bisect(|t| gap(step.eval(t)[0]), step.t0, step.t1(), 1e-13)
            };
            match t {
                Ok(t) => {
                    let mut y = step.eval(t);
                    y[0] = target + PI * ((y[0] - target) / PI).round();
                    out.push((t, y));
                }
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
            if out.len() == count {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if out.len() < count {
        return Err(CoreError::PeriodDetection { cap });
    }
    Ok(out)
}

/// First return of the orbit through `(0, K0)` to `φ = 0`: `(T, K(T))`.
pub fn half_period(k0: f64, p: &RegimeParams) -> Result<(f64, f64)> {
    half_period_with_cap(k0, p, DEFAULT_TIME_CAP)
}

pub fn half_period_with_cap(k0: f64, p: &RegimeParams, cap: f64) -> Result<(f64, f64)> {
    let c = crossings(ReducedState::new(0.0, k0), p, 1, cap, false)?;
    Ok((c[0].0, c[0].1[1]))
}

/// First time the orbit through `(0, K0)` reaches `φ ≡ 0 (mod π)` again: the half period
/// of a closed orbit, or the time to rotate by `π` for an orbit outside the separatrix.
/// Returns `(T, φ(T), K(T))`.
pub fn phase_return(k0: f64, p: &RegimeParams) -> Result<(f64, f64, f64)> {
    let c = crossings(ReducedState::new(0.0, k0), p, 1, DEFAULT_TIME_CAP, true)?;
    Ok((c[0].0, c[0].1[0], c[0].1[1]))
}

/// `(1/2π)∮ K dφ` along the closed orbit through `(0, K0)`.
pub fn action_integral(k0: f64, p: &RegimeParams) -> Result<f64> {
    action_integral_from(ReducedState::new(0.0, k0), p)
}

/// Same as [`action_integral`], starting from any point of the orbit.
pub fn action_integral_from(s0: ReducedState, p: &RegimeParams) -> Result<f64> {
    let c = crossings(s0, p, 2, DEFAULT_TIME_CAP, false)?;
    Ok(c[1].1[2].abs())
}

/// Full period of the closed orbit through `s0`.
pub fn period_from(s0: ReducedState, p: &RegimeParams) -> Result<f64> {
    Ok(crossings(s0, p, 2, DEFAULT_TIME_CAP, false)?[1].0)
}

const GRID: usize = 2000;

/// Roots in `K` of `g` on `[lo, hi]`: sign changes, exact zeros and tangencies.
fn scan_roots<G: FnMut(f64) -> f64>(mut g: G, lo: f64, hi: f64, tangent_tol: f64) -> Vec<f64> {
    let ks: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let gs: Vec<f64> = ks.iter().map(|k| g(*k)).collect();
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..=GRID {
        if gs[i] == 0.0 {
            roots.push(ks[i]);
        } else if i < GRID && gs[i] * gs[i + 1] < 0.0 {
            if let Ok(r) = bisect(&mut g, ks[i], ks[i + 1], 1e-14) {
                roots.push(r);
            }
        } else if i > 0
            && i < GRID
            && gs[i - 1] * gs[i] > 0.0
            && gs[i] * gs[i + 1] > 0.0
            && gs[i].abs() <= gs[i - 1].abs()
            && gs[i].abs() <= gs[i + 1].abs()
        {
            // golden-section search for the extremum of |g|
            let (mut a, mut b) = (ks[i - 1], ks[i + 1]);
            let r = 0.618_033_988_749_894_9;
            for _ in 0..100 {
                let (c, d) = (b - r * (b - a), a + r * (b - a));
                if g(c).abs() < g(d).abs() {
                    b = d;
                } else {
                    a = c;
                }
            }
            let m = 0.5 * (a + b);
            if g(m).abs() <= tangent_tol {
                roots.push(m);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    roots
}

/// Points of the heteroclinic level sampled on `φ ∈ [-π/2, π/2]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeparatrixSamples {
    pub points: Vec<ReducedState>,
    /// Angles at which no root was found.
    pub skipped: Vec<f64>,
}

/// All `K` with `H⋆(φ, K) = level`.
pub fn level_set_at(phi: f64, p: &RegimeParams, level: f64) -> Vec<f64> {
    let lo = (1.0 - 2.0 * p.a()).max(0.0);
    let tol = 1e-9 * level.abs().max(1.0);
    scan_roots(|k| hstar(&ReducedState::new(phi, k), p).map_or(f64::NAN, |h| h - level), lo, 1.0, tol)
}

pub fn separatrix_points(p: &RegimeParams, n_samples: usize) -> Result<SeparatrixSamples> {
    let level = separatrix_level(p)?;
    let mut out = SeparatrixSamples::default();
    for i in 0..n_samples {
        let phi = if n_samples == 1 { 0.0 } else { -FRAC_PI_2 + PI * i as f64 / (n_samples - 1) as f64 };
        let roots = level_set_at(phi, p, level);
        if roots.is_empty() {
            out.skipped.push(phi);
        }
        out.points.extend(roots.into_iter().map(|k| ReducedState::new(phi, k)));
    }
    Ok(out)
}

/// Fixed points on the lines `φ = 0` and `φ = π/2`, found as roots of `φ'` in `K`.
pub fn equilibria(p: &RegimeParams) -> Vec<ReducedState> {
    let lo = (1.0 - 2.0 * p.a()).max(0.0) + 1e-9;
    let mut out = Vec::new();
    for phi in [0.0, FRAC_PI_2] {
        let dphi = |k: f64| hstar_rhs(&ReducedState::new(phi, k), p).map_or(f64::NAN, |r| r.0);
        for k in scan_roots(dphi, lo, 1.0 - 1e-9, 1e-12) {
            out.push(ReducedState::new(phi, k));
        }
    }
    out
}
