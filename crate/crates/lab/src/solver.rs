//! Strang split-step Fourier integration of `i u_t + u_xx = ±ν |u|⁴ u` on the circle.
//!
//! The solution is stored through its Fourier coefficients `u(x) = Σ ξ_j e^{ijx}` on
//! the modes `-n/2 .. n/2 - 1`, so that the mean of `|u|²` over the circle is `Σ |ξ_j|²`.
//! Pointwise products are taken on a zero-padded grid of `pad_factor · n` points.

use std::f64::consts::PI;
use std::sync::Arc;

use beating_core::ResonantSet;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{LabError, Result};

/// Amplitude below which a phase is treated as undefined.
pub const AMPLITUDE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    n_modes: usize,
    pad_factor: usize,
}

impl GridSpec {
    pub fn new(n_modes: usize, pad_factor: usize) -> Result<Self> {
        if n_modes < 16 || !n_modes.is_power_of_two() {
            return Err(LabError::Config(format!("n_modes must be a power of two >= 16, got {n_modes}")));
        }
        if pad_factor < 3 {
            return Err(LabError::Config(format!("pad_factor must be >= 3, got {pad_factor}")));
        }
        Ok(Self { n_modes, pad_factor })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn pad_factor(&self) -> usize {
        self.pad_factor
    }

    pub fn padded_len(&self) -> usize {
        self.n_modes * self.pad_factor
    }

    pub fn lo(&self) -> i64 {
        -(self.n_modes as i64 / 2)
    }

    pub fn hi(&self) -> i64 {
        self.n_modes as i64 / 2 - 1
    }

    pub fn contains(&self, j: i64) -> bool {
        (self.lo()..=self.hi()).contains(&j)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        self.lo()..=self.hi()
    }
}

/// Fourier coefficients at time `t`.
///
/// The free flow `ξ_j ↦ e^{-ij²s} ξ_j` is held back as a pending time `s` and applied in one
/// rotation when the coefficients are next needed, so the moduli are untouched by it.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    grid: GridSpec,
    coeffs: Vec<Complex64>,
    lag: f64,
    lag_carry: f64,
}

impl FieldState {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { t: 0.0, grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.n_modes()], lag: 0.0, lag_carry: 0.0 }
    }

    fn rotation(&self, j: i64) -> Complex64 {
        let j = j as f64;
        Complex64::from_polar(1.0, -j * j * self.lag)
    }

    /// Defers `h` of free flow; compensated so many small steps add up exactly.
    fn advance_linear(&mut self, h: f64) {
        let y = h - self.lag_carry;
        let sum = self.lag + y;
        self.lag_carry = (sum - self.lag) - y;
        self.lag = sum;
    }

    fn flush(&mut self) {
        if self.lag != 0.0 {
            let lo = self.grid.lo();
            for i in 0..self.coeffs.len() {
                let r = self.rotation(lo + i as i64);
                self.coeffs[i] *= r;
            }
        }
        self.lag = 0.0;
        self.lag_carry = 0.0;
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    fn slot(&self, j: i64) -> Option<usize> {
        self.grid.contains(j).then(|| (j - self.grid.lo()) as usize)
    }

    /// `ξ_j`, zero outside the grid.
    pub fn coeff(&self, j: i64) -> Complex64 {
        self.slot(j).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i] * self.rotation(j))
    }

    pub fn set(&mut self, j: i64, z: Complex64) -> Result<()> {
        let i = self.slot(j).ok_or_else(|| LabError::Config(format!("mode {j} is outside the grid")))?;
        self.flush();
        self.coeffs[i] = z;
        Ok(())
    }

    /// `(j, ξ_j)` over the grid.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.grid.modes().zip(self.coeffs.iter()).map(|(j, z)| (j, z * self.rotation(j)))
    }

    /// `(j, |ξ_j|²)` over the grid.
    fn actions(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.grid.modes().zip(self.coeffs.iter().map(|z| z.norm_sqr()))
    }

    pub fn action(&self, j: i64) -> f64 {
        self.slot(j).map_or(0.0, |i| self.coeffs[i].norm_sqr())
    }

    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Σ j |ξ_j|²`.
    pub fn momentum(&self) -> f64 {
        self.actions().map(|(j, a)| j as f64 * a).sum()
    }

    /// Squared homogeneous Sobolev norm `Σ |j|^{2s} |ξ_j|²`.
    pub fn sobolev_sq(&self, s: f64) -> f64 {
        self.actions().filter(|(j, _)| *j != 0).map(|(j, a)| (j.abs() as f64).powf(2.0 * s) * a).sum()
    }

    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub nu: f64,
    /// `+1` or `-1`, the sign in front of the nonlinearity.
    pub sign: f64,
    pub dt: f64,
    pub grid: GridSpec,
}

impl SolverConfig {
    pub fn new(nu: f64, sign: f64, dt: f64, grid: GridSpec) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(LabError::Config(format!("nu must be finite and nonnegative, got {nu}")));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(LabError::Config(format!("sign must be +1 or -1, got {sign}")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(LabError::Config(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { nu, sign, dt, grid })
    }
}

/// Transform plans and work buffers for one evolution.
pub struct Solver {
    cfg: SolverConfig,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("cfg", &self.cfg).finish_non_exhaustive()
    }
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Self {
        let m = cfg.grid.padded_len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            cfg,
            forward,
            inverse,
            buf: vec![Complex64::new(0.0, 0.0); m],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn check_grid(&self, state: &FieldState) -> Result<()> {
        if state.grid != self.cfg.grid {
            return Err(LabError::Config("state grid differs from solver grid".into()));
        }
        Ok(())
    }

    fn linear(state: &mut FieldState, h: f64) {
        state.advance_linear(h);
    }

    /// Samples of `u` on the padded grid `x_n = 2πn / M`.
    fn load_physical(&mut self, state: &FieldState) {
        let m = self.buf.len() as i64;
        self.buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (j, z) in state.iter() {
            self.buf[j.rem_euclid(m) as usize] = z;
        }
        self.inverse.process_with_scratch(&mut self.buf, &mut self.scratch);
    }

    fn store_spectral(&mut self, state: &mut FieldState) {
        self.forward.process_with_scratch(&mut self.buf, &mut self.scratch);
        let m = self.buf.len() as i64;
        let scale = 1.0 / m as f64;
        for j in state.grid.modes() {
            let z = self.buf[j.rem_euclid(m) as usize] * scale;
            let i = (j - state.grid.lo()) as usize;
            state.coeffs[i] = z;
        }
        state.lag = 0.0;
        state.lag_carry = 0.0;
    }

    fn nonlinear(&mut self, state: &mut FieldState, h: f64) {
        if self.cfg.nu == 0.0 {
            return;
        }
        self.load_physical(state);
        let g = -self.cfg.sign * self.cfg.nu * h;
        for z in &mut self.buf {
            let r2 = z.norm_sqr();
            *z *= Complex64::from_polar(1.0, g * r2 * r2);
        }
        self.store_spectral(state);
    }

    /// One Strang step of length `h`.
    pub fn step_by(&mut self, state: &mut FieldState, h: f64) {
        Self::linear(state, 0.5 * h);
        self.nonlinear(state, h);
        Self::linear(state, 0.5 * h);
        state.t += h;
    }

    pub fn step(&mut self, state: &mut FieldState) {
        self.step_by(state, self.cfg.dt);
    }

    /// `Σ j² |ξ_j|² ± (ν/3) mean(|u|⁶)`, the mean taken exactly on the padded grid.
    pub fn energy(&mut self, state: &FieldState) -> f64 {
        let kinetic: f64 = state.actions().map(|(j, a)| (j * j) as f64 * a).sum();
        if self.cfg.nu == 0.0 {
            return kinetic;
        }
        self.load_physical(state);
        let mean6 = self.buf.iter().map(|z| z.norm_sqr().powi(3)).sum::<f64>() / self.buf.len() as f64;
        kinetic + self.cfg.sign * self.cfg.nu / 3.0 * mean6
    }

    /// Steps to `t_end` (the last step shortened to land on it), recording a sample
    /// at the start, every `sample_every` steps and at the end.
    pub fn evolve(
        &mut self,
        state: &mut FieldState,
        set: &ResonantSet,
        t_end: f64,
        sample_every: usize,
    ) -> Result<Vec<DiagnosticSample>> {
        self.check_grid(state)?;
        if t_end < state.t {
            return Err(LabError::Config(format!("t_end {t_end} precedes the current time {}", state.t)));
        }
        let every = sample_every.max(1);
        let mut tracker = PhaseTracker::default();
        let mut out = vec![self.sample(state, set, &mut tracker)];
        let dt = self.cfg.dt;
        let t0 = state.t;
        let full = ((t_end - t0) / dt * (1.0 + 1e-12)).floor() as u64;
        let mut last_good = state.t;
        for n in 1..=full {
            self.step(state);
            // avoid accumulation drift in the clock
            state.t = t0 + n as f64 * dt;
            if n % every as u64 == 0 || n == full {
                if !state.is_finite() {
                    return Err(LabError::BlowUp { last_good_t: last_good });
                }
                last_good = state.t;
                if n % every as u64 == 0 {
                    out.push(self.sample(state, set, &mut tracker));
                }
            }
        }
        let rest = t_end - state.t;
        if rest > 1e-12 * dt {
            self.step_by(state, rest);
        }
        state.t = t_end;
        if !state.is_finite() {
            return Err(LabError::BlowUp { last_good_t: last_good });
        }
        if out.last().map(|s| s.t) != Some(t_end) {
            out.push(self.sample(state, set, &mut tracker));
        }
        Ok(out)
    }

    pub fn sample(&mut self, state: &FieldState, set: &ResonantSet, tracker: &mut PhaseTracker) -> DiagnosticSample {
        let [i_a1, i_a2, i_b1, i_b2] = [set.a1(), set.a2(), set.b1(), set.b2()].map(|j| state.action(j));
        let inside: f64 = set.modes().iter().map(|j| state.action(*j)).sum();
        let mass = state.mass();
        DiagnosticSample {
            t: state.t,
            i_a1,
            i_a2,
            i_b1,
            i_b2,
            k0: i_a1,
            k1: i_a1 + i_b1,
            k2: i_a2 + i_b2,
            khalf: i_b2 + 0.5 * i_a1,
            phi0: tracker.next(raw_phi0(state, set)),
            mass,
            momentum: state.momentum(),
            energy: self.energy(state),
            hs2: state.sobolev_sq(2.0),
            hs4: state.sobolev_sq(4.0),
            outside: (mass - inside).max(0.0),
        }
    }
}

/// One free-standing step.
pub fn step(state: &FieldState, cfg: &SolverConfig) -> Result<FieldState> {
    let mut solver = Solver::new(*cfg);
    solver.check_grid(state)?;
    let mut next = state.clone();
    solver.step(&mut next);
    Ok(next)
}

/// Actions of the requested modes.
pub fn mode_actions(state: &FieldState, modes: &[i64]) -> Vec<(i64, f64)> {
    modes.iter().map(|j| (*j, state.action(*j))).collect()
}

/// `θ_{a1} - θ_{b1} + (θ_{a2} - θ_{b2}) / 2` in `(-π/2, π/2]`, or `None` when an
/// amplitude is below [`AMPLITUDE_FLOOR`].
pub fn raw_phi0(state: &FieldState, set: &ResonantSet) -> Option<f64> {
    let z = [set.a1(), set.b1(), set.a2(), set.b2()].map(|j| state.coeff(j));
    if z.iter().any(|c| c.norm() < AMPLITUDE_FLOOR) {
        return None;
    }
    // the half angles make φ0 defined modulo π
    let twice = 2.0 * (z[0].arg() - z[1].arg()) + z[2].arg() - z[3].arg();
    Some(wrap_half_pi(0.5 * twice))
}

fn wrap_half_pi(x: f64) -> f64 {
    let r = x - PI * (x / PI).round();
    if r <= -PI / 2.0 {
        r + PI
    } else {
        r
    }
}

pub fn phi0(state: &FieldState, set: &ResonantSet) -> Option<f64> {
    raw_phi0(state, set)
}

/// Continuous unwrapping of `φ0` modulo `π` along a series.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTracker {
    last: Option<f64>,
}

impl PhaseTracker {
    pub fn next(&mut self, raw: Option<f64>) -> Option<f64> {
        let raw = raw?;
        let v = match self.last {
            None => raw,
            Some(prev) => raw + PI * ((prev - raw) / PI).round(),
        };
        self.last = Some(v);
        Some(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticSample {
    pub t: f64,
    pub i_a1: f64,
    pub i_a2: f64,
    pub i_b1: f64,
    pub i_b2: f64,
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub khalf: f64,
    pub phi0: Option<f64>,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub hs2: f64,
    pub hs4: f64,
    /// Mass carried by modes outside the resonant set.
    pub outside: f64,
}

fn populate(grid: GridSpec, set: &ResonantSet, actions: [f64; 4]) -> Result<FieldState> {
    let mut state = FieldState::zeros(grid);
    for (j, i) in [set.a1(), set.a2(), set.b1(), set.b2()].into_iter().zip(actions) {
        if !grid.contains(j) {
            return Err(LabError::Config(format!("mode {j} of the resonant set is outside the grid")));
        }
        state.set(j, Complex64::new(i.sqrt(), 0.0))?;
    }
    Ok(state)
}

/// `|u_{a1}|² = K0`, `|u_{a2}|² = K0/2`, `|u_{b1}|² = 1 - K0`, `|u_{b2}|² = (1 - K0)/2`,
/// all phases zero.
pub fn initial_theorem1(grid: GridSpec, set: &ResonantSet, k0: f64) -> Result<FieldState> {
    if !(k0 > 0.0 && k0 < 1.0) {
        return Err(LabError::Config(format!("K0 must lie in (0, 1), got {k0}")));
    }
    populate(grid, set, [k0, 0.5 * k0, 1.0 - k0, 0.5 * (1.0 - k0)])
}

/// `|u_{a1}|² = γ`, `|u_{a2}|² = (7 + γ)/2`, `|u_{b1}|² = 1 - γ`, `|u_{b2}|² = (1 - γ)/2`.
pub fn initial_theorem2(grid: GridSpec, set: &ResonantSet, gamma: f64) -> Result<FieldState> {
    if !(gamma > 0.0 && gamma < 0.1) {
        return Err(LabError::Config(format!("gamma must lie in (0, 1/10), got {gamma}")));
    }
    populate(grid, set, [gamma, 0.5 * (7.0 + gamma), 1.0 - gamma, 0.5 * (1.0 - gamma)])
}
