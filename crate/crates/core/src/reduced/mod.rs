//! The integrable four-mode model and its one-degree-of-freedom reduction.
//!
//! On a resonant set the Hamiltonian `N + Z6^i + Z6^e` depends on the angles only
//! through `φ0 = θ_{a1} - θ_{b1} + (θ_{a2} - θ_{b2}) / 2`. Fixing `K1 = 1`, `K2 = A` and
//! `K_{1/2} = 1/2` leaves the planar system for `(φ, K)` driven by `H⋆`.

mod hamiltonian;
pub mod ode;
mod orbit;

pub use hamiltonian::{
    actions_from_k, b_inverse, b_transform, f_constant, f_regime4, hat_h, hstar, hstar_rhs, kappa0,
    kappa_star, separatrix_level, AngleActionVector, ReducedState, RegimeParams,
};
pub use orbit::{
    action_integral, action_integral_from, equilibria, half_period, half_period_with_cap,
    integrate_orbit, level_set_at, period_from, phase_return, separatrix_points, OrbitSample, SeparatrixSamples,
    Trajectory, DEFAULT_TIME_CAP,
};
