use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::numerics::bisect;

/// Angles and actions in the `(a1, b1, b2, a2)` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleActionVector {
    /// `(φ0, φ1, φ2, φ_{1/2})`
    pub phi: [f64; 4],
    /// `(K0, K1, K2, K_{1/2})`
    pub k: [f64; 4],
}

/// `θ, I` on `(a1, b1, b2, a2)` to `φ, K`.
pub fn b_transform(theta: [f64; 4], i: [f64; 4]) -> AngleActionVector {
    let [ta1, tb1, tb2, ta2] = theta;
    let [ia1, ib1, ib2, ia2] = i;
    AngleActionVector {
        phi: [ta1 - tb1 - 0.5 * tb2 + 0.5 * ta2, tb1, ta2, tb2 - ta2],
        k: [ia1, ia1 + ib1, ib2 + ia2, 0.5 * ia1 + ib2],
    }
}

/// Inverse of [`b_transform`].
pub fn b_inverse(v: &AngleActionVector) -> ([f64; 4], [f64; 4]) {
    let [p0, p1, p2, ph] = v.phi;
    let theta = [p0 + p1 + 0.5 * ph, p1, ph + p2, p2];
    (theta, actions_from_k(v.k))
}

/// `(I_{a1}, I_{b1}, I_{b2}, I_{a2})` from `(K0, K1, K2, K_{1/2})`.
pub fn actions_from_k(k: [f64; 4]) -> [f64; 4] {
    let [k0, k1, k2, kh] = k;
    [k0, k1 - k0, kh - 0.5 * k0, k2 - kh + 0.5 * k0]
}

/// `F(K1, K2) = K1 + 4K2 + (K1 + K2)(K1² + K2² + 8K1K2)`.
pub fn f_constant(k1: f64, k2: f64) -> f64 {
    k1 + 4.0 * k2 + (k1 + k2) * (k1 * k1 + k2 * k2 + 8.0 * k1 * k2)
}

/// The four-mode Hamiltonian in the variables `(φ0; K0, K1, K2, K_{1/2})`.
pub fn hat_h(phi0: f64, k: [f64; 4]) -> Result<f64> {
    let [ia1, ib1, ib2, ia2] = actions_from_k(k);
    if [ia1, ib1, ib2, ia2].iter().any(|i| *i < 0.0 || !i.is_finite()) {
        return Err(CoreError::Domain("negative action"));
    }
    let (k1, k2) = (k[1], k[2]);
    let coupling = 3.0 * Float::sqrt(ia2 * ib2) * ia1 * ib1 * Float::cos(2.0 * phi0);
    Ok(f_constant(k1, k2) + 6.0 * ((k1 + 3.0 * k2) * ia1 * ib1 + (k2 + 3.0 * k1) * ia2 * ib2 + coupling))
}

/// The ratio `A = K2 / K1`, at least `1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    a: f64,
}

impl RegimeParams {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.5) {
            return Err(CoreError::InvalidArgument("A must be a finite number >= 1/2"));
        }
        Ok(Self { a })
    }

    pub fn half() -> Self {
        Self { a: 0.5 }
    }

    pub fn four() -> Self {
        Self { a: 4.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    fn is(&self, v: f64) -> bool {
        self.a == v
    }
}

/// A point `(φ, K)` of the reduced phase plane; `φ` is kept unwrapped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub phi: f64,
    pub k: f64,
}

impl ReducedState {
    pub const fn new(phi: f64, k: f64) -> Self {
        Self { phi, k }
    }
}

fn check(s: &ReducedState, p: &RegimeParams) -> Result<f64> {
    let m = 2.0 * p.a - 1.0 + s.k;
    if !(s.k.is_finite() && s.phi.is_finite()) || s.k < 0.0 || s.k > 1.0 || m < 0.0 {
        return Err(CoreError::Domain("state outside 0 <= K <= 1"));
    }
    Ok(m)
}

/// `H⋆(φ, K)`.
pub fn hstar(s: &ReducedState, p: &RegimeParams) -> Result<f64> {
    let m = check(s, p)?;
    let (a, k) = (p.a, s.k);
    let root = Float::sqrt((1.0 - k) * m);
    Ok(1.5
        * (1.0 - k)
        * ((a + 3.0) * (2.0 * a - 1.0) + (7.0 + 13.0 * a) * k + 6.0 * root * k * Float::cos(2.0 * s.phi)))
}

/// `(φ', K') = (-∂H⋆/∂K, ∂H⋆/∂φ)`.
pub fn hstar_rhs(s: &ReducedState, p: &RegimeParams) -> Result<(f64, f64)> {
    let m = check(s, p)?;
    let (a, k) = (p.a, s.k);
    let (c0, c1) = ((a + 3.0) * (2.0 * a - 1.0), 7.0 + 13.0 * a);
    let (sin2, cos2) = Float::sin_cos(2.0 * s.phi);
    let u = 1.0 - k;
    let su = Float::sqrt(u);
    let sm = Float::sqrt(m);
    // d/dK [ u^{3/2} m^{1/2} K ]
    let middle = if m > 0.0 {
        u * su * k / (2.0 * sm)
    } else if k == 0.0 {
        0.0
    } else {
        return Err(CoreError::Domain("singular angle equation"));
    };
    let dg = -1.5 * su * sm * k + middle + u * su * sm;
    let dh_dk = 1.5 * (c1 * u - (c0 + c1 * k)) + 9.0 * cos2 * dg;
    let dh_dphi = -18.0 * u * su * sm * k * sin2;
    Ok((-dh_dk, dh_dphi))
}

/// `κ⋆ = 1/2 - [2(7√105 - 69)]^{1/2} / 8`.
pub fn kappa_star() -> f64 {
    0.5 - Float::sqrt(2.0 * (7.0 * Float::sqrt(105.0) - 69.0)) / 8.0
}

/// The function whose unit level locates the elliptic point on `φ = 0` when `A = 4`.
pub fn f_regime4(k: f64) -> f64 {
    (59.0 * k - 5.0) * Float::sqrt(k + 7.0) / Float::sqrt(1.0 - k) / (-3.0 * k * k - 16.0 * k + 7.0) / 3.0
}

/// The centre `(0, κ0)` of the `A = 4` portrait.
pub fn kappa0() -> Result<f64> {
    bisect(|k| f_regime4(k) - 1.0, 0.1, 0.2, 1e-15)
}

/// Energy of the heteroclinic level for the two analysed regimes.
pub fn separatrix_level(p: &RegimeParams) -> Result<f64> {
    if p.is(0.5) {
        Ok(63.0 / 16.0)
    } else if p.is(4.0) {
        Ok(147.0 / 2.0)
    } else {
        Err(CoreError::Unsupported("separatrices are only known for A = 1/2 and A = 4"))
    }
}
