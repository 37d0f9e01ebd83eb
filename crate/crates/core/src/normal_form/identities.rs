//! Closed-form action identities of the resonant normal form and their direct
//! ordered-tuple counterparts.

use alloc::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use super::polynomial::{Coeff, SparsePolynomial};
use super::spectrum::ModeSpectrum;
use crate::error::{CoreError, Result};
use crate::resonance::{ResonanceTuple, ResonantSet};

/// Actions `I_j` keyed by mode; absent modes are zero.
pub type ActionMap = BTreeMap<i64, f64>;

fn total(actions: &ActionMap) -> f64 {
    actions.values().sum()
}

fn power_sum(actions: &ActionMap, p: i32) -> f64 {
    actions.values().map(|i| num_traits::Float::powi(*i, p)).sum()
}

/// `1 / (iΩ)` for a nonresonant tuple.
pub fn chi_coefficient(t: &ResonanceTuple) -> Result<Coeff> {
    chi_from_divisor(t.divisor())
}

pub fn chi_from_divisor(omega: i64) -> Result<Coeff> {
    if omega == 0 {
        return Err(CoreError::ResonantTuple);
    }
    Ok(Coeff::new(Rational64::zero(), -Rational64::new(1, omega)))
}

/// `Z4 = 2J² - Σ I_j²`.
pub fn z4_closed(actions: &ActionMap) -> f64 {
    let j = total(actions);
    2.0 * j * j - power_sum(actions, 2)
}

/// `W4^(k) = 2 I_k (J - I_k)`.
pub fn w4k_closed(actions: &ActionMap, k: i64) -> f64 {
    let ik = actions.get(&k).copied().unwrap_or(0.0);
    2.0 * ik * (total(actions) - ik)
}

/// `Z6^i = 6J³ - 9J Σ I_k² + 4 Σ I_k³`.
pub fn z6i_closed(actions: &ActionMap) -> f64 {
    let j = total(actions);
    6.0 * j * j * j - 9.0 * j * power_sum(actions, 2) + 4.0 * power_sum(actions, 3)
}

/// Sum of `ξ_{j1} ξ_{j2} η_{l1} η_{l2}` over ordered `(j1, j2, l1, l2)` with equal
/// momentum and equal squared sums, indices in `[-bound, bound]`.
pub fn z4_direct(s: &ModeSpectrum, bound: i64) -> Complex64 {
    let mut sum = Complex64::zero();
    for j1 in -bound..=bound {
        for j2 in -bound..=bound {
            for l1 in -bound..=bound {
                let l2 = j1 + j2 - l1;
                if l2.abs() > bound || j1 * j1 + j2 * j2 != l1 * l1 + l2 * l2 {
                    continue;
                }
                sum += s.xi(j1) * s.xi(j2) * s.eta(l1) * s.eta(l2);
            }
        }
    }
    sum
}

/// Sum of `ξ_k ξ_{j1} η_{l2} η_{l3}` over `(j1, l2, l3)` completing `k` into a
/// four-index resonance with `j1 != k`.
pub fn w4k_direct(s: &ModeSpectrum, k: i64, bound: i64) -> Complex64 {
    let mut sum = Complex64::zero();
    for j1 in (-bound..=bound).filter(|j| *j != k) {
        for l2 in -bound..=bound {
            let l3 = k + j1 - l2;
            if l3.abs() > bound || k * k + j1 * j1 != l2 * l2 + l3 * l3 {
                continue;
            }
            sum += s.xi(k) * s.xi(j1) * s.eta(l2) * s.eta(l3);
        }
    }
    sum
}

fn distinct_orderings(a: [i64; 3]) -> impl Iterator<Item = [i64; 3]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut seen: [[i64; 3]; 6] = [[0; 3]; 6];
    let mut n = 0;
    for p in PERMS {
        let c = [a[p[0]], a[p[1]], a[p[2]]];
        if !seen[..n].contains(&c) {
            seen[n] = c;
            n += 1;
        }
    }
    seen.into_iter().take(n)
}

/// Sum over ordered trivial resonances (`l` a rearrangement of `j`).
pub fn z6i_direct(s: &ModeSpectrum, bound: i64) -> Complex64 {
    let mut sum = Complex64::zero();
    for j1 in -bound..=bound {
        for j2 in -bound..=bound {
            for j3 in -bound..=bound {
                let xi = s.xi(j1) * s.xi(j2) * s.xi(j3);
                if xi.is_zero() {
                    continue;
                }
                for l in distinct_orderings([j1, j2, j3]) {
                    sum += xi * s.eta(l[0]) * s.eta(l[1]) * s.eta(l[2]);
                }
            }
        }
    }
    sum
}

/// Sum of `ξ_{j1} ξ_{j2} ξ_{j3} η_{l1} η_{l2} η_{l3}` over every ordered resonance with
/// indices in `[-bound, bound]`.
pub fn z6_direct(s: &ModeSpectrum, bound: i64) -> Complex64 {
    let mut sum = Complex64::zero();
    for j1 in -bound..=bound {
        for j2 in -bound..=bound {
            for j3 in -bound..=bound {
                let xi = s.xi(j1) * s.xi(j2) * s.xi(j3);
                if xi.is_zero() {
                    continue;
                }
                let (m, q) = (j1 + j2 + j3, j1 * j1 + j2 * j2 + j3 * j3);
                for l1 in -bound..=bound {
                    for l2 in -bound..=bound {
                        let l3 = m - l1 - l2;
                        if l3.abs() > bound || l1 * l1 + l2 * l2 + l3 * l3 != q {
                            continue;
                        }
                        sum += xi * s.eta(l1) * s.eta(l2) * s.eta(l3);
                    }
                }
            }
        }
    }
    sum
}

/// `9 (ξ_{a2} ξ_{a1}² η_{b2} η_{b1}² + ξ_{b2} ξ_{b1}² η_{a2} η_{a1}²)`.
pub fn z6e(s: &ModeSpectrum, set: &ResonantSet) -> Complex64 {
    let (a2, a1, b2, b1) = (set.a2(), set.a1(), set.b2(), set.b1());
    let forward = s.xi(a2) * s.xi(a1).powu(2) * s.eta(b2) * s.eta(b1).powu(2);
    let backward = s.xi(b2) * s.xi(b1).powu(2) * s.eta(a2) * s.eta(a1).powu(2);
    (forward + backward) * 9.0
}

fn int(n: i64) -> Coeff {
    Coeff::new(Rational64::from_integer(n), Rational64::zero())
}

/// The effective term as a polynomial.
pub fn z6e_polynomial(set: &ResonantSet) -> SparsePolynomial {
    let forward = ResonanceTuple::new([set.a2(), set.a1(), set.a1()], [set.b2(), set.b1(), set.b1()]);
    &SparsePolynomial::from_tuple(&forward, int(9)) + &SparsePolynomial::from_tuple(&forward.swapped(), int(9))
}

/// The three action combinations conserved by the reduced model.
#[derive(Debug, Clone, PartialEq)]
pub struct KPolynomials {
    /// `I_{a1} + I_{b1}`
    pub k1: SparsePolynomial,
    /// `I_{a2} + I_{b2}`
    pub k2: SparsePolynomial,
    /// `I_{b2} + I_{a1} / 2`
    pub khalf: SparsePolynomial,
}

pub fn k_polynomials(set: &ResonantSet) -> KPolynomials {
    let i = SparsePolynomial::action;
    let half = Coeff::new(Rational64::new(1, 2), Rational64::zero());
    KPolynomials {
        k1: &i(set.a1()) + &i(set.b1()),
        k2: &i(set.a2()) + &i(set.b2()),
        khalf: &i(set.b2()) + &i(set.a1()).scale(half),
    }
}

/// `N + Z6^i + Z6^e` restricted to the four modes of the set.
pub fn reduced_hamiltonian_polynomial(set: &ResonantSet) -> SparsePolynomial {
    let modes = set.modes();
    let mut n = SparsePolynomial::zero();
    let mut j = SparsePolynomial::zero();
    let mut sq = SparsePolynomial::zero();
    let mut cube = SparsePolynomial::zero();
    for m in modes {
        let i = SparsePolynomial::action(m);
        n = &n + &i.scale_int(m * m);
        j = &j + &i;
        let i2 = &i * &i;
        cube = &cube + &(&i2 * &i);
        sq = &sq + &i2;
    }
    let j3 = &(&j * &j) * &j;
    let zi = &(&j3.scale_int(6) - &(&j * &sq).scale_int(9)) + &cube.scale_int(4);
    &(&n + &zi) + &z6e_polynomial(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::polynomial::poisson_bracket;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn physical(actions: &ActionMap, bound: i64, rng: &mut ChaCha8Rng) -> ModeSpectrum {
        let mut s = ModeSpectrum::symmetric(bound);
        for (j, i) in actions {
            s.set_polar(*j, *i, rng.gen_range(0.0..core::f64::consts::TAU)).unwrap();
        }
        s
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_from_divisor(1).unwrap(), Coeff::new(Rational64::zero(), -Rational64::from_integer(1)));
        assert_eq!(chi_from_divisor(4).unwrap(), Coeff::new(Rational64::zero(), Rational64::new(-1, 4)));
        let t = ResonanceTuple::new([1, 1, -2], [2, -1, -1]);
        assert_eq!(chi_coefficient(&t), Err(CoreError::ResonantTuple));
        let t = ResonanceTuple::new([3, 0, 0], [1, 2, 0]);
        assert_eq!(chi_coefficient(&t).unwrap(), Coeff::new(Rational64::zero(), Rational64::new(-1, 4)));
    }

    #[test]
    fn closed_form_examples() {
        let empty = ActionMap::new();
        assert_eq!(z4_closed(&empty), 0.0);
        assert_eq!(z6i_closed(&empty), 0.0);
        let one: ActionMap = [(0, 1.0)].into_iter().collect();
        assert_eq!(z4_closed(&one), 1.0);
        assert_eq!(z6i_closed(&one), 1.0);
        assert_eq!(w4k_closed(&one, 0), 0.0);
        let two: ActionMap = [(1, 1.0), (2, 1.0)].into_iter().collect();
        assert_eq!(z4_closed(&two), 6.0);
        let w: ActionMap = [(1, 1.0), (-3, 2.0)].into_iter().collect();
        assert_eq!(w4k_closed(&w, 1), 4.0);
        assert_eq!(w4k_closed(&w, 5), 0.0);
    }

    #[test]
    fn direct_sums_on_one_mode() {
        let one: ActionMap = [(0, 1.0)].into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = physical(&one, 3, &mut rng);
        assert!((z4_direct(&s, 3).re - 1.0).abs() < 1e-14);
        assert!((z6i_direct(&s, 3).re - 1.0).abs() < 1e-14);

        let w: ActionMap = [(1, 1.0), (-3, 2.0)].into_iter().collect();
        let s = physical(&w, 4, &mut rng);
        assert!((w4k_direct(&s, 1, 4).re - 4.0).abs() < 1e-13);
    }

    #[test]
    fn closed_forms_match_direct_on_random_actions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mut actions = ActionMap::new();
            for _ in 0..5 {
                actions.insert(rng.gen_range(-5..=5), rng.gen_range(0.0..2.0));
            }
            let s = physical(&actions, 6, &mut rng);
            let rel = |a: f64, b: Complex64| (b.re - a).abs().max(b.im.abs()) / a.abs().max(1.0);
            assert!(rel(z4_closed(&actions), z4_direct(&s, 6)) < 1e-10);
            assert!(rel(z6i_closed(&actions), z6i_direct(&s, 6)) < 1e-10);
            for k in -5..=5 {
                assert!(rel(w4k_closed(&actions, k), w4k_direct(&s, k, 6)) < 1e-10);
            }
        }
    }

    #[test]
    fn z6e_examples() {
        let set = ResonantSet::new(-2, 1).unwrap();
        let mut s = ModeSpectrum::symmetric(3);
        for m in set.modes() {
            s.set_polar(m, 1.0, 0.0).unwrap();
        }
        assert!((z6e(&s, &set).re - 18.0).abs() < 1e-13);

        // θ_{a1} = π/2 makes 2φ0 = π
        s.set_polar(set.a1(), 1.0, core::f64::consts::FRAC_PI_2).unwrap();
        let v = z6e(&s, &set);
        assert!((v.re + 18.0).abs() < 1e-12 && v.im.abs() < 1e-12);

        s.set_polar(set.b2(), 0.0, 0.0).unwrap();
        assert_eq!(z6e(&s, &set), Complex64::zero());

        let poly = z6e_polynomial(&set);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = physical(&set.modes().iter().map(|m| (*m, rng.gen_range(0.1..1.0))).collect(), 3, &mut rng);
        assert!((poly.evaluate(&s) - z6e(&s, &set)).norm() < 1e-12);
    }

    #[test]
    fn k_brackets() {
        let set = ResonantSet::new(-1, 2).unwrap();
        let k = k_polynomials(&set);
        let ze = z6e_polynomial(&set);
        assert!(poisson_bracket(&k.k1, &ze).is_zero());
        assert!(poisson_bracket(&k.k2, &ze).is_zero());
        assert!(poisson_bracket(&k.khalf, &ze).is_zero());
        // K0 = I_{a1} alone is not conserved
        assert!(!poisson_bracket(&SparsePolynomial::action(set.a1()), &ze).is_zero());
    }
}
