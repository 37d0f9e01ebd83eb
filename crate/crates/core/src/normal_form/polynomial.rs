use alloc::collections::btree_map::Entry;
use alloc::collections::{BTreeMap, BTreeSet};
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{Float, One, ToPrimitive, Zero};

use super::spectrum::{norm_rho, ModeSpectrum};
use crate::error::{CoreError, Result};
use crate::resonance::ResonanceTuple;

/// Exact coefficient in `Q[i]`.
pub type Coeff = Complex<Rational64>;

fn to_c64(c: &Coeff) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}

/// `Π_j ξ_j^{a_j} η_j^{b_j}`; zero exponents are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    xi: BTreeMap<i64, u32>,
    eta: BTreeMap<i64, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_exponents(
        xi: impl IntoIterator<Item = (i64, u32)>,
        eta: impl IntoIterator<Item = (i64, u32)>,
    ) -> Self {
        let mut m = Self::default();
        for (j, e) in xi {
            bump(&mut m.xi, j, e);
        }
        for (j, e) in eta {
            bump(&mut m.eta, j, e);
        }
        m
    }

    /// `ξ_{j1} ξ_{j2} ξ_{j3} η_{l1} η_{l2} η_{l3}`.
    pub fn from_tuple(t: &ResonanceTuple) -> Self {
        Self::from_exponents(t.j.iter().map(|&j| (j, 1)), t.l.iter().map(|&l| (l, 1)))
    }

    pub fn xi_exponents(&self) -> &BTreeMap<i64, u32> {
        &self.xi
    }

    pub fn eta_exponents(&self) -> &BTreeMap<i64, u32> {
        &self.eta
    }

    pub fn xi_degree(&self) -> u32 {
        self.xi.values().sum()
    }

    pub fn eta_degree(&self) -> u32 {
        self.eta.values().sum()
    }

    pub fn degree(&self) -> u32 {
        self.xi_degree() + self.eta_degree()
    }

    /// Sum of `ξ` indices minus sum of `η` indices, with multiplicity.
    pub fn momentum(&self) -> i64 {
        let side = |m: &BTreeMap<i64, u32>| m.iter().map(|(j, e)| j * i64::from(*e)).sum::<i64>();
        side(&self.xi) - side(&self.eta)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        self.xi.keys().chain(self.eta.keys()).copied()
    }

    /// Number of ordered index tuples that multiply to this monomial.
    pub fn orderings(&self) -> u64 {
        multinomial(&self.xi) * multinomial(&self.eta)
    }

    fn times(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (j, e) in &other.xi {
            bump(&mut m.xi, *j, *e);
        }
        for (j, e) in &other.eta {
            bump(&mut m.eta, *j, *e);
        }
        m
    }

    /// `∂/∂ξ_j` as `(exponent, reduced monomial)`.
    fn d_xi(&self, j: i64) -> Option<(u32, Self)> {
        let e = *self.xi.get(&j)?;
        let mut m = self.clone();
        drop_one(&mut m.xi, j);
        Some((e, m))
    }

    fn d_eta(&self, j: i64) -> Option<(u32, Self)> {
        let e = *self.eta.get(&j)?;
        let mut m = self.clone();
        drop_one(&mut m.eta, j);
        Some((e, m))
    }

    pub fn evaluate(&self, s: &ModeSpectrum) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for (j, e) in &self.xi {
            v *= s.xi(*j).powu(*e);
        }
        for (j, e) in &self.eta {
            v *= s.eta(*j).powu(*e);
        }
        v
    }
}

fn bump(map: &mut BTreeMap<i64, u32>, j: i64, e: u32) {
    if e > 0 {
        *map.entry(j).or_insert(0) += e;
    }
}

fn drop_one(map: &mut BTreeMap<i64, u32>, j: i64) {
    if let Some(e) = map.get_mut(&j) {
        *e -= 1;
        if *e == 0 {
            map.remove(&j);
        }
    }
}

fn multinomial(exps: &BTreeMap<i64, u32>) -> u64 {
    let fact = |n: u32| (1..=u64::from(n)).product::<u64>();
    let total: u32 = exps.values().sum();
    exps.values().fold(fact(total), |acc, e| acc / fact(*e))
}

/// Finite sum of monomials with exact complex-rational coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparsePolynomial {
    terms: BTreeMap<Monomial, Coeff>,
}

impl SparsePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Coeff) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn xi(j: i64) -> Self {
        Self::term(Monomial::from_exponents([(j, 1)], []), Coeff::one())
    }

    pub fn eta(j: i64) -> Self {
        Self::term(Monomial::from_exponents([], [(j, 1)]), Coeff::one())
    }

    /// The action `I_j = ξ_j η_j`.
    pub fn action(j: i64) -> Self {
        Self::term(Monomial::from_exponents([(j, 1)], [(j, 1)]), Coeff::one())
    }

    pub fn from_tuple(t: &ResonanceTuple, c: Coeff) -> Self {
        Self::term(Monomial::from_tuple(t), c)
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).copied().unwrap_or_else(Coeff::zero)
    }

    pub fn scale(&self, c: Coeff) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), *v * c);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(Coeff::new(Rational64::from_integer(n), Rational64::zero()))
    }

    pub fn modes(&self) -> BTreeSet<i64> {
        self.terms.keys().flat_map(|m| m.modes()).collect()
    }

    /// Common degree of all terms, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }

    pub fn has_zero_momentum(&self) -> bool {
        self.terms.keys().all(|m| m.momentum() == 0)
    }

    pub fn derivative_xi(&self, j: i64) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((e, r)) = m.d_xi(j) {
                out.add_term(r, *c * int(i64::from(e)));
            }
        }
        out
    }

    pub fn derivative_eta(&self, j: i64) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((e, r)) = m.d_eta(j) {
                out.add_term(r, *c * int(i64::from(e)));
            }
        }
        out
    }

    pub fn evaluate(&self, s: &ModeSpectrum) -> Complex64 {
        self.terms.iter().map(|(m, c)| to_c64(c) * m.evaluate(s)).sum()
    }

    /// `[P]`: the largest coefficient modulus in the symmetric ordered-tuple
    /// representation, i.e. each collected coefficient divided by its number of orderings.
    pub fn ordered_coefficient_sup(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| to_c64(c).norm() / m.orderings() as f64)
            .fold(0.0, f64::max)
    }
}

fn int(n: i64) -> Coeff {
    Coeff::new(Rational64::from_integer(n), Rational64::zero())
}

impl Add for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn add(self, rhs: Self) -> SparsePolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Sub for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn sub(self, rhs: Self) -> SparsePolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -*c);
        }
        out
    }
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn neg(self) -> SparsePolynomial {
        self.scale_int(-1)
    }
}

impl Mul for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn mul(self, rhs: Self) -> SparsePolynomial {
        let mut out = SparsePolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), *ca * *cb);
            }
        }
        out
    }
}

/// `{f, g} = -i Σ_j (∂f/∂ξ_j ∂g/∂η_j - ∂f/∂η_j ∂g/∂ξ_j)`.
pub fn poisson_bracket(f: &SparsePolynomial, g: &SparsePolynomial) -> SparsePolynomial {
    let modes: BTreeSet<i64> = f.modes().intersection(&g.modes()).copied().collect();
    let mut sum = SparsePolynomial::zero();
    for j in modes {
        let a = &f.derivative_xi(j) * &g.derivative_eta(j);
        let b = &f.derivative_eta(j) * &g.derivative_xi(j);
        sum = &sum + &(&a - &b);
    }
    sum.scale(Coeff::new(Rational64::zero(), -Rational64::one()))
}

/// Weighted norm of the Hamiltonian vector field of `p` at `s`, paired with the bound
/// `2p [P] ||s||_ρ^{2p-1}` for a homogeneous zero-momentum `p` of degree `2p`.
pub fn vector_field_norm_check(poly: &SparsePolynomial, s: &ModeSpectrum, rho: f64) -> Result<(f64, f64)> {
    if poly.is_zero() {
        return Ok((0.0, 0.0));
    }
    let degree = poly.homogeneous_degree().ok_or(CoreError::NotInClass("not homogeneous"))?;
    if degree % 2 != 0 {
        return Err(CoreError::NotInClass("odd degree"));
    }
    if !poly.has_zero_momentum() {
        return Err(CoreError::NotInClass("nonzero momentum"));
    }
    let half = i32::try_from(degree / 2).unwrap_or(i32::MAX);
    let lhs = poly
        .modes()
        .into_iter()
        .map(|k| {
            let w = Float::exp(rho * k.abs() as f64);
            w * (poly.derivative_xi(k).evaluate(s).norm() + poly.derivative_eta(k).evaluate(s).norm())
        })
        .sum();
    let rhs = 2.0 * f64::from(half) * poly.ordered_coefficient_sup() * Float::powi(norm_rho(s, rho), 2 * half - 1);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Coeff {
        Coeff::new(Rational64::new(1, 2), Rational64::zero())
    }

    #[test]
    fn bracket_of_canonical_pair() {
        // {ξ_j, η_j} = -i
        let b = poisson_bracket(&SparsePolynomial::xi(3), &SparsePolynomial::eta(3));
        assert_eq!(b, SparsePolynomial::constant(Coeff::new(Rational64::zero(), -Rational64::one())));
    }

    #[test]
    fn actions_commute() {
        for j in -3..=3 {
            for k in -3..=3 {
                let b = poisson_bracket(&SparsePolynomial::action(j), &SparsePolynomial::action(k));
                assert!(b.is_zero());
            }
        }
    }

    #[test]
    fn self_bracket_vanishes() {
        let t = ResonanceTuple::new([1, 1, -2], [2, -1, -1]);
        let f = &SparsePolynomial::from_tuple(&t, int(9)) + &SparsePolynomial::action(4).scale(half());
        assert!(poisson_bracket(&f, &f).is_zero());
    }

    #[test]
    fn cancellation_prunes_terms() {
        let a = SparsePolynomial::action(1);
        assert!((&a - &a).is_zero());
        let mut p = SparsePolynomial::action(2);
        p.add_term(Monomial::from_exponents([(2, 1)], [(2, 1)]), int(-1));
        assert_eq!(p.len(), 0);
    }

    #[test]
    fn orderings_count() {
        let m = Monomial::from_tuple(&ResonanceTuple::new([1, 1, -2], [2, -1, -1]));
        assert_eq!(m.orderings(), 9);
        let m = Monomial::from_tuple(&ResonanceTuple::new([3, -2, -1], [-3, 2, 1]));
        assert_eq!(m.orderings(), 36);
        assert_eq!(Monomial::from_exponents([(0, 2)], [(0, 2)]).orderings(), 1);
    }

    #[test]
    fn vector_field_zero_and_single_mode() {
        let s = ModeSpectrum::symmetric(2);
        assert_eq!(vector_field_norm_check(&SparsePolynomial::zero(), &s, 0.0).unwrap(), (0.0, 0.0));

        // P = I_1², single mode ξ_1 = η_1 = a, ρ = 0.5:
        // ∂_ξ P = 2ξη², ∂_η P = 2ξ²η, so lhs = e^{ρ} 4a³ and rhs = 4 (2a e^{ρ})³.
        let a: f64 = 0.7;
        let rho = 0.5;
        let mut s = ModeSpectrum::symmetric(2);
        s.set_polar(1, a * a, 0.0).unwrap();
        let p = &SparsePolynomial::action(1) * &SparsePolynomial::action(1);
        let (lhs, rhs) = vector_field_norm_check(&p, &s, rho).unwrap();
        let e = Float::exp(rho);
        assert!((lhs - e * 4.0 * a.powi(3)).abs() < 1e-14);
        assert!((rhs - 4.0 * (2.0 * a * e).powi(3)).abs() < 1e-12);
        assert!(lhs <= rhs);
    }

    #[test]
    fn vector_field_rejects_bad_class() {
        let s = ModeSpectrum::symmetric(2);
        assert!(vector_field_norm_check(&SparsePolynomial::xi(1), &s, 0.0).is_err());
        let p = &SparsePolynomial::xi(1) * &SparsePolynomial::eta(2);
        assert!(vector_field_norm_check(&p, &s, 0.0).is_err());
    }
}
