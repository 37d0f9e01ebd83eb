use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use super::polynomial::{Coeff, Monomial, SparsePolynomial};
use super::spectrum::ModeSpectrum;
use crate::error::Result;
use crate::resonance::{for_each_sorted_resonance, ResonanceTuple, ResonantSet};

/// A monomial `ξ^j η^l` with sides sorted, weighted by the number of ordered tuples
/// that produce it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ResonantMonomial {
    pub tuple: ResonanceTuple,
    pub multiplicity: u64,
}

impl ResonantMonomial {
    fn new(tuple: ResonanceTuple) -> Self {
        let tuple = tuple.sides_sorted();
        Self { tuple, multiplicity: tuple.ordered_multiplicity() }
    }

    pub fn evaluate(&self, s: &ModeSpectrum) -> Complex64 {
        let t = &self.tuple;
        let v = t.j.iter().fold(Complex64::new(1.0, 0.0), |acc, &j| acc * s.xi(j));
        let v = t.l.iter().fold(v, |acc, &l| acc * s.eta(l));
        v * self.multiplicity as f64
    }
}

/// Index slots of the tuple carrying a mode outside the set.
pub fn external_slots(set: &ResonantSet, t: &ResonanceTuple) -> usize {
    t.j.iter().chain(t.l.iter()).filter(|m| !set.contains(**m)).count()
}

/// Resonant monomials within a window, sorted into the parts of `Z6`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Z6Decomposition {
    /// Trivial resonances (pure action monomials).
    pub actions: Vec<ResonantMonomial>,
    /// Nontrivial resonances supported in the set.
    pub effective: Vec<ResonantMonomial>,
    pub one_external: Vec<ResonantMonomial>,
    pub two_external: Vec<ResonantMonomial>,
    pub three_or_more: Vec<ResonantMonomial>,
}

fn sum(parts: &[ResonantMonomial], s: &ModeSpectrum) -> Complex64 {
    parts.iter().map(|m| m.evaluate(s)).sum()
}

fn polynomial(parts: &[ResonantMonomial]) -> SparsePolynomial {
    let mut p = SparsePolynomial::zero();
    for m in parts {
        let c = Coeff::new(Rational64::from_integer(m.multiplicity as i64), Rational64::zero());
        p.add_term(Monomial::from_tuple(&m.tuple), c);
    }
    p
}

impl Z6Decomposition {
    pub fn parts(&self) -> [(&'static str, &[ResonantMonomial]); 5] {
        [
            ("Zi", &self.actions),
            ("Ze", &self.effective),
            ("Z1", &self.one_external),
            ("Z2", &self.two_external),
            ("Z3", &self.three_or_more),
        ]
    }

    /// Value of the sum of all parts.
    pub fn evaluate(&self, s: &ModeSpectrum) -> Complex64 {
        self.parts().iter().map(|(_, p)| sum(p, s)).sum()
    }

    pub fn evaluate_part(part: &[ResonantMonomial], s: &ModeSpectrum) -> Complex64 {
        sum(part, s)
    }

    pub fn to_polynomial(part: &[ResonantMonomial]) -> SparsePolynomial {
        polynomial(part)
    }

    pub fn find<'a>(part: &'a [ResonantMonomial], t: &ResonanceTuple) -> Option<&'a ResonantMonomial> {
        let key = t.sides_sorted();
        part.iter().find(|m| m.tuple == key)
    }
}

/// Splits every resonance with indices in `[-bound, bound]` according to its
/// relation with `set`.
pub fn decompose_z6(set: &ResonantSet, bound: i64) -> Result<Z6Decomposition> {
    let mut d = Z6Decomposition::default();
    for_each_sorted_resonance(bound, |t| {
        let m = ResonantMonomial::new(t);
        let slot = if t.is_trivial() {
            &mut d.actions
        } else {
            match external_slots(set, &t) {
                0 => &mut d.effective,
                1 => &mut d.one_external,
                2 => &mut d.two_external,
                _ => &mut d.three_or_more,
            }
        };
        slot.push(m);
    })?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::identities::{z6_direct, z6e_polynomial};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spectrum(bound: i64, rng: &mut ChaCha8Rng) -> ModeSpectrum {
        let mut s = ModeSpectrum::symmetric(bound);
        for j in -bound..=bound {
            let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            s.set_physical(j, z).unwrap();
        }
        s
    }

    #[test]
    fn example_set_coefficients() {
        let set = ResonantSet::new(-2, 1).unwrap();
        let d = decompose_z6(&set, 6).unwrap();
        assert!(d.one_external.is_empty());
        assert_eq!(d.effective.len(), 2);
        assert!(d.effective.iter().all(|m| m.multiplicity == 9));
        assert_eq!(Z6Decomposition::to_polynomial(&d.effective), z6e_polynomial(&set));

        let a = ResonanceTuple::new([3, -2, -1], [-3, 2, 1]);
        let b = ResonanceTuple::new([4, -2, -2], [-4, 2, 2]);
        assert_eq!(Z6Decomposition::find(&d.two_external, &a).unwrap().multiplicity, 36);
        assert_eq!(Z6Decomposition::find(&d.two_external, &b).unwrap().multiplicity, 9);
        assert_eq!(Z6Decomposition::find(&d.two_external, &a.swapped()).unwrap().multiplicity, 36);
    }

    #[test]
    fn two_external_split_across_sides() {
        let set = ResonantSet::new(-1, 2).unwrap();
        let d = decompose_z6(&set, 12).unwrap();
        for m in &d.two_external {
            let t = m.tuple;
            let xi_out = t.j.iter().filter(|j| !set.contains(**j)).count();
            let eta_out = t.l.iter().filter(|l| !set.contains(**l)).count();
            assert_eq!((xi_out, eta_out), (1, 1), "{t}");
        }
    }

    #[test]
    fn parts_sum_to_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let set = ResonantSet::new(-2, 1).unwrap();
        let d = decompose_z6(&set, 4).unwrap();
        for _ in 0..3 {
            let s = random_spectrum(4, &mut rng);
            let direct = z6_direct(&s, 4);
            let split = d.evaluate(&s);
            assert!((direct - split).norm() <= 1e-10 * direct.norm().max(1.0));
        }
    }
}
