//! Order-6 resonance arithmetic.
//!
//! A tuple `(j1, j2, j3; l1, l2, l3)` is resonant when it has zero momentum
//! `j1+j2+j3 = l1+l2+l3` and zero divisor `j1²+j2²+j3² = l1²+l2²+l3²`. It is trivial when
//! the two sides are the same multiset. Nontrivial resonances live on the four-mode
//! resonant sets `{n, n+k, n+3k, n+4k}`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Rational64;
use num_traits::Float;

use crate::error::{CoreError, Result};

/// Largest index bound accepted by the enumerations.
pub const MAX_ENUMERATION_BOUND: i64 = 64;

/// An ordered 6-tuple of Fourier indices: three `ξ` slots and three `η` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResonanceTuple {
    pub j: [i64; 3],
    pub l: [i64; 3],
}

impl ResonanceTuple {
    pub const fn new(j: [i64; 3], l: [i64; 3]) -> Self {
        Self { j, l }
    }

    /// Builds a tuple from the flat `[j1, j2, j3, l1, l2, l3]` layout.
    pub const fn from_array(a: [i64; 6]) -> Self {
        Self { j: [a[0], a[1], a[2]], l: [a[3], a[4], a[5]] }
    }

    pub const fn to_array(&self) -> [i64; 6] {
        [self.j[0], self.j[1], self.j[2], self.l[0], self.l[1], self.l[2]]
    }

    pub fn momentum(&self) -> i64 {
        self.j.iter().sum::<i64>() - self.l.iter().sum::<i64>()
    }

    pub fn divisor(&self) -> i64 {
        self.j.iter().map(|x| x * x).sum::<i64>() - self.l.iter().map(|x| x * x).sum::<i64>()
    }

    pub fn is_resonance(&self) -> bool {
        self.momentum() == 0 && self.divisor() == 0
    }

    /// Both sides carry the same multiset of indices.
    pub fn is_trivial(&self) -> bool {
        sorted_desc(self.j) == sorted_desc(self.l)
    }

    /// Each side sorted in descending order; the side-swap is left untouched.
    pub fn sides_sorted(&self) -> Self {
        Self { j: sorted_desc(self.j), l: sorted_desc(self.l) }
    }

    /// Representative of the class under slot permutations within a side and the
    /// exchange of the two sides: sides sorted descending, then `j >= l` lexicographically.
    pub fn canonical(&self) -> Self {
        let s = self.sides_sorted();
        if s.j >= s.l {
            s
        } else {
            Self { j: s.l, l: s.j }
        }
    }

    /// The tuple with the two sides exchanged (the conjugate monomial).
    pub const fn swapped(&self) -> Self {
        Self { j: self.l, l: self.j }
    }

    /// Number of ordered tuples that collapse onto this one after sorting each side.
    pub fn ordered_multiplicity(&self) -> u64 {
        distinct_permutations(self.j) * distinct_permutations(self.l)
    }

    /// Distinct indices used by the tuple.
    pub fn support(&self) -> BTreeSet<i64> {
        self.j.iter().chain(self.l.iter()).copied().collect()
    }
}

impl fmt::Display for ResonanceTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{};{},{},{})",
            self.j[0], self.j[1], self.j[2], self.l[0], self.l[1], self.l[2]
        )
    }
}

fn sorted_desc(mut a: [i64; 3]) -> [i64; 3] {
    a.sort_unstable_by(|x, y| y.cmp(x));
    a
}

/// Number of distinct orderings of a 3-element multiset.
pub fn distinct_permutations(a: [i64; 3]) -> u64 {
    let s = sorted_desc(a);
    match (s[0] == s[1], s[1] == s[2]) {
        (true, true) => 1,
        (false, false) => 6,
        _ => 3,
    }
}

/// The resonant set `{n, n+k, n+3k, n+4k}` with `k != 0`.
///
/// Roles: `a2 = n`, `a1 = n+3k`, `b2 = n+4k`, `b1 = n+k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResonantSet {
    n: i64,
    k: i64,
}

impl ResonantSet {
    pub fn new(n: i64, k: i64) -> Result<Self> {
        if k == 0 {
            return Err(CoreError::InvalidArgument("resonant set needs k != 0"));
        }
        Ok(Self { n, k })
    }

    pub const fn n(&self) -> i64 {
        self.n
    }

    pub const fn k(&self) -> i64 {
        self.k
    }

    pub const fn a2(&self) -> i64 {
        self.n
    }

    pub const fn a1(&self) -> i64 {
        self.n + 3 * self.k
    }

    pub const fn b2(&self) -> i64 {
        self.n + 4 * self.k
    }

    pub const fn b1(&self) -> i64 {
        self.n + self.k
    }

    /// Modes in role order `(a2, a1, b2, b1)`.
    pub const fn modes(&self) -> [i64; 4] {
        [self.a2(), self.a1(), self.b2(), self.b1()]
    }

    pub fn contains(&self, m: i64) -> bool {
        self.modes().contains(&m)
    }

    /// Offset of `m` from `n` in units of `k`, when `m` is in the set.
    pub fn offset_of(&self, m: i64) -> Option<i64> {
        [0, 1, 3, 4].into_iter().find(|&q| self.n + q * self.k == m)
    }

    /// Largest absolute index used by the set.
    pub fn max_abs(&self) -> i64 {
        self.modes().iter().map(|m| m.abs()).max().unwrap_or(0)
    }

    /// The same set in its canonical parametrisation `k > 0`.
    pub fn canonical(&self) -> Self {
        if self.k > 0 {
            *self
        } else {
            Self { n: self.n + 4 * self.k, k: -self.k }
        }
    }
}

impl fmt::Display for ResonantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(n={}, k={}) {{a2={}, a1={}, b2={}, b1={}}}",
            self.n,
            self.k,
            self.a2(),
            self.a1(),
            self.b2(),
            self.b1()
        )
    }
}

/// Two in-set modes on each side completed by two external modes, one per side.
///
/// The tuple `(j1, j2, p1; l1, l2, p2)` is resonant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartnerPair {
    pub j1: i64,
    pub j2: i64,
    pub l1: i64,
    pub l2: i64,
    pub p1: i64,
    pub p2: i64,
}

impl PartnerPair {
    pub const fn tuple(&self) -> ResonanceTuple {
        ResonanceTuple::new([self.j1, self.j2, self.p1], [self.l1, self.l2, self.p2])
    }
}

pub fn momentum(t: &ResonanceTuple) -> i64 {
    t.momentum()
}

pub fn divisor(t: &ResonanceTuple) -> i64 {
    t.divisor()
}

fn check_bound(bound: i64) -> Result<()> {
    if bound < 0 {
        return Err(CoreError::InvalidArgument("bound must be nonnegative"));
    }
    if bound > MAX_ENUMERATION_BOUND {
        return Err(CoreError::Capacity { bound, max: MAX_ENUMERATION_BOUND });
    }
    Ok(())
}

/// Exact integer square root, when `x` is a perfect square.
fn exact_sqrt(x: i64) -> Option<i64> {
    if x < 0 {
        return None;
    }
    let r = Float::sqrt(x as f64) as i64;
    (r.saturating_sub(1)..=r + 1).find(|c| *c >= 0 && c * c == x)
}

/// Integer pairs `p >= q` with `p + q = s` and `p² + q² = q2`.
fn pairs_with_sum_and_squares(s: i64, q2: i64) -> Option<(i64, i64)> {
    // (p - q)² = 2·q2 - s²
    let d = exact_sqrt(2 * q2 - s * s)?;
    if (s + d) % 2 != 0 {
        return None;
    }
    Some(((s + d) / 2, (s - d) / 2))
}

/// Visits every resonance (trivial ones included) with both sides sorted descending and
/// all indices in `[-bound, bound]`. Each visited tuple stands for
/// [`ResonanceTuple::ordered_multiplicity`] ordered tuples.
pub fn for_each_sorted_resonance<F: FnMut(ResonanceTuple)>(bound: i64, mut visit: F) -> Result<()> {
    check_bound(bound)?;
    for j1 in -bound..=bound {
        for j2 in -bound..=j1 {
            for j3 in -bound..=j2 {
                let s = j1 + j2 + j3;
                let q = j1 * j1 + j2 * j2 + j3 * j3;
                for l1 in -bound..=bound {
                    let Some((l2, l3)) = pairs_with_sum_and_squares(s - l1, q - l1 * l1) else {
                        continue;
                    };
                    if l2 > l1 || l3 < -bound {
                        continue;
                    }
                    visit(ResonanceTuple::new([j1, j2, j3], [l1, l2, l3]));
                }
            }
        }
    }
    Ok(())
}

/// All nontrivial resonances with indices in `[-bound, bound]`, canonicalised and
/// deduplicated, in ascending canonical order.
pub fn enumerate_resonances(bound: i64) -> Result<Vec<ResonanceTuple>> {
    let mut out = BTreeSet::new();
    for_each_sorted_resonance(bound, |t| {
        if !t.is_trivial() {
            out.insert(t.canonical());
        }
    })?;
    Ok(out.into_iter().collect())
}

/// Distinct supports of cardinality at most 4 among the nontrivial resonances within
/// `bound`, each as an ascending list.
pub fn minimal_supports(bound: i64) -> Result<Vec<Vec<i64>>> {
    let mut out = BTreeSet::new();
    for t in enumerate_resonances(bound)? {
        let support = t.support();
        if support.len() <= 4 {
            out.insert(support.into_iter().collect::<Vec<_>>());
        }
    }
    Ok(out.into_iter().collect())
}

/// Recognises `{n, n+k, n+3k, n+4k}` and returns `(n, k)` with `k > 0`.
pub fn recognize_resonant_set(modes: &[i64]) -> Result<Option<(i64, i64)>> {
    let mut sorted: Vec<i64> = modes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if modes.len() != 4 || sorted.len() != 4 {
        return Err(CoreError::InvalidArgument("expected exactly four distinct modes"));
    }
    let n = sorted[0];
    let k = sorted[1] - sorted[0];
    if sorted[2] == n + 3 * k && sorted[3] == n + 4 * k {
        Ok(Some((n, k)))
    } else {
        Ok(None)
    }
}

/// Pairs `{p1, p2}` (as `p1 <= p2`) completing three `ξ` modes and one `η` mode of `set`
/// into a resonance `(j1, j2, j3; l1, p1, p2)`.
pub fn same_side_completion(set: &ResonantSet, j: [i64; 3], l1: i64) -> Result<Vec<(i64, i64)>> {
    if !j.iter().all(|m| set.contains(*m)) || !set.contains(l1) {
        return Err(CoreError::InvalidArgument("all given modes must lie in the resonant set"));
    }
    let s = j.iter().sum::<i64>() - l1;
    let q = j.iter().map(|x| x * x).sum::<i64>() - l1 * l1;
    Ok(pairs_with_sum_and_squares(s, q).map(|(hi, lo)| (lo, hi)).into_iter().collect())
}

/// One row of the partner-pair table: offsets `m = (m1, m2, m3, m4)` in units of `k`,
/// `U = m1+m2-m3-m4`, `V = m1²+m2²-m3²-m4²` and the offsets `q1`, `q2` of the external
/// modes (absent when `U = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartnerRow {
    pub m: [i64; 4],
    pub u: i64,
    pub v: i64,
    pub q2: Option<Rational64>,
    pub q1: Option<Rational64>,
}

impl PartnerRow {
    pub fn new(m: [i64; 4]) -> Self {
        let u = m[0] + m[1] - m[2] - m[3];
        let v = m[0] * m[0] + m[1] * m[1] - m[2] * m[2] - m[3] * m[3];
        let (q2, q1) = if u == 0 {
            (None, None)
        } else {
            let ratio = Rational64::new(v, u);
            let half = Rational64::new(1, 2);
            let uu = Rational64::from_integer(u);
            (Some((ratio + uu) * half), Some((ratio - uu) * half))
        };
        Self { m, u, v, q2, q1 }
    }

    /// Row label as printed in the table, e.g. `"4301"`.
    pub fn label(&self) -> [u8; 4] {
        self.m.map(|x| b'0' + x as u8)
    }
}

/// Offsets of the set roles from `n` in units of `k`, in the table's order.
const OFFSETS: [i64; 4] = [4, 3, 1, 0];

/// All rows with `m1 >= m2` and `m3 >= m4`, in table order.
pub fn partner_rows() -> Vec<PartnerRow> {
    let mut rows = Vec::new();
    for (i1, &m1) in OFFSETS.iter().enumerate() {
        for &m2 in &OFFSETS[i1..] {
            for (i3, &m3) in OFFSETS.iter().enumerate() {
                for &m4 in &OFFSETS[i3..] {
                    rows.push(PartnerRow::new([m1, m2, m3, m4]));
                }
            }
        }
    }
    rows
}

fn integer_mode(n: i64, k: i64, q: Rational64) -> Option<i64> {
    let p = Rational64::from_integer(n) + q * Rational64::from_integer(k);
    p.is_integer().then(|| p.to_integer())
}

/// External partner pairs of a resonant set: resonances `(j1, j2, p1; l1, l2, p2)` with
/// `j, l` in the set and `p1 != p2` outside it. Rows with `U = 0` contribute nothing.
/// Conjugate duplicates (the two sides exchanged) are reported once.
pub fn external_pairs(set: &ResonantSet) -> Vec<PartnerPair> {
    let (n, k) = (set.n(), set.k());
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for row in partner_rows() {
        let (Some(q2), Some(q1)) = (row.q2, row.q1) else {
            continue;
        };
        let (Some(p1), Some(p2)) = (integer_mode(n, k, q1), integer_mode(n, k, q2)) else {
            continue;
        };
        if p1 == p2 || set.contains(p1) || set.contains(p2) {
            continue;
        }
        let pair = PartnerPair {
            j1: n + row.m[0] * k,
            j2: n + row.m[1] * k,
            l1: n + row.m[2] * k,
            l2: n + row.m[3] * k,
            p1,
            p2,
        };
        if seen.insert(pair.tuple().canonical()) {
            out.push(pair);
        }
    }
    out
}

/// `2|a1|^{2s} + |a2|^{2s} - 2|b1|^{2s} - |b2|^{2s}`.
pub fn sobolev_coefficient(set: &ResonantSet, s: f64) -> f64 {
    let w = |m: i64| Float::powf((m.abs()) as f64, 2.0 * s);
    2.0 * w(set.a1()) + w(set.a2()) - 2.0 * w(set.b1()) - w(set.b2())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Full six-loop enumeration, independent of the solved-index search.
    fn brute_force(bound: i64) -> BTreeSet<ResonanceTuple> {
        let r = -bound..=bound;
        let mut out = BTreeSet::new();
        for j1 in r.clone() {
            for j2 in r.clone() {
                for j3 in r.clone() {
                    for l1 in r.clone() {
                        for l2 in r.clone() {
                            for l3 in r.clone() {
                                let t = ResonanceTuple::new([j1, j2, j3], [l1, l2, l3]);
                                if t.is_resonance() && !t.is_trivial() {
                                    out.insert(t.canonical());
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn momentum_and_divisor_examples() {
        let t = ResonanceTuple::new([1, 1, -2], [2, -1, -1]);
        assert_eq!(momentum(&t), 0);
        assert_eq!(divisor(&t), 0);
        let zero = ResonanceTuple::default_zero();
        assert_eq!(zero.momentum(), 0);
        assert_eq!(zero.divisor(), 0);
        assert_eq!(ResonanceTuple::new([5, 0, 0], [1, 1, 1]).momentum(), 2);
        assert_eq!(ResonanceTuple::new([3, 0, 0], [1, 2, 0]).divisor(), 4);
    }

    impl ResonanceTuple {
        fn default_zero() -> Self {
            Self::new([0; 3], [0; 3])
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for bound in 0..=3 {
            let fast: BTreeSet<_> = enumerate_resonances(bound).unwrap().into_iter().collect();
            assert_eq!(fast, brute_force(bound), "bound {bound}");
        }
        // Frozen from the six-loop oracle above.
        assert_eq!(enumerate_resonances(3).unwrap().len(), 4);
        assert!(enumerate_resonances(0).unwrap().is_empty());
    }

    #[test]
    fn bound_two_contains_the_basic_resonance() {
        let list = enumerate_resonances(2).unwrap();
        let t = ResonanceTuple::new([1, 1, -2], [2, -1, -1]).canonical();
        assert!(list.contains(&t));
    }

    #[test]
    fn capacity_guard() {
        assert_eq!(
            enumerate_resonances(65),
            Err(CoreError::Capacity { bound: 65, max: MAX_ENUMERATION_BOUND })
        );
    }

    #[test]
    fn supports_examples() {
        assert_eq!(minimal_supports(2).unwrap(), vec![vec![-2, -1, 1, 2]]);
        assert!(minimal_supports(1).unwrap().is_empty());
        assert!(minimal_supports(7).unwrap().contains(&vec![-1, 1, 5, 7]));
    }

    #[test]
    fn recognition() {
        assert_eq!(recognize_resonant_set(&[-2, 1, 2, -1]).unwrap(), Some((-2, 1)));
        assert_eq!(recognize_resonant_set(&[-1, 5, 7, 1]).unwrap(), Some((-1, 2)));
        assert_eq!(recognize_resonant_set(&[0, 1, 2, 3]).unwrap(), None);
        assert!(recognize_resonant_set(&[0, 1, 2]).is_err());
        assert!(recognize_resonant_set(&[0, 1, 1, 3]).is_err());
    }

    #[test]
    fn no_pair_matches_a_non_family_set() {
        // independent check of the {0,1,2,3} example by searching (n, k)
        let target: BTreeSet<i64> = [0, 1, 2, 3].into_iter().collect();
        for n in -10..=10 {
            for k in (-10..=10).filter(|k| *k != 0) {
                let set = ResonantSet::new(n, k).unwrap();
                let modes: BTreeSet<i64> = set.modes().into_iter().collect();
                assert_ne!(modes, target);
            }
        }
    }

    #[test]
    fn same_side_examples() {
        let a = ResonantSet::new(-2, 1).unwrap();
        for (p1, p2) in same_side_completion(&a, [1, 1, -2], -1).unwrap() {
            assert!(a.contains(p1) && a.contains(p2));
        }
        assert_eq!(same_side_completion(&a, [1, 1, 1], 1).unwrap(), vec![(1, 1)]);

        let b = ResonantSet::new(-1, 2).unwrap();
        let got = same_side_completion(&b, [7, 7, -1], 1).unwrap();
        // window search oracle
        let (s, q) = (7 + 7 - 1 - 1, 49 + 49 + 1 - 1);
        let mut oracle = Vec::new();
        for p1 in -2 * s.max(1)..=2 * s.max(1) {
            let p2 = s - p1;
            if p1 <= p2 && p1 * p1 + p2 * p2 == q {
                oracle.push((p1, p2));
            }
        }
        assert_eq!(got, oracle);
        assert!(got.iter().all(|(p1, p2)| b.contains(*p1) && b.contains(*p2)));

        assert!(same_side_completion(&a, [0, 1, 1], 1).is_err());
    }

    #[test]
    fn partner_table_rows() {
        let r = PartnerRow::new([4, 4, 0, 0]);
        assert_eq!((r.v, r.u), (32, 8));
        assert_eq!(r.q2, Some(Rational64::from_integer(6)));
        assert_eq!(r.q1, Some(Rational64::from_integer(-2)));
        let r = PartnerRow::new([4, 4, 0, 1]);
        assert_eq!(r.q2, Some(Rational64::new(40, 7)));
        assert_eq!(r.q1, Some(Rational64::new(-9, 7)));
        let r = PartnerRow::new([4, 0, 3, 1]);
        assert_eq!((r.v, r.u, r.q2), (6, 0, None));
        assert_eq!(&r.label(), b"4031");
    }

    #[test]
    fn external_pairs_first_example() {
        let a = ResonantSet::new(-2, 1).unwrap();
        let got: Vec<ResonanceTuple> = external_pairs(&a).iter().map(|p| p.tuple().sides_sorted()).collect();
        let want: Vec<ResonanceTuple> = [([2, 2, -4], [-2, -2, 4]), ([2, 1, -3], [-2, -1, 3])]
            .into_iter()
            .map(|(j, l)| ResonanceTuple::new(j, l).sides_sorted())
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn external_pairs_second_example() {
        let a = ResonantSet::new(-1, 2).unwrap();
        let got: BTreeSet<ResonanceTuple> = external_pairs(&a).iter().map(|p| p.tuple().canonical()).collect();
        let want: BTreeSet<ResonanceTuple> = [
            [7, 7, -5, -1, -1, 11],
            [7, 7, -2, 1, 1, 10],
            [7, 7, 4, 5, 5, 8],
            [7, 5, -3, -1, 1, 9],
            [7, -1, 4, 1, 1, 8],
            [7, -1, 2, 5, 5, -2],
            [5, 5, -4, -1, -1, 8],
            [1, 1, -2, -1, -1, 2],
        ]
        .into_iter()
        .map(|a| ResonanceTuple::from_array(a).canonical())
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn external_pair_invariants() {
        for n in -6..=6 {
            for k in (-4..=4).filter(|k| *k != 0) {
                let a = ResonantSet::new(n, k).unwrap();
                for p in external_pairs(&a) {
                    let t = p.tuple();
                    assert!(t.is_resonance(), "{t}");
                    assert!(!a.contains(p.p1) && !a.contains(p.p2));
                    assert_ne!(p.p1, p.p2);
                    assert!([p.j1, p.j2, p.l1, p.l2].iter().all(|m| a.contains(*m)));
                }
            }
        }
    }

    #[test]
    fn sobolev_coefficient_examples() {
        let a = ResonantSet::new(-1, 1).unwrap();
        assert_eq!(sobolev_coefficient(&a, 0.0), 0.0);
        assert!(sobolev_coefficient(&a, 1.0).abs() < 1e-12);
        // modes (a2, a1, b2, b1) = (-1, 2, 3, 0): 2·256 + 1 - 0 - 6561
        let direct = 2.0 * 256.0 + 1.0 - 2.0 * 0.0 - 6561.0;
        assert_eq!(sobolev_coefficient(&a, 4.0), direct);
    }

    #[test]
    fn canonical_set_parametrisation() {
        let a = ResonantSet::new(2, -1).unwrap();
        let c = a.canonical();
        assert_eq!(c.k(), 1);
        let mut x = a.modes();
        let mut y = c.modes();
        x.sort_unstable();
        y.sort_unstable();
        assert_eq!(x, y);
        assert!(ResonantSet::new(3, 0).is_err());
    }
}
