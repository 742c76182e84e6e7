//! Reduction of quadratic Hénon maps mod p, full cycle decomposition of the
//! induced permutation of A²(F_p), multiplier orders in GL₂(F_p), and the
//! period filter set S(b, p).
//!
//! The filter rests on a local-to-global fact: a Q-rational point of period N
//! reduces mod a good prime p ≥ 5 to a point of some period M with N = eM for
//! a divisor e of the order of the reduced cycle's multiplier. The union of
//! those products over all cycles of the reduced map is a finite superset of
//! every possible rational period.

use crate::arith::{factor_u64, padic_valuation, Rational, Valuation};
use crate::field::{Field, Fp};
use crate::map::{HenonMap, Matrix2, PlanePoint};
use num_traits::ToPrimitive;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModpError {
    #[error("matrix is singular mod p")]
    Singular,
}

/// Why a prime cannot be used for filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BadPrime {
    /// p < 5; the local-to-global argument needs p ≥ 5.
    TooSmall,
    /// v_p(b) < 0, so the map does not reduce.
    NegativeValuation,
}

/// The quadratic family reduced mod p: (x, y) ↦ (y, x + y² + b̃) on A²(F_p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpHenonMap {
    pub p: u64,
    pub b: u64,
}

impl FpHenonMap {
    #[inline]
    pub fn apply(&self, x: u64, y: u64) -> (u64, u64) {
        let p = self.p as u128;
        let fy = ((y as u128 * y as u128 + self.b as u128) % p) as u64;
        (y, (x + fy) % self.p)
    }

    pub fn as_generic(&self) -> HenonMap<Fp> {
        HenonMap::quadratic(Fp::from_residue(self.b, self.p))
    }
}

/// One cycle of the reduced map: its length, the first point found on it, and
/// the order of its multiplier in GL₂(F_p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleData {
    pub length: u64,
    pub representative: (u64, u64),
    pub multiplier_order: u64,
}

/// A finite superset of the possible rational periods, or no information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodSet {
    Allowed(BTreeSet<u64>),
    /// Reduction preconditions failed; every period remains possible.
    Unfiltered,
}

impl PeriodSet {
    pub fn is_subset_of(&self, allowed: &BTreeSet<u64>) -> bool {
        match self {
            PeriodSet::Allowed(s) => s.is_subset(allowed),
            PeriodSet::Unfiltered => false,
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            PeriodSet::Allowed(s) => s.contains(&n),
            PeriodSet::Unfiltered => true,
        }
    }
}

/// Reduce φ(x, y) = (y, x + y² + b) mod p. Requires p ≥ 5 and v_p(b) ≥ 0.
pub fn reduce_map(b: &Rational, p: u64) -> Result<FpHenonMap, BadPrime> {
    if p < 5 {
        return Err(BadPrime::TooSmall);
    }
    match padic_valuation(b, p) {
        Valuation::Finite(v) if v < 0 => Err(BadPrime::NegativeValuation),
        _ => {
            let residue = |n: &num_bigint::BigInt| -> u64 {
                let r = n % p as i64;
                (r.to_i64().unwrap()).rem_euclid(p as i64) as u64
            };
            let num = Fp { value: residue(b.numer()), p };
            let den = Fp { value: residue(b.denom()), p };
            let b_mod = num.mul(&den.inv().expect("v_p(b) ≥ 0 makes the denominator a unit"));
            Ok(FpHenonMap { p, b: b_mod.value })
        }
    }
}

/// Full cycle decomposition of the permutation induced on A²(F_p).
///
/// The reduced map is a bijection, so every point lies on a cycle; a visited
/// bitmap of p² bits and one forward walk per unvisited point gives all
/// cycles in O(p²) map evaluations. The multiplier is evaluated once per
/// cycle at the stored representative; conjugacy invariance of its order
/// makes the base point immaterial.
pub fn cycle_decomposition(map: &FpHenonMap) -> Vec<CycleData> {
    let p = map.p;
    let n = (p * p) as usize;
    let mut visited = vec![0u64; n.div_ceil(64)];
    let mut out = Vec::new();
    for start in 0..n {
        if visited[start / 64] >> (start % 64) & 1 == 1 {
            continue;
        }
        let (sx, sy) = (start as u64 / p, start as u64 % p);
        let mut len = 0u64;
        let (mut x, mut y) = (sx, sy);
        // walk the cycle, accumulating the multiplier Λ = J(P_{M−1})·…·J(P₀)
        let witness = Fp { value: 0, p };
        let mut lambda = Matrix2::identity_like(&witness);
        loop {
            let i = (x * p + y) as usize;
            visited[i / 64] |= 1 << (i % 64);
            len += 1;
            lambda = jacobian_mod_p(map, y).mul(&lambda);
            let next = map.apply(x, y);
            x = next.0;
            y = next.1;
            if (x, y) == (sx, sy) {
                break;
            }
        }
        let order = matrix_order(&lambda, p).expect("det J = −1 is a unit");
        out.push(CycleData { length: len, representative: (sx, sy), multiplier_order: order });
    }
    debug_assert_eq!(out.iter().map(|c| c.length).sum::<u64>(), p * p);
    out
}

/// Jacobian of the reduced quadratic map at a point with ordinate y:
/// [[0, 1], [1, 2y]].
fn jacobian_mod_p(map: &FpHenonMap, y: u64) -> Matrix2<Fp> {
    let p = map.p;
    Matrix2 {
        m11: Fp { value: 0, p },
        m12: Fp { value: 1, p },
        m21: Fp { value: 1, p },
        m22: Fp { value: ((y as u128 * 2) % p as u128) as u64, p },
    }
}

/// Least r ≥ 1 with M^r = I in GL₂(F_p).
///
/// Every element order divides p(p−1)(p+1): split semisimple orders divide
/// p−1, non-split semisimple orders divide p²−1, and unipotent parts
/// contribute the single factor p. Factor that exponent and descend prime by
/// prime.
pub fn matrix_order(m: &Matrix2<Fp>, p: u64) -> Result<u64, ModpError> {
    if m.det().is_zero() {
        return Err(ModpError::Singular);
    }
    let mut order = p * (p - 1) * (p + 1);
    debug_assert!(m.pow(order).is_identity());
    let mut factors: Vec<u64> = factor_u64(p)
        .into_iter()
        .chain(factor_u64(p - 1))
        .chain(factor_u64(p + 1))
        .map(|(q, _)| q)
        .collect();
    factors.sort_unstable();
    factors.dedup();
    for q in factors {
        while order % q == 0 && m.pow(order / q).is_identity() {
            order /= q;
        }
    }
    Ok(order)
}

/// All divisors of n, unsorted.
fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (q, e) in factor_u64(n) {
        let cur = out.clone();
        let mut qk = 1u64;
        for _ in 0..e {
            qk *= q;
            out.extend(cur.iter().map(|d| d * qk));
        }
    }
    out
}

/// The period filter S(b, p): every possible period of a Q-rational periodic
/// point of φ_b, computed from the mod-p cycle structure as
/// ∪_{cycles} { M·e : e divides the multiplier order }.
pub fn period_filter_set(b: &Rational, p: u64) -> PeriodSet {
    let map = match reduce_map(b, p) {
        Ok(m) => m,
        Err(_) => return PeriodSet::Unfiltered,
    };
    let mut allowed = BTreeSet::new();
    for cycle in cycle_decomposition(&map) {
        for e in divisors(cycle.multiplier_order) {
            allowed.insert(cycle.length * e);
        }
    }
    PeriodSet::Allowed(allowed)
}

/// Intersection of the filters over the primes with good reduction.
/// Unfiltered when none of them reduce.
pub fn intersect_filters(b: &Rational, primes: &[u64]) -> PeriodSet {
    let mut acc: Option<BTreeSet<u64>> = None;
    for &p in primes {
        if let PeriodSet::Allowed(s) = period_filter_set(b, p) {
            acc = Some(match acc {
                None => s,
                Some(prev) => prev.intersection(&s).copied().collect(),
            });
        }
    }
    match acc {
        Some(s) => PeriodSet::Allowed(s),
        None => PeriodSet::Unfiltered,
    }
}

/// First `count` primes ≥ 5 at which b has good reduction.
pub fn default_filter_primes(b: &Rational, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = 5u64;
    while out.len() < count {
        if crate::arith::is_prime_u64(p) && reduce_map(b, p).is_ok() {
            out.push(p);
        }
        p += 2;
    }
    out
}

/// Multiplier of a cycle of the reduced map, through the generic machinery.
/// Used by tests to cross-check the walk-accumulated product.
pub fn cycle_multiplier(map: &FpHenonMap, representative: (u64, u64)) -> Matrix2<Fp> {
    let generic = map.as_generic();
    let start = PlanePoint::new(
        Fp::from_residue(representative.0, map.p),
        Fp::from_residue(representative.1, map.p),
    );
    let mut cycle = vec![start.clone()];
    loop {
        let next = generic.apply(cycle.last().unwrap());
        if next == start {
            break;
        }
        cycle.push(next);
    }
    generic.multiplier(&cycle).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn reduce_examples() {
        // −1/4 ≡ −1·4⁻¹ ≡ −4 ≡ 1 (mod 5)
        assert_eq!(reduce_map(&rat(-1, 4), 5), Ok(FpHenonMap { p: 5, b: 1 }));
        assert_eq!(reduce_map(&rat(-1, 4), 2), Err(BadPrime::TooSmall));
        assert_eq!(reduce_map(&rat(1, 5), 5), Err(BadPrime::NegativeValuation));
        assert_eq!(reduce_map(&rat(7, 1), 3), Err(BadPrime::TooSmall));
    }

    #[test]
    fn decomposition_covers_the_plane() {
        let map = reduce_map(&rat(0, 1), 5).unwrap();
        let cycles = cycle_decomposition(&map);
        assert_eq!(cycles.iter().map(|c| c.length).sum::<u64>(), 25);
        // the origin is fixed when b = 0
        assert!(cycles.iter().any(|c| c.length == 1 && c.representative == (0, 0)));

        let map = reduce_map(&rat(-1, 4), 5).unwrap();
        let cycles = cycle_decomposition(&map);
        assert_eq!(cycles.iter().map(|c| c.length).sum::<u64>(), 25);
        // brute-force oracle: walk every point; its cycle length must appear
        for x in 0..5u64 {
            for y in 0..5u64 {
                let (mut cx, mut cy) = map.apply(x, y);
                let mut len = 1u64;
                while (cx, cy) != (x, y) {
                    let n = map.apply(cx, cy);
                    cx = n.0;
                    cy = n.1;
                    len += 1;
                }
                assert!(cycles.iter().any(|c| c.length == len));
            }
        }
    }

    #[test]
    fn decomposition_sums_for_random_parameters() {
        let mut rng = StdRng::seed_from_u64(5);
        let primes = [5u64, 7, 11, 13, 17];
        for _ in 0..20 {
            let p = primes[rng.gen_range(0..primes.len())];
            let b = rat(rng.gen_range(-50i64..=50), rng.gen_range(1i64..=20));
            if let Ok(map) = reduce_map(&b, p) {
                let cycles = cycle_decomposition(&map);
                assert_eq!(cycles.iter().map(|c| c.length).sum::<u64>(), p * p);
                // det Λ = (−1)^M for every cycle
                for c in cycles.iter().take(6) {
                    let lambda = cycle_multiplier(&map, c.representative);
                    let expect = if c.length % 2 == 0 { 1 } else { p - 1 };
                    assert_eq!(lambda.det().value, expect);
                }
            }
        }
    }

    fn int_matrix(entries: [i64; 4], p: u64) -> Matrix2<Fp> {
        Matrix2 {
            m11: Fp::new(entries[0], p),
            m12: Fp::new(entries[1], p),
            m21: Fp::new(entries[2], p),
            m22: Fp::new(entries[3], p),
        }
    }

    #[test]
    fn matrix_order_examples() {
        // the period-2 multiplier at b = −1/4 has order 6 mod every odd prime
        for p in [5u64, 7, 11, 13] {
            let m = int_matrix([1, -1, 1, 0], p);
            assert_eq!(matrix_order(&m, p), Ok(6));
        }
        let id = int_matrix([1, 0, 0, 1], 7);
        assert_eq!(matrix_order(&id, 7), Ok(1));
        let rot = int_matrix([0, 1, -1, 0], 5);
        assert_eq!(matrix_order(&rot, 5), Ok(4));
        // repeated-multiplication oracle
        let mut acc = rot.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = acc.mul(&rot);
            k += 1;
        }
        assert_eq!(k, 4);
        let singular = int_matrix([1, 2, 2, 4], 5);
        assert_eq!(matrix_order(&singular, 5), Err(ModpError::Singular));
    }

    #[test]
    fn matrix_order_is_minimal() {
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..50 {
            let p = 13u64;
            let m = loop {
                let m = int_matrix(
                    [
                        rng.gen_range(0..p as i64),
                        rng.gen_range(0..p as i64),
                        rng.gen_range(0..p as i64),
                        rng.gen_range(0..p as i64),
                    ],
                    p,
                );
                if !m.det().is_zero() {
                    break m;
                }
            };
            let r = matrix_order(&m, p).unwrap();
            assert!(m.pow(r).is_identity());
            for (q, _) in factor_u64(r) {
                assert!(!m.pow(r / q).is_identity(), "order {r} not minimal at prime {q}");
            }
        }
    }

    #[test]
    fn filter_contains_twelve_for_minus_quarter() {
        for p in [5u64, 7, 11, 13] {
            let s = period_filter_set(&rat(-1, 4), p);
            assert!(s.contains(12), "12 missing from S(−1/4, {p})");
        }
    }

    #[test]
    fn filter_contains_one_when_origin_is_fixed() {
        let s = period_filter_set(&rat(0, 1), 5);
        assert!(s.contains(1));
    }

    #[test]
    fn intersect_examples() {
        let s = intersect_filters(&rat(-1, 4), &[5, 7, 11, 13]);
        assert!(s.contains(12));
        assert_eq!(intersect_filters(&rat(7, 2), &[]), PeriodSet::Unfiltered);
        // all supplied primes bad
        assert_eq!(intersect_filters(&rat(1, 2), &[2]), PeriodSet::Unfiltered);
        // b = −9/16: the true periods 1, 2, 8 must survive the intersection
        let s = intersect_filters(&rat(-9, 16), &[5, 7, 11, 13, 17, 19, 23, 29]);
        for n in [1u64, 2, 8] {
            assert!(s.contains(n));
        }
    }

    #[test]
    fn default_primes_skip_bad_reduction() {
        assert_eq!(default_filter_primes(&rat(-1, 4), 4), vec![5, 7, 11, 13]);
        assert_eq!(default_filter_primes(&rat(1, 5), 4), vec![7, 11, 13, 17]);
    }

    #[test]
    fn divisor_enumeration() {
        let mut d = divisors(12);
        d.sort_unstable();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
    }
}
