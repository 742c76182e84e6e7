//! Exact scalar arithmetic over Q: valuations, absolute values, Weil heights,
//! and height-ordered enumeration of rationals.
//!
//! Everything here is pure and allocation-light; real-valued outputs (heights,
//! archimedean absolute values) come out as `f64`, while anything a downstream
//! certification depends on stays in exact integers or rationals.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// The coordinate and coefficient scalar everywhere over Q.
///
/// `num_rational::BigRational` maintains the invariants we need: always
/// reduced, denominator positive, zero stored as 0/1.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime candidates above 64 bits are not supported")]
    PrimeTooLarge,
    #[error("cannot factor {0}: no prime factor below the trial-division bound and value exceeds 64 bits")]
    FactorizationOutOfRange(BigUint),
}

/// p-adic valuation, extended with +∞ at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Finite value, panicking on +∞. Callers use this after a zero check.
    pub fn unwrap_finite(&self) -> i64 {
        match self {
            Valuation::Finite(v) => *v,
            Valuation::Infinite => panic!("valuation of zero has no finite value"),
        }
    }
}

/// A place of Q: the archimedean absolute value or a p-adic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QPlace {
    Archimedean,
    Finite(u64),
}

impl QPlace {
    /// A finite place, verified prime by a deterministic Miller–Rabin test.
    /// Candidates above 64 bits are rejected outright.
    pub fn finite(p: u64) -> Result<Self, ArithError> {
        if is_prime_u64(p) {
            Ok(QPlace::Finite(p))
        } else {
            Err(ArithError::NotPrime(p))
        }
    }

    /// Local degree n_v; over Q this is 1 at every place.
    pub fn local_degree(&self) -> u32 {
        1
    }
}

impl std::fmt::Display for QPlace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QPlace::Archimedean => write!(f, "inf"),
            QPlace::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Number of times `p` divides `n` (n must be nonzero).
pub fn padic_valuation_int(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let p_big = BigInt::from(p);
    let mut v = 0u64;
    let mut cur = n.abs();
    loop {
        let (q, r) = cur.div_rem(&p_big);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        cur = q;
    }
}

/// v_p(q), with v_p(0) = +∞.
pub fn padic_valuation(q: &Rational, p: u64) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    let vn = padic_valuation_int(q.numer(), p) as i64;
    // the fraction is reduced, so at most one of numerator/denominator is divisible
    if vn > 0 {
        Valuation::Finite(vn)
    } else {
        Valuation::Finite(-(padic_valuation_int(q.denom(), p) as i64))
    }
}

/// |q|_v as a float: the usual absolute value at ∞, p^{−v_p(q)} at p.
pub fn abs_at_place(q: &Rational, v: QPlace) -> f64 {
    match v {
        QPlace::Archimedean => rational_to_f64_abs(q),
        QPlace::Finite(p) => match padic_valuation(q, p) {
            Valuation::Infinite => 0.0,
            Valuation::Finite(e) => (p as f64).powi(-(e as i32)),
        },
    }
}

/// Multiplicative height H(n/m) = max(|n|, m) for a reduced fraction.
pub fn mult_height(q: &Rational) -> BigUint {
    let n = q.numer().magnitude();
    let m = q.denom().magnitude();
    if n >= m {
        n.clone()
    } else {
        m.clone()
    }
}

/// Logarithmic Weil height h(q) = log max(|n|, m); h(0) = 0.
pub fn weil_height(q: &Rational) -> f64 {
    let h = mult_height(q);
    if h.is_one() {
        0.0
    } else {
        ln_biguint(&h)
    }
}

/// Exact integer square root: Some(s) with s² = n, or None.
pub fn integer_sqrt_exact(n: &BigUint) -> Option<BigUint> {
    let s = n.sqrt();
    if &s * &s == *n {
        Some(s)
    } else {
        None
    }
}

/// Natural log of a positive big integer, accurate to a few ulps.
///
/// Splits off the top 64 bits so the conversion to f64 never overflows:
/// ln(n) = ln(top) + (bits − 64)·ln 2.
pub fn ln_biguint(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).ln();
    }
    let top: BigUint = n >> (bits - 64);
    (top.to_u64().unwrap() as f64).ln() + ((bits - 64) as f64) * std::f64::consts::LN_2
}

/// ln|q| for a nonzero rational of arbitrary size.
pub fn ln_abs_rational(q: &Rational) -> f64 {
    debug_assert!(!q.is_zero());
    ln_biguint(q.numer().magnitude()) - ln_biguint(q.denom().magnitude())
}

/// |q| as f64 without overflowing on big numerators/denominators.
fn rational_to_f64_abs(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let n = q.numer().magnitude();
    let m = q.denom().magnitude();
    if n.bits() <= 52 && m.bits() <= 52 {
        return n.to_u64().unwrap() as f64 / m.to_u64().unwrap() as f64;
    }
    ln_abs_rational(q).exp()
}

/// Every reduced n/m with max(|n|, m) = h, ordered by (den, num).
fn rationals_of_height(h: u64, square_denominator_only: bool) -> Vec<Rational> {
    let mut out = Vec::new();
    if h == 1 {
        for n in [-1i64, 0, 1] {
            out.push(Rational::from_integer(BigInt::from(n)));
        }
        return out;
    }
    let is_square = |m: u64| {
        let s = (m as f64).sqrt().round() as u64;
        s * s == m
    };
    for den in 1..=h {
        if square_denominator_only && !is_square(den) {
            continue;
        }
        if den < h {
            // max is carried by the numerator: n = ±h
            if h.gcd(&den) == 1 {
                out.push(Rational::new(BigInt::from(-(h as i64)), BigInt::from(den)));
                out.push(Rational::new(BigInt::from(h as i64), BigInt::from(den)));
            }
        } else {
            // den = h: all |n| < h coprime to h (|n| = h would not be reduced)
            for n in -(h as i64 - 1)..=(h as i64 - 1) {
                if (n.unsigned_abs()).gcd(&h) == 1 {
                    out.push(Rational::new(BigInt::from(n), BigInt::from(h)));
                }
            }
        }
    }
    // within one height: den ascending, then num ascending
    out.sort_by(|a, b| (a.denom(), a.numer()).cmp(&(b.denom(), b.numer())));
    out
}

/// Stream of all reduced rationals with H(q) ≤ bound, each exactly once,
/// ordered by (H, den, num). With the flag set, only perfect-square
/// denominators are emitted.
pub fn enumerate_rationals(
    bound: u64,
    square_denominator_only: bool,
) -> impl Iterator<Item = Rational> {
    (1..=bound).flat_map(move |h| rationals_of_height(h, square_denominator_only))
}

/// Deterministic Miller–Rabin for u64 inputs.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is complete
/// for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Prime factorization of a u64: sorted (prime, exponent) pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some((_, e)) => *e += 1,
        None => out.push((p, 1)),
    };
    for p in [2u64, 3, 5] {
        while n % p == 0 {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut d = 7u64;
    let increments = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut idx = 0;
    while d <= 10_000 && d * d <= n {
        while n % d == 0 {
            push(d, &mut out);
            n /= d;
        }
        d += increments[idx];
        idx = (idx + 1) % increments.len();
    }
    // whatever is left has no prime factor ≤ 10^4; split it with Pollard rho
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push(m, &mut out);
            continue;
        }
        let f = pollard_rho(m);
        stack.push(f);
        stack.push(m / f);
    }
    out.sort_unstable();
    out
}

/// One nontrivial factor of an odd composite via Brent's cycle variant.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n));
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Prime factorization of a big natural number, as u64 primes.
///
/// Trial division up to 10^4, then Pollard rho once the remaining cofactor
/// fits in 64 bits. Cofactors above 64 bits with no small factor are refused
/// rather than guessed at.
pub fn factor_biguint(n: &BigUint) -> Result<Vec<(u64, u32)>, ArithError> {
    if let Some(small) = n.to_u64() {
        return Ok(factor_u64(small));
    }
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut rem = n.clone();
    let mut d = 2u64;
    let increments = [1u64, 2, 2, 4, 2, 4, 2, 4, 6, 2, 6];
    let mut idx = 0;
    while d <= 10_000 {
        let db = BigUint::from(d);
        loop {
            let (q, r) = rem.div_rem(&db);
            if !r.is_zero() {
                break;
            }
            match out.iter_mut().find(|(p, _)| *p == d) {
                Some((_, e)) => *e += 1,
                None => out.push((d, 1)),
            }
            rem = q;
        }
        if let Some(small) = rem.to_u64() {
            for (p, e) in factor_u64(small) {
                match out.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, e0)) => *e0 += e,
                    None => out.push((p, e)),
                }
            }
            out.sort_unstable();
            return Ok(out);
        }
        d += increments[idx];
        idx = if idx == increments.len() - 1 { 3 } else { idx + 1 };
    }
    Err(ArithError::FactorizationOutOfRange(rem))
}

/// Smallest integer B with B² ≥ q (q a nonnegative rational).
pub fn ceil_sqrt_rational(q: &Rational) -> BigUint {
    debug_assert!(!q.is_negative());
    if q.is_zero() {
        return BigUint::zero();
    }
    let n = q.numer().magnitude();
    let m = q.denom().magnitude();
    // floor sqrt of n/m, then bump until the square clears q
    let mut b = (n / m).sqrt();
    while &(&b * &b) * m < *n {
        b += 1u32;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&rat(-9, 16), 2), Valuation::Finite(-4));
        assert_eq!(padic_valuation(&Rational::zero(), 5), Valuation::Infinite);
        // 50/27 = 2·5² / 3³
        assert_eq!(padic_valuation(&rat(50, 27), 3), Valuation::Finite(-3));
        assert_eq!(padic_valuation(&rat(50, 27), 5), Valuation::Finite(2));
        assert_eq!(padic_valuation(&rat(50, 27), 7), Valuation::Finite(0));
    }

    /// Trial-division oracle for v_p, independent of the division-loop path.
    fn valuation_oracle(q: &Rational, p: u64) -> Valuation {
        if q.is_zero() {
            return Valuation::Infinite;
        }
        let count = |mut n: BigInt| {
            let mut v = 0i64;
            n = n.abs();
            while (&n % p).is_zero() {
                n /= p;
                v += 1;
            }
            v
        };
        Valuation::Finite(count(q.numer().clone()) - count(q.denom().clone()))
    }

    #[test]
    fn abs_examples() {
        assert_eq!(abs_at_place(&rat(-9, 16), QPlace::Archimedean), 0.5625);
        assert_eq!(abs_at_place(&rat(-9, 16), QPlace::Finite(2)), 16.0);
        assert_eq!(abs_at_place(&rat(50, 27), QPlace::Finite(3)), 27.0);
    }

    #[test]
    fn height_examples() {
        assert_eq!(mult_height(&rat(3, 1)), BigUint::from(3u32));
        assert!((weil_height(&rat(3, 1)) - 3.0f64.ln()).abs() < 1e-15);
        assert_eq!(mult_height(&rat(-9, 16)), BigUint::from(16u32));
        assert_eq!(mult_height(&Rational::zero()), BigUint::from(1u32));
        assert_eq!(weil_height(&Rational::zero()), 0.0);
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(
            integer_sqrt_exact(&BigUint::from(16u32)),
            Some(BigUint::from(4u32))
        );
        assert_eq!(integer_sqrt_exact(&BigUint::from(2u32)), None);
        assert_eq!(
            integer_sqrt_exact(&BigUint::from(1u32)),
            Some(BigUint::from(1u32))
        );
    }

    #[test]
    fn enumerate_small_heights() {
        let t1: Vec<Rational> = enumerate_rationals(1, false).collect();
        assert_eq!(t1, vec![rat(-1, 1), rat(0, 1), rat(1, 1)]);

        let t2: Vec<Rational> = enumerate_rationals(2, false).collect();
        let expected: std::collections::HashSet<Rational> =
            [rat(-2, 1), rat(-1, 1), rat(-1, 2), rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1)]
                .into_iter()
                .collect();
        assert_eq!(t2.iter().cloned().collect::<std::collections::HashSet<_>>(), expected);
        assert_eq!(t2.len(), 7);
    }

    #[test]
    fn enumerate_square_denominators() {
        let t4: Vec<Rational> = enumerate_rationals(4, true).collect();
        assert!(t4.contains(&rat(1, 4)));
        assert!(t4.contains(&rat(-1, 4)));
        assert!(t4.contains(&rat(3, 4)));
        assert!(t4.contains(&rat(-3, 4)));
        assert!(!t4.contains(&rat(-9, 16))); // H = 16 > 4
        // oracle count: dens {1, 4}; den 1: |n| ≤ 4 → 9; den 4: n ∈ {±1, ±3} → 4
        assert_eq!(t4.len(), 13);
    }

    #[test]
    fn enumerate_is_ordered_and_duplicate_free() {
        let all: Vec<Rational> = enumerate_rationals(12, false).collect();
        let mut seen = std::collections::HashSet::new();
        for q in &all {
            assert!(seen.insert(q.clone()), "duplicate {q}");
        }
        let key = |q: &Rational| {
            (
                mult_height(q).to_u64().unwrap(),
                q.denom().to_u64().unwrap(),
                q.numer().to_i64().unwrap(),
            )
        };
        for w in all.windows(2) {
            assert!(key(&w[0]) < key(&w[1]), "order violated at {} vs {}", w[0], w[1]);
        }
        // brute-force oracle: every reduced pair with max ≤ 12 shows up
        let mut count = 0u64;
        for den in 1i64..=12 {
            for num in -12i64..=12 {
                if num.unsigned_abs().gcd(&(den as u64)) == 1 {
                    count += 1;
                }
            }
        }
        assert_eq!(all.len() as u64, count);
    }

    #[test]
    fn primality_small_and_carmichael() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(5));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(25));
        assert!(QPlace::finite(4).is_err());
        assert_eq!(QPlace::finite(13), Ok(QPlace::Finite(13)));
    }

    #[test]
    fn factoring() {
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor_u64(10_000_019), vec![(10_000_019, 1)]);
        // two primes past the trial bound
        assert_eq!(
            factor_u64(1_000_003 * 1_000_033),
            vec![(1_000_003, 1), (1_000_033, 1)]
        );
        let big = BigUint::from(3u32).pow(40) * BigUint::from(5u32).pow(3);
        assert_eq!(factor_biguint(&big).unwrap(), vec![(3, 40), (5, 3)]);
    }

    #[test]
    fn ceil_sqrt_examples() {
        assert_eq!(ceil_sqrt_rational(&rat(144, 1)), BigUint::from(12u32));
        assert_eq!(ceil_sqrt_rational(&rat(45, 1)), BigUint::from(7u32));
        assert_eq!(ceil_sqrt_rational(&rat(1, 4)), BigUint::from(1u32));
    }

    #[test]
    fn ln_biguint_accuracy() {
        let n = BigUint::from(10u32).pow(50);
        assert!((ln_biguint(&n) - 50.0 * 10f64.ln()).abs() < 1e-9);
        assert_eq!(ln_biguint(&BigUint::one()), 0.0);
    }

    proptest! {
        /// Product formula, exactly: |num|/den reconstructs from the p-parts.
        #[test]
        fn product_formula_exact(n in -100_000i64..100_000, d in 1i64..100_000) {
            prop_assume!(n != 0);
            let q = rat(n, d);
            let mut primes: Vec<u64> = Vec::new();
            for (p, _) in factor_biguint(q.numer().magnitude()).unwrap() {
                primes.push(p);
            }
            for (p, _) in factor_biguint(q.denom().magnitude()).unwrap() {
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
            // Σ_v log|q|_v = 0  ⇔  |q|_∞ = Π p^{v_p(q)} as exact rationals
            let mut reconstructed = Rational::one();
            for p in primes {
                let v = padic_valuation(&q, p).unwrap_finite();
                prop_assert_eq!(Valuation::Finite(v), valuation_oracle(&q, p));
                let pk = Rational::from_integer(BigInt::from(p)).pow(v as i32);
                reconstructed *= pk;
            }
            prop_assert_eq!(reconstructed, q.abs());
        }

        /// h(q) = Σ_v log⁺|q|_v, exactly: max(|n|, m) = max(|n|, m)·1 decomposes
        /// as the denominator (finite log⁺ parts) times max(|n|/m, 1).
        #[test]
        fn height_is_sum_of_local_terms(n in -100_000i64..100_000, d in 1i64..100_000) {
            prop_assume!(n != 0);
            let q = rat(n, d);
            // finite part: Π p^{max(0, −v_p)} = den(q), exactly
            let mut finite_part = BigUint::one();
            for (p, _) in factor_biguint(q.denom().magnitude()).unwrap() {
                let v = padic_valuation(&q, p).unwrap_finite();
                prop_assert!(v < 0);
                finite_part *= BigUint::from(p).pow((-v) as u32);
            }
            prop_assert_eq!(&finite_part, q.denom().magnitude());
            // archimedean part: max(|q|, 1) = H(q)/den(q), exactly
            let arch = if q.abs() > Rational::one() { q.abs() } else { Rational::one() };
            let h_over_den = Rational::new(
                BigInt::from_biguint(num_bigint::Sign::Plus, mult_height(&q)),
                q.denom().clone(),
            );
            prop_assert_eq!(arch, h_over_den);
        }

        #[test]
        fn is_prime_matches_trial_division(n in 2u64..50_000) {
            let trial = (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            prop_assert_eq!(is_prime_u64(n), trial);
        }
    }
}
