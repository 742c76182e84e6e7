//! Polynomial factorization over Q: squarefree reduction, distinct/equal
//! degree splitting mod p, quadratic Hensel lifting, and Mignotte-bounded
//! subset recombination. This discovers the finite places of Q(t) behind
//! coefficient and coordinate denominators.

use super::poly::Poly;
use crate::arith::Rational;
use num_bigint::{BigInt, BigUint};
use num_traits::{Euclid, One, Signed, ToPrimitive, Zero};

/// Factor a nonzero polynomial over Q as unit · Π q_i^{e_i} with the q_i
/// monic irreducible. The unit collects the leading coefficient.
pub fn factor(p: &Poly) -> (Rational, Vec<(Poly, u32)>) {
    assert!(!p.is_zero(), "cannot factor the zero polynomial");
    let unit = p.leading().unwrap().clone();
    let monic = p.monic();
    if monic.is_constant() {
        return (unit, Vec::new());
    }
    // distinct irreducible factors, each once, from f / gcd(f, f′)
    let squarefree = {
        let g = monic.gcd(&monic.derivative());
        monic.divrem(&g).0.monic()
    };
    let mut out = Vec::new();
    for q in factor_squarefree(&squarefree) {
        let e = monic.multiplicity_of(&q);
        debug_assert!(e >= 1);
        out.push((q, e));
    }
    out.sort_by(|a, b| (a.0.degree(), a.0.coeffs()).cmp(&(b.0.degree(), b.0.coeffs())));
    (unit, out)
}

/// Whether a monic polynomial of degree ≥ 1 is irreducible over Q.
pub fn is_irreducible(p: &Poly) -> bool {
    if p.is_constant() {
        return false;
    }
    let (_, factors) = factor(p);
    factors.len() == 1 && factors[0].1 == 1 && factors[0].0 == p.monic()
}

/// Monic irreducible factors of a monic squarefree polynomial.
fn factor_squarefree(sf: &Poly) -> Vec<Poly> {
    let deg = sf.degree().unwrap();
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![sf.clone()];
    }
    let (prim, _) = sf.primitive_integer_parts();
    let factors_z = zassenhaus(&prim);
    let mut out: Vec<Poly> = factors_z
        .iter()
        .map(|f| Poly::new(f.iter().map(|c| Rational::from_integer(c.clone())).collect()).monic())
        .collect();
    debug_assert_eq!(
        out.iter().fold(Poly::one(), |acc, q| acc.mul(q)),
        sf.clone(),
        "factor product mismatch"
    );
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// F_p[x] arithmetic on u64 coefficient vectors (little-endian, trimmed)

type FpPoly = Vec<u64>;

fn fp_trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + (x as u128 * y as u128 % p as u128) as u64) % p;
        }
    }
    fp_trim(out)
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> FpPoly {
    debug_assert!(!m.is_empty());
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = mod_inv(*m.last().unwrap(), p);
    while r.len() > dm {
        let c = (*r.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                let sub = (c as u128 * mj as u128 % p as u128) as u64;
                let idx = shift + j;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        r = fp_trim(r);
        if r.len() <= dm {
            break;
        }
    }
    fp_trim(r)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut a = fp_monic(a.to_vec(), p);
    let mut b = fp_monic(b.to_vec(), p);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = fp_monic(r, p);
    }
    a
}

fn fp_monic(a: FpPoly, p: u64) -> FpPoly {
    match a.last() {
        None | Some(1) => a,
        Some(&l) => {
            let inv = mod_inv(l, p);
            a.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect()
        }
    }
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    fp_trim(out)
}

fn fp_derivative(a: &[u64], p: u64) -> FpPoly {
    if a.len() <= 1 {
        return Vec::new();
    }
    fp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (c as u128 * (i as u64 % p) as u128 % p as u128) as u64)
            .collect(),
    )
}

fn mod_inv(a: u64, p: u64) -> u64 {
    crate::arith::pow_mod_u64(a, p - 2, p)
}

/// base^e mod m in F_p[x], exponent as a big natural.
fn fp_powmod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> FpPoly {
    let mut acc = vec![1u64];
    let mut b = fp_rem(base, m, p);
    for i in 0..e.bits() {
        if e.bit(i) {
            acc = fp_rem(&fp_mul(&acc, &b, p), m, p);
        }
        b = fp_rem(&fp_mul(&b, &b, p), m, p);
    }
    acc
}

/// Distinct-degree then equal-degree factorization of a monic squarefree
/// polynomial mod p. Randomness is a fixed-seed xorshift, so runs are
/// reproducible.
fn fp_factor_squarefree(f: &[u64], p: u64) -> Vec<FpPoly> {
    let mut out = Vec::new();
    let mut remaining = fp_monic(f.to_vec(), p);
    let mut h = vec![0u64, 1]; // x
    let mut d = 0usize;
    while remaining.len() > 1 {
        d += 1;
        if 2 * d + 1 > remaining.len() {
            out.push(remaining);
            break;
        }
        h = fp_powmod(&h, &BigUint::from(p), &remaining, p);
        let split = fp_gcd(&fp_sub(&h, &[0, 1], p), &remaining, p);
        if split.len() > 1 {
            let mut rng = 0x9e3779b97f4a7c15u64 ^ (p << 8) ^ (d as u64);
            equal_degree_split(&split, d, p, &mut rng, &mut out);
            remaining = fp_monic(fp_div_exact(&remaining, &split, p), p);
            h = fp_rem(&h, &remaining, p);
        }
    }
    out.sort();
    out
}

fn fp_div_exact(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    // long division, remainder known to vanish
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = mod_inv(*b.last().unwrap(), p);
    let mut q = vec![0u64; a.len() - db];
    for i in (db..r.len()).rev() {
        let c = (r[i] as u128 * lead_inv as u128 % p as u128) as u64;
        q[i - db] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                let sub = (c as u128 * bj as u128 % p as u128) as u64;
                r[i - db + j] = (r[i - db + j] + p - sub) % p;
            }
        }
    }
    debug_assert!(fp_trim(r).is_empty());
    fp_trim(q)
}

fn xorshift(state: &mut u64) -> u64 {
    let mut x = *state;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    *state = x;
    x
}

/// Cantor–Zassenhaus: split a product of irreducibles all of degree d.
fn equal_degree_split(f: &[u64], d: usize, p: u64, rng: &mut u64, out: &mut Vec<FpPoly>) {
    let n = f.len() - 1;
    if n == d {
        out.push(fp_monic(f.to_vec(), p));
        return;
    }
    let exponent = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a: FpPoly = fp_trim((0..n).map(|_| xorshift(rng) % p).collect());
        if a.len() < 2 {
            continue;
        }
        let g = fp_gcd(&a, f, p);
        if g.len() > 1 && g.len() - 1 < n {
            equal_degree_split(&g, d, p, rng, out);
            equal_degree_split(&fp_div_exact(f, &g, p), d, p, rng, out);
            return;
        }
        let b = fp_powmod(&a, &exponent, f, p);
        let g = fp_gcd(&fp_sub(&b, &[1], p), f, p);
        if g.len() > 1 && g.len() - 1 < n {
            equal_degree_split(&g, d, p, rng, out);
            equal_degree_split(&fp_div_exact(f, &g, p), d, p, rng, out);
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Z/p^k[x] arithmetic on BigInt coefficient vectors, reduced to [0, m)

type ZpPoly = Vec<BigInt>;

fn zp_trim(mut a: ZpPoly) -> ZpPoly {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

fn zp_reduce(a: &[BigInt], m: &BigInt) -> ZpPoly {
    zp_trim(a.iter().map(|c| c.rem_euclid(m)).collect())
}

fn zp_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    zp_reduce(&out, m)
}

fn zp_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZpPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out.push((x + y).rem_euclid(m));
    }
    zp_trim(out)
}

fn zp_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZpPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out.push((x - y).rem_euclid(m));
    }
    zp_trim(out)
}

/// Division by a monic divisor mod m.
fn zp_divrem(a: &[BigInt], div: &[BigInt], m: &BigInt) -> (ZpPoly, ZpPoly) {
    debug_assert!(div.last().is_some_and(One::is_one), "divisor must be monic");
    let dd = div.len() - 1;
    let mut r: Vec<BigInt> = a.to_vec();
    if r.len() <= dd {
        return (Vec::new(), zp_trim(r));
    }
    let mut q = vec![BigInt::zero(); r.len() - dd];
    for i in (dd..r.len()).rev() {
        let c = r[i].clone();
        if !c.is_zero() {
            q[i - dd] = c.clone();
            for (j, dj) in div.iter().enumerate() {
                let v = (&r[i - dd + j] - &c * dj).rem_euclid(m);
                r[i - dd + j] = v;
            }
        }
        r.truncate(i);
    }
    (zp_trim(q), zp_trim(r))
}

// ---------------------------------------------------------------------------
// Hensel lifting

/// Extended gcd in F_p[x]: returns (s, t) with s·a + t·b = 1 for coprime a, b.
fn fp_xgcd(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        r0 = r1;
        r1 = r;
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        s0 = s1;
        s1 = s2;
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        t0 = t1;
        t1 = t2;
    }
    debug_assert_eq!(r0.len(), 1, "inputs were not coprime");
    let inv = mod_inv(r0[0], p);
    let scale = |v: FpPoly| -> FpPoly {
        v.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect()
    };
    (scale(s0), scale(t0))
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let db = b.len() - 1;
    if a.len() <= db {
        return (Vec::new(), a.to_vec());
    }
    let mut r = a.to_vec();
    let lead_inv = mod_inv(*b.last().unwrap(), p);
    let mut q = vec![0u64; a.len() - db];
    for i in (db..r.len()).rev() {
        let c = (r[i] as u128 * lead_inv as u128 % p as u128) as u64;
        q[i - db] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                let sub = (c as u128 * bj as u128 % p as u128) as u64;
                r[i - db + j] = (r[i - db + j] + p - sub) % p;
            }
        }
        r.truncate(i);
    }
    (fp_trim(q), fp_trim(r))
}

fn u64s_to_big(a: &[u64]) -> ZpPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// One quadratic Hensel step: from f ≡ g·h (mod m), s·g + t·h ≡ 1 (mod m)
/// with h monic, to the same congruences mod m².
#[allow(clippy::too_many_arguments)]
fn hensel_step(
    f: &[BigInt],
    g: &mut ZpPoly,
    h: &mut ZpPoly,
    s: &mut ZpPoly,
    t: &mut ZpPoly,
    m: &BigInt,
) {
    let m2 = m * m;
    let e = zp_sub(&zp_reduce(f, &m2), &zp_mul(g, h, &m2), &m2);
    let (q, r) = zp_divrem(&zp_mul(s, &e, &m2), h, &m2);
    let g_new = zp_add(&zp_add(g, &zp_mul(t, &e, &m2), &m2), &zp_mul(&q, g, &m2), &m2);
    let h_new = zp_add(h, &r, &m2);
    let b = zp_sub(
        &zp_add(&zp_mul(s, &g_new, &m2), &zp_mul(t, &h_new, &m2), &m2),
        &[BigInt::one()],
        &m2,
    );
    let (c, d) = zp_divrem(&zp_mul(s, &b, &m2), &h_new, &m2);
    let s_new = zp_sub(s, &d, &m2);
    let t_new = zp_sub(&zp_sub(t, &zp_mul(t, &b, &m2), &m2), &zp_mul(&c, &g_new, &m2), &m2);
    *g = g_new;
    *h = h_new;
    *s = s_new;
    *t = t_new;
}

/// Lift the factorization f ≡ Π factors (mod p) to mod p^{2^j} ≥ target,
/// by a balanced product tree. f and all factors are monic.
fn hensel_lift_tree(f: &[BigInt], factors: &[FpPoly], p: u64, target: &BigInt) -> Vec<ZpPoly> {
    if factors.len() == 1 {
        let mut m = BigInt::from(p);
        while &m < target {
            m = &m * &m;
        }
        return vec![zp_reduce(f, &m)];
    }
    let (left, right) = factors.split_at(factors.len() / 2);
    let g0 = left.iter().fold(vec![1u64], |acc, q| fp_mul(&acc, q, p));
    let h0 = right.iter().fold(vec![1u64], |acc, q| fp_mul(&acc, q, p));
    let (s0, t0) = fp_xgcd(&g0, &h0, p);

    let mut m = BigInt::from(p);
    let mut g = u64s_to_big(&g0);
    let mut h = u64s_to_big(&h0);
    let mut s = u64s_to_big(&s0);
    let mut t = u64s_to_big(&t0);
    while &m < target {
        hensel_step(f, &mut g, &mut h, &mut s, &mut t, &m);
        m = &m * &m;
    }
    let mut out = hensel_lift_tree(&g, left, p, target);
    out.extend(hensel_lift_tree(&h, right, p, target));
    out
}

// ---------------------------------------------------------------------------
// Zassenhaus driver

/// Coefficient bound for monic divisors of a monic integer polynomial:
/// 2^n·sqrt(n+1)·max|coeff|.
fn mignotte_bound(f: &[BigInt]) -> BigInt {
    let n = f.len() - 1;
    let height = f.iter().map(|c| c.abs()).max().unwrap();
    let sqrt_n1 = BigInt::from(((n as f64 + 1.0).sqrt().ceil()) as u64 + 1);
    (BigInt::one() << n) * sqrt_n1 * height
}

fn balanced(c: &BigInt, m: &BigInt) -> BigInt {
    let half = m / 2;
    if c > &half {
        c - m
    } else {
        c.clone()
    }
}

/// Exact division of integer polynomials by a monic divisor, when it divides.
fn z_div_exact(a: &[BigInt], div: &[BigInt]) -> Option<Vec<BigInt>> {
    let dd = div.len() - 1;
    if a.len() <= dd {
        return None;
    }
    let mut r: Vec<BigInt> = a.to_vec();
    let mut q = vec![BigInt::zero(); r.len() - dd];
    for i in (dd..r.len()).rev() {
        let c = r[i].clone();
        q[i - dd] = c.clone();
        if !c.is_zero() {
            for (j, dj) in div.iter().enumerate() {
                let v = &r[i - dd + j] - &c * dj;
                r[i - dd + j] = v;
            }
        }
        r.truncate(i);
    }
    if r.iter().all(Zero::is_zero) {
        Some(q)
    } else {
        None
    }
}

/// Factor a squarefree primitive integer polynomial of degree ≥ 2 into
/// irreducible integer polynomials (monic up to the leading coefficient of
/// the input).
fn zassenhaus(prim: &[BigInt]) -> Vec<Vec<BigInt>> {
    let lc = prim.last().unwrap().clone();
    // monicize: g(x) = lc^{n−1}·f(x/lc) keeps integer coefficients
    let n = prim.len() - 1;
    let g: Vec<BigInt> = prim
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == n {
                BigInt::one()
            } else {
                c * lc.pow((n - 1 - i) as u32)
            }
        })
        .collect();

    // choose the prime with the fewest modular factors among a few usable ones
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    let mut p = 3u64;
    while tried < 4 {
        if crate::arith::is_prime_u64(p) {
            let fp: FpPoly = fp_trim(
                g.iter().map(|c| c.rem_euclid(&BigInt::from(p)).to_u64().unwrap()).collect(),
            );
            if fp.len() == g.len() {
                let deriv = fp_derivative(&fp, p);
                if !deriv.is_empty() && fp_gcd(&fp, &deriv, p).len() == 1 {
                    let factors = fp_factor_squarefree(&fp, p);
                    let better = best.as_ref().is_none_or(|(_, b)| factors.len() < b.len());
                    if better {
                        best = Some((p, factors));
                    }
                    tried += 1;
                }
            }
        }
        p += 2;
        assert!(p < 10_000, "no usable prime found for a squarefree polynomial");
    }
    let (p, modular) = best.unwrap();
    if modular.len() == 1 {
        return vec![prim.to_vec()];
    }

    let bound = mignotte_bound(&g);
    let target = BigInt::from(2) * &bound + 1;
    let lifted = hensel_lift_tree(&g, &modular, p, &target);
    let mut modulus = BigInt::from(p);
    while modulus < target {
        modulus = &modulus * &modulus;
    }

    // subset recombination over the lifted factors
    let mut remaining_g = g;
    let mut pool: Vec<ZpPoly> = lifted;
    let mut found_monic: Vec<Vec<BigInt>> = Vec::new();
    let mut size = 1usize;
    while 2 * size <= pool.len() {
        let mut advanced = false;
        for combo in combinations(pool.len(), size) {
            let prod = combo
                .iter()
                .fold(vec![BigInt::one()], |acc, &i| zp_mul(&acc, &pool[i], &modulus));
            let candidate: Vec<BigInt> = prod.iter().map(|c| balanced(c, &modulus)).collect();
            if let Some(q) = z_div_exact(&remaining_g, &candidate) {
                found_monic.push(candidate);
                remaining_g = q;
                let keep: Vec<ZpPoly> = pool
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !combo.contains(i))
                    .map(|(_, f)| f.clone())
                    .collect();
                pool = keep;
                advanced = true;
                break;
            }
        }
        if !advanced {
            size += 1;
        }
    }
    if remaining_g.len() > 1 {
        found_monic.push(remaining_g);
    }

    // map factors of the monicized polynomial back: h(x) ↦ primitive h(lc·x)
    found_monic
        .iter()
        .map(|h| {
            let rational = Poly::new(
                h.iter()
                    .enumerate()
                    .map(|(i, c)| Rational::from_integer(c * lc.pow(i as u32)))
                    .collect(),
            );
            let (prim_back, _) = rational.primitive_integer_parts();
            prim_back
        })
        .collect()
}

/// All size-k index subsets of 0..n, lexicographic.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(combo.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}
