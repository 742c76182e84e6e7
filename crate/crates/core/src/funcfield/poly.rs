//! Dense univariate polynomials over Q, the coefficient layer for the
//! rational function field.

use crate::arith::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// coeffs[i] is the coefficient of t^i; no trailing zeros; zero is the empty
/// list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn t() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, with deg 0 for constants; undefined (None) for the zero poly.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// Some(k) when this is a single term c·t^k with c ≠ 0.
    fn monomial_degree(&self) -> Option<usize> {
        let d = self.degree()?;
        if self.coeffs[..d].iter().all(Zero::is_zero) {
            Some(d)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division: self = q·div + r with deg r < deg div.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let dd = div.degree().unwrap();
        let lead_inv = div.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] * &lead_inv;
            for j in 0..dd {
                let sub = &q * &div.coeffs[j];
                rem[i - dd + j] -= sub;
            }
            rem[i] = Rational::zero();
            quot[i - dd] = q;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Exact division multiplicity: the largest k with div^k | self.
    pub fn multiplicity_of(&self, div: &Poly) -> u32 {
        debug_assert!(!self.is_zero());
        let mut count = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.divrem(div);
            if !r.is_zero() {
                return count;
            }
            count += 1;
            cur = q;
        }
    }

    /// Monic gcd via the primitive pseudo-remainder sequence over Z. Plain
    /// monic Euclid over Q blows up the coefficient sizes quadratically along
    /// the remainder chain; stripping integer content at every step keeps
    /// them minimal.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        // monomial fast path: gcd(f, c·t^k) = t^{min(k, ord₀ f)}
        for (m, f) in [(self, other), (other, self)] {
            if let Some(k) = m.monomial_degree() {
                let ord = f.coeffs.iter().position(|c| !Zero::is_zero(c)).unwrap();
                return Poly::monomial(Rational::one(), k.min(ord));
            }
        }
        let (mut a, _) = self.primitive_integer_parts();
        let (mut b, _) = other.primitive_integer_parts();
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = primitive_part(pseudo_rem(&a, &b));
            a = b;
            b = r;
        }
        Poly::new(a.into_iter().map(Rational::from_integer).collect()).monic()
    }

    fn monic_or_zero(self) -> Poly {
        match self.leading() {
            None => self,
            Some(l) if l.is_one() => self,
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn monic(&self) -> Poly {
        self.clone().monic_or_zero()
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
            .collect();
        Poly::new(out)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Clear denominators and divide out integer content: the primitive
    /// integer polynomial c·self with c > 0, plus the factor c.
    pub fn primitive_integer_parts(&self) -> (Vec<BigInt>, Rational) {
        assert!(!self.is_zero());
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            let d = c.denom();
            let g = num_integer::Integer::gcd(&den_lcm, d);
            den_lcm = den_lcm / g * d;
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = num_integer::Integer::gcd(&content, c);
        }
        if ints.last().unwrap().is_negative() {
            content = -content;
        }
        let prim: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();
        // self = (content/den_lcm)·prim
        let scalar = Rational::new(content, den_lcm);
        (prim, scalar)
    }
}

/// lc(b)^{deg a − deg b + 1}·a mod b, computed fraction-free over Z.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    debug_assert!(!b.is_empty());
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    let mut r: Vec<BigInt> = a.to_vec();
    while r.len() > db {
        if r.last().is_some_and(Zero::is_zero) {
            r.pop();
            continue;
        }
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            let v = &r[shift + j] - &lr * bj;
            r[shift + j] = v;
        }
        debug_assert!(r.last().unwrap().is_zero());
        r.pop();
    }
    r
}

/// Divide out the integer content, normalizing the sign of the leading
/// coefficient to positive. Empty input stays empty.
fn primitive_part(v: Vec<BigInt>) -> Vec<BigInt> {
    let mut trimmed = v;
    while trimmed.last().is_some_and(Zero::is_zero) {
        trimmed.pop();
    }
    if trimmed.is_empty() {
        return trimmed;
    }
    let mut content = BigInt::zero();
    for c in &trimmed {
        content = num_integer::Integer::gcd(&content, c);
    }
    if trimmed.last().unwrap().is_negative() {
        content = -content;
    }
    trimmed.iter().map(|c| c / &content).collect()
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
