//! The scalar interface the map machinery is generic over, with
//! implementations for Q and for prime fields F_p. The rational function
//! field Q(t) implements it in [`crate::funcfield`].

use crate::arith::{mul_mod_u64, pow_mod_u64, Rational};
use num_traits::{One, Zero};

/// Exact field arithmetic: addition, multiplication, exact equality,
/// inversion. Identities are derived from an existing element because some
/// fields (F_p) carry runtime context that a bare associated function could
/// not supply.
pub trait Field: Clone + PartialEq + std::fmt::Debug + std::fmt::Display {
    /// The additive identity of this element's field.
    fn zero_like(&self) -> Self;
    /// The multiplicative identity of this element's field.
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; None at zero.
    fn inv(&self) -> Option<Self>;

    /// n·1 in this element's field, by double-and-add. Needed for derivative
    /// coefficients and small integer constants.
    fn small(&self, n: u64) -> Self {
        let mut acc = self.zero_like();
        let mut power = self.one_like();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.add(&power);
            }
            power = power.add(&power);
            k >>= 1;
        }
        acc
    }
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Zero::zero()
    }
    fn one_like(&self) -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn small(&self, n: u64) -> Self {
        Rational::from_integer(n.into())
    }
}

/// An element of F_p, stored as its canonical representative in [0, p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    pub value: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(value: i64, p: u64) -> Self {
        let v = value.rem_euclid(p as i64) as u64;
        Fp { value: v, p }
    }

    pub fn from_residue(value: u64, p: u64) -> Self {
        Fp { value: value % p, p }
    }

    pub fn pow(&self, e: u64) -> Self {
        Fp { value: pow_mod_u64(self.value, e, self.p), p: self.p }
    }
}

impl std::fmt::Display for Fp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Field for Fp {
    fn zero_like(&self) -> Self {
        Fp { value: 0, p: self.p }
    }
    fn one_like(&self) -> Self {
        Fp { value: 1 % self.p, p: self.p }
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let mut v = self.value + other.value;
        if v >= self.p {
            v -= self.p;
        }
        Fp { value: v, p: self.p }
    }
    fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let v = if self.value >= other.value {
            self.value - other.value
        } else {
            self.value + self.p - other.value
        };
        Fp { value: v, p: self.p }
    }
    fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        Fp { value: mul_mod_u64(self.value, other.value, self.p), p: self.p }
    }
    fn neg(&self) -> Self {
        Fp { value: if self.value == 0 { 0 } else { self.p - self.value }, p: self.p }
    }
    fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            // p prime, so Fermat
            Some(self.pow(self.p - 2))
        }
    }
    fn small(&self, n: u64) -> Self {
        Fp { value: n % self.p, p: self.p }
    }
}
