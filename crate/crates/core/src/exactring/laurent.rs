use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::{by_value, Poly};

/// A Laurent polynomial `t^shift * poly(t)` with `poly(0) != 0` (or zero).
///
/// These form the subring F_q[t, 1/t] of F. Every matrix the quotient
/// machinery touches lives here, so lattice computations avoid the gcds
/// that general rational functions need.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Laurent {
    shift: i64,
    poly: Poly,
}

impl Laurent {
    pub fn new(shift: i64, poly: Poly) -> Self {
        if poly.is_zero() {
            return Laurent { shift: 0, poly };
        }
        let lo = poly.coeffs().iter().position(|&c| c != 0).unwrap();
        if lo == 0 {
            return Laurent { shift, poly };
        }
        let p = poly.modulus();
        let c = poly.coeffs()[lo..].to_vec();
        Laurent { shift: shift + lo as i64, poly: Poly::from_raw(p, c) }
    }

    pub fn zero(p: u32) -> Self {
        Laurent { shift: 0, poly: Poly::zero(p) }
    }

    pub fn one(p: u32) -> Self {
        Laurent { shift: 0, poly: Poly::one(p) }
    }

    pub fn constant(c: u32, p: u32) -> Self {
        Laurent::new(0, Poly::constant(c, p))
    }

    /// `c * t^k`; note π^n = t^{-n}.
    pub fn monomial(c: u32, k: i64, p: u32) -> Self {
        Laurent::new(k, Poly::constant(c, p))
    }

    pub fn pi_pow(n: i64, p: u32) -> Self {
        Laurent::monomial(1, -n, p)
    }

    pub fn modulus(&self) -> u32 {
        self.poly.modulus()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Highest power of t present.
    pub fn top_degree(&self) -> Option<i64> {
        self.poly.deg().map(|d| self.shift + d as i64)
    }

    /// π-adic valuation at ∞ (`None` for zero).
    pub fn valuation(&self) -> Option<i64> {
        self.top_degree().map(|d| -d)
    }

    pub fn top_coeff(&self) -> u32 {
        self.poly.lead()
    }

    /// Coefficient of t^k.
    pub fn coeff(&self, k: i64) -> u32 {
        if k < self.shift {
            0
        } else {
            self.poly.coeff((k - self.shift) as usize)
        }
    }

    /// Multiply by t^k.
    pub fn mul_t(&self, k: i64) -> Laurent {
        if self.is_zero() {
            return self.clone();
        }
        Laurent { shift: self.shift + k, poly: self.poly.clone() }
    }

    pub fn scale(&self, a: u32) -> Laurent {
        Laurent::new(self.shift, self.poly.scale(a))
    }

    /// The polynomial this represents, if it has no negative powers of t.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(self.poly.clone());
        }
        if self.shift < 0 {
            None
        } else {
            Some(self.poly.shift(self.shift as usize))
        }
    }
}

impl From<Poly> for Laurent {
    fn from(p: Poly) -> Self {
        Laurent::new(0, p)
    }
}

impl From<&Poly> for Laurent {
    fn from(p: &Poly) -> Self {
        Laurent::new(0, p.clone())
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 || self.is_zero() {
            write!(f, "{}", self.poly)
        } else {
            write!(f, "t^{}*({})", self.shift, self.poly)
        }
    }
}

fn align(a: &Laurent, b: &Laurent) -> (i64, Poly, Poly) {
    let s = a.shift.min(b.shift);
    (s, a.poly.shift((a.shift - s) as usize), b.poly.shift((b.shift - s) as usize))
}

impl<'a> Add<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn add(self, o: &Laurent) -> Laurent {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (s, x, y) = align(self, o);
        Laurent::new(s, &x + &y)
    }
}

impl<'a> Sub<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn sub(self, o: &Laurent) -> Laurent {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return -o;
        }
        let (s, x, y) = align(self, o);
        Laurent::new(s, &x - &y)
    }
}

impl<'a> Mul<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn mul(self, o: &Laurent) -> Laurent {
        if self.is_zero() || o.is_zero() {
            return Laurent::zero(self.modulus());
        }
        // Both constant terms are nonzero, so the product's is too.
        Laurent { shift: self.shift + o.shift, poly: &self.poly * &o.poly }
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { shift: self.shift, poly: -&self.poly }
    }
}

by_value!(Laurent, Add add, Sub sub, Mul mul);

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        -&self
    }
}
