use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::fq::raw;
use super::laurent::Laurent;
use super::poly::{by_value, Poly};
use crate::Error;

/// An element of F = F_p(t), viewed inside K = F_p((π)), π = 1/t.
///
/// Stored as a reduced fraction with monic denominator, so equality is
/// structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KElem {
    num: Poly,
    den: Poly,
}

impl KElem {
    pub fn new(num: Poly, den: Poly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = num.modulus();
        if num.is_zero() {
            return Ok(KElem { num, den: Poly::one(p) });
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() { (num, den) } else { (num.div_exact(&g), den.div_exact(&g)) };
        let lc = d.lead();
        if lc != 1 {
            let li = raw::inv(lc, p);
            n = n.scale(li);
            d = d.scale(li);
        }
        Ok(KElem { num: n, den: d })
    }

    pub fn zero(p: u32) -> Self {
        KElem { num: Poly::zero(p), den: Poly::one(p) }
    }

    pub fn one(p: u32) -> Self {
        KElem { num: Poly::one(p), den: Poly::one(p) }
    }

    pub fn from_poly(f: Poly) -> Self {
        let p = f.modulus();
        KElem { num: f, den: Poly::one(p) }
    }

    pub fn constant(c: u32, p: u32) -> Self {
        KElem::from_poly(Poly::constant(c, p))
    }

    pub fn t(p: u32) -> Self {
        KElem::from_poly(Poly::t(p))
    }

    /// π^n = t^{-n}.
    pub fn pi_pow(n: i64, p: u32) -> Self {
        if n >= 0 {
            KElem { num: Poly::one(p), den: Poly::monomial(1, n as usize, p) }
        } else {
            KElem::from_poly(Poly::monomial(1, (-n) as usize, p))
        }
    }

    pub fn modulus(&self) -> u32 {
        self.num.modulus()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// v_∞(x) = deg den − deg num; `None` stands for +∞.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.den.deg_i64() - self.num.deg_i64())
        }
    }

    pub fn inv(&self) -> Result<KElem, Error> {
        KElem::new(self.den.clone(), self.num.clone())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Laurent polynomial form, if the denominator is a power of t.
    pub fn to_laurent(&self) -> Option<Laurent> {
        let dd = self.den.deg()?;
        if self.den.coeffs()[..dd].iter().any(|&c| c != 0) {
            return None;
        }
        Some(Laurent::new(-(dd as i64), self.num.clone()))
    }

    /// Coefficients c_k of π^k for v(x) ≤ k ≤ n, as (v(x), coefficients).
    ///
    /// Exact long division of the π-reversed numerator by the π-reversed
    /// denominator. Returns an empty list for zero or when n < v(x).
    pub fn pi_expansion(&self, n: i64) -> (i64, Vec<u32>) {
        let Some(v) = self.valuation() else {
            return (0, Vec::new());
        };
        if n < v {
            return (v, Vec::new());
        }
        let p = self.modulus();
        let len = (n - v + 1) as usize;
        // x = π^v · N(π)/D(π) where N, D are the coefficient lists read from the top.
        let nrev: Vec<u32> = self.num.coeffs().iter().rev().copied().collect();
        let drev: Vec<u32> = self.den.coeffs().iter().rev().copied().collect();
        let d0inv = raw::inv(drev[0], p);
        let mut rem: Vec<u32> = (0..len).map(|k| nrev.get(k).copied().unwrap_or(0)).collect();
        let mut out = vec![0u32; len];
        for k in 0..len {
            let c = raw::mul(rem[k], d0inv, p);
            out[k] = c;
            if c != 0 {
                for (j, &dj) in drev.iter().enumerate().skip(1) {
                    if k + j >= len {
                        break;
                    }
                    rem[k + j] = raw::sub(rem[k + j], raw::mul(c, dj, p), p);
                }
            }
        }
        (v, out)
    }

    /// The unique representative of x mod π^n O with exponents in [v(x), n).
    pub fn truncate_below(&self, n: i64) -> Laurent {
        let p = self.modulus();
        let (v, cs) = self.pi_expansion(n - 1);
        let mut acc = Laurent::zero(p);
        for (i, &c) in cs.iter().enumerate() {
            if c != 0 {
                acc = &acc + &Laurent::monomial(c, -(v + i as i64), p);
            }
        }
        acc
    }
}

impl From<&Laurent> for KElem {
    fn from(x: &Laurent) -> Self {
        let p = x.modulus();
        if x.is_zero() {
            return KElem::zero(p);
        }
        if x.shift() >= 0 {
            KElem::from_poly(x.poly().shift(x.shift() as usize))
        } else {
            // poly(0) != 0, so the fraction is already reduced.
            KElem { num: x.poly().clone(), den: Poly::monomial(1, (-x.shift()) as usize, p) }
        }
    }
}

impl From<Laurent> for KElem {
    fn from(x: Laurent) -> Self {
        KElem::from(&x)
    }
}

impl From<Poly> for KElem {
    fn from(f: Poly) -> Self {
        KElem::from_poly(f)
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<'a> Add<&'a KElem> for &'a KElem {
    type Output = KElem;
    fn add(self, o: &KElem) -> KElem {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return KElem::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        let num = &(&self.num * &o.den) + &(&o.num * &self.den);
        KElem::new(num, &self.den * &o.den).unwrap()
    }
}

impl<'a> Sub<&'a KElem> for &'a KElem {
    type Output = KElem;
    fn sub(self, o: &KElem) -> KElem {
        self + &(-o)
    }
}

impl<'a> Mul<&'a KElem> for &'a KElem {
    type Output = KElem;
    fn mul(self, o: &KElem) -> KElem {
        if self.is_zero() || o.is_zero() {
            return KElem::zero(self.modulus());
        }
        // Cross-cancel first to keep the gcds small.
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n = &self.num.div_exact(&g1) * &o.num.div_exact(&g2);
        let d = &self.den.div_exact(&g2) * &o.den.div_exact(&g1);
        let lc = d.lead();
        let p = self.modulus();
        let li = raw::inv(lc, p);
        KElem { num: n.scale(li), den: d.scale(li) }
    }
}

impl<'a> Div<&'a KElem> for &'a KElem {
    type Output = KElem;
    fn div(self, o: &KElem) -> KElem {
        self * &o.inv().expect("division by zero in F")
    }
}

impl Neg for &KElem {
    type Output = KElem;
    fn neg(self) -> KElem {
        KElem { num: -&self.num, den: self.den.clone() }
    }
}

by_value!(KElem, Add add, Sub sub, Mul mul, Div div);

impl Neg for KElem {
    type Output = KElem;
    fn neg(self) -> KElem {
        -&self
    }
}
