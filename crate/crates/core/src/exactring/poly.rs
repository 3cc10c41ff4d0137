use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::fq::{raw, FqElem};
use crate::Error;

/// A polynomial in A = F_p[t], coefficients lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    p: u32,
    c: Vec<u32>,
}

impl Poly {
    pub fn from_coeffs(p: u32, coeffs: &[i64]) -> Self {
        let c = coeffs.iter().map(|&x| x.rem_euclid(p as i64) as u32).collect();
        Poly::from_raw(p, c)
    }

    /// Build from residues already in `0..p`.
    pub fn from_raw(p: u32, mut c: Vec<u32>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { p, c }
    }

    pub fn zero(p: u32) -> Self {
        Poly { p, c: Vec::new() }
    }

    pub fn one(p: u32) -> Self {
        Poly::constant(1, p)
    }

    pub fn constant(v: u32, p: u32) -> Self {
        Poly::from_raw(p, vec![v % p])
    }

    /// The variable t.
    pub fn t(p: u32) -> Self {
        Poly::monomial(1, 1, p)
    }

    pub fn monomial(coeff: u32, k: usize, p: u32) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = coeff % p;
        Poly::from_raw(p, c)
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 1
    }

    /// Degree, `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with deg 0 = -1, handy for valuation arithmetic.
    pub fn deg_i64(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn coeff(&self, k: usize) -> u32 {
        self.c.get(k).copied().unwrap_or(0)
    }

    pub fn lead(&self) -> u32 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    pub fn scale(&self, a: u32) -> Poly {
        let a = a % self.p;
        if a == 0 {
            return Poly::zero(self.p);
        }
        Poly { p: self.p, c: self.c.iter().map(|&x| raw::mul(x, a, self.p)).collect() }
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.c);
        Poly { p: self.p, c }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(raw::inv(self.lead(), self.p))
    }

    pub fn eval(&self, x: u32) -> u32 {
        self.c.iter().rev().fold(0, |acc, &a| raw::add(raw::mul(acc, x, self.p), a, self.p))
    }

    /// Euclidean division: `self = q * d + r` with deg r < deg d.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly), Error> {
        let dd = d.deg().ok_or(Error::DivisionByZero)?;
        let p = self.p;
        let mut r = self.c.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(p), self.clone()));
        }
        let li = raw::inv(d.lead(), p);
        let mut q = vec![0u32; r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = raw::mul(r[k + dd], li, p);
            q[k] = coef;
            if coef != 0 {
                for (j, &dc) in d.c.iter().enumerate() {
                    r[k + j] = raw::sub(r[k + j], raw::mul(coef, dc, p), p);
                }
            }
        }
        r.truncate(dd);
        Ok((Poly::from_raw(p, q), Poly::from_raw(p, r)))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).expect("remainder by zero polynomial").1
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d).expect("division by zero polynomial");
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns (g, x, y) with g = x*self + y*other, g monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(p), Poly::zero(p));
        let (mut t0, mut t1) = (Poly::zero(p), Poly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let li = raw::inv(r0.lead(), p);
        (r0.scale(li), s0.scale(li), t0.scale(li))
    }

    /// Inverse modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        if m.deg() == Some(0) {
            return Some(Poly::zero(self.p));
        }
        let (g, x, _) = self.rem(m).ext_gcd(m);
        if g.is_one() {
            Some(x.rem(m))
        } else {
            None
        }
    }

    /// All polynomials of degree `<= max_deg` (including zero), in counting order.
    pub fn all_up_to_degree(p: u32, max_deg: i64) -> Vec<Poly> {
        if max_deg < 0 {
            return vec![Poly::zero(p)];
        }
        let n = (max_deg + 1) as u32;
        let total = (p as u64).pow(n);
        (0..total)
            .map(|mut idx| {
                let mut c = Vec::with_capacity(n as usize);
                for _ in 0..n {
                    c.push((idx % p as u64) as u32);
                    idx /= p as u64;
                }
                Poly::from_raw(p, c)
            })
            .collect()
    }

    /// Parse strings like `t^2+t+1`, `2t+1`, `t`, `1`, `t^3 - t`.
    pub fn parse(s: &str, p: u32) -> Result<Poly, Error> {
        let bad = || Error::Parse(format!("cannot parse polynomial {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut acc = Poly::zero(p);
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let mut sign = 1i64;
            if let Some(r) = rest.strip_prefix('+') {
                rest = r;
            } else if let Some(r) = rest.strip_prefix('-') {
                rest = r;
                sign = -1;
            } else if !first {
                return Err(bad());
            }
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            if term.is_empty() {
                return Err(bad());
            }
            let (coef, power) = match term.find('t') {
                None => (term.parse::<i64>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let cs = term[..pos].trim_end_matches('*');
                    let coef = if cs.is_empty() { 1 } else { cs.parse::<i64>().map_err(|_| bad())? };
                    let tail = &term[pos + 1..];
                    let power = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                    };
                    (coef, power)
                }
            };
            let c = FqElem::new(sign * coef, p).value();
            acc = &acc + &Poly::monomial(c, power, p);
        }
        Ok(acc)
    }
}

impl Ord for Poly {
    /// Degree first, then coefficients from the top down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.len().cmp(&other.c.len()).then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &a) in self.c.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{a}t")?,
                (_, 1) => write!(f, "t^{k}")?,
                _ => write!(f, "{a}t^{k}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let p = self.p;
        let (long, short) = if self.c.len() >= o.c.len() { (self, o) } else { (o, self) };
        let mut c = long.c.clone();
        for (x, &y) in c.iter_mut().zip(&short.c) {
            *x = raw::add(*x, y, p);
        }
        Poly::from_raw(p, c)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let p = self.p;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|k| raw::sub(self.coeff(k), o.coeff(k), p)).collect();
        Poly::from_raw(p, c)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let p = self.p;
        if self.is_zero() || o.is_zero() {
            return Poly::zero(p);
        }
        let mut acc = vec![0u64; self.c.len() + o.c.len() - 1];
        let pp = p as u64;
        // Delay reductions while the accumulator cannot overflow.
        let bound = u64::MAX / 2 - pp * pp;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                let slot = &mut acc[i + j];
                *slot += a as u64 * b as u64;
                if *slot > bound {
                    *slot %= pp;
                }
            }
        }
        Poly::from_raw(p, acc.into_iter().map(|x| (x % pp) as u32).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { p: self.p, c: self.c.iter().map(|&x| raw::neg(x, self.p)).collect() }
    }
}

macro_rules! by_value {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t { (&self).$m(&o) }
        }
    )*};
}
pub(crate) use by_value;

by_value!(Poly, Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
