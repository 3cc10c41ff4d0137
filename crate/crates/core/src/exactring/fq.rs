use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic helpers for the prime field F_p on raw `u32` residues.
///
/// Hot loops work on bare residues; [`FqElem`] is the typed wrapper for
/// code that prefers operators.
pub mod raw {
    #[inline]
    pub fn add(a: u32, b: u32, p: u32) -> u32 {
        let s = a + b;
        if s >= p {
            s - p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(a: u32, b: u32, p: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + p - b
        }
    }

    #[inline]
    pub fn neg(a: u32, p: u32) -> u32 {
        if a == 0 {
            0
        } else {
            p - a
        }
    }

    #[inline]
    pub fn mul(a: u32, b: u32, p: u32) -> u32 {
        ((a as u64 * b as u64) % p as u64) as u32
    }

    pub fn pow(mut a: u32, mut e: u64, p: u32) -> u32 {
        let mut r = 1 % p;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a, p);
            }
            a = mul(a, a, p);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero residue (Fermat).
    pub fn inv(a: u32, p: u32) -> u32 {
        assert!(!a.is_multiple_of(p), "inverse of zero in F_{p}");
        pow(a, p as u64 - 2, p)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while (k as u64) * (k as u64) <= n as u64 {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// An element of F_p, carrying its characteristic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FqElem {
    value: u32,
    p: u32,
}

impl FqElem {
    pub fn new(value: i64, p: u32) -> Self {
        let v = value.rem_euclid(p as i64) as u32;
        FqElem { value: v, p }
    }

    pub fn zero(p: u32) -> Self {
        FqElem { value: 0, p }
    }

    pub fn one(p: u32) -> Self {
        FqElem { value: 1 % p, p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(FqElem { value: raw::inv(self.value, self.p), p: self.p })
        }
    }

    pub fn pow(self, e: u64) -> Self {
        FqElem { value: raw::pow(self.value, e, self.p), p: self.p }
    }

    /// All elements of F_p in increasing order.
    pub fn all(p: u32) -> impl Iterator<Item = FqElem> {
        (0..p).map(move |v| FqElem { value: v, p })
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FqElem {
    type Output = FqElem;
    fn add(self, o: FqElem) -> FqElem {
        debug_assert_eq!(self.p, o.p);
        FqElem { value: raw::add(self.value, o.value, self.p), p: self.p }
    }
}

impl Sub for FqElem {
    type Output = FqElem;
    fn sub(self, o: FqElem) -> FqElem {
        debug_assert_eq!(self.p, o.p);
        FqElem { value: raw::sub(self.value, o.value, self.p), p: self.p }
    }
}

impl Mul for FqElem {
    type Output = FqElem;
    fn mul(self, o: FqElem) -> FqElem {
        debug_assert_eq!(self.p, o.p);
        FqElem { value: raw::mul(self.value, o.value, self.p), p: self.p }
    }
}

impl Div for FqElem {
    type Output = FqElem;
    fn div(self, o: FqElem) -> FqElem {
        self * o.inv().expect("division by zero in F_p")
    }
}

impl Neg for FqElem {
    type Output = FqElem;
    fn neg(self) -> FqElem {
        FqElem { value: raw::neg(self.value, self.p), p: self.p }
    }
}
