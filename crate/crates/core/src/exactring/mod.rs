//! Exact arithmetic: F_p, A = F_p[t], Laurent polynomials, F = F_p(t) inside
//! K = F_p((1/t)), matrices over these rings, and integer normal forms.

pub mod fpmat;
pub mod fq;
pub mod kelem;
pub mod laurent;
pub mod mat;
pub mod poly;
pub mod snf;
pub mod sparse;

pub use fq::FqElem;
pub use kelem::KElem;
pub use laurent::Laurent;
pub use mat::{mat_inverse, Mat, MatA, MatK, MatL, Ring};
pub use poly::Poly;
pub use snf::{smith_divisors, smith_normal_form, IntMatrix, SnfResult};

/// v_∞ of an element of F; `None` stands for +∞.
pub fn valuation(x: &KElem) -> Option<i64> {
    x.valuation()
}

/// Coefficients of π^k for v(x) ≤ k ≤ n, returned with v(x).
pub fn pi_expansion(x: &KElem, n: i64) -> (i64, Vec<u32>) {
    x.pi_expansion(n)
}
