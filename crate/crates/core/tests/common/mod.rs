#![allow(dead_code)]

use btq::exactring::{KElem, Laurent, Mat, MatA, MatL, Poly};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_poly(r: &mut TestRng, p: u32, max_deg: i64) -> Poly {
    let c: Vec<u32> = (0..=max_deg.max(0)).map(|_| r.gen_range(0..p)).collect();
    Poly::from_raw(p, c)
}

/// Random element of GL_d(A): a product of elementary matrices and a
/// diagonal of units.
pub fn random_gl_a(r: &mut TestRng, d: usize, p: u32, max_deg: i64, steps: usize) -> MatA {
    let mut m = Mat::identity(d, &Poly::one(p));
    for _ in 0..steps {
        let (i, j) = (r.gen_range(0..d), r.gen_range(0..d));
        if i == j {
            continue;
        }
        let f = random_poly(r, p, max_deg);
        for c in 0..d {
            let x = &m[(i, c)] + &(&f * &m[(j, c)]);
            m[(i, c)] = x;
        }
    }
    for i in 0..d {
        let s = r.gen_range(1..p);
        for c in 0..d {
            m[(i, c)] = m[(i, c)].scale(s);
        }
    }
    m
}

/// Random element of GL_d(O): an invertible constant matrix plus π times a
/// random integral matrix.
pub fn random_gl_o(r: &mut TestRng, d: usize, p: u32, prec: i64) -> MatL {
    let c = loop {
        let c: Vec<Vec<u32>> = (0..d).map(|_| (0..d).map(|_| r.gen_range(0..p)).collect()).collect();
        if btq::exactring::fpmat::det(&c, p) != 0 {
            break c;
        }
    };
    Mat::from_rows(
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let tail = random_poly(r, p, prec - 1);
                        // tail(1/t)·π
                        let rev: Vec<u32> = tail.coeffs().to_vec();
                        let mut x = Laurent::constant(c[i][j], p);
                        for (k, &a) in rev.iter().enumerate() {
                            x = &x + &Laurent::monomial(a, -(k as i64) - 1, p);
                        }
                        x
                    })
                    .collect()
            })
            .collect(),
    )
}

pub fn diag_pi(a: &[i64], p: u32) -> MatL {
    Mat::diagonal(a.iter().map(|&x| Laurent::pi_pow(x, p)).collect())
}

pub fn random_kelem(r: &mut TestRng, p: u32, max_deg: i64) -> KElem {
    let num = random_poly(r, p, max_deg);
    let den = loop {
        let d = random_poly(r, p, max_deg);
        if !d.is_zero() {
            break d;
        }
    };
    KElem::new(num, den).unwrap()
}

/// A random element of Γ: elementary matrices with off-diagonal entries in
/// the ideal, times unit scalings when Γ is all of GL_d(A).
pub fn random_gamma(r: &mut TestRng, g: &btq::quotient::GroupSpec, steps: usize) -> MatA {
    if g.is_full() {
        return random_gl_a(r, g.d, g.q, 1, steps);
    }
    let mut m = Mat::identity(g.d, &Poly::one(g.q));
    for _ in 0..steps {
        let (i, j) = (r.gen_range(0..g.d), r.gen_range(0..g.d));
        if i == j {
            continue;
        }
        let f = &g.m * &random_poly(r, g.q, 1);
        for c in 0..g.d {
            let x = &m[(i, c)] + &(&f * &m[(j, c)]);
            m[(i, c)] = x;
        }
    }
    m
}
