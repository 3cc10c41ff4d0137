//! Vertices of the building as vector bundles on P^1.
//!
//! The vertex g·O^d is glued with A^d over Spec A. On P^1 every such bundle
//! splits, and a Birkhoff factorization g = u·diag(π^{a_i})·k with
//! u ∈ GL_d(A), k ∈ GL_d(O) exhibits it as ⊕ O(−a_i).

use serde::{Deserialize, Serialize};

use crate::building::LatticeClassKey;
use crate::exactring::fq::raw;
use crate::exactring::{fpmat, KElem, Laurent, Mat, MatA, MatK, MatL, Poly};
use crate::Error;

/// g = u·diag(π^{a_1},…,π^{a_d})·k, with a sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffWitness {
    pub u: MatA,
    pub a: Vec<i64>,
    pub k: MatK,
}

/// `BirkhoffWitness` with k kept as a Laurent matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffL {
    pub u: MatA,
    pub a: Vec<i64>,
    pub k: MatL,
}

fn row_degree(m: &MatL, i: usize) -> Option<i64> {
    (0..m.cols()).filter_map(|j| m[(i, j)].top_degree()).max()
}

/// Birkhoff factorization of a Laurent matrix, by leading-row reduction of
/// u^{-1}·h over A.
pub fn birkhoff_l(h: &MatL) -> Result<BirkhoffL, Error> {
    let d = h.rows();
    if !h.is_square() || d == 0 {
        return Err(Error::DimensionMismatch("birkhoff needs a square matrix".into()));
    }
    let p = h[(0, 0)].modulus();
    let mut pm = h.clone();
    let mut u = Mat::identity(d, &Poly::one(p));
    loop {
        let degs = (0..d).map(|i| row_degree(&pm, i).ok_or(Error::SingularMatrix)).collect::<Result<Vec<_>, _>>()?;
        let lc: Vec<Vec<u32>> = (0..d).map(|i| (0..d).map(|j| pm[(i, j)].coeff(degs[i])).collect()).collect();
        let ker = fpmat::kernel(&fpmat::transpose(&lc), d, p);
        let Some(c) = ker.first() else {
            let a: Vec<i64> = degs.iter().map(|x| -x).collect();
            let mut k = pm.clone();
            for i in 0..d {
                for j in 0..d {
                    k[(i, j)] = pm[(i, j)].mul_t(-degs[i]);
                }
            }
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by_key(|&i| std::cmp::Reverse(a[i]));
            let w = BirkhoffL {
                u: u.permute_cols(&order),
                a: order.iter().map(|&i| a[i]).collect(),
                k: k.permute_rows(&order),
            };
            if certify_l(h, &w) {
                return Ok(w);
            }
            return Err(Error::Invalid("birkhoff factorization failed to certify".into()));
        };
        let i0 = (0..d).filter(|&i| c[i] != 0).max_by_key(|&i| (degs[i], std::cmp::Reverse(i))).unwrap();
        let mut new_row: Vec<Laurent> = (0..d).map(|j| pm[(i0, j)].scale(c[i0])).collect();
        for i in (0..d).filter(|&i| i != i0 && c[i] != 0) {
            let e = degs[i0] - degs[i];
            for (j, x) in new_row.iter_mut().enumerate() {
                *x = &*x + &pm[(i, j)].scale(c[i]).mul_t(e);
            }
        }
        for (j, x) in new_row.into_iter().enumerate() {
            pm[(i0, j)] = x;
        }
        let ci = raw::inv(c[i0], p);
        for j in (0..d).filter(|&j| j != i0 && c[j] != 0) {
            let f = Poly::monomial(raw::neg(raw::mul(c[j], ci, p), p), (degs[i0] - degs[j]) as usize, p);
            for r in 0..d {
                let x = &u[(r, j)] + &(&u[(r, i0)] * &f);
                u[(r, j)] = x;
            }
        }
        for r in 0..d {
            u[(r, i0)] = u[(r, i0)].scale(ci);
        }
    }
}

fn certify_l(h: &MatL, w: &BirkhoffL) -> bool {
    let d = h.rows();
    let dk = Mat::from_rows((0..d).map(|i| (0..d).map(|j| w.k[(i, j)].mul_t(-w.a[i])).collect()).collect());
    let unit = w.k.to_rows().iter().flatten().all(|x| x.top_degree().is_none_or(|t| t <= 0));
    let det_k = w.k.det();
    unit && det_k.top_degree() == Some(0) && w.u.det().deg() == Some(0) && w.u.to_laurent().mul(&dk) == *h
}

/// Birkhoff factorization over F: denominators are cleared by c ∈ A, and
/// the unit c/t^{deg c} of O is absorbed into k.
pub fn birkhoff(h: &MatK) -> Result<BirkhoffWitness, Error> {
    let d = h.rows();
    if !h.is_square() || d == 0 {
        return Err(Error::DimensionMismatch("birkhoff needs a square matrix".into()));
    }
    let p = h[(0, 0)].modulus();
    if h.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let mut c = Poly::one(p);
    for x in h.to_rows().iter().flatten() {
        let g = c.gcd(x.den());
        c = (&c * x.den()).div_exact(&g);
    }
    let ck = KElem::from_poly(c.clone());
    let hl: MatL = h.map(|x| Laurent::from((&ck * x).num().clone()));
    let w = birkhoff_l(&hl)?;
    let dc = c.deg_i64();
    // 1/c = π^{deg c}·(t^{deg c}/c).
    let unit = &KElem::pi_pow(-dc, p) / &ck;
    let k = w.k.to_k().scale(&unit);
    let a: Vec<i64> = w.a.iter().map(|x| x + dc).collect();
    let out = BirkhoffWitness { u: w.u, a, k };
    let dk = Mat::from_rows(
        (0..d).map(|i| (0..d).map(|j| &KElem::pi_pow(out.a[i], p) * &out.k[(i, j)]).collect()).collect(),
    );
    if out.u.to_k().mul(&dk) != *h || !out.k.is_integral_unit() {
        return Err(Error::Invalid("birkhoff factorization failed to certify".into()));
    }
    Ok(out)
}

/// Degrees of the line bundles in the splitting (−a_i), sorted descending,
/// not normalized.
pub fn bundle_degrees(h: &MatL) -> Result<Vec<i64>, Error> {
    let mut deg: Vec<i64> = birkhoff_l(h)?.a.iter().map(|a| -a).collect();
    deg.sort_unstable_by(|x, y| y.cmp(x));
    Ok(deg)
}

/// Bundle degrees sorted descending, shifted so the last is 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplittingType(pub Vec<i64>);

impl SplittingType {
    pub fn from_degrees(deg: &[i64]) -> Self {
        let mut v = deg.to_vec();
        v.sort_unstable_by(|x, y| y.cmp(x));
        let m = v.last().copied().unwrap_or(0);
        SplittingType(v.into_iter().map(|x| x - m).collect())
    }

    pub fn polygon(&self) -> Polygon {
        Polygon::from_degrees(&self.0)
    }

    pub fn is_semistable(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

/// HN polygon of a split bundle: p(i) = δ_1+…+δ_i, Δp(i) = δ_i − δ_{i+1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygon {
    pub p: Vec<i64>,
    pub dp: Vec<i64>,
}

impl Polygon {
    /// `deg` must be sorted descending.
    pub fn from_degrees(deg: &[i64]) -> Self {
        let mut p = vec![0];
        for x in deg {
            p.push(p.last().unwrap() + x);
        }
        let dp = deg.windows(2).map(|w| w[0] - w[1]).collect();
        Polygon { p, dp }
    }

    /// Δp(i) = 2p(i) − p(i−1) − p(i+1) ≥ 0.
    pub fn is_convex(&self) -> bool {
        (1..self.p.len() - 1).all(|i| 2 * self.p[i] - self.p[i - 1] - self.p[i + 1] >= 0)
    }

    /// Some i has Δp(i) ≥ α.
    pub fn in_truncation(&self, alpha: i64) -> bool {
        self.dp.iter().any(|&x| x >= alpha)
    }

    /// Δp(i) ≥ α for all i ∈ D (1-based).
    pub fn in_truncation_d(&self, alpha: i64, dset: &[usize]) -> bool {
        !dset.is_empty() && dset.iter().all(|&i| i >= 1 && i <= self.dp.len() && self.dp[i - 1] >= alpha)
    }
}

pub fn splitting_type(v: &LatticeClassKey) -> Result<SplittingType, Error> {
    Ok(SplittingType::from_degrees(&bundle_degrees(&v.matrix())?))
}

pub fn polygon(v: &LatticeClassKey) -> Result<Polygon, Error> {
    Ok(splitting_type(v)?.polygon())
}

pub fn in_truncation(v: &LatticeClassKey, alpha: i64, dset: Option<&[usize]>) -> Result<bool, Error> {
    let poly = polygon(v)?;
    Ok(match dset {
        None => poly.in_truncation(alpha),
        Some(ds) => poly.in_truncation_d(alpha, ds),
    })
}

/// dim H^0 of ⊕ O(δ_i).
pub fn h0(degrees: &[i64]) -> i64 {
    degrees.iter().map(|&x| (x + 1).max(0)).sum()
}

/// Reduced row echelon form over F; returns the nonzero rows.
pub fn rref_k(rows: &[Vec<KElem>]) -> Vec<Vec<KElem>> {
    let mut m: Vec<Vec<KElem>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][c].inv().expect("nonzero pivot");
        m[r] = m[r].iter().map(|x| x * &inv).collect();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                m[i] = m[i].iter().zip(&m[r]).map(|(x, y)| x - &(&f * y)).collect();
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// The HN filtration of the bundle at h, as subspaces of F^d in increasing
/// order, each given by RREF rows. Empty for semistable bundles.
pub fn hn_flag_l(h: &MatL) -> Result<Vec<Vec<Vec<KElem>>>, Error> {
    let w = birkhoff_l(h)?;
    let d = h.rows();
    // Columns of u by bundle degree −a, highest first: a ascending.
    let order: Vec<usize> = (0..d).rev().collect();
    let deg: Vec<i64> = order.iter().map(|&i| -w.a[i]).collect();
    let cols: Vec<Vec<KElem>> = order.iter().map(|&i| w.u.col(i).into_iter().map(KElem::from_poly).collect()).collect();
    let mut flag = Vec::new();
    for i in 1..d {
        if deg[i - 1] > deg[i] {
            flag.push(rref_k(&cols[..i]));
        }
    }
    Ok(flag)
}

pub fn hn_flag(v: &LatticeClassKey) -> Result<Vec<Vec<Vec<KElem>>>, Error> {
    hn_flag_l(&v.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::{apartment_vertex, vertex_key};

    #[test]
    fn diagonal_and_unit_inputs() {
        let p = 2;
        let h = Mat::diagonal(vec![KElem::pi_pow(2, p), KElem::one(p)]);
        let w = birkhoff(&h).unwrap();
        assert_eq!(w.a, vec![2, 0]);
        assert!(w.u.to_k().is_identity() && w.k.is_identity());
        let unit =
            Mat::from_rows(vec![vec![KElem::one(p), KElem::pi_pow(1, p)], vec![KElem::pi_pow(3, p), KElem::one(p)]]);
        assert_eq!(birkhoff(&unit).unwrap().a, vec![0, 0]);
    }

    #[test]
    fn denominators_are_cleared() {
        let p = 3;
        let x = KElem::new(Poly::from_coeffs(p, &[1]), Poly::from_coeffs(p, &[1, 1])).unwrap();
        let h = Mat::from_rows(vec![vec![x.clone(), KElem::t(p)], vec![KElem::zero(p), x]]);
        let w = birkhoff(&h).unwrap();
        assert_eq!(w.a.iter().sum::<i64>(), h.det().valuation().unwrap());
    }

    #[test]
    fn singular_rejected() {
        let h = Mat::filled(2, 2, KElem::t(2));
        assert_eq!(birkhoff(&h).err(), Some(Error::SingularMatrix));
    }

    #[test]
    fn splitting_types_of_apartment_vertices() {
        let p = 2;
        let id = Mat::identity(2, &KElem::one(p));
        for k in 0..5 {
            let v = apartment_vertex(&id, &[k, 0]).unwrap();
            let st = splitting_type(&v).unwrap();
            assert_eq!(st.0, vec![k, 0]);
            assert_eq!(st.polygon().dp, vec![k]);
        }
        let base = vertex_key(&id).unwrap();
        assert!(splitting_type(&base).unwrap().is_semistable());
        assert!(hn_flag(&base).unwrap().is_empty());
    }

    #[test]
    fn global_sections_fix_the_sign() {
        assert_eq!(h0(&[1]), 2);
        // A ∩ π^{-1}O = polynomials of degree ≤ 1, counted directly.
        let p = 2;
        let h = Mat::from_rows(vec![vec![Laurent::pi_pow(-1, p)]]);
        let deg = bundle_degrees(&h).unwrap();
        let count = Poly::all_up_to_degree(p, 4).iter().filter(|f| f.is_zero() || (-f.deg_i64()) >= -1).count();
        assert_eq!(1usize << h0(&deg), count);
    }

    #[test]
    fn truncation_membership() {
        let st = SplittingType(vec![2, 0]).polygon();
        assert!(st.in_truncation(2) && st.in_truncation_d(2, &[1]));
        let flat = SplittingType(vec![0, 0]).polygon();
        assert!((1..6).all(|a| !flat.in_truncation(a)));
        let t = SplittingType(vec![3, 1, 0]).polygon();
        assert_eq!(t.dp, vec![2, 1]);
        assert!(t.in_truncation_d(2, &[1]));
        assert!(!t.in_truncation_d(2, &[2]));
        assert!(!t.in_truncation_d(2, &[1, 2]));
    }

    #[test]
    fn hn_line_of_an_apartment_vertex() {
        let p = 3;
        let id = Mat::identity(2, &KElem::one(p));
        for k in 1..4 {
            let flag = hn_flag(&apartment_vertex(&id, &[k, 0]).unwrap()).unwrap();
            assert_eq!(flag.len(), 1);
            assert_eq!(flag[0], vec![vec![KElem::zero(p), KElem::one(p)]]);
        }
    }
}
