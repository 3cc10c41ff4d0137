use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::kelem::KElem;
use super::laurent::Laurent;
use super::poly::Poly;
use crate::Error;

/// Commutative ring elements that know their own zero and one.
pub trait Ring:
    Clone + PartialEq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
}

impl Ring for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.modulus())
    }
    fn one_like(&self) -> Self {
        Poly::one(self.modulus())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for Laurent {
    fn zero_like(&self) -> Self {
        Laurent::zero(self.modulus())
    }
    fn one_like(&self) -> Self {
        Laurent::one(self.modulus())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for KElem {
    fn zero_like(&self) -> Self {
        KElem::zero(self.modulus())
    }
    fn one_like(&self) -> Self {
        KElem::one(self.modulus())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Matrices over A = F_q[t].
pub type MatA = Mat<Poly>;
/// Matrices over F ⊂ K.
pub type MatK = Mat<KElem>;
/// Matrices over the Laurent polynomial ring F_q[t, 1/t].
pub type MatL = Mat<Laurent>;

impl<T: Clone> Mat<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Mat { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// Reorder columns: new column j is old column `perm[j]`.
    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            for &j in perm {
                data.push(self[(i, j)].clone());
            }
        }
        Mat { rows: self.rows, cols: perm.len(), data }
    }

    /// Reorder rows: new row i is old row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for &i in perm {
            data.extend_from_slice(self.row(i));
        }
        Mat { rows: perm.len(), cols: self.cols, data }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Ring> Mat<T> {
    pub fn identity(n: usize, one: &T) -> Self {
        let zero = one.zero_like();
        let mut m = Mat::filled(n, n, zero);
        for i in 0..n {
            m[(i, i)] = one.clone();
        }
        m
    }

    pub fn diagonal(entries: Vec<T>) -> Self {
        let n = entries.len();
        let zero = entries[0].zero_like();
        let mut m = Mat::filled(n, n, zero);
        for (i, e) in entries.into_iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn mul(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch in matrix product");
        let zero = self.data.first().or(o.data.first()).expect("empty matrix product").zero_like();
        let mut data = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = zero.clone();
                for k in 0..self.cols {
                    let a = &self[(i, k)];
                    if a.is_zero_elem() {
                        continue;
                    }
                    let b = &o[(k, j)];
                    if b.is_zero_elem() {
                        continue;
                    }
                    acc = acc + a.clone() * b.clone();
                }
                data.push(acc);
            }
        }
        Mat { rows: self.rows, cols: o.cols, data }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (k, x) in v.iter().enumerate() {
                    acc = acc + self[(i, k)].clone() * x.clone();
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &T) -> Mat<T> {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        *x == x.one_like()
                    } else {
                        x.is_zero_elem()
                    }
                })
            })
    }

    /// Determinant by cofactor expansion; intended for the small d used here.
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let idx: Vec<usize> = (0..self.cols).collect();
        self.minor_det(0, &idx)
    }

    fn minor_det(&self, row: usize, cols: &[usize]) -> T {
        if cols.len() == 1 {
            return self[(row, cols[0])].clone();
        }
        let mut acc = self[(row, cols[0])].zero_like();
        for (k, &c) in cols.iter().enumerate() {
            let a = &self[(row, c)];
            if a.is_zero_elem() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = a.clone() * self.minor_det(row + 1, &rest);
            acc = if k % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    /// Adjugate, so that `m * adj(m) = det(m) * I`.
    pub fn adjugate(&self) -> Mat<T> {
        assert!(self.is_square());
        let n = self.rows;
        if n == 1 {
            return Mat::identity(1, &self.data[0].one_like());
        }
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let sub = Mat::from_rows(
                    rows.iter().map(|&r| cols.iter().map(|&c| self[(r, c)].clone()).collect()).collect(),
                );
                let m = sub.det();
                out[(i, j)] = if (i + j) % 2 == 0 { m } else { -m };
            }
        }
        out
    }
}

impl Mat<KElem> {
    /// Exact inverse over F by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<MatK, Error> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let p = self.data.first().map_or(2, |x| x.modulus());
        let mut a = self.clone();
        let mut inv = Mat::identity(n, &KElem::one(p));
        for c in 0..n {
            let piv = (c..n).find(|&r| !a[(r, c)].is_zero()).ok_or(Error::SingularMatrix)?;
            a.swap_rows(c, piv);
            inv.swap_rows(c, piv);
            let pinv = a[(c, c)].inv()?;
            for j in 0..n {
                a[(c, j)] = &a[(c, j)] * &pinv;
                inv[(c, j)] = &inv[(c, j)] * &pinv;
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for j in 0..n {
                    let x = &a[(r, j)] - &(&f * &a[(c, j)]);
                    a[(r, j)] = x;
                    let y = &inv[(r, j)] - &(&f * &inv[(c, j)]);
                    inv[(r, j)] = y;
                }
            }
        }
        Ok(inv)
    }

    /// Minimal valuation over all entries (`None` for the zero matrix).
    pub fn min_valuation(&self) -> Option<i64> {
        self.data.iter().filter_map(|x| x.valuation()).min()
    }

    /// Whether the matrix lies in GL_d(O_∞).
    pub fn is_integral_unit(&self) -> bool {
        self.data.iter().all(|x| x.valuation().is_none_or(|v| v >= 0)) && self.det().valuation() == Some(0)
    }
}

impl Mat<Laurent> {
    pub fn min_valuation(&self) -> Option<i64> {
        self.data.iter().filter_map(|x| x.valuation()).min()
    }

    pub fn to_k(&self) -> MatK {
        self.map(|x| KElem::from(x))
    }

    pub fn mul_t(&self, k: i64) -> MatL {
        self.map(|x| x.mul_t(k))
    }
}

impl Mat<Poly> {
    pub fn to_laurent(&self) -> MatL {
        self.map(|x| Laurent::from(x))
    }

    pub fn to_k(&self) -> MatK {
        self.map(|x| KElem::from_poly(x.clone()))
    }

    /// Max entry degree (-1 for the zero matrix).
    pub fn max_degree(&self) -> i64 {
        self.data.iter().map(|x| x.deg_i64()).max().unwrap_or(-1)
    }

    /// Inverse in GL_d(A), if det is a nonzero constant.
    pub fn inverse_a(&self) -> Result<MatA, Error> {
        let det = self.det();
        if det.deg() != Some(0) {
            return Err(Error::SingularMatrix);
        }
        let p = det.modulus();
        let di = super::fq::raw::inv(det.coeff(0), p);
        Ok(self.adjugate().map(|x| x.scale(di)))
    }

    /// Entrywise reduction modulo m.
    pub fn rem(&self, m: &Poly) -> MatA {
        self.map(|x| x.rem(m))
    }
}

impl<T: fmt::Display> fmt::Display for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

/// `mat_inverse` in free-function form.
pub fn mat_inverse(m: &MatK) -> Result<MatK, Error> {
    m.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_inverse() {
        let id = Mat::identity(3, &KElem::one(5));
        assert_eq!(mat_inverse(&id).unwrap(), id);
    }

    #[test]
    fn monomial_inverse() {
        let p = 2;
        let m = Mat::diagonal(vec![KElem::pi_pow(1, p), KElem::one(p)]);
        let inv = mat_inverse(&m).unwrap();
        assert_eq!(inv, Mat::diagonal(vec![KElem::t(p), KElem::one(p)]));
    }

    #[test]
    fn inverse_multiplies_back() {
        let p = 2;
        let t = KElem::t(p);
        let one = KElem::one(p);
        let m = Mat::from_rows(vec![vec![t, one.clone()], vec![one.clone(), one.clone()]]);
        let inv = mat_inverse(&m).unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn singular_is_rejected() {
        let p = 3;
        let t = KElem::t(p);
        let m = Mat::from_rows(vec![vec![t.clone(), t.clone()], vec![t.clone(), t]]);
        assert!(matches!(mat_inverse(&m), Err(Error::SingularMatrix)));
    }

    #[test]
    fn adjugate_identity() {
        let p = 3;
        let f = |s: &str| Poly::parse(s, p).unwrap();
        let m = Mat::from_rows(vec![
            vec![f("t+1"), f("2"), f("t^2")],
            vec![f("0"), f("t"), f("1")],
            vec![f("1"), f("2t"), f("t+2")],
        ]);
        let det = m.det();
        let prod = m.mul(&m.adjugate());
        assert_eq!(prod, Mat::identity(3, &Poly::one(p)).scale(&det));
    }
}
