//! Sparse integer column storage and the eliminations homology needs:
//! rank and elementary divisors, kernels with saturated bases, and
//! membership/coordinates in a lattice.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::snf::{smith_divisors, IntMatrix};
use crate::Error;

/// Sparse vector as (index, value) pairs sorted by index, no zeros.
pub type SparseVec = Vec<(usize, i64)>;

/// Column-major sparse integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, cols: vec![Vec::new(); ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::new(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x != 0 {
                    m.cols[j].push((i, x));
                }
            }
        }
        m
    }

    /// Add `v` at (i, j), keeping the column sorted.
    pub fn add_entry(&mut self, i: usize, j: usize, v: i64) {
        let col = &mut self.cols[j];
        match col.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => {
                col[k].1 += v;
                if col[k].1 == 0 {
                    col.remove(k);
                }
            }
            Err(k) => {
                if v != 0 {
                    col.insert(k, (i, v));
                }
            }
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; self.ncols()]; self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                out[i][j] = v;
            }
        }
        out
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.nrows, self.ncols());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m.set(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for &(j, c) in x {
            for &(i, v) in &self.cols[j] {
                *acc.entry(i).or_insert(0) += c * v;
            }
        }
        let mut out: SparseVec = acc.into_iter().filter(|e| e.1 != 0).collect();
        out.sort_unstable();
        out
    }

    pub fn mul(&self, o: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), o.nrows);
        SparseMatrix { nrows: self.nrows, cols: o.cols.iter().map(|c| self.mul_vec(c)).collect() }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::new(self.ncols(), self.nrows);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                t.cols[i].push((j, v));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }
}

/// `a·x + b·y` on sparse vectors, with overflow detection.
pub fn lin_comb(a: i64, x: &SparseVec, b: i64, y: &SparseVec) -> Result<SparseVec, Error> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    let term = |c: i64, v: i64| c.checked_mul(v).ok_or(Error::Overflow);
    while i < x.len() || j < y.len() {
        let (idx, val) = match (x.get(i), y.get(j)) {
            (Some(&(xi, xv)), Some(&(yi, yv))) if xi == yi => {
                i += 1;
                j += 1;
                (xi, term(a, xv)?.checked_add(term(b, yv)?).ok_or(Error::Overflow)?)
            }
            (Some(&(xi, xv)), Some(&(yi, _))) if xi < yi => {
                i += 1;
                (xi, term(a, xv)?)
            }
            (Some(&(xi, xv)), None) => {
                i += 1;
                (xi, term(a, xv)?)
            }
            (_, Some(&(yi, yv))) => {
                j += 1;
                (yi, term(b, yv)?)
            }
            (None, None) => unreachable!(),
        };
        if val != 0 {
            out.push((idx, val));
        }
    }
    Ok(out)
}

/// Rank and the non-unit elementary divisors of a sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divisors {
    pub rank: usize,
    pub nonunit: Vec<BigInt>,
}

/// Elementary divisors by unit-pivot elimination followed by dense SNF of
/// whatever remains. Falls back to dense SNF of the whole matrix if the
/// machine-word elimination overflows.
pub fn elementary_divisors(m: &SparseMatrix) -> Divisors {
    match unit_pivot_elimination(m) {
        Ok((units, rest)) => {
            let s = smith_divisors(&rest);
            Divisors { rank: units + s.rank(), nonunit: s.nonunit_divisors() }
        }
        Err(_) => {
            let s = smith_divisors(&m.to_int_matrix());
            Divisors { rank: s.rank(), nonunit: s.nonunit_divisors() }
        }
    }
}

pub fn rank(m: &SparseMatrix) -> usize {
    elementary_divisors(m).rank
}

/// Eliminates ±1 pivots; returns how many and the dense remainder.
fn unit_pivot_elimination(m: &SparseMatrix) -> Result<(usize, IntMatrix), Error> {
    let mut cols: Vec<HashMap<usize, i64>> = m.cols.iter().map(|c| c.iter().copied().collect()).collect();
    let mut rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.nrows];
    for (j, c) in m.cols.iter().enumerate() {
        for &(i, _) in c {
            rows[i].insert(j);
        }
    }
    let mut alive = vec![true; cols.len()];
    let mut units = 0usize;
    loop {
        let mut progress = false;
        let mut order: Vec<usize> = (0..cols.len()).filter(|&j| alive[j] && !cols[j].is_empty()).collect();
        order.sort_by_key(|&j| cols[j].len());
        for j in order {
            if !alive[j] {
                continue;
            }
            let pivot = cols[j].iter().filter(|(_, v)| v.abs() == 1).map(|(&i, &v)| (rows[i].len(), i, v)).min();
            let Some((_, r, pv)) = pivot else { continue };
            let others: Vec<usize> = rows[r].iter().copied().filter(|&c| c != j).collect();
            let pcol: Vec<(usize, i64)> = cols[j].iter().map(|(&i, &v)| (i, v)).collect();
            for c in others {
                let f = cols[c][&r].checked_mul(pv).ok_or(Error::Overflow)?;
                for &(i, v) in &pcol {
                    let e = cols[c].entry(i).or_insert(0);
                    *e = e.checked_sub(f.checked_mul(v).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                    if *e == 0 {
                        cols[c].remove(&i);
                        rows[i].remove(&c);
                    } else {
                        rows[i].insert(c);
                    }
                }
            }
            for &(i, _) in &pcol {
                rows[i].remove(&j);
            }
            cols[j].clear();
            alive[j] = false;
            units += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let live_cols: Vec<usize> = (0..cols.len()).filter(|&j| alive[j] && !cols[j].is_empty()).collect();
    let live_rows: Vec<usize> = (0..m.nrows).filter(|&i| !rows[i].is_empty()).collect();
    let row_pos: HashMap<usize, usize> = live_rows.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut rest = IntMatrix::zeros(live_rows.len(), live_cols.len());
    for (k, &j) in live_cols.iter().enumerate() {
        for (&i, &v) in &cols[j] {
            rest.set(row_pos[&i], k, BigInt::from(v));
        }
    }
    Ok((units, rest))
}

/// Column reduction `M·V = R` with V unimodular and the nonzero columns of R
/// having pairwise distinct lowest (= largest-index) nonzero rows.
#[derive(Clone, Debug)]
pub struct ColumnReduction {
    pub reduced: Vec<SparseVec>,
    pub transform: Vec<SparseVec>,
    /// low row → column index of R owning it.
    pub low_owner: HashMap<usize, usize>,
}

impl ColumnReduction {
    pub fn rank(&self) -> usize {
        self.low_owner.len()
    }

    /// Saturated basis of ker M (columns of V over the zero columns of R).
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        self.reduced.iter().zip(&self.transform).filter(|(r, _)| r.is_empty()).map(|(_, v)| v.clone()).collect()
    }

    /// Solve R·y = target for the nonzero part of R; `None` if target is not
    /// an integral combination of the columns of R.
    pub fn solve(&self, target: &SparseVec) -> Option<SparseVec> {
        let mut rem = target.clone();
        let mut y: Vec<(usize, i64)> = Vec::new();
        while let Some(&(low, val)) = rem.last() {
            let &c = self.low_owner.get(&low)?;
            let col = &self.reduced[c];
            let piv = col.last().unwrap().1;
            if val % piv != 0 {
                return None;
            }
            let f = val / piv;
            rem = lin_comb(1, &rem, -f, col).ok()?;
            y.push((c, f));
        }
        y.sort_unstable();
        Some(y)
    }
}

pub fn column_reduce(m: &SparseMatrix) -> Result<ColumnReduction, Error> {
    let n = m.ncols();
    let mut reduced: Vec<SparseVec> = Vec::with_capacity(n);
    let mut transform: Vec<SparseVec> = Vec::with_capacity(n);
    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    for j in 0..n {
        let mut col = m.cols[j].clone();
        let mut v: SparseVec = vec![(j, 1)];
        while let Some(&(low, b)) = col.last() {
            let Some(&k) = low_owner.get(&low) else {
                low_owner.insert(low, j);
                break;
            };
            let a = reduced[k].last().unwrap().1;
            if b % a == 0 {
                let f = b / a;
                col = lin_comb(1, &col, -f, &reduced[k])?;
                v = lin_comb(1, &v, -f, &transform[k])?;
            } else {
                let e = a.extended_gcd(&b);
                let (g, x, y) = (e.gcd, e.x, e.y);
                let (ag, bg) = (a / g, b / g);
                let new_k = lin_comb(x, &reduced[k], y, &col)?;
                let new_kv = lin_comb(x, &transform[k], y, &v)?;
                col = lin_comb(-bg, &reduced[k], ag, &col)?;
                v = lin_comb(-bg, &transform[k], ag, &v)?;
                reduced[k] = new_k;
                transform[k] = new_kv;
            }
        }
        reduced.push(col);
        transform.push(v);
    }
    Ok(ColumnReduction { reduced, transform, low_owner })
}

/// A lattice given by a basis, in a form that supports coordinates.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    pub basis: Vec<SparseVec>,
    echelon: ColumnReduction,
}

impl LatticeBasis {
    /// `basis` must be linearly independent.
    pub fn new(basis: Vec<SparseVec>, ambient: usize) -> Result<Self, Error> {
        let m = SparseMatrix { nrows: ambient, cols: basis.clone() };
        let echelon = column_reduce(&m)?;
        if echelon.rank() != basis.len() {
            return Err(Error::DimensionMismatch("lattice generators are dependent".into()));
        }
        Ok(LatticeBasis { basis, echelon })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates x with Σ x_k basis_k = v, if v lies in the lattice.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<i64>> {
        let y = self.echelon.solve(v)?;
        // basis · T = R, so v = R y = basis · (T y).
        let mut x = vec![0i64; self.basis.len()];
        for (c, f) in y {
            for &(k, t) in &self.echelon.transform[c] {
                x[k] = x[k].checked_add(f.checked_mul(t)?)?;
            }
        }
        Some(x)
    }
}

/// Convert big divisors to u64 where possible (for display/serialization).
pub fn divisors_to_u64(ds: &[BigInt]) -> Vec<u64> {
    ds.iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect()
}

/// Index of the sublattice generated by the columns of `coords` (r × k, in a
/// basis of the ambient rank-r lattice): (rank, nonunit divisors). The index
/// is finite iff rank == r.
pub fn sublattice_invariants(coords: &[Vec<i64>], r: usize) -> (usize, Vec<BigInt>) {
    let mut m = IntMatrix::zeros(r, coords.len());
    for (j, c) in coords.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            m.set(i, j, BigInt::from(x));
        }
    }
    let s = smith_divisors(&m);
    (s.rank(), s.nonunit_divisors())
}

pub fn product(ds: &[BigInt]) -> BigInt {
    ds.iter().fold(BigInt::one(), |a, b| a * b)
}

pub fn is_unit(x: &BigInt) -> bool {
    x.abs().is_one()
}

pub fn zero_big() -> BigInt {
    BigInt::zero()
}
