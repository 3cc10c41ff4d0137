use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m.data[i * c + j] = x.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Determinant by fraction-free elimination (Bareiss).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(s) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, s);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// rows (a, b) ← (x·a + y·b, z·a + w·b)
    fn combine_rows(&mut self, a: usize, b: usize, [x, y, z, w]: &[BigInt; 4]) {
        for j in 0..self.cols {
            let ra = self.get(a, j).clone();
            let rb = self.get(b, j).clone();
            if ra.is_zero() && rb.is_zero() {
                continue;
            }
            self.set(a, j, x * &ra + y * &rb);
            self.set(b, j, z * &ra + w * &rb);
        }
    }

    /// cols (a, b) ← (x·a + y·b, z·a + w·b)
    fn combine_cols(&mut self, a: usize, b: usize, [x, y, z, w]: &[BigInt; 4]) {
        for i in 0..self.rows {
            let ca = self.get(i, a).clone();
            let cb = self.get(i, b).clone();
            if ca.is_zero() && cb.is_zero() {
                continue;
            }
            self.set(i, a, x * &ca + y * &cb);
            self.set(i, b, z * &ca + w * &cb);
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.get(a, j).clone();
            self.set(a, j, v);
        }
    }

    fn negate_col(&mut self, a: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, a).clone();
            self.set(i, a, v);
        }
    }
}

/// Result of [`smith_normal_form`]: `u · m · v = diag(divisors, 0, …)`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub divisors: Vec<BigInt>,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// Divisors different from 1.
    pub fn nonunit_divisors(&self) -> Vec<BigInt> {
        self.divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// 2×2 unimodular block sending (a, b) to (g, 0), plus its inverse.
fn bezout_block(a: &BigInt, b: &BigInt) -> ([BigInt; 4], [BigInt; 4]) {
    if (b % a).is_zero() {
        // Plain elimination keeps the pivot line untouched, which is what
        // makes the row/column alternation terminate.
        let f = b / a;
        let (one, zero) = (BigInt::one(), BigInt::zero());
        return ([one.clone(), zero.clone(), -f.clone(), one.clone()], [one.clone(), zero, f, one]);
    }
    let e = a.extended_gcd(b);
    let g = e.gcd;
    let (x, y) = (e.x, e.y);
    let ag = a / &g;
    let bg = b / &g;
    // [[x, y], [-b/g, a/g]] has determinant 1; inverse [[a/g, -y], [b/g, x]].
    let fwd = [x.clone(), y.clone(), -bg.clone(), ag.clone()];
    let inv = [ag, -y, bg, x];
    (fwd, inv)
}

/// Smith normal form with unimodular transforms, gcd-first pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    snf(m, true)
}

/// The divisors only. The transforms of [`SnfResult`] are left empty, which
/// matters for wide matrices where V alone would be cols × cols.
pub fn smith_divisors(m: &IntMatrix) -> SnfResult {
    snf(m, false)
}

fn snf(m: &IntMatrix, track: bool) -> SnfResult {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let (tr, tc) = if track { (r, c) } else { (0, 0) };
    let mut u = IntMatrix::identity(tr);
    let mut u_inv = IntMatrix::identity(tr);
    let mut v = IntMatrix::identity(tc);
    let mut divisors = Vec::new();

    for t in 0..r.min(c) {
        // Smallest nonzero entry of the trailing block as the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let x = a.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        if track {
            u.swap_rows(t, pi);
        }
        if track {
            u_inv.swap_cols(t, pi);
        }
        a.swap_cols(t, pj);
        if track {
            v.swap_cols(t, pj);
        }

        loop {
            let mut changed = false;
            for i in t + 1..r {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let (fwd, inv) = bezout_block(&a.get(t, t).clone(), &a.get(i, t).clone());
                a.combine_rows(t, i, &fwd);
                if track {
                    u.combine_rows(t, i, &fwd);
                }
                // u_inv ← u_inv · E^{-1}: columns (t, i) mix by the transpose pattern.
                let inv_t = [inv[0].clone(), inv[2].clone(), inv[1].clone(), inv[3].clone()];
                if track {
                    u_inv.combine_cols(t, i, &inv_t);
                }
                changed = true;
            }
            for j in t + 1..c {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let (fwd, _) = bezout_block(&a.get(t, t).clone(), &a.get(t, j).clone());
                a.combine_cols(t, j, &fwd);
                if track {
                    v.combine_cols(t, j, &fwd);
                }
                changed = true;
            }
            if changed {
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let piv = a.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !(a.get(i, j) % &piv).is_zero()));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    let z = BigInt::zero();
                    let add = [one.clone(), one.clone(), z.clone(), one.clone()];
                    a.combine_rows(t, i, &add);
                    if track {
                        u.combine_rows(t, i, &add);
                    }
                    let sub = [one.clone(), z, -one.clone(), one];
                    if track {
                        u_inv.combine_cols(t, i, &sub);
                    }
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if track {
                u.negate_row(t);
            }
            if track {
                u_inv.negate_col(t);
            }
        }
        divisors.push(a.get(t, t).clone());
    }
    SnfResult { divisors, u, u_inv, v }
}
