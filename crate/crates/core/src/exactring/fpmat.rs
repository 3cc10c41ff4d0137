//! Small dense linear algebra over F_p on `Vec<Vec<u32>>` rows.

use super::fq::raw;

pub type FpMat = Vec<Vec<u32>>;

pub fn identity(n: usize) -> FpMat {
    (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect()
}

pub fn mul(a: &FpMat, b: &FpMat, p: u32) -> FpMat {
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    let mut acc = 0u64;
                    for t in 0..k {
                        acc += row[t] as u64 * b[t][j] as u64;
                    }
                    (acc % p as u64) as u32
                })
                .collect()
        })
        .collect()
}

pub fn mul_vec(a: &FpMat, v: &[u32], p: u32) -> Vec<u32> {
    a.iter()
        .map(|row| {
            let acc: u64 = row.iter().zip(v).map(|(&x, &y)| x as u64 * y as u64).sum();
            (acc % p as u64) as u32
        })
        .collect()
}

pub fn transpose(a: &FpMat) -> FpMat {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Reduced row echelon form with zero rows dropped, plus pivot columns.
pub fn rref(rows: &FpMat, p: u32) -> (FpMat, Vec<usize>) {
    let mut a: FpMat = rows.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = raw::inv(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = raw::mul(*x, inv, p);
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..ncols {
                    let v = raw::mul(f, a[r][j], p);
                    a[i][j] = raw::sub(a[i][j], v, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(rows: &FpMat, p: u32) -> usize {
    rref(rows, p).1.len()
}

/// Basis (as rows) of {x : A x = 0}.
pub fn kernel(a: &FpMat, ncols: usize, p: u32) -> FpMat {
    let (r, pivots) = rref(a, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u32; ncols];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = raw::neg(r[i][f], p);
            }
            v
        })
        .collect()
}

pub fn inverse(a: &FpMat, p: u32) -> Option<FpMat> {
    let n = a.len();
    let aug: FpMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, p);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn det(a: &FpMat, p: u32) -> u32 {
    let n = a.len();
    let mut m = a.clone();
    let mut d = 1u32;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| m[i][c] != 0) else {
            return 0;
        };
        if piv != c {
            m.swap(piv, c);
            d = raw::neg(d, p);
        }
        d = raw::mul(d, m[c][c], p);
        let inv = raw::inv(m[c][c], p);
        for i in c + 1..n {
            if m[i][c] != 0 {
                let f = raw::mul(m[i][c], inv, p);
                for j in c..n {
                    let v = raw::mul(f, m[c][j], p);
                    m[i][j] = raw::sub(m[i][j], v, p);
                }
            }
        }
    }
    d
}

/// All rank-`k` subspaces of F_p^n, each as its RREF row basis.
pub fn subspaces(n: usize, k: usize, p: u32) -> Vec<FpMat> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    for pivots in itertools::Itertools::combinations(0..n, k) {
        // Free entries: row i, column c > pivots[i], c not a pivot.
        let slots: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let pv = pivots.clone();
                (pivots[i] + 1..n).filter(move |c| !pv.contains(c)).map(move |c| (i, c))
            })
            .collect();
        let total = (p as u64).pow(slots.len() as u32);
        for mut idx in 0..total {
            let mut m = vec![vec![0u32; n]; k];
            for (i, &pc) in pivots.iter().enumerate() {
                m[i][pc] = 1;
            }
            for &(i, c) in &slots {
                m[i][c] = (idx % p as u64) as u32;
                idx /= p as u64;
            }
            out.push(m);
        }
    }
    out
}

/// All proper nonzero subspaces of F_p^n, ordered by dimension then RREF.
pub fn proper_subspaces(n: usize, p: u32) -> Vec<FpMat> {
    (1..n).flat_map(|k| subspaces(n, k, p)).collect()
}

/// Whether row space of `a` is contained in row space of `b` (both RREF or not).
pub fn contained_in(a: &FpMat, b: &FpMat, p: u32) -> bool {
    let mut stacked = b.clone();
    stacked.extend(a.iter().cloned());
    rank(&stacked, p) == rank(b, p)
}

/// RREF of the image of the row space under x ↦ M x (vectors as columns).
pub fn apply_to_subspace(m: &FpMat, w: &FpMat, p: u32) -> FpMat {
    let imgs: FpMat = w.iter().map(|v| mul_vec(m, v, p)).collect();
    rref(&imgs, p).0
}

/// Size of GL_n(F_p).
pub fn gl_order(n: usize, p: u32) -> u128 {
    let q = p as u128;
    (0..n as u32).map(|i| q.pow(n as u32) - q.pow(i)).product()
}

/// All invertible n×n matrices over F_p.
pub fn gl_elements(n: usize, p: u32) -> Vec<FpMat> {
    let total = (p as u64).pow((n * n) as u32);
    (0..total)
        .filter_map(|mut idx| {
            let m: FpMat = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let v = (idx % p as u64) as u32;
                            idx /= p as u64;
                            v
                        })
                        .collect()
                })
                .collect();
            (det(&m, p) != 0).then_some(m)
        })
        .collect()
}
