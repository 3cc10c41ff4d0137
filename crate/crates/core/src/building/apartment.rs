use std::collections::{HashMap, HashSet};

use itertools::Itertools;

use super::{vertex_key_l, LatticeClassKey};
use crate::exactring::{Mat, MatA, MatK, MatL, Poly};
use crate::simplicial::{permutation_parity, Chain, Complex, LocallyFinite};
use crate::Error;

/// Representative of n modulo Z(1,…,1) with Σn ∈ {0..d−1}.
pub fn normalize_coord(n: &[i64]) -> Vec<i64> {
    let d = n.len() as i64;
    let c = n.iter().sum::<i64>().div_euclid(d);
    n.iter().map(|x| x - c).collect()
}

/// The apartment of an F-basis. Rows are scaled to primitive vectors of A^d,
/// which does not change the apartment.
#[derive(Clone, Debug)]
pub struct Apartment {
    /// Primitive basis rows over A.
    pub rows: MatA,
    /// Columns are the basis vectors.
    cols: MatL,
    p: u32,
}

impl Apartment {
    pub fn new(basis: &MatK) -> Result<Self, Error> {
        let d = basis.rows();
        if !basis.is_square() || d == 0 {
            return Err(Error::DimensionMismatch("basis must be d vectors of length d".into()));
        }
        let p = basis[(0, 0)].modulus();
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let mut l = Poly::one(p);
            for x in basis.row(i) {
                let g = l.gcd(x.den());
                l = (&l * x.den()).div_exact(&g);
            }
            let mut r: Vec<Poly> = basis.row(i).iter().map(|x| (x.num() * &l).div_exact(x.den())).collect();
            let content = r.iter().fold(Poly::zero(p), |g, x| g.gcd(x));
            if content.is_zero() {
                return Err(Error::DegenerateBasis);
            }
            r = r.iter().map(|x| x.div_exact(&content)).collect();
            rows.push(r);
        }
        Apartment::from_rows(Mat::from_rows(rows))
    }

    /// From rows over A; they are made primitive.
    pub fn from_rows(rows: MatA) -> Result<Self, Error> {
        let d = rows.rows();
        let p = rows[(0, 0)].modulus();
        let mut prim = Vec::with_capacity(d);
        for i in 0..d {
            let content = rows.row(i).iter().fold(Poly::zero(p), |g, x| g.gcd(x));
            if content.is_zero() {
                return Err(Error::DegenerateBasis);
            }
            prim.push(rows.row(i).iter().map(|x| x.div_exact(&content)).collect::<Vec<_>>());
        }
        let rows = Mat::from_rows(prim);
        if rows.det().is_zero() {
            return Err(Error::DegenerateBasis);
        }
        let cols = rows.transpose().to_laurent();
        Ok(Apartment { rows, cols, p })
    }

    pub fn dim(&self) -> usize {
        self.rows.rows()
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// deg det of the primitive basis: the colength of ⊕ O(−n_i) inside the
    /// bundle of the apartment vertex n.
    pub fn defect(&self) -> i64 {
        self.rows.det().deg_i64()
    }

    /// Lattice matrix of ⊕ O π^{n_i} v_i.
    pub fn vertex_matrix(&self, n: &[i64]) -> MatL {
        let d = self.dim();
        let mut m = self.cols.clone();
        for j in 0..d {
            for i in 0..d {
                m[(i, j)] = m[(i, j)].mul_t(-n[j]);
            }
        }
        m
    }

    pub fn vertex_key(&self, n: &[i64]) -> Result<LatticeClassKey, Error> {
        vertex_key_l(&self.vertex_matrix(n))
    }
}

pub fn apartment_vertex(basis: &MatK, n: &[i64]) -> Result<LatticeClassKey, Error> {
    Apartment::new(basis)?.vertex_key(n)
}

/// Lifts of the vertices of an apartment simplex into one period
/// x̃_0 ≤ x̃ < x̃_0 + (1,…,1), sorted along the chain. Returns pairs
/// (index into `vertices`, lift).
pub fn simplex_lifts(vertices: &[Vec<i64>]) -> Result<Vec<(usize, Vec<i64>)>, Error> {
    let not_simplex = || Error::Invalid("coordinates do not form an apartment simplex".into());
    let x0 = vertices.first().ok_or_else(not_simplex)?;
    let mut lifts = vec![(0usize, x0.clone())];
    for (idx, x) in vertices.iter().enumerate().skip(1) {
        let k = x0.iter().zip(x).map(|(a, b)| a - b).max().unwrap();
        let lift: Vec<i64> = x.iter().map(|v| v + k).collect();
        let ok = lift.iter().zip(x0).all(|(l, a)| *l >= *a && *l <= a + 1)
            && lift.iter().zip(x0).any(|(l, a)| *l == *a)
            && lift != *x0;
        if !ok {
            return Err(not_simplex());
        }
        lifts.push((idx, lift));
    }
    lifts.sort_by_key(|(_, l)| l.iter().sum::<i64>());
    for w in lifts.windows(2) {
        let (a, b) = (&w[0].1, &w[1].1);
        if a.iter().sum::<i64>() == b.iter().sum::<i64>() || a.iter().zip(b).any(|(x, y)| x > y) {
            return Err(not_simplex());
        }
    }
    Ok(lifts)
}

/// e(σ, x) = x̃ − x̃′ with x̃′ the predecessor of x̃ in the periodic chain.
pub fn e_vector(vertices: &[Vec<i64>], x: usize) -> Result<Vec<i64>, Error> {
    let lifts = simplex_lifts(vertices)?;
    let pos = lifts.iter().position(|(i, _)| *i == x).ok_or_else(|| Error::Invalid("vertex not in simplex".into()))?;
    let cur = &lifts[pos].1;
    let prev: Vec<i64> =
        if pos == 0 { lifts.last().unwrap().1.iter().map(|v| v - 1).collect() } else { lifts[pos - 1].1.clone() };
    Ok(cur.iter().zip(&prev).map(|(a, b)| a - b).collect())
}

/// The ordering [σ] of a top simplex: position i holds the vertex with
/// e(σ, x) = e_i.
pub fn fundamental_orientation(vertices: &[Vec<i64>]) -> Result<Vec<usize>, Error> {
    let d = vertices.first().map_or(0, |v| v.len());
    if vertices.len() != d {
        return Err(Error::NotTopDimensional);
    }
    let mut order = vec![usize::MAX; d];
    for x in 0..d {
        let e = e_vector(vertices, x)?;
        let i =
            e.iter().position(|&c| c == 1).ok_or_else(|| Error::Invalid("e-vector is not a basis vector".into()))?;
        if e.iter().sum::<i64>() != 1 || order[i] != usize::MAX {
            return Err(Error::Invalid("e-vectors of a top simplex must be distinct basis vectors".into()));
        }
        order[i] = x;
    }
    Ok(order)
}

/// A box of apartment coordinates with n_d = 0: lo ≤ (n_1..n_{d−1}) ≤ hi.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl CoordBox {
    pub fn contains(&self, n: &[i64]) -> bool {
        let d = n.len();
        (0..d - 1).all(|i| {
            let v = n[i] - n[d - 1];
            self.lo[i] <= v && v <= self.hi[i]
        })
    }

    pub fn points(&self) -> Vec<Vec<i64>> {
        if self.lo.iter().zip(&self.hi).any(|(a, b)| a > b) {
            return Vec::new();
        }
        if self.lo.is_empty() {
            return vec![vec![0]];
        }
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| a..=b)
            .multi_cartesian_product()
            .map(|mut v| {
                v.push(0);
                v
            })
            .collect()
    }
}

/// The closure of the chambers of the standard apartment lying in a box.
#[derive(Clone, Debug)]
pub struct ApartmentWindow {
    pub d: usize,
    /// Vertex coordinates (n_d = 0), indexed by vertex id.
    pub coords: Vec<Vec<i64>>,
    pub complex: Complex,
    /// Per chamber: top simplex id and the ordering [σ] as vertex ids.
    pub chambers: Vec<(usize, Vec<usize>)>,
}

impl ApartmentWindow {
    pub fn new(d: usize, window: &CoordBox) -> Result<Self, Error> {
        if d < 2 || window.lo.len() != d - 1 || window.hi.len() != d - 1 {
            return Err(Error::DimensionMismatch("window must have d−1 coordinates, d ≥ 2".into()));
        }
        let coords = window.points();
        let id: HashMap<Vec<i64>, usize> = coords.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let norm = |n: &[i64]| -> Vec<i64> { n.iter().map(|x| x - n[d - 1]).collect() };
        let mut seen = HashSet::new();
        let mut facets = Vec::new();
        let mut orders = Vec::new();
        for n in &coords {
            for g in (0..d).permutations(d) {
                let mut cur = n.clone();
                let mut verts = vec![n.clone()];
                for &k in &g[..d - 1] {
                    cur[k] += 1;
                    verts.push(norm(&cur));
                }
                let Some(ids) = verts.iter().map(|v| id.get(v).copied()).collect::<Option<Vec<usize>>>() else {
                    continue;
                };
                let mut sorted = ids.clone();
                sorted.sort_unstable();
                if !seen.insert(sorted.clone()) {
                    continue;
                }
                let order = fundamental_orientation(&verts)?;
                orders.push((sorted.clone(), order.iter().map(|&i| ids[i]).collect::<Vec<_>>()));
                facets.push(sorted);
            }
        }
        let complex = Complex::from_facets(coords.len(), &facets)?;
        let top = d - 1;
        let lookup: HashMap<&Vec<usize>, usize> =
            complex.simplices(top).iter().enumerate().map(|(i, s)| (&s.vertices, i)).collect();
        let chambers = orders.into_iter().map(|(verts, ord)| (lookup[&verts], ord)).collect();
        Ok(ApartmentWindow { d, coords, complex, chambers })
    }

    /// The fundamental chain: +1 in orientation [σ] on each chamber.
    pub fn beta(&self) -> Chain {
        let mut ch = Chain::zero(self.d - 1);
        for (id, order) in &self.chambers {
            ch.add(*id, if permutation_parity(order) { -1 } else { 1 });
        }
        ch
    }

    /// (d−2)-simplices with both adjacent chambers inside the window.
    pub fn interior_faces(&self) -> Vec<usize> {
        let top = self.d - 1;
        let mut cofaces = vec![0usize; self.complex.count(top - 1)];
        for s in self.complex.simplices(top) {
            for &f in &s.faces {
                cofaces[f] += 1;
            }
        }
        (0..cofaces.len()).filter(|&f| cofaces[f] == 2).collect()
    }
}

/// β restricted to a box window, with the window complex.
pub fn beta_window(d: usize, window: &CoordBox) -> Result<(ApartmentWindow, Chain), Error> {
    let w = ApartmentWindow::new(d, window)?;
    let b = w.beta();
    Ok((w, b))
}

/// The standard apartment as an infinite complex.
#[derive(Clone, Copy, Debug)]
pub struct StandardApartment(pub usize);

impl LocallyFinite for StandardApartment {
    type Window = CoordBox;

    fn is_finite(&self) -> bool {
        false
    }

    fn restrict(&self, window: Option<&CoordBox>) -> Result<Complex, Error> {
        let w = window.ok_or(Error::InfiniteChainGroup(self.0.saturating_sub(1)))?;
        Ok(ApartmentWindow::new(self.0, w)?.complex)
    }
}
