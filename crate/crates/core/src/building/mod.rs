//! The building of PGL_d over K in the lattice model.
//!
//! A vertex is the homothety class of the O_∞-lattice spanned by the columns
//! of an invertible matrix g. Simplices at a vertex L correspond to flags in
//! L/πL ≅ F_q^d.

mod apartment;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactring::fpmat::{self, FpMat};
use crate::exactring::{KElem, Laurent, Mat, MatK, MatL};
use crate::Error;

pub use apartment::{
    apartment_vertex, beta_window, e_vector, fundamental_orientation, normalize_coord, simplex_lifts, Apartment,
    ApartmentWindow, CoordBox, StandardApartment,
};

/// Canonical form of a vertex: the upper triangular basis with diagonal
/// π^{a_i}, entry (i, j) reduced modulo π^{a_i}, and Σa ∈ {0..d−1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeClassKey {
    pub exps: Vec<i64>,
    /// Strictly upper entries in row-major order.
    pub entries: Vec<Laurent>,
    p: u32,
}

impl LatticeClassKey {
    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// v(det) mod d, a Γ-invariant for Γ ⊂ GL_d(A).
    pub fn det_type(&self) -> usize {
        self.exps.iter().sum::<i64>().rem_euclid(self.dim() as i64) as usize
    }

    /// The canonical basis matrix.
    pub fn matrix(&self) -> MatL {
        let d = self.dim();
        let mut m = Mat::filled(d, d, Laurent::zero(self.p));
        let mut k = 0;
        for i in 0..d {
            m[(i, i)] = Laurent::pi_pow(self.exps[i], self.p);
            for j in i + 1..d {
                m[(i, j)] = self.entries[k].clone();
                k += 1;
            }
        }
        m
    }
}

impl fmt::Display for LatticeClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps: Vec<String> = self.exps.iter().map(|a| a.to_string()).collect();
        let offs: Vec<String> = self
            .entries
            .iter()
            .map(|e| {
                if e.is_zero() {
                    "0".to_string()
                } else {
                    let hex: String = e.poly().coeffs().iter().map(|c| format!("{c:02x}")).collect();
                    format!("{}:{hex}", e.shift())
                }
            })
            .collect();
        write!(f, "{}|{}", exps.join(","), offs.join(","))
    }
}

/// Canonical key of the lattice class g·O^d.
pub fn vertex_key(g: &MatK) -> Result<LatticeClassKey, Error> {
    let d = g.rows();
    if !g.is_square() || d == 0 {
        return Err(Error::DimensionMismatch("vertex_key needs a nonempty square matrix".into()));
    }
    let p = g[(0, 0)].modulus();
    if g.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let mut m = g.clone();
    let mut exps = vec![0i64; d];
    // Triangularize bottom-up with column operations over O.
    for i in (0..d).rev() {
        let best = (0..=i).filter_map(|j| m[(i, j)].valuation().map(|v| (v, j))).min().ok_or(Error::SingularMatrix)?;
        let (a, jb) = best;
        m.swap_cols(jb, i);
        let f = &KElem::pi_pow(a, p) / &m[(i, i)];
        for r in 0..=i {
            m[(r, i)] = &m[(r, i)] * &f;
        }
        for j in 0..i {
            if m[(i, j)].is_zero() {
                continue;
            }
            let c = &m[(i, j)] / &m[(i, i)];
            for r in 0..=i {
                let x = &m[(r, j)] - &(&c * &m[(r, i)]);
                m[(r, j)] = x;
            }
        }
        exps[i] = a;
    }
    // Reduce entry (i, j) modulo π^{a_i}, bottom row first within a column.
    for j in 1..d {
        for i in (0..j).rev() {
            let x = m[(i, j)].clone();
            if x.is_zero() {
                continue;
            }
            let r = KElem::from(x.truncate_below(exps[i]));
            let c = &(&x - &r) / &m[(i, i)];
            if c.is_zero() {
                continue;
            }
            for k in 0..=i {
                let y = &m[(k, j)] - &(&c * &m[(k, i)]);
                m[(k, j)] = y;
            }
        }
    }
    let shift = exps.iter().sum::<i64>().div_euclid(d as i64);
    let mut entries = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            let e = m[(i, j)].to_laurent().expect("reduced entries are Laurent polynomials");
            entries.push(e.mul_t(shift));
        }
    }
    let exps = exps.iter().map(|a| a - shift).collect();
    Ok(LatticeClassKey { exps, entries, p })
}

/// `vertex_key` for a Laurent matrix.
pub fn vertex_key_l(g: &MatL) -> Result<LatticeClassKey, Error> {
    vertex_key(&g.to_k())
}

/// Columns spanning the lattice between O^d and πO^d with residue W
/// (W given by RREF rows over F_q).
pub fn residue_lattice(w: &FpMat, d: usize, p: u32) -> MatL {
    let (rows, pivots) = fpmat::rref(w, p);
    let mut m = Mat::filled(d, d, Laurent::zero(p));
    for j in 0..d {
        if let Some(r) = pivots.iter().position(|&c| c == j) {
            for i in 0..d {
                m[(i, j)] = Laurent::constant(rows[r][i], p);
            }
        } else {
            m[(j, j)] = Laurent::pi_pow(1, p);
        }
    }
    m
}

/// All chains W_1 ⊋ W_2 ⊋ … ⊋ W_len of proper nonzero subspaces of F_q^d.
pub fn subspace_chains(d: usize, p: u32, len: usize) -> Vec<Vec<FpMat>> {
    let subs = fpmat::proper_subspaces(d, p);
    let mut out: Vec<Vec<FpMat>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for chain in &out {
            for s in &subs {
                let ok = match chain.last() {
                    None => true,
                    Some(prev) => s.len() < prev.len() && fpmat::contained_in(s, prev, p),
                };
                if ok {
                    let mut c = chain.clone();
                    c.push(s.clone());
                    next.push(c);
                }
            }
        }
        out = next;
    }
    out
}

/// A simplex of the building as a base vertex plus a flag in its residue space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BTSimplex {
    pub base: String,
    /// Decreasing chain of subspaces (RREF row bases).
    pub flag: Vec<FpMat>,
    /// Vertex keys L_0 ⊋ L_1 ⊋ … in chain order.
    pub vertices: Vec<String>,
}

/// Lattice matrices of the simplex given by a flag at h.
pub fn flag_lattices(h: &MatL, flag: &[FpMat], p: u32) -> Vec<MatL> {
    let d = h.rows();
    let mut out = vec![h.clone()];
    out.extend(flag.iter().map(|w| h.mul(&residue_lattice(w, d, p))));
    out
}

pub fn neighbors(v: &LatticeClassKey) -> Result<Vec<LatticeClassKey>, Error> {
    let (d, p) = (v.dim(), v.modulus());
    let h = v.matrix();
    fpmat::proper_subspaces(d, p).iter().map(|w| vertex_key_l(&h.mul(&residue_lattice(w, d, p)))).collect()
}

/// The i-simplices containing v, one per flag of length i in F_q^d.
pub fn flag_simplices(v: &LatticeClassKey, i: usize) -> Result<Vec<BTSimplex>, Error> {
    let (d, p) = (v.dim(), v.modulus());
    if i >= d {
        return Ok(Vec::new());
    }
    let h = v.matrix();
    let base = v.to_string();
    subspace_chains(d, p, i)
        .into_iter()
        .map(|flag| {
            let vertices = flag_lattices(&h, &flag, p)
                .iter()
                .map(|m| vertex_key_l(m).map(|k| k.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(BTSimplex { base: base.clone(), flag, vertices })
        })
        .collect()
}
