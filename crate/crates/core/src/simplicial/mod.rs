//! Generalized simplicial complexes with explicit face maps, chains relative
//! to the ascending-vertex reference orientation, and their homology.
//!
//! A simplex of dimension i has i+1 distinct vertex ids (sorted) and, for
//! i ≥ 1, the list of its facets: `faces[k]` is the facet omitting
//! `vertices[k]`. Several simplices may share a vertex set.

mod barycentric;
mod homology;
mod maps;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::exactring::sparse::SparseMatrix;
use crate::exactring::IntMatrix;
use crate::Error;

pub use barycentric::barycentric_sphere;
pub use homology::{
    cohomology, homology, relative_chain_complex, relative_homology, universal_coeff_check, AbelianGroup, ChainComplex,
    Coeff, RelativeHomology, UctReport,
};
pub use maps::{pushforward_finite, FiniteMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Complex {
    simplices: Vec<Vec<Simplex>>,
}

impl Complex {
    pub fn new() -> Self {
        Complex::default()
    }

    /// Strict complex generated by `facets` on vertices `0..n_vertices`.
    pub fn from_facets(n_vertices: usize, facets: &[Vec<usize>]) -> Result<Self, Error> {
        let mut c = Complex::new();
        for _ in 0..n_vertices {
            c.add_vertex();
        }
        let mut index: HashMap<Vec<usize>, usize> = (0..n_vertices).map(|v| (vec![v], v)).collect();
        let mut all: Vec<Vec<usize>> = Vec::new();
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            if f.iter().any(|&v| v >= n_vertices) {
                return Err(Error::Invalid(format!("facet {f:?} uses an unknown vertex")));
            }
            let n = f.len();
            for mask in 1u64..(1u64 << n) {
                if mask.count_ones() >= 2 {
                    all.push((0..n).filter(|&k| mask >> k & 1 == 1).map(|k| f[k]).collect());
                }
            }
        }
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all.dedup();
        for s in all {
            let faces = (0..s.len())
                .map(|k| {
                    let mut f = s.clone();
                    f.remove(k);
                    index[&f]
                })
                .collect();
            let id = c.add_simplex(s.clone(), faces)?;
            index.insert(s, id);
        }
        Ok(c)
    }

    pub fn add_vertex(&mut self) -> usize {
        if self.simplices.is_empty() {
            self.simplices.push(Vec::new());
        }
        let id = self.simplices[0].len();
        self.simplices[0].push(Simplex { vertices: vec![id], faces: Vec::new() });
        id
    }

    /// Add a simplex of dimension `vertices.len() - 1` ≥ 1 with the given
    /// facets (`faces[k]` omits `vertices[k]`); checks the face axioms.
    pub fn add_simplex(&mut self, vertices: Vec<usize>, faces: Vec<usize>) -> Result<usize, Error> {
        let dim = vertices.len().checked_sub(1).ok_or_else(|| Error::Invalid("empty simplex".into()))?;
        if dim == 0 {
            return Err(Error::Invalid("use add_vertex for vertices".into()));
        }
        if !vertices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!("vertices {vertices:?} must be strictly increasing")));
        }
        if faces.len() != vertices.len() {
            return Err(Error::Invalid("need one facet per vertex".into()));
        }
        let lower = self.simplices.get(dim - 1).ok_or_else(|| Error::Invalid("missing lower dimension".into()))?;
        for (k, &f) in faces.iter().enumerate() {
            let face = lower.get(f).ok_or_else(|| Error::Invalid(format!("unknown face id {f}")))?;
            let mut expect = vertices.clone();
            expect.remove(k);
            if face.vertices != expect {
                return Err(Error::Invalid(format!("face {f} has vertices {:?}, expected {expect:?}", face.vertices)));
            }
        }
        // (σ×V′)×V″ = σ×V″ for codimension two.
        if dim >= 2 {
            for j in 0..vertices.len() {
                for k in j + 1..vertices.len() {
                    // Omit j then k (k shifts down by one in the facet).
                    let a = lower[faces[j]].faces[k - 1];
                    let b = lower[faces[k]].faces[j];
                    if a != b {
                        return Err(Error::Invalid("face maps are not compatible".into()));
                    }
                }
            }
        }
        if self.simplices.len() == dim {
            self.simplices.push(Vec::new());
        }
        let id = self.simplices[dim].len();
        self.simplices[dim].push(Simplex { vertices, faces });
        Ok(id)
    }

    /// Top dimension, or `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().rposition(|s| !s.is_empty())
    }

    pub fn count(&self, i: usize) -> usize {
        self.simplices.get(i).map_or(0, |s| s.len())
    }

    pub fn counts(&self) -> Vec<usize> {
        let top = self.dim().map_or(0, |d| d + 1);
        (0..top).map(|i| self.count(i)).collect()
    }

    pub fn simplex(&self, i: usize, id: usize) -> &Simplex {
        &self.simplices[i][id]
    }

    pub fn simplices(&self, i: usize) -> &[Simplex] {
        self.simplices.get(i).map_or(&[], |s| s.as_slice())
    }

    /// Whether no two simplices of the same dimension share a vertex set.
    pub fn is_strict(&self) -> bool {
        self.simplices.iter().all(|layer| {
            let mut seen: Vec<&Vec<usize>> = layer.iter().map(|s| &s.vertices).collect();
            seen.sort();
            seen.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// ∂_i : C_i → C_{i−1} in reference orientations.
    ///
    /// The facet omitting the vertex in (1-based) position k of the ascending
    /// ordering gets the sign (−1)^k, so an edge a < b has ∂ = [a] − [b].
    pub fn boundary_sparse(&self, i: usize) -> SparseMatrix {
        let mut m = SparseMatrix::new(if i == 0 { 0 } else { self.count(i - 1) }, self.count(i));
        if i == 0 {
            return m;
        }
        for (j, s) in self.simplices(i).iter().enumerate() {
            for (k, &f) in s.faces.iter().enumerate() {
                let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
                m.add_entry(f, j, sign);
            }
        }
        m
    }

    pub fn boundary_matrix(&self, i: usize) -> IntMatrix {
        self.boundary_sparse(i).to_int_matrix()
    }

    pub fn boundary(&self, ch: &Chain) -> Chain {
        let mut out = Chain::zero(ch.dim.saturating_sub(1));
        if ch.dim == 0 {
            return out;
        }
        for (&id, &c) in &ch.entries {
            for (k, &f) in self.simplex(ch.dim, id).faces.iter().enumerate() {
                let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
                out.add(f, sign * c);
            }
        }
        out
    }

    /// The full chain complex (dimensions 0..=top).
    pub fn chain_complex(&self) -> ChainComplex {
        let top = self.dim().map_or(0, |d| d + 1);
        ChainComplex::new(
            (0..top).map(|i| self.count(i)).collect(),
            (0..top).map(|i| self.boundary_sparse(i)).collect(),
        )
    }

    /// Check that `mask` (per-dimension membership) is closed under faces.
    pub fn check_subcomplex(&self, mask: &Subcomplex) -> Result<(), Error> {
        for i in 1..self.simplices.len() {
            for (id, s) in self.simplices[i].iter().enumerate() {
                if mask.contains(i, id) {
                    if let Some(&f) = s.faces.iter().find(|&&f| !mask.contains(i - 1, f)) {
                        return Err(Error::NotSubcomplex(format!(
                            "simplex {id} of dim {i} is in the subcomplex but its face {f} is not"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Relabel vertices by `perm` (old id ↦ new id), keeping everything else.
    pub fn relabel_vertices(&self, perm: &[usize]) -> Result<Complex, Error> {
        let facets: Vec<Vec<usize>> =
            self.maximal_vertex_sets().into_iter().map(|f| f.iter().map(|&v| perm[v]).collect()).collect();
        if !self.is_strict() {
            return Err(Error::Invalid("relabeling is only supported for strict complexes".into()));
        }
        Complex::from_facets(self.count(0), &facets)
    }

    fn maximal_vertex_sets(&self) -> Vec<Vec<usize>> {
        let mut is_face: Vec<Vec<bool>> = self.simplices.iter().map(|l| vec![false; l.len()]).collect();
        for i in 1..self.simplices.len() {
            for s in &self.simplices[i] {
                for &f in &s.faces {
                    is_face[i - 1][f] = true;
                }
            }
        }
        let mut out = Vec::new();
        for (i, layer) in self.simplices.iter().enumerate() {
            for (id, s) in layer.iter().enumerate() {
                if !is_face[i][id] {
                    out.push(s.vertices.clone());
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> ComplexJson {
        let mut simplices = Vec::new();
        for (i, layer) in self.simplices.iter().enumerate() {
            for (id, s) in layer.iter().enumerate() {
                simplices.push(SimplexJson { id, dim: i, vertices: s.vertices.clone(), faces: s.faces.clone() });
            }
        }
        ComplexJson { dims: self.counts(), simplices }
    }

    pub fn from_json(j: &ComplexJson) -> Result<Complex, Error> {
        let mut c = Complex::new();
        let mut sorted: Vec<&SimplexJson> = j.simplices.iter().collect();
        sorted.sort_by_key(|s| (s.dim, s.id));
        for s in sorted {
            let id = if s.dim == 0 { c.add_vertex() } else { c.add_simplex(s.vertices.clone(), s.faces.clone())? };
            if id != s.id {
                return Err(Error::Invalid(format!("simplex ids must be dense, found {} at {}", s.id, id)));
            }
        }
        Ok(c)
    }
}

/// Membership mask for a subcomplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subcomplex {
    members: Vec<Vec<bool>>,
}

impl Subcomplex {
    pub fn empty(c: &Complex) -> Self {
        Subcomplex { members: (0..c.simplices.len()).map(|i| vec![false; c.count(i)]).collect() }
    }

    pub fn full(c: &Complex) -> Self {
        Subcomplex { members: (0..c.simplices.len()).map(|i| vec![true; c.count(i)]).collect() }
    }

    pub fn from_masks(members: Vec<Vec<bool>>) -> Self {
        Subcomplex { members }
    }

    pub fn contains(&self, i: usize, id: usize) -> bool {
        self.members.get(i).and_then(|l| l.get(id)).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, i: usize, id: usize) {
        self.members[i][id] = true;
    }

    /// Add a simplex together with all of its faces.
    pub fn insert_closed(&mut self, c: &Complex, i: usize, id: usize) {
        if self.contains(i, id) {
            return;
        }
        self.members[i][id] = true;
        if i > 0 {
            for &f in &c.simplex(i, id).faces {
                self.insert_closed(c, i - 1, f);
            }
        }
    }
}

/// An integral i-chain, coefficients relative to the reference orientation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub dim: usize,
    pub entries: BTreeMap<usize, i64>,
}

impl Chain {
    pub fn zero(dim: usize) -> Self {
        Chain { dim, entries: BTreeMap::new() }
    }

    pub fn add(&mut self, id: usize, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.entries.entry(id).or_insert(0);
        *e += c;
        if *e == 0 {
            self.entries.remove(&id);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, k: i64) -> Chain {
        let mut out = Chain::zero(self.dim);
        for (&id, &c) in &self.entries {
            out.add(id, c * k);
        }
        out
    }

    pub fn plus(&self, o: &Chain) -> Chain {
        assert_eq!(self.dim, o.dim);
        let mut out = self.clone();
        for (&id, &c) in &o.entries {
            out.add(id, c);
        }
        out
    }

    pub fn to_json(&self) -> ChainJson {
        ChainJson { dim: self.dim, entries: self.entries.iter().map(|(&k, &v)| (k, v)).collect() }
    }
}

/// An orientation of a simplex: an ordering of its vertices up to even
/// permutations, stored as a parity bit against the ascending ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    pub dim: usize,
    pub simplex: usize,
    /// `true` when the orientation is opposite to the reference.
    pub flipped: bool,
}

/// Parity of the permutation that sorts `seq` (distinct entries): true if odd.
pub fn permutation_parity<T: Ord>(seq: &[T]) -> bool {
    let mut odd = false;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                odd = !odd;
            }
        }
    }
    odd
}

impl Orientation {
    pub fn from_ordering(c: &Complex, dim: usize, simplex: usize, ordering: &[usize]) -> Result<Self, Error> {
        let mut sorted = ordering.to_vec();
        sorted.sort_unstable();
        if sorted != c.simplex(dim, simplex).vertices {
            return Err(Error::Invalid("ordering is not a permutation of the vertex set".into()));
        }
        Ok(Orientation { dim, simplex, flipped: permutation_parity(ordering) })
    }

    /// The torsor map s_v: drop v, multiplying by (−1)^(position of v).
    pub fn face(&self, c: &Complex, v: usize) -> Result<Orientation, Error> {
        let s = c.simplex(self.dim, self.simplex);
        let k =
            s.vertices.iter().position(|&x| x == v).ok_or_else(|| Error::Invalid(format!("{v} is not a vertex")))?;
        // Take the lift equal to the reference ordering (flipped when needed
        // by swapping the first two entries, which does not move v unless
        // v is among them; the parity bookkeeping below covers both cases).
        let mut order = s.vertices.clone();
        if self.flipped {
            order.swap(0, 1);
        }
        let pos = order.iter().position(|&x| x == v).unwrap() + 1;
        order.remove(pos - 1);
        let mut flipped = permutation_parity(&order);
        if pos % 2 == 1 {
            flipped = !flipped;
        }
        Ok(Orientation { dim: self.dim - 1, simplex: s.faces[k], flipped })
    }

    pub fn sign(&self) -> i64 {
        if self.flipped {
            -1
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexJson {
    pub id: usize,
    pub dim: usize,
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub dims: Vec<usize>,
    pub simplices: Vec<SimplexJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub dim: usize,
    pub entries: Vec<(usize, i64)>,
}

/// An infinite but locally finite complex that can be cut down to finite windows.
pub trait LocallyFinite {
    type Window;
    fn is_finite(&self) -> bool;
    fn restrict(&self, window: Option<&Self::Window>) -> Result<Complex, Error>;

    fn boundary_in_window(&self, i: usize, window: Option<&Self::Window>) -> Result<SparseMatrix, Error> {
        if window.is_none() && !self.is_finite() {
            return Err(Error::InfiniteChainGroup(i));
        }
        Ok(self.restrict(window)?.boundary_sparse(i))
    }
}
