use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{GroupSpec, OrbitEngine, OrbitKey, VertexData};
use crate::building::{flag_lattices, subspace_chains, vertex_key_l};
use crate::bundles::SplittingType;
use crate::exactring::snf::IntMatrix;
use crate::exactring::sparse::{column_reduce, LatticeBasis, SparseVec};
use crate::exactring::{Laurent, Mat, MatA, MatL};
use crate::simplicial::{permutation_parity, relative_chain_complex, Chain, Complex, Subcomplex};
use crate::Error;

#[derive(Clone, Debug)]
pub struct QuotientOptions {
    /// Cap on the number of simplex orbits.
    pub max_orbits: usize,
    /// Stabilizer elements are listed when the order is at most this.
    pub stab_element_cap: u128,
    pub deadline: Option<Instant>,
}

/// Candidate budget when listing stabilizer elements.
const STAB_CANDIDATES: u128 = 1 << 18;

impl Default for QuotientOptions {
    fn default() -> Self {
        QuotientOptions { max_orbits: 500_000, stab_element_cap: 64, deadline: None }
    }
}

/// One Γ-orbit of simplices.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub key: OrbitKey,
    /// Vertex lattices of a representative.
    pub rep: Vec<MatL>,
    /// Orbit keys of the vertices, aligned with `rep`.
    pub vertex_keys: Vec<OrbitKey>,
    /// Orbit keys of the facets, `face_keys[k]` omitting `rep[k]`.
    pub face_keys: Vec<OrbitKey>,
    pub stab_order: u128,
    pub splitting_types: Vec<SplittingType>,
    pub truncated: bool,
    pub stabilizer: Option<Vec<MatA>>,
}

/// The finite pair (closure of the non-truncated simplices, its truncated
/// part) computing the relative homology of Γ\BT modulo Γ\BT^(α).
#[derive(Clone, Debug)]
pub struct QuotientComplex {
    pub group: GroupSpec,
    pub alpha: i64,
    pub complex: Complex,
    pub truncated: Subcomplex,
    /// Per dimension, records in id order.
    pub orbits: Vec<Vec<OrbitRecord>>,
    index: Vec<HashMap<OrbitKey, usize>>,
}

struct Builder<'a> {
    engine: OrbitEngine,
    alpha: i64,
    opts: &'a QuotientOptions,
    records: Vec<BTreeMap<OrbitKey, OrbitRecord>>,
    count: usize,
}

impl Builder<'_> {
    fn check_budget(&self) -> Result<(), Error> {
        if self.count > self.opts.max_orbits {
            return Err(Error::BudgetExceeded(format!("more than {} simplex orbits", self.opts.max_orbits)));
        }
        if self.opts.deadline.is_some_and(|t| Instant::now() > t) {
            return Err(Error::BudgetExceeded("time budget exhausted".into()));
        }
        Ok(())
    }

    /// Registers the orbit of a simplex and of all its faces.
    fn register(&mut self, lattices: &[MatL]) -> Result<OrbitKey, Error> {
        let info = self.engine.simplex(lattices)?;
        let dim = lattices.len() - 1;
        if self.records[dim].contains_key(&info.key) {
            return Ok(info.key);
        }
        let mut vertex_keys = Vec::with_capacity(lattices.len());
        for v in &info.verts {
            vertex_keys.push(self.engine.vertex_key(v)?);
        }
        let mut face_keys = Vec::new();
        if dim > 0 {
            for k in 0..lattices.len() {
                let mut f = lattices.to_vec();
                f.remove(k);
                face_keys.push(self.register(&f)?);
            }
        }
        let stabilizer = if info.stab_order <= self.opts.stab_element_cap {
            Some(super::transporter_elements(&self.engine.group, &info, &info, STAB_CANDIDATES)?)
        } else {
            None
        };
        let rec = OrbitRecord {
            key: info.key.clone(),
            rep: info.verts.iter().map(|v| v.rep.clone()).collect(),
            vertex_keys,
            face_keys,
            stab_order: info.stab_order,
            splitting_types: info.verts.iter().map(|v| v.stype.clone()).collect(),
            truncated: info.truncated(self.alpha),
            stabilizer,
        };
        self.records[dim].insert(info.key.clone(), rec);
        self.count += 1;
        Ok(info.key)
    }
}

/// Breadth-first construction of the quotient pair at level α > d − 1.
///
/// Every simplex at a vertex of a non-truncated simplex is examined, so the
/// result contains every non-truncated orbit connected to the base vertex
/// through non-truncated simplices, plus the truncated faces of those.
pub fn build_quotient(group: &GroupSpec, alpha: i64, opts: &QuotientOptions) -> Result<QuotientComplex, Error> {
    let (d, p) = (group.d, group.q);
    if d < 2 {
        return Err(Error::Invalid("quotients need d ≥ 2".into()));
    }
    if alpha < d as i64 {
        return Err(Error::Invalid(format!("α = {alpha} must exceed d − 1 = {}", d - 1)));
    }
    let mut b =
        Builder { engine: OrbitEngine::new(group.clone()), alpha, opts, records: vec![BTreeMap::new(); d], count: 0 };
    let chains: Vec<Vec<_>> = (1..d).map(|len| subspace_chains(d, p, len)).collect();
    let base: MatL = Mat::identity(d, &Laurent::one(p));
    let mut queue = VecDeque::new();
    let mut enqueued: HashSet<OrbitKey> = HashSet::new();
    let base_data = b.engine.vertex(&base)?;
    enqueued.insert(b.engine.vertex_key(&base_data)?);
    b.register(std::slice::from_ref(&base_data.rep))?;
    queue.push_back(base_data.rep.clone());
    let mut seen: HashSet<OrbitKey> = HashSet::new();
    while let Some(h) = queue.pop_front() {
        b.check_budget()?;
        for flags in &chains {
            for flag in flags {
                let lats = flag_lattices(&h, flag, p);
                let info = b.engine.simplex(&lats)?;
                if !seen.insert(info.key.clone()) || info.truncated(alpha) {
                    continue;
                }
                let reps: Vec<MatL> = info.verts.iter().map(|v| v.rep.clone()).collect();
                b.register(&reps)?;
                let verts: Vec<std::rc::Rc<VertexData>> = info.verts.clone();
                for v in verts {
                    let k = b.engine.vertex_key(&v)?;
                    if enqueued.insert(k) {
                        queue.push_back(v.rep.clone());
                    }
                }
            }
        }
    }
    assemble(group.clone(), alpha, b.records)
}

fn assemble(
    group: GroupSpec,
    alpha: i64,
    records: Vec<BTreeMap<OrbitKey, OrbitRecord>>,
) -> Result<QuotientComplex, Error> {
    let index: Vec<HashMap<OrbitKey, usize>> =
        records.iter().map(|m| m.keys().enumerate().map(|(i, k)| (k.clone(), i)).collect()).collect();
    let mut complex = Complex::new();
    let mut masks: Vec<Vec<bool>> = Vec::new();
    let mut orbits: Vec<Vec<OrbitRecord>> = Vec::new();
    for (dim, layer) in records.into_iter().enumerate() {
        if layer.is_empty() {
            break;
        }
        let mut mask = Vec::with_capacity(layer.len());
        let mut recs = Vec::with_capacity(layer.len());
        for rec in layer.into_values() {
            if dim == 0 {
                complex.add_vertex();
            } else {
                let vids: Vec<usize> = rec.vertex_keys.iter().map(|k| index[0][k]).collect();
                let mut order: Vec<usize> = (0..vids.len()).collect();
                order.sort_by_key(|&k| vids[k]);
                let vertices = order.iter().map(|&k| vids[k]).collect();
                let faces = order.iter().map(|&k| index[dim - 1][&rec.face_keys[k]]).collect();
                complex.add_simplex(vertices, faces)?;
            }
            mask.push(rec.truncated);
            recs.push(rec);
        }
        masks.push(mask);
        orbits.push(recs);
    }
    let truncated = Subcomplex::from_masks(masks);
    complex.check_subcomplex(&truncated)?;
    Ok(QuotientComplex { group, alpha, complex, truncated, orbits, index })
}

impl QuotientComplex {
    pub fn id_of(&self, key: &OrbitKey) -> Option<usize> {
        self.index.get(key.dim())?.get(key).copied()
    }

    pub fn record(&self, dim: usize, id: usize) -> &OrbitRecord {
        &self.orbits[dim][id]
    }

    /// Vertex orbits not in the truncation.
    pub fn core_vertices(&self) -> Vec<usize> {
        (0..self.complex.count(0)).filter(|&v| !self.truncated.contains(0, v)).collect()
    }

    /// The sign relating the ordering `vertex_keys` of a simplex to its
    /// reference orientation (ascending vertex ids).
    pub fn orientation_sign(&self, vertex_keys: &[OrbitKey]) -> Option<i64> {
        let ids: Vec<usize> = vertex_keys.iter().map(|k| self.index[0].get(k).copied()).collect::<Option<_>>()?;
        Some(if permutation_parity(&ids) { -1 } else { 1 })
    }

    pub fn top_homology(&self) -> Result<TopHomology, Error> {
        let top = self.group.d - 1;
        let (cc, ids) = relative_chain_complex(&self.complex, &self.truncated)?;
        let ids = ids.get(top).cloned().unwrap_or_default();
        let red = column_reduce(&cc.boundary(top))?;
        let basis = red.kernel_basis();
        let lattice = LatticeBasis::new(basis.clone(), ids.len())?;
        let pos = ids.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        Ok(TopHomology { dim: top, ids, pos, basis, lattice })
    }

    /// Euler characteristic of the pair.
    pub fn relative_euler_characteristic(&self) -> i64 {
        (0..self.group.d)
            .map(|i| {
                let n = (0..self.complex.count(i)).filter(|&s| !self.truncated.contains(i, s)).count() as i64;
                if i % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum()
    }

    /// The canonical lattice key strings of a representative.
    pub fn rep_keys(&self, dim: usize, id: usize) -> Result<Vec<String>, Error> {
        self.orbits[dim][id].rep.iter().map(|h| vertex_key_l(h).map(|k| k.to_string())).collect()
    }
}

/// H_{d−1} of the pair, which is the group of relative top cycles.
#[derive(Clone, Debug)]
pub struct TopHomology {
    pub dim: usize,
    /// Ambient ids of the non-truncated top simplices.
    pub ids: Vec<usize>,
    pos: HashMap<usize, usize>,
    /// Saturated basis, in relative coordinates.
    pub basis: Vec<SparseVec>,
    lattice: LatticeBasis,
}

impl TopHomology {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Relative part of an ambient chain.
    pub fn relative_vector(&self, ch: &Chain) -> SparseVec {
        let mut v: SparseVec = ch.entries.iter().filter_map(|(s, &c)| self.pos.get(s).map(|&k| (k, c))).collect();
        v.sort_unstable();
        v
    }

    /// Coordinates of the class of a relative cycle.
    pub fn coordinates(&self, ch: &Chain) -> Result<Vec<i64>, Error> {
        self.lattice
            .coordinates(&self.relative_vector(ch))
            .ok_or_else(|| Error::Invalid("chain is not a relative cycle".into()))
    }

    /// Basis element k as an ambient chain.
    pub fn basis_chain(&self, k: usize) -> Chain {
        let mut ch = Chain::zero(self.dim);
        for &(r, c) in &self.basis[k] {
            ch.add(self.ids[r], c);
        }
        ch
    }
}

/// The map H_{d−1}(pair at α+1) → H_{d−1}(pair at α).
#[derive(Clone, Debug)]
pub struct Transition {
    /// Column k: image of basis element k of the source, in target coordinates.
    pub matrix: Vec<Vec<i64>>,
    pub source_rank: usize,
    pub target_rank: usize,
    pub iso: bool,
}

/// Transition map between two levels of the same group (`hi.alpha > lo.alpha`).
pub fn transition_between(hi: &QuotientComplex, lo: &QuotientComplex) -> Result<Transition, Error> {
    let top = hi.group.d - 1;
    let (hs, ls) = (hi.top_homology()?, lo.top_homology()?);
    let mut matrix = Vec::with_capacity(hs.rank());
    for k in 0..hs.rank() {
        let mut img = Chain::zero(top);
        for (&s, &c) in &hs.basis_chain(k).entries {
            let rec = hi.record(top, s);
            match lo.id_of(&rec.key) {
                Some(t) if !lo.truncated.contains(top, t) => {
                    // Reference orientations differ by the vertex orders.
                    let vk: Vec<OrbitKey> = {
                        let mut v: Vec<(usize, OrbitKey)> =
                            rec.vertex_keys.iter().map(|x| (hi.id_of(x).unwrap(), x.clone())).collect();
                        v.sort();
                        v.into_iter().map(|(_, x)| x).collect()
                    };
                    let sign = lo
                        .orientation_sign(&vk)
                        .ok_or_else(|| Error::EnumerationIncomplete("vertex missing at the lower level".into()))?;
                    img.add(t, sign * c);
                }
                Some(_) => {}
                None if rec.truncated || lo_truncates(lo, rec) => {}
                None => {
                    return Err(Error::EnumerationIncomplete(format!(
                        "top simplex {s} at α = {} has no orbit at α = {}",
                        hi.alpha, lo.alpha
                    )))
                }
            }
        }
        matrix.push(ls.coordinates(&img)?);
    }
    let (n, r) = (hs.rank(), ls.rank());
    let iso = n == r
        && (n == 0 || {
            let mut m = IntMatrix::zeros(n, n);
            for (j, col) in matrix.iter().enumerate() {
                for (i, &x) in col.iter().enumerate() {
                    m.set(i, j, BigInt::from(x));
                }
            }
            m.det().abs().is_one()
        });
    Ok(Transition { matrix, source_rank: n, target_rank: r, iso })
}

fn lo_truncates(lo: &QuotientComplex, rec: &OrbitRecord) -> bool {
    let n = rec.splitting_types[0].0.len().saturating_sub(1);
    (0..n).any(|i| rec.splitting_types.iter().all(|t| t.polygon().dp[i] >= lo.alpha))
}

pub fn alpha_transition(group: &GroupSpec, alpha: i64, opts: &QuotientOptions) -> Result<Transition, Error> {
    let lo = build_quotient(group, alpha, opts)?;
    let hi = build_quotient(group, alpha + 1, opts)?;
    transition_between(&hi, &lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_line_for_small_alpha() {
        let g = GroupSpec::full(2, 2).unwrap();
        let q = build_quotient(&g, 3, &QuotientOptions::default()).unwrap();
        // Core v0, v1, v2; collar v3.
        assert_eq!(q.complex.count(0), 4);
        assert_eq!(q.complex.count(1), 3);
        assert_eq!(q.core_vertices().len(), 3);
        assert_eq!(q.top_homology().unwrap().rank(), 0);
    }

    #[test]
    fn small_alpha_rejected() {
        let g = GroupSpec::full(2, 3).unwrap();
        assert!(build_quotient(&g, 2, &QuotientOptions::default()).is_err());
    }
}
