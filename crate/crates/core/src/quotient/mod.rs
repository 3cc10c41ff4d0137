//! Arithmetic groups Γ ⊂ GL_d(A) acting on the building, and the finite
//! quotient complex of Γ\BT relative to its truncation.
//!
//! Orbits are classified with Birkhoff data. A vertex is u·v_D with
//! u ∈ GL_d(A) and v_D = diag(π^{a}), and Stab_{GL_d(A)}(v_D) = S_D is the
//! group of s with deg s_ij ≤ a_j − a_i. A simplex through u·v_D is u applied
//! to a flag in the residue space of v_D, so Γ-orbits of simplices are
//! S_D-orbits of pairs (u mod m, flag).

mod build;
mod export;

use std::collections::HashMap;
use std::rc::Rc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bundles::{birkhoff_l, SplittingType};
use crate::exactring::fq::is_prime;
use crate::exactring::{fpmat, fpmat::FpMat, Laurent, Mat, MatA, MatL, Poly};
use crate::Error;

pub use build::{
    alpha_transition, build_quotient, transition_between, OrbitRecord, QuotientComplex, QuotientOptions, TopHomology,
    Transition,
};
pub use export::{matrix_from_json, matrix_to_json, to_dot, QuotientJson, SimplexJson};

/// Γ = GL_d(A) when m = 1, otherwise the principal congruence subgroup of
/// level (m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub q: u32,
    pub d: usize,
    pub m: Poly,
}

impl GroupSpec {
    pub fn new(q: u32, d: usize, m: Poly) -> Result<Self, Error> {
        if !is_prime(q) {
            return Err(Error::Invalid(format!("q = {q} must be prime")));
        }
        if d == 0 {
            return Err(Error::Invalid("d must be at least 1".into()));
        }
        if m.is_zero() {
            return Err(Error::Invalid("the ideal generator must be nonzero".into()));
        }
        Ok(GroupSpec { q, d, m: m.monic() })
    }

    pub fn parse(q: u32, d: usize, ideal: &str) -> Result<Self, Error> {
        if !is_prime(q) {
            return Err(Error::Invalid(format!("q = {q} must be prime")));
        }
        GroupSpec::new(q, d, Poly::parse(ideal, q)?)
    }

    pub fn full(q: u32, d: usize) -> Result<Self, Error> {
        GroupSpec::new(q, d, Poly::one(q))
    }

    pub fn is_full(&self) -> bool {
        self.m.deg() == Some(0)
    }

    pub fn level_degree(&self) -> i64 {
        self.m.deg_i64()
    }

    /// Membership of a matrix over A.
    pub fn contains(&self, g: &MatA) -> bool {
        if g.det().deg() != Some(0) {
            return false;
        }
        let d = g.rows();
        (0..d).all(|i| (0..d).all(|j| (&g[(i, j)] - &Poly::constant(u32::from(i == j), self.q)).rem(&self.m).is_zero()))
    }
}

/// Flattened d×d matrices over A/m.
pub type ResMat = Vec<Poly>;

fn res_of(g: &MatA, m: &Poly) -> ResMat {
    g.to_rows().into_iter().flatten().map(|x| x.rem(m)).collect()
}

fn res_mul(a: &ResMat, b: &ResMat, d: usize, m: &Poly) -> ResMat {
    let p = m.modulus();
    let mut out = vec![Poly::zero(p); d * d];
    for i in 0..d {
        for k in 0..d {
            if a[i * d + k].is_zero() {
                continue;
            }
            for j in 0..d {
                out[i * d + j] = &out[i * d + j] + &(&a[i * d + k] * &b[k * d + j]);
            }
        }
    }
    out.iter().map(|x| x.rem(m)).collect()
}

fn res_identity(d: usize, m: &Poly) -> ResMat {
    let p = m.modulus();
    (0..d * d).map(|k| Poly::constant(u32::from(k % (d + 1) == 0), p).rem(m)).collect()
}

fn res_coeffs(r: &ResMat) -> Vec<Vec<u32>> {
    r.iter().map(|x| x.coeffs().to_vec()).collect()
}

/// Birkhoff data of one vertex.
#[derive(Clone, Debug)]
pub struct VertexData {
    pub u: MatA,
    pub uinv: MatA,
    /// Exponents of the factorization, sorted descending.
    pub a: Vec<i64>,
    /// `a` shifted so that Σ ∈ {0..d−1}.
    pub exps: Vec<i64>,
    pub det_type: usize,
    pub stype: SplittingType,
    /// Δp(1..d−1) of the bundle.
    pub dp: Vec<i64>,
    pub ubar: ResMat,
    /// u·diag(π^{exps}), a small representative of the vertex.
    pub rep: MatL,
}

pub fn vertex_data(h: &MatL, g: &GroupSpec) -> Result<VertexData, Error> {
    let d = h.rows();
    let w = birkhoff_l(h)?;
    let c = w.a.iter().sum::<i64>().div_euclid(d as i64);
    let exps: Vec<i64> = w.a.iter().map(|x| x - c).collect();
    let stype = SplittingType::from_degrees(&w.a.iter().map(|x| -x).collect::<Vec<_>>());
    let dp = stype.polygon().dp;
    let uinv = w.u.inverse_a()?;
    let mut rep = w.u.to_laurent();
    for j in 0..d {
        for i in 0..d {
            rep[(i, j)] = rep[(i, j)].mul_t(-exps[j]);
        }
    }
    Ok(VertexData {
        ubar: res_of(&w.u, &g.m),
        det_type: exps.iter().sum::<i64>().rem_euclid(d as i64) as usize,
        u: w.u,
        uinv,
        a: w.a,
        exps,
        stype,
        dp,
        rep,
    })
}

/// Residue of the lattice h_w in the residue space of the vertex `v`, as
/// RREF rows. `h_w` must be a vertex adjacent to (or equal to) `v`.
pub fn residue_subspace(v: &VertexData, hw: &MatL, p: u32) -> FpMat {
    let d = hw.rows();
    let mut m = v.uinv.to_laurent().mul(hw);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = m[(i, j)].mul_t(v.a[i]);
        }
    }
    let v0 = m.min_valuation().unwrap_or(0);
    let m = m.mul_t(v0);
    let cols: FpMat = (0..d).map(|j| (0..d).map(|i| m[(i, j)].coeff(0)).collect()).collect();
    fpmat::rref(&cols, p).0
}

/// Canonical Γ-orbit key of a simplex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitKey {
    pub exps: Vec<i64>,
    /// u·s mod m, entries as coefficient lists.
    pub level: Vec<Vec<u32>>,
    /// Residue subspaces of the other vertices at the minimal-type vertex.
    pub flag: Vec<FpMat>,
}

impl OrbitKey {
    pub fn dim(&self) -> usize {
        self.flag.len()
    }
}

/// Image of S_D in GL_d(A/m) × GL_d(F_q), s ↦ (s mod m, D^{-1}sD mod π).
#[derive(Clone, Debug)]
pub struct LevelPairs {
    pub pairs: Vec<(ResMat, FpMat, FpMat)>,
    /// |kernel| of the pair map.
    pub fiber: u128,
}

const PAIR_BUDGET: u128 = 2_000_000;

fn blocks(a: &[i64]) -> Vec<Vec<usize>> {
    let d = a.len();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..d {
        match out.last_mut() {
            Some(b) if a[b[0]] == a[i] => b.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn level_pairs(a: &[i64], g: &GroupSpec) -> Result<LevelPairs, Error> {
    let (d, p, m) = (a.len(), g.q, &g.m);
    let dm = g.level_degree();
    let blks = blocks(a);
    let mut fiber: u128 = 1;
    // Per free position: list of (residue, ρ-coefficient).
    let mut slots: Vec<((usize, usize), Vec<(Poly, u32)>)> = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let b = a[j] - a[i];
            if b <= 0 {
                continue;
            }
            let choices: Vec<(Poly, u32)> = if b >= dm {
                fiber = fiber.saturating_mul((p as u128).saturating_pow((b - dm) as u32));
                Poly::all_up_to_degree(p, dm - 1)
                    .into_iter()
                    .flat_map(|r| (0..p).map(move |c| (r.clone(), c)))
                    .collect()
            } else {
                Poly::all_up_to_degree(p, b).into_iter().map(|f| (f.rem(m), f.coeff(b as usize))).collect()
            };
            slots.push(((i, j), choices));
        }
    }
    let block_choices: Vec<Vec<FpMat>> = blks.iter().map(|b| fpmat::gl_elements(b.len(), p)).collect();
    let total = block_choices
        .iter()
        .map(|c| c.len() as u128)
        .chain(slots.iter().map(|(_, c)| c.len() as u128))
        .fold(1u128, |x, y| x.saturating_mul(y));
    if total > PAIR_BUDGET {
        let deg = a.first().zip(a.last()).map_or(0, |(x, y)| x - y);
        return Err(Error::SearchBudgetExceeded { degree: deg, detail: format!("{total} level pairs for type {a:?}") });
    }
    let mut pairs = Vec::with_capacity(total as usize);
    for bsel in index_tuples(block_choices.iter().map(|c| c.len()).collect()) {
        for ssel in index_tuples(slots.iter().map(|(_, c)| c.len()).collect()) {
            let mut sbar = vec![Poly::zero(p); d * d];
            let mut rho = vec![vec![0u32; d]; d];
            for (bi, blk) in blks.iter().enumerate() {
                let c = &block_choices[bi][bsel[bi]];
                for (x, &i) in blk.iter().enumerate() {
                    for (y, &j) in blk.iter().enumerate() {
                        sbar[i * d + j] = Poly::constant(c[x][y], p).rem(m);
                        rho[i][j] = c[x][y];
                    }
                }
            }
            for (k, ((i, j), choices)) in slots.iter().enumerate() {
                let (r, c) = &choices[ssel[k]];
                sbar[i * d + j] = r.clone();
                rho[*i][*j] = *c;
            }
            let rinv = fpmat::inverse(&rho, p).expect("block triangular with invertible blocks");
            pairs.push((sbar, rho, rinv));
        }
    }
    Ok(LevelPairs { pairs, fiber })
}

/// All index tuples for the given factor sizes (one empty tuple when there
/// are no factors).
fn index_tuples(sizes: Vec<usize>) -> Box<dyn Iterator<Item = Vec<usize>>> {
    if sizes.is_empty() {
        Box::new(std::iter::once(Vec::new()))
    } else {
        Box::new(sizes.into_iter().map(|n| 0..n).multi_cartesian_product())
    }
}

/// Everything the orbit computations know about one simplex.
#[derive(Clone, Debug)]
pub struct SimplexInfo {
    pub key: OrbitKey,
    /// Vertex data in input order.
    pub verts: Vec<Rc<VertexData>>,
    /// Position of the minimal-type vertex.
    pub star: usize,
    /// Residue subspaces of the other vertices at the star, sorted.
    pub flag: Vec<FpMat>,
    pub stab_order: u128,
}

impl SimplexInfo {
    /// Some i has Δp(i) ≥ α at every vertex.
    pub fn truncated(&self, alpha: i64) -> bool {
        let n = self.verts[0].dp.len();
        (0..n).any(|i| self.verts.iter().all(|v| v.dp[i] >= alpha))
    }
}

/// Orbit computations for one group, with caches.
pub struct OrbitEngine {
    pub group: GroupSpec,
    pairs: HashMap<Vec<i64>, Rc<LevelPairs>>,
    verts: HashMap<MatL, Rc<VertexData>>,
    vkeys: HashMap<(Vec<i64>, Vec<Vec<u32>>), OrbitKey>,
}

impl OrbitEngine {
    pub fn new(group: GroupSpec) -> Self {
        OrbitEngine { group, pairs: HashMap::new(), verts: HashMap::new(), vkeys: HashMap::new() }
    }

    pub fn level_pairs(&mut self, exps: &[i64]) -> Result<Rc<LevelPairs>, Error> {
        if let Some(lp) = self.pairs.get(exps) {
            return Ok(lp.clone());
        }
        let lp = Rc::new(level_pairs(exps, &self.group)?);
        self.pairs.insert(exps.to_vec(), lp.clone());
        Ok(lp)
    }

    pub fn vertex(&mut self, h: &MatL) -> Result<Rc<VertexData>, Error> {
        if let Some(v) = self.verts.get(h) {
            return Ok(v.clone());
        }
        let v = Rc::new(vertex_data(h, &self.group)?);
        if self.verts.len() > 200_000 {
            self.verts.clear();
        }
        self.verts.insert(h.clone(), v.clone());
        Ok(v)
    }

    /// Orbit key of a vertex.
    pub fn vertex_key(&mut self, v: &VertexData) -> Result<OrbitKey, Error> {
        let ck = (v.exps.clone(), res_coeffs(&v.ubar));
        if let Some(k) = self.vkeys.get(&ck) {
            return Ok(k.clone());
        }
        let lp = self.level_pairs(&v.exps)?;
        let d = self.group.d;
        let level = lp
            .pairs
            .iter()
            .map(|(s, _, _)| res_coeffs(&res_mul(&v.ubar, s, d, &self.group.m)))
            .min()
            .unwrap_or_default();
        let key = OrbitKey { exps: v.exps.clone(), level, flag: Vec::new() };
        self.vkeys.insert(ck, key.clone());
        Ok(key)
    }

    /// Orbit data of the simplex with the given vertex lattices (any order).
    pub fn simplex(&mut self, lattices: &[MatL]) -> Result<SimplexInfo, Error> {
        let verts = lattices.iter().map(|h| self.vertex(h)).collect::<Result<Vec<_>, _>>()?;
        let star = (0..verts.len())
            .min_by_key(|&i| verts[i].det_type)
            .ok_or_else(|| Error::Invalid("empty simplex".into()))?;
        let types: std::collections::BTreeSet<usize> = verts.iter().map(|v| v.det_type).collect();
        if types.len() != verts.len() {
            return Err(Error::Invalid("vertices of a simplex have distinct types".into()));
        }
        let p = self.group.q;
        let mut flag: Vec<FpMat> =
            (0..verts.len()).filter(|&i| i != star).map(|i| residue_subspace(&verts[star], &verts[i].rep, p)).collect();
        flag.sort();
        let v = verts[star].clone();
        let lp = self.level_pairs(&v.exps)?;
        let (d, m) = (self.group.d, self.group.m.clone());
        let id = res_identity(d, &m);
        let mut best: Option<(Vec<Vec<u32>>, Vec<FpMat>)> = None;
        let mut fixing: u128 = 0;
        for (s, rho, rinv) in &lp.pairs {
            let mut w: Vec<FpMat> = flag.iter().map(|x| fpmat::apply_to_subspace(rinv, x, p)).collect();
            w.sort();
            if *s == id && flag.iter().all(|x| fpmat::apply_to_subspace(rho, x, p) == *x) {
                fixing += 1;
            }
            let cand = (res_coeffs(&res_mul(&v.ubar, s, d, &m)), w);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        let (level, kflag) = best.ok_or_else(|| Error::Invalid("no level pairs".into()))?;
        Ok(SimplexInfo {
            key: OrbitKey { exps: v.exps.clone(), level, flag: kflag },
            verts,
            star,
            flag,
            stab_order: fixing.saturating_mul(lp.fiber),
        })
    }

    /// {γ ∈ Γ : γ·x = y} for simplices given by vertex lattices.
    pub fn transporter(&mut self, x: &[MatL], y: &[MatL], budget: u128) -> Result<Vec<MatA>, Error> {
        let sx = self.simplex(x)?;
        let sy = self.simplex(y)?;
        if sx.key != sy.key {
            return Ok(Vec::new());
        }
        transporter_elements(&self.group, &sx, &sy, budget)
    }

    pub fn stabilizer(&mut self, x: &[MatL], budget: u128) -> Result<Vec<MatA>, Error> {
        let s = self.simplex(x)?;
        transporter_elements(&self.group, &s, &s, budget)
    }
}

/// Enumerates u_y·s·u_x^{-1} over s ∈ S_D with s ≡ ū_y^{-1}ū_x mod m and
/// ρ(s) W_x = W_y.
pub fn transporter_elements(g: &GroupSpec, x: &SimplexInfo, y: &SimplexInfo, budget: u128) -> Result<Vec<MatA>, Error> {
    let (vx, vy) = (&x.verts[x.star], &y.verts[y.star]);
    if vx.exps != vy.exps || x.flag.len() != y.flag.len() {
        return Ok(Vec::new());
    }
    let (d, p, m) = (g.d, g.q, &g.m);
    let dm = g.level_degree();
    let a = &vx.a;
    let target = res_mul(&res_of(&vy.uinv, m), &vx.ubar, d, m);
    let blks = blocks(a);
    let mut max_b = 0;
    let mut block_choices: Vec<Vec<FpMat>> = Vec::new();
    for b in &blks {
        let all = if g.is_full() {
            fpmat::gl_elements(b.len(), p)
        } else {
            let c: Option<FpMat> = b
                .iter()
                .map(|&i| {
                    b.iter()
                        .map(|&j| {
                            target[i * d + j].deg().map_or(Some(0), |k| (k == 0).then(|| target[i * d + j].coeff(0)))
                        })
                        .collect()
                })
                .collect();
            c.filter(|c: &FpMat| fpmat::det(c, p) != 0).into_iter().collect()
        };
        block_choices.push(all);
    }
    let mut slots: Vec<((usize, usize), Vec<Poly>)> = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let b = a[j] - a[i];
            if b == 0 {
                continue;
            }
            let t = &target[i * d + j];
            if b < 0 {
                if !t.is_zero() {
                    return Ok(Vec::new());
                }
                continue;
            }
            max_b = max_b.max(b);
            let choices = if b < dm {
                if t.deg_i64() <= b {
                    vec![t.clone()]
                } else {
                    vec![]
                }
            } else {
                Poly::all_up_to_degree(p, b - dm).iter().map(|q| t + &(m * q)).collect()
            };
            slots.push(((i, j), choices));
        }
    }
    let total = block_choices
        .iter()
        .map(|c| c.len() as u128)
        .chain(slots.iter().map(|(_, c)| c.len() as u128))
        .fold(1u128, |u, v| u.saturating_mul(v));
    if total > budget {
        return Err(Error::SearchBudgetExceeded {
            degree: max_b,
            detail: format!("{total} candidates exceed the budget {budget}"),
        });
    }
    let mut out = Vec::new();
    for bsel in index_tuples(block_choices.iter().map(|c| c.len()).collect()) {
        for ssel in index_tuples(slots.iter().map(|(_, c)| c.len()).collect()) {
            let mut s = Mat::filled(d, d, Poly::zero(p));
            let mut rho = vec![vec![0u32; d]; d];
            for (bi, blk) in blks.iter().enumerate() {
                let c = &block_choices[bi][bsel[bi]];
                for (xi, &i) in blk.iter().enumerate() {
                    for (yi, &j) in blk.iter().enumerate() {
                        s[(i, j)] = Poly::constant(c[xi][yi], p);
                        rho[i][j] = c[xi][yi];
                    }
                }
            }
            for (k, ((i, j), choices)) in slots.iter().enumerate() {
                let f = &choices[ssel[k]];
                rho[*i][*j] = f.coeff((a[*j] - a[*i]) as usize);
                s[(*i, *j)] = f.clone();
            }
            let mut w: Vec<FpMat> = x.flag.iter().map(|f| fpmat::apply_to_subspace(&rho, f, p)).collect();
            w.sort();
            if w != y.flag {
                continue;
            }
            out.push(vy.u.mul(&s).mul(&vx.uinv));
        }
    }
    Ok(out)
}

/// Action of group elements on the vertices of one simplex: for each element
/// the sign of the induced permutation.
pub fn permutation_character<V: PartialEq, E>(
    vertices: &[V],
    elements: &[E],
    act: impl Fn(&E, &V) -> V,
) -> Result<Vec<i64>, Error> {
    elements
        .iter()
        .map(|e| {
            let perm: Vec<usize> = vertices
                .iter()
                .map(|v| {
                    let w = act(e, v);
                    vertices
                        .iter()
                        .position(|x| *x == w)
                        .ok_or_else(|| Error::Invalid("element does not preserve the simplex".into()))
                })
                .collect::<Result<_, _>>()?;
            Ok(if crate::simplicial::permutation_parity(&perm) { -1 } else { 1 })
        })
        .collect()
}

/// Character of the stabilizer of a simplex on its orientations, computed
/// from canonical vertex keys.
pub fn orientation_character(lattices: &[MatL], stabilizer: &[MatA]) -> Result<Vec<i64>, Error> {
    use crate::building::vertex_key_l;
    let keys = lattices.iter().map(vertex_key_l).collect::<Result<Vec<_>, _>>()?;
    let imgs: Vec<Vec<_>> = stabilizer
        .iter()
        .map(|g| lattices.iter().map(|h| vertex_key_l(&g.to_laurent().mul(h))).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    let idx: Vec<usize> = (0..stabilizer.len()).collect();
    permutation_character(&keys, &idx, |&e, v| {
        let pos = keys.iter().position(|k| k == v).unwrap();
        imgs[e][pos].clone()
    })
}

/// diag(π^{a}) as a Laurent matrix.
pub fn diag_pi(a: &[i64], p: u32) -> MatL {
    Mat::diagonal(a.iter().map(|&x| Laurent::pi_pow(x, p)).collect())
}
