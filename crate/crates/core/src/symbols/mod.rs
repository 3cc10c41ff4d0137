//! Modular symbols: fundamental classes of apartments pushed to the quotient
//! pair, and the lattice they span in H_{d−1}.
//!
//! The apartment of a basis (q_1, …, q_d) has vertices n ∈ Z^d/Z(1,…,1) with
//! lattice ⊕ O π^{n_i} q_i. With the q_i primitive in A^d and N = deg det,
//! the bundle of vertex n contains ⊕ O(n_i) with colength N, so its
//! HN gaps differ from the sorted gaps of n by at most N. A chamber with a
//! vertex whose sorted gaps exceed α + N somewhere is therefore truncated,
//! which bounds the window that has to be visited.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::time::Instant;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::building::{fundamental_orientation, Apartment};
use crate::exactring::snf::{smith_divisors, IntMatrix};
use crate::exactring::{Mat, MatA, MatK, MatL, Poly};
use crate::quotient::{GroupSpec, OrbitEngine, QuotientComplex, TopHomology};
use crate::simplicial::Chain;
use crate::Error;

/// Coordinates of a class in the computed basis of H_{d−1} of the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeClass {
    pub alpha: i64,
    pub coords: Vec<i64>,
}

impl RelativeClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn plus(&self, o: &RelativeClass, k: i64) -> RelativeClass {
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a + k * b).collect();
        RelativeClass { alpha: self.alpha, coords }
    }
}

fn gaps_within(n: &[i64], reach: i64) -> bool {
    let mut s = n.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[1] - w[0] <= reach)
}

/// Chambers of the standard apartment whose vertices all have sorted
/// coordinate gaps ≤ reach, each given by its vertices in [σ] order.
pub fn chambers_within(d: usize, reach: i64) -> Result<Vec<Vec<Vec<i64>>>, Error> {
    if d < 2 {
        return Err(Error::DimensionMismatch("apartments of dimension ≥ 1 need d ≥ 2".into()));
    }
    let r = (d as i64 - 1) * reach.max(0);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mut n in (0..d - 1).map(|_| -r..=r).multi_cartesian_product() {
        n.push(0);
        if !gaps_within(&n, reach) {
            continue;
        }
        for g in (0..d).permutations(d) {
            let mut cur = n.clone();
            let mut verts = vec![n.clone()];
            for &k in &g[..d - 1] {
                cur[k] += 1;
                verts.push(cur.clone());
            }
            if !verts.iter().all(|v| gaps_within(v, reach)) {
                continue;
            }
            let key: BTreeSet<Vec<i64>> = verts.iter().map(|v| v.iter().map(|x| x - v[d - 1]).collect()).collect();
            if !seen.insert(key) {
                continue;
            }
            let order = fundamental_orientation(&verts)?;
            out.push(order.iter().map(|&i| verts[i].clone()).collect());
        }
    }
    Ok(out)
}

/// Symbol computations against one quotient, with orbit caches.
pub struct SymbolEngine<'a> {
    pub quot: &'a QuotientComplex,
    pub homology: TopHomology,
    engine: OrbitEngine,
    windows: HashMap<i64, Vec<Vec<Vec<i64>>>>,
}

impl<'a> SymbolEngine<'a> {
    pub fn new(quot: &'a QuotientComplex) -> Result<Self, Error> {
        Ok(SymbolEngine {
            quot,
            homology: quot.top_homology()?,
            engine: OrbitEngine::new(quot.group.clone()),
            windows: HashMap::new(),
        })
    }

    fn top(&self) -> usize {
        self.quot.group.d - 1
    }

    /// The relative chain of the basis given by the rows of `basis`.
    /// Degenerate tuples give the zero chain.
    pub fn chain(&mut self, basis: &MatK) -> Result<Chain, Error> {
        let d = self.quot.group.d;
        if basis.rows() != d || basis.cols() != d {
            return Err(Error::DimensionMismatch(format!("expected {d} vectors of length {d}")));
        }
        match Apartment::new(basis) {
            Ok(apt) => self.apartment_chain(&apt),
            Err(Error::DegenerateBasis) => Ok(Chain::zero(self.top())),
            Err(e) => Err(e),
        }
    }

    /// As [`SymbolEngine::chain`], with the basis vectors as rows over A.
    pub fn chain_a(&mut self, rows: &MatA) -> Result<Chain, Error> {
        let d = self.quot.group.d;
        if rows.rows() != d || rows.cols() != d {
            return Err(Error::DimensionMismatch(format!("expected {d} vectors of length {d}")));
        }
        match Apartment::from_rows(rows.clone()) {
            Ok(apt) => self.apartment_chain(&apt),
            Err(Error::DegenerateBasis) => Ok(Chain::zero(self.top())),
            Err(e) => Err(e),
        }
    }

    fn apartment_chain(&mut self, apt: &Apartment) -> Result<Chain, Error> {
        let (d, top, alpha) = (self.quot.group.d, self.top(), self.quot.alpha);
        let reach = alpha + apt.defect();
        if let std::collections::hash_map::Entry::Vacant(e) = self.windows.entry(reach) {
            e.insert(chambers_within(d, reach)?);
        }
        let mut ch = Chain::zero(top);
        for verts in &self.windows[&reach] {
            let lattices: Vec<MatL> = verts.iter().map(|n| apt.vertex_matrix(n)).collect();
            let vd = lattices.iter().map(|h| self.engine.vertex(h)).collect::<Result<Vec<_>, _>>()?;
            if (0..d - 1).any(|i| vd.iter().all(|v| v.dp[i] >= alpha)) {
                continue;
            }
            let info = self.engine.simplex(&lattices)?;
            let id = self.quot.id_of(&info.key).ok_or_else(|| {
                Error::EnumerationIncomplete("an apartment chamber maps to an orbit missing from the quotient".into())
            })?;
            if self.quot.truncated.contains(top, id) {
                continue;
            }
            let keys = info.verts.iter().map(|v| self.engine.vertex_key(v)).collect::<Result<Vec<_>, _>>()?;
            let sign = self
                .quot
                .orientation_sign(&keys)
                .ok_or_else(|| Error::EnumerationIncomplete("chamber vertex missing from the quotient".into()))?;
            ch.add(id, sign);
        }
        Ok(ch)
    }

    pub fn class_of(&self, ch: &Chain) -> Result<RelativeClass, Error> {
        Ok(RelativeClass { alpha: self.quot.alpha, coords: self.homology.coordinates(ch)? })
    }

    pub fn symbol(&mut self, basis: &MatK) -> Result<RelativeClass, Error> {
        let ch = self.chain(basis)?;
        self.class_of(&ch)
    }

    pub fn symbol_a(&mut self, rows: &MatA) -> Result<RelativeClass, Error> {
        let ch = self.chain_a(rows)?;
        self.class_of(&ch)
    }
}

pub fn apartment_core_chain(basis: &MatK, quot: &QuotientComplex) -> Result<Chain, Error> {
    SymbolEngine::new(quot)?.chain(basis)
}

pub fn modular_symbol(basis: &MatK, quot: &QuotientComplex) -> Result<RelativeClass, Error> {
    SymbolEngine::new(quot)?.symbol(basis)
}

/// A sublattice of Z^r kept in integer row echelon form.
#[derive(Clone, Debug)]
pub struct Span {
    pub ambient: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl Span {
    pub fn new(ambient: usize) -> Self {
        Span { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a vector; true if the span grew.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        let mut v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let mut changed = false;
        while let Some(c) = v.iter().position(|x| !x.is_zero()) {
            let Some(k) = self.pivots.iter().position(|&p| p == c) else {
                if v[c].is_negative() {
                    v.iter_mut().for_each(|x| *x = -&*x);
                }
                let at = self.pivots.partition_point(|&p| p < c);
                self.rows.insert(at, v);
                self.pivots.insert(at, c);
                return true;
            };
            let row = &self.rows[k];
            let (p, x) = (row[c].clone(), v[c].clone());
            if (&x % &p).is_zero() {
                let f = &x / &p;
                v.iter_mut().zip(row).for_each(|(a, b)| *a -= &f * b);
            } else {
                let e = p.extended_gcd(&x);
                let (pg, xg) = (&p / &e.gcd, &x / &e.gcd);
                let new_row: Vec<BigInt> = row.iter().zip(&v).map(|(a, b)| &e.x * a + &e.y * b).collect();
                v = v.iter().zip(row).map(|(b, a)| &pg * b - &xg * a).collect();
                self.rows[k] = new_row;
                changed = true;
            }
        }
        changed
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut s = self.clone();
        !s.insert(v)
    }

    /// Elementary divisors of Z^r / span restricted to the rank part: the
    /// nonzero SNF entries of the row matrix.
    pub fn divisors(&self) -> Vec<BigInt> {
        if self.rows.is_empty() {
            return Vec::new();
        }
        let mut m = IntMatrix::zeros(self.rows.len(), self.ambient);
        for (i, r) in self.rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        smith_divisors(&m).divisors
    }
}

/// Which F-bases feed the symbol lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorStream {
    /// Columns of matrices in GL_d(A), one per class in
    /// Γ\GL_d(A)/(monomial matrices); the symbol only depends on the class.
    Unimodular,
    /// Primitive vectors with entries of degree ≤ k, all d-subsets, by
    /// increasing k up to `max_deg`.
    AllBases { max_deg: i64 },
}

#[derive(Clone, Debug)]
pub struct StreamBudget {
    pub max_bases: usize,
    pub deadline: Option<Instant>,
}

impl Default for StreamBudget {
    fn default() -> Self {
        StreamBudget { max_bases: 200_000, deadline: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelReport {
    pub level: i64,
    pub bases: usize,
    pub rank: usize,
    pub changed: bool,
}

#[derive(Clone, Debug)]
pub struct MSLattice {
    pub alpha: i64,
    pub homology_rank: usize,
    pub span: Span,
    /// Distinct nonzero symbol classes, up to sign.
    pub generators: Vec<Vec<i64>>,
    pub levels: Vec<LevelReport>,
    pub stabilized: bool,
    pub bases_used: usize,
    pub provenance: String,
}

impl MSLattice {
    pub fn rank(&self) -> usize {
        self.span.rank()
    }
}

struct Accumulator {
    span: Span,
    seen: HashSet<Vec<i64>>,
    generators: Vec<Vec<i64>>,
}

impl Accumulator {
    fn add(&mut self, c: &RelativeClass) -> bool {
        if c.is_zero() {
            return false;
        }
        let neg: Vec<i64> = c.coords.iter().map(|x| -x).collect();
        let canon = std::cmp::max(c.coords.clone(), neg);
        if !self.seen.insert(canon.clone()) {
            return false;
        }
        self.generators.push(canon.clone());
        self.span.insert(&canon)
    }
}

fn check_deadline(budget: &StreamBudget) -> Result<(), Error> {
    match budget.deadline {
        Some(t) if Instant::now() > t => {
            Err(Error::BudgetExceeded("time budget exhausted while accumulating symbols".into()))
        }
        _ => Ok(()),
    }
}

pub fn ms_lattice(quot: &QuotientComplex, stream: &GeneratorStream, budget: &StreamBudget) -> Result<MSLattice, Error> {
    let mut eng = SymbolEngine::new(quot)?;
    let r = eng.homology.rank();
    let mut acc = Accumulator { span: Span::new(r), seen: HashSet::new(), generators: Vec::new() };
    let mut levels = Vec::new();
    let mut used = 0;
    let (stabilized, provenance) = match stream {
        GeneratorStream::Unimodular => {
            let reps = unimodular_classes(&quot.group, budget.max_bases)?;
            let n = reps.len();
            for (depth, group) in &reps.into_iter().group_by(|(k, _)| *k) {
                let mut changed = false;
                let mut bases = 0;
                for (_, g) in group {
                    check_deadline(budget)?;
                    changed |= acc.add(&eng.symbol_a(&g.transpose())?);
                    bases += 1;
                }
                used += bases;
                levels.push(LevelReport { level: depth as i64, bases, rank: acc.span.rank(), changed });
            }
            // every class was visited, so the span is final
            (true, format!("unimodular: all {n} classes of Γ\\GL_d(A)/monomial"))
        }
        GeneratorStream::AllBases { max_deg } => {
            let mut quiet = 0;
            let mut done = false;
            for k in 0..=*max_deg {
                let mut changed = false;
                let mut bases = 0;
                for rows in bases_at_level(quot.group.q, quot.group.d, k) {
                    check_deadline(budget)?;
                    if used >= budget.max_bases {
                        return Err(Error::NonStabilized(format!(
                            "{used} bases used up before two quiet levels (at degree {k})"
                        )));
                    }
                    changed |= acc.add(&eng.symbol_a(&rows)?);
                    bases += 1;
                    used += 1;
                }
                levels.push(LevelReport { level: k, bases, rank: acc.span.rank(), changed });
                quiet = if changed { 0 } else { quiet + 1 };
                if quiet >= 2 {
                    done = true;
                    break;
                }
            }
            if !done {
                return Err(Error::NonStabilized(format!("span still changing at degree {max_deg}")));
            }
            (true, format!("all bases: primitive vectors up to degree {}", levels.len() - 1))
        }
    };
    Ok(MSLattice {
        alpha: quot.alpha,
        homology_rank: r,
        span: acc.span,
        generators: acc.generators,
        levels,
        stabilized,
        bases_used: used,
        provenance,
    })
}

/// Canonical form of a matrix over A/m up to column scaling by F_q^× and
/// column permutations.
fn monomial_class_key(g: &MatA, p: u32) -> Vec<Vec<Vec<u32>>> {
    let mut cols: Vec<Vec<Vec<u32>>> = (0..g.cols())
        .map(|j| {
            (1..p)
                .map(|c| g.col(j).iter().map(|x| x.scale(c).coeffs().to_vec()).collect::<Vec<_>>())
                .min()
                .unwrap_or_default()
        })
        .collect();
    cols.sort();
    cols
}

/// Lifts to GL_d(A) of Γ\GL_d(A)/monomial, tagged by BFS depth. Breadth
/// first over left multiplication by elementary matrices E_ij(t^k),
/// k < deg m, and diag(c, 1, …, 1).
pub fn unimodular_classes(g: &GroupSpec, cap: usize) -> Result<Vec<(usize, MatA)>, Error> {
    let (d, p, m) = (g.d, g.q, &g.m);
    let one = Poly::one(p);
    let id: MatA = Mat::identity(d, &one);
    let mut gens = Vec::new();
    for k in 0..g.level_degree().max(0) as usize {
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    let mut e = id.clone();
                    e[(i, j)] = Poly::monomial(1, k, p);
                    gens.push(e);
                }
            }
        }
    }
    for c in 2..p {
        let mut e = id.clone();
        e[(0, 0)] = Poly::constant(c, p);
        gens.push(e);
    }
    let mut seen = HashSet::new();
    seen.insert(monomial_class_key(&id.rem(m), p));
    let mut queue = VecDeque::from([(0usize, id)]);
    let mut out = Vec::new();
    while let Some((depth, x)) = queue.pop_front() {
        for e in &gens {
            let y = e.mul(&x);
            if seen.insert(monomial_class_key(&y.rem(m), p)) {
                if seen.len() > cap {
                    return Err(Error::BudgetExceeded(format!("more than {cap} unimodular classes")));
                }
                queue.push_back((depth + 1, y));
            }
        }
        out.push((depth, x));
    }
    Ok(out)
}

/// Primitive vectors of A^d with max entry degree ≤ k, first nonzero entry
/// monic.
fn primitive_vectors(p: u32, d: usize, k: i64) -> Vec<Vec<Poly>> {
    let polys = Poly::all_up_to_degree(p, k);
    (0..d)
        .map(|_| polys.iter().cloned())
        .multi_cartesian_product()
        .filter(|v| {
            let Some(first) = v.iter().find(|x| !x.is_zero()) else { return false };
            first.is_monic() && v.iter().fold(Poly::zero(p), |g, x| g.gcd(x)).is_one()
        })
        .collect()
}

/// Bases whose vectors have degree ≤ k with at least one of degree exactly
/// k, as rows; unordered, since the order only changes the sign.
pub fn bases_at_level(p: u32, d: usize, k: i64) -> Vec<MatA> {
    let vecs = primitive_vectors(p, d, k);
    let vdeg = |v: &Vec<Poly>| v.iter().map(|x| x.deg_i64()).max().unwrap_or(-1);
    vecs.iter()
        .combinations(d)
        .filter(|c| c.iter().any(|v| vdeg(v) == k))
        .map(|c| Mat::from_rows(c.into_iter().cloned().collect()))
        .filter(|m: &MatA| !m.det().is_zero())
        .collect()
}

/// Cokernel invariants of MS ⊆ H.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexReport {
    pub ms_rank: usize,
    pub homology_rank: usize,
    pub divisors: Vec<BigInt>,
    pub index: BigInt,
    pub exponent: BigInt,
}

impl IndexReport {
    /// exponent | p^e·N and the p-part of the exponent divides p^e.
    pub fn within(&self, b: &BoundConstants) -> bool {
        (&b.bound % &self.exponent).is_zero() && (&b.p_power % &p_part(&self.exponent, b.p)).is_zero()
    }
}

fn p_part(x: &BigInt, p: u32) -> BigInt {
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut out = BigInt::one();
    while !x.is_zero() && (&x % &p).is_zero() {
        x /= &p;
        out *= &p;
    }
    out
}

pub fn index_and_exponent(l: &MSLattice) -> Result<IndexReport, Error> {
    if l.rank() < l.homology_rank {
        return Err(Error::RankDeficient { ms: l.rank(), total: l.homology_rank });
    }
    let divisors: Vec<BigInt> = l.span.divisors().into_iter().filter(|x| !x.is_one()).collect();
    let index = divisors.iter().fold(BigInt::one(), |a, b| a * b);
    let exponent = divisors.last().cloned().unwrap_or_else(BigInt::one);
    Ok(IndexReport { ms_rank: l.rank(), homology_rank: l.homology_rank, divisors, index, exponent })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundConstants {
    pub p: u32,
    pub e: u32,
    /// ∏_{i=1}^d (q0^i − 1)
    pub n: BigInt,
    pub p_power: BigInt,
    /// p^e · N
    pub bound: BigInt,
}

/// e(d) = (d−2)(1 + (d−1)(d−2)/2), taken as 0 for d < 2.
pub fn bound_constants(d: usize, p: u32, q0: u32) -> BoundConstants {
    let e = if d < 2 { 0 } else { ((d - 2) * (1 + (d - 1) * (d - 2) / 2)) as u32 };
    let q = BigInt::from(q0);
    let n = (1..=d as u32).fold(BigInt::one(), |a, i| a * (q.pow(i) - 1));
    let p_power = BigInt::from(p).pow(e);
    BoundConstants { p, e, bound: &p_power * &n, n, p_power }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_the_formula() {
        assert_eq!(bound_constants(2, 2, 2).e, 0);
        assert_eq!(bound_constants(3, 2, 2).e, 2);
        assert_eq!(bound_constants(4, 2, 2).e, 8);
        assert_eq!(bound_constants(2, 2, 2).n, BigInt::from(3));
        assert_eq!(bound_constants(3, 2, 2).bound, BigInt::from(84));
    }

    #[test]
    fn span_tracks_index() {
        let mut s = Span::new(2);
        assert!(s.insert(&[2, 0]));
        assert!(s.insert(&[0, 3]));
        assert!(!s.insert(&[4, 6]));
        assert!(s.insert(&[3, 0]));
        assert!(s.contains(&[1, 3]));
        assert!(!s.contains(&[0, 1]));
        let ds = s.divisors();
        assert_eq!(ds, vec![BigInt::from(1), BigInt::from(3)]);
    }

    #[test]
    fn chamber_window_counts() {
        // d = 2: edges [n, n+1] with |n| ≤ reach, n+1 ≤ reach.
        assert_eq!(chambers_within(2, 3).unwrap().len(), 6);
        // d = 3, reach 0: only the chambers around the origin class.
        let c = chambers_within(3, 1).unwrap();
        assert!(c.iter().all(|ch| ch.len() == 3));
    }

    #[test]
    fn class_counts_for_small_levels() {
        let g = GroupSpec::full(2, 2).unwrap();
        assert_eq!(unimodular_classes(&g, 100).unwrap().len(), 1);
        let g = GroupSpec::parse(2, 2, "t").unwrap();
        assert_eq!(unimodular_classes(&g, 100).unwrap().len(), 3);
        let g = GroupSpec::parse(2, 3, "t").unwrap();
        assert_eq!(unimodular_classes(&g, 100).unwrap().len(), 28);
        // det must stay in F_q^×: |SL_2(F_4)| / 2
        let g = GroupSpec::parse(2, 2, "t^2+t+1").unwrap();
        assert_eq!(unimodular_classes(&g, 1000).unwrap().len(), 30);
    }
}
