//! Homology of finite groups with coefficients in a sign character, from
//! the normalized bar complex, and the exponent bounds for p-groups with a
//! filtration by elementary abelian quotients.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;

use serde::Serialize;

use crate::exactring::fpmat::{self, FpMat};
use crate::exactring::sparse::SparseMatrix;
use crate::exactring::MatA;
use crate::quotient::{matrix_from_json, QuotientComplex, QuotientJson};
use crate::simplicial::{AbelianGroup, ChainComplex, Coeff};
use crate::Error;

/// Largest bar complex built, in generators of C_{s+1}.
pub const BAR_BUDGET: usize = 250_000;

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, Error> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Invalid("multiplication table must be square with entries in range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::Invalid("no identity element".into()))?;
        let inverse = (0..n)
            .map(|x| {
                (0..n)
                    .find(|&y| table[x][y] == identity)
                    .ok_or_else(|| Error::Invalid(format!("element {x} has no inverse")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        // associativity: exhaustive for small groups, a stride sample otherwise
        let step = if n <= 24 { 1 } else { n / 11 + 1 };
        for a in (0..n).step_by(step) {
            for b in 0..n {
                for c in (0..n).step_by(step) {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Invalid("multiplication is not associative".into()));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, identity, inverse })
    }

    /// The group formed by `elems` under `mul`, which must be closed.
    pub fn from_elements<T: Eq + Hash + Clone>(elems: &[T], mul: impl Fn(&T, &T) -> T) -> Result<Self, Error> {
        let index: HashMap<&T, usize> = elems.iter().enumerate().map(|(i, x)| (x, i)).collect();
        if index.len() != elems.len() {
            return Err(Error::Invalid("repeated group elements".into()));
        }
        let table = elems
            .iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| {
                        index.get(&mul(a, b)).copied().ok_or_else(|| Error::Invalid("element set is not closed".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        FiniteGroup::from_table(table)
    }

    pub fn from_matrices(ms: &[MatA]) -> Result<Self, Error> {
        FiniteGroup::from_elements(ms, |a, b| a.mul(b))
    }

    pub fn cyclic(n: usize) -> Self {
        FiniteGroup::from_table((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()).unwrap()
    }

    pub fn direct_product(&self, o: &FiniteGroup) -> Self {
        let (n, m) = (self.order(), o.order());
        let table = (0..n * m)
            .map(|x| (0..n * m).map(|y| self.mul(x / m, y / m) * m + o.mul(x % m, y % m)).collect())
            .collect();
        FiniteGroup::from_table(table).unwrap()
    }

    /// (Z/p)^k
    pub fn elementary_abelian(p: usize, k: usize) -> Self {
        (0..k).fold(FiniteGroup::cyclic(1), |g, _| g.direct_product(&FiniteGroup::cyclic(p)))
    }

    /// Upper unitriangular 3×3 matrices over F_p.
    pub fn heisenberg(p: u32) -> Self {
        let mut elems: Vec<FpMat> = Vec::new();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    elems.push(vec![vec![1, a, b], vec![0, 1, c], vec![0, 0, 1]]);
                }
            }
        }
        FiniteGroup::from_elements(&elems, |x, y| fpmat::mul(x, y, p)).unwrap()
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |x, _| self.mul(x, a))
    }

    /// The subgroup generated by `gens`, as a sorted element list.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::from([self.identity]);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// A small generating set, chosen greedily.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        for x in 0..self.order() {
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = self.generated(&gens);
            }
        }
        gens
    }

    /// (p, k) with |G| = p^k, for p-groups; None otherwise and for the
    /// trivial group.
    pub fn prime_power(&self) -> Option<(usize, u32)> {
        let n = self.order();
        let p = (2..=n).find(|p| n.is_multiple_of(*p))?;
        let mut m = n;
        let mut k = 0;
        while m.is_multiple_of(p) {
            m /= p;
            k += 1;
        }
        (m == 1).then_some((p, k))
    }

    /// Φ(N) = ⟨x^p, [x, y] : x, y ∈ N⟩ for a p-subgroup N.
    pub fn frattini(&self, n: &[usize], p: usize) -> Vec<usize> {
        let mut gens: BTreeSet<usize> = n.iter().map(|&x| self.pow(x, p)).collect();
        for &x in n {
            for &y in n {
                let c = self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y));
                gens.insert(c);
            }
        }
        self.generated(&gens.into_iter().collect::<Vec<_>>())
    }

    /// G = N_0 ⊋ N_1 ⊋ … ⊋ N_ℓ = 1 with N_{i+1} = Φ(N_i). Each N_i is
    /// characteristic, the quotients are elementary abelian, and no
    /// filtration of that kind is shorter.
    pub fn frattini_series(&self) -> Result<Vec<Vec<usize>>, Error> {
        let all: Vec<usize> = (0..self.order()).collect();
        if self.order() == 1 {
            return Ok(vec![all]);
        }
        let (p, _) = self.prime_power().ok_or(Error::NoFiltrationFound)?;
        let mut series = vec![all];
        while series.last().unwrap().len() > 1 {
            let next = self.frattini(series.last().unwrap(), p);
            series.push(next);
        }
        Ok(series)
    }

    /// All homomorphisms to {±1}.
    pub fn sign_characters(&self) -> Vec<SignCharacter> {
        let gens = self.generators();
        let mut out = Vec::new();
        for mask in 0..1u64 << gens.len() {
            let mut val = vec![0i64; self.order()];
            val[self.identity] = 1;
            let mut queue = VecDeque::from([self.identity]);
            let mut ok = true;
            'bfs: while let Some(x) = queue.pop_front() {
                for (k, &g) in gens.iter().enumerate() {
                    let s = if mask >> k & 1 == 1 { -1 } else { 1 };
                    let y = self.mul(x, g);
                    let v = val[x] * s;
                    if val[y] == 0 {
                        val[y] = v;
                        queue.push_back(y);
                    } else if val[y] != v {
                        ok = false;
                        break 'bfs;
                    }
                }
            }
            if ok {
                out.push(SignCharacter { values: val });
            }
        }
        out
    }
}

/// A homomorphism G → {±1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignCharacter {
    pub values: Vec<i64>,
}

impl SignCharacter {
    pub fn trivial(g: &FiniteGroup) -> Self {
        SignCharacter { values: vec![1; g.order()] }
    }

    pub fn new(g: &FiniteGroup, values: Vec<i64>) -> Result<Self, Error> {
        let n = g.order();
        let ok = values.len() == n
            && values.iter().all(|v| v.abs() == 1)
            && (0..n).all(|a| (0..n).all(|b| values[g.mul(a, b)] == values[a] * values[b]));
        if !ok {
            return Err(Error::Invalid("not a character to {±1}".into()));
        }
        Ok(SignCharacter { values })
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 1)
    }
}

/// Index of a bar cell [g_1|…|g_n] with all g_i ≠ 1, base |G|−1.
struct Cells<'a> {
    g: &'a FiniteGroup,
    /// element → digit, identity excluded
    digit: Vec<usize>,
    elem: Vec<usize>,
}

impl Cells<'_> {
    fn new(g: &FiniteGroup) -> Cells<'_> {
        let elem: Vec<usize> = (0..g.order()).filter(|&x| x != g.identity()).collect();
        let mut digit = vec![usize::MAX; g.order()];
        for (k, &x) in elem.iter().enumerate() {
            digit[x] = k;
        }
        Cells { g, digit, elem }
    }

    fn count(&self, n: usize) -> usize {
        self.elem.len().pow(n as u32)
    }

    fn decode(&self, mut idx: usize, n: usize) -> Vec<usize> {
        let b = self.elem.len();
        let mut out = vec![0; n];
        for k in (0..n).rev() {
            out[k] = self.elem[idx % b];
            idx /= b;
        }
        out
    }

    fn encode(&self, cell: &[usize]) -> Option<usize> {
        let b = self.elem.len();
        cell.iter().try_fold(0usize, |acc, &x| (x != self.g.identity()).then(|| acc * b + self.digit[x]))
    }
}

/// ∂_n : C_n → C_{n−1} of the normalized bar complex with Z_χ coefficients.
fn bar_boundary(cells: &Cells, chi: &SignCharacter, n: usize) -> SparseMatrix {
    let g = cells.g;
    let mut m = SparseMatrix::new(cells.count(n - 1), cells.count(n));
    for j in 0..cells.count(n) {
        let c = cells.decode(j, n);
        let mut col: HashMap<usize, i64> = HashMap::new();
        let mut add = |face: &[usize], v: i64| {
            if let Some(i) = cells.encode(face) {
                *col.entry(i).or_insert(0) += v;
            }
        };
        add(&c[1..], chi.values[c[0]]);
        for i in 1..n {
            let mut f = c[..i - 1].to_vec();
            f.push(g.mul(c[i - 1], c[i]));
            f.extend_from_slice(&c[i + 1..]);
            add(&f, if i % 2 == 0 { 1 } else { -1 });
        }
        add(&c[..n - 1], if n.is_multiple_of(2) { 1 } else { -1 });
        let mut entries: Vec<(usize, i64)> = col.into_iter().filter(|&(_, v)| v != 0).collect();
        entries.sort_unstable();
        m.cols[j] = entries;
    }
    m
}

/// H_s(G, Z_χ).
pub fn group_homology(g: &FiniteGroup, chi: &SignCharacter, s: usize) -> Result<AbelianGroup, Error> {
    if chi.values.len() != g.order() {
        return Err(Error::DimensionMismatch("character and group differ in size".into()));
    }
    let cells = Cells::new(g);
    let top = (g.order() - 1).checked_pow(s as u32 + 1).unwrap_or(usize::MAX);
    if top > BAR_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "bar complex of a group of order {} in degree {}",
            g.order(),
            s + 1
        )));
    }
    let ranks: Vec<usize> = (0..=s + 1).map(|n| cells.count(n)).collect();
    let mut bd = vec![SparseMatrix::new(0, 1)];
    for n in 1..=s + 1 {
        bd.push(bar_boundary(&cells, chi, n));
    }
    ChainComplex::new(ranks, bd).homology(s, Coeff::Z)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundVerdict {
    pub order: usize,
    pub p: usize,
    pub s: usize,
    /// Filtration length.
    pub ell: usize,
    pub homology: AbelianGroup,
    /// p^{1+s(ℓ−1)}
    pub bound: u64,
    pub killed: bool,
}

/// Whether p^{1+s(ℓ−1)} kills H_s(G, χ). With `ell` None the Frattini series
/// supplies the filtration.
pub fn exponent_bound_check(
    g: &FiniteGroup,
    chi: &SignCharacter,
    s: usize,
    ell: Option<usize>,
) -> Result<BoundVerdict, Error> {
    let homology = group_homology(g, chi, s)?;
    let (p, ell) = match g.prime_power() {
        None if g.order() == 1 => (1, 0),
        None => return Err(Error::NoFiltrationFound),
        Some((p, _)) => (p, ell.map_or_else(|| g.frattini_series().map(|f| f.len() - 1), Ok)?),
    };
    let bound = if ell == 0 { 1 } else { (p as u64).pow((1 + s * (ell - 1)) as u32) };
    let killed = homology.killed_by(bound);
    Ok(BoundVerdict { order: g.order(), p, s, ell, homology, bound, killed })
}

/// One stabilizer checked against both bounds: p^{1+s(ℓ−1)} with its own
/// filtration, and p^{1+s(d−2)} which needs ℓ ≤ d − 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerVerdict {
    pub dim: usize,
    pub id: usize,
    pub character: Vec<i64>,
    pub verdict: BoundVerdict,
    pub length_ok: bool,
    pub cor_bound: u64,
    pub cor_killed: bool,
}

impl StabilizerVerdict {
    pub fn passed(&self) -> bool {
        self.verdict.killed && self.length_ok && self.cor_killed
    }
}

fn check_stabilizers(
    d: usize,
    groups: impl Iterator<Item = (usize, usize, Vec<MatA>)>,
    max_order: usize,
    max_s: usize,
) -> Result<Vec<StabilizerVerdict>, Error> {
    let mut out = Vec::new();
    let mut memo: HashMap<(Vec<Vec<usize>>, Vec<i64>, usize), BoundVerdict> = HashMap::new();
    for (dim, id, elems) in groups {
        if elems.len() > max_order || elems.len() < 2 {
            continue;
        }
        let g = FiniteGroup::from_matrices(&elems)?;
        for chi in g.sign_characters() {
            for s in 1..=max_s {
                let key = (g.table.clone(), chi.values.clone(), s);
                let verdict = match memo.get(&key) {
                    Some(v) => v.clone(),
                    None => {
                        let v = exponent_bound_check(&g, &chi, s, None)?;
                        memo.insert(key, v.clone());
                        v
                    }
                };
                let cor_bound = (verdict.p as u64).pow((1 + s * (d - 2)) as u32);
                out.push(StabilizerVerdict {
                    dim,
                    id,
                    character: chi.values.clone(),
                    length_ok: verdict.ell < d,
                    cor_killed: verdict.homology.killed_by(cor_bound),
                    cor_bound,
                    verdict,
                });
            }
        }
    }
    Ok(out)
}

/// Bound checks on every listed stabilizer of order ≤ `max_order`.
pub fn harvest(q: &QuotientComplex, max_order: usize, max_s: usize) -> Result<Vec<StabilizerVerdict>, Error> {
    let groups = q.orbits.iter().enumerate().flat_map(|(dim, layer)| {
        layer.iter().enumerate().filter_map(move |(id, r)| r.stabilizer.clone().map(|s| (dim, id, s)))
    });
    check_stabilizers(q.group.d, groups, max_order, max_s)
}

/// As [`harvest`], reading the stabilizers from exported JSON.
pub fn harvest_json(q: &QuotientJson, max_order: usize, max_s: usize) -> Result<Vec<StabilizerVerdict>, Error> {
    let groups = q.simplices.iter().filter_map(|s| {
        s.stabilizer.as_ref().map(|els| (s.dim, s.id, els.iter().map(|m| matrix_from_json(m, q.q)).collect::<Vec<_>>()))
    });
    check_stabilizers(q.d, groups, max_order, max_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(g: &FiniteGroup, s: usize) -> AbelianGroup {
        group_homology(g, &SignCharacter::trivial(g), s).unwrap()
    }

    #[test]
    fn cyclic_group_of_order_two() {
        let g = FiniteGroup::cyclic(2);
        assert_eq!(h(&g, 0), AbelianGroup::free(1));
        assert_eq!(h(&g, 1), AbelianGroup::from_cyclic(0, &[2]));
        assert!(h(&g, 2).is_trivial());
        assert_eq!(h(&g, 3), AbelianGroup::from_cyclic(0, &[2]));
    }

    #[test]
    fn klein_four() {
        let g = FiniteGroup::elementary_abelian(2, 2);
        assert_eq!(h(&g, 1), AbelianGroup::from_cyclic(0, &[2, 2]));
        assert_eq!(h(&g, 2), AbelianGroup::from_cyclic(0, &[2]));
        let v = exponent_bound_check(&g, &SignCharacter::trivial(&g), 2, None).unwrap();
        assert_eq!((v.ell, v.bound, v.killed), (1, 2, true));
    }

    #[test]
    fn twisted_coinvariants() {
        let g = FiniteGroup::cyclic(2);
        let chi = SignCharacter::new(&g, vec![1, -1]).unwrap();
        // Z/(χ(g) − 1) and, for cyclic groups, the twisted H_1 vanishes
        assert_eq!(group_homology(&g, &chi, 0).unwrap(), AbelianGroup::from_cyclic(0, &[2]));
        assert!(group_homology(&g, &chi, 1).unwrap().is_trivial());
    }

    #[test]
    fn heisenberg_has_length_two() {
        let g = FiniteGroup::heisenberg(2);
        assert_eq!(g.order(), 8);
        assert_eq!(g.frattini_series().unwrap().len() - 1, 2);
        let v = exponent_bound_check(&g, &SignCharacter::trivial(&g), 1, None).unwrap();
        assert_eq!(v.bound, 4);
        assert!(v.killed);
        assert_eq!(g.sign_characters().len(), 4);
    }

    #[test]
    fn non_p_groups_have_no_filtration() {
        let g = FiniteGroup::cyclic(6);
        assert_eq!(g.frattini_series(), Err(Error::NoFiltrationFound));
    }

    #[test]
    fn bad_tables_are_rejected() {
        assert!(FiniteGroup::from_table(vec![vec![0, 0], vec![0, 1]]).is_err());
        assert!(SignCharacter::new(&FiniteGroup::cyclic(3), vec![1, -1, -1]).is_err());
    }
}
