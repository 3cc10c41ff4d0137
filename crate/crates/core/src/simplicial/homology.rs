use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Chain, Complex, Subcomplex};
use crate::exactring::snf::{smith_normal_form, IntMatrix};
use crate::exactring::sparse::{column_reduce, elementary_divisors, LatticeBasis, SparseMatrix, SparseVec};
use crate::Error;

/// Coefficient groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coeff {
    Z,
    Q,
    Zn(u64),
}

/// A finitely generated abelian group Z^rank ⊕ ⊕ Z/t_k, t_1 | t_2 | …, all t_k > 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    pub fn free(rank: usize) -> Self {
        AbelianGroup { rank, torsion: Vec::new() }
    }

    /// Normalize arbitrary cyclic orders to invariant factors.
    pub fn from_cyclic(rank: usize, orders: &[u64]) -> Self {
        let nontrivial: Vec<u64> = orders.iter().copied().filter(|&o| o != 1).collect();
        if nontrivial.contains(&0) {
            let extra = nontrivial.iter().filter(|&&o| o == 0).count();
            let rest: Vec<u64> = nontrivial.into_iter().filter(|&o| o != 0).collect();
            return AbelianGroup::from_cyclic(rank + extra, &rest);
        }
        let n = nontrivial.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, &o) in nontrivial.iter().enumerate() {
            m.set(i, i, BigInt::from(o));
        }
        let s = smith_normal_form(&m);
        AbelianGroup { rank, torsion: s.nonunit_divisors().iter().map(|d| d.to_u64().unwrap()).collect() }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Exponent of the torsion part (1 if torsion-free).
    pub fn torsion_exponent(&self) -> u64 {
        self.torsion.last().copied().unwrap_or(1)
    }

    /// Whether n annihilates the group (requires rank 0).
    pub fn killed_by(&self, n: u64) -> bool {
        self.rank == 0 && self.torsion.iter().all(|&t| n.is_multiple_of(t))
    }

    pub fn order(&self) -> Option<u64> {
        (self.rank == 0).then(|| self.torsion.iter().product())
    }

    /// G ⊗ Z/n.
    pub fn tensor_zn(&self, n: u64) -> AbelianGroup {
        let mut orders = vec![n; self.rank];
        orders.extend(self.torsion.iter().map(|&t| t.gcd(&n)));
        AbelianGroup::from_cyclic(0, &orders)
    }

    /// Tor(G, Z/n) ≅ Hom(Z/n, G)-sized: ⊕ Z/gcd(t, n) over torsion.
    pub fn tor_zn(&self, n: u64) -> AbelianGroup {
        let orders: Vec<u64> = self.torsion.iter().map(|&t| t.gcd(&n)).collect();
        AbelianGroup::from_cyclic(0, &orders)
    }

    pub fn direct_sum(&self, o: &AbelianGroup) -> AbelianGroup {
        let mut orders = self.torsion.clone();
        orders.extend(&o.torsion);
        AbelianGroup::from_cyclic(self.rank + o.rank, &orders)
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "Z".into() } else { format!("Z^{}", self.rank) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A finite free chain complex: `bd[i] : C_i → C_{i−1}`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub ranks: Vec<usize>,
    pub bd: Vec<SparseMatrix>,
}

impl ChainComplex {
    pub fn new(ranks: Vec<usize>, bd: Vec<SparseMatrix>) -> Self {
        assert_eq!(ranks.len(), bd.len());
        ChainComplex { ranks, bd }
    }

    fn rank_at(&self, i: usize) -> usize {
        self.ranks.get(i).copied().unwrap_or(0)
    }

    /// ∂_i, with zero maps outside the stored range.
    pub fn boundary(&self, i: usize) -> SparseMatrix {
        match self.bd.get(i) {
            Some(m) if i > 0 => m.clone(),
            _ => SparseMatrix::new(if i == 0 { 0 } else { self.rank_at(i - 1) }, self.rank_at(i)),
        }
    }

    /// Whether every ∂_{i−1} ∂_i vanishes.
    pub fn is_complex(&self) -> bool {
        (2..self.bd.len()).all(|i| self.bd[i - 1].mul(&self.bd[i]).is_zero())
    }

    pub fn homology(&self, i: usize, coeff: Coeff) -> Result<AbelianGroup, Error> {
        subquotient(&self.boundary(i + 1), &self.boundary(i), self.rank_at(i), coeff)
    }

    pub fn cohomology(&self, i: usize, coeff: Coeff) -> Result<AbelianGroup, Error> {
        // δ^i = ∂_{i+1}^T : C^i → C^{i+1}; image of δ^{i−1} = ∂_i^T.
        let incoming = self.boundary(i).transpose();
        let outgoing = self.boundary(i + 1).transpose();
        subquotient(&incoming, &outgoing, self.rank_at(i), coeff)
    }
}

/// ker(outgoing) / im(incoming) on Z^n with the given coefficients.
fn subquotient(
    incoming: &SparseMatrix,
    outgoing: &SparseMatrix,
    n: usize,
    coeff: Coeff,
) -> Result<AbelianGroup, Error> {
    match coeff {
        Coeff::Z => {
            let r_out = elementary_divisors(outgoing).rank;
            let inc = elementary_divisors(incoming);
            let tors: Vec<u64> = inc.nonunit.iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect();
            Ok(AbelianGroup { rank: n - r_out - inc.rank, torsion: tors })
        }
        Coeff::Q => {
            let r_out = elementary_divisors(outgoing).rank;
            let r_in = elementary_divisors(incoming).rank;
            Ok(AbelianGroup::free(n - r_out - r_in))
        }
        Coeff::Zn(m) => subquotient_mod(incoming, outgoing, n, m),
    }
}

/// Lattice route for Z/m coefficients: Λ = {x : ∂x ≡ 0 mod m},
/// H = Λ / (im + mZ^n).
fn subquotient_mod(incoming: &SparseMatrix, outgoing: &SparseMatrix, n: usize, m: u64) -> Result<AbelianGroup, Error> {
    if m == 0 {
        return subquotient(incoming, outgoing, n, Coeff::Z);
    }
    if m == 1 || n == 0 {
        return Ok(AbelianGroup::default());
    }
    let mi = m as i64;
    let k = outgoing.nrows;
    // Kernel of [∂ | m·I] projected to the first n coordinates spans Λ.
    let mut block = SparseMatrix::new(k, n + k);
    for (j, col) in outgoing.cols.iter().enumerate() {
        block.cols[j] = col.clone();
    }
    for r in 0..k {
        block.cols[n + r] = vec![(r, mi)];
    }
    let red = column_reduce(&block)?;
    let mut gens: Vec<SparseVec> = red
        .kernel_basis()
        .into_iter()
        .map(|v| v.into_iter().filter(|&(i, _)| i < n).collect::<SparseVec>())
        .filter(|v| !v.is_empty())
        .collect();
    // Make sure mZ^n is visibly inside (it always is; this keeps Λ full rank).
    for j in 0..n {
        gens.push(vec![(j, mi)]);
    }
    let gmat = SparseMatrix { nrows: n, cols: gens };
    let gred = column_reduce(&gmat)?;
    let basis: Vec<SparseVec> = gred.reduced.into_iter().filter(|c| !c.is_empty()).collect();
    let lat = LatticeBasis::new(basis, n)?;
    let r = lat.rank();
    let mut coords: Vec<Vec<i64>> = Vec::new();
    for col in &incoming.cols {
        coords.push(lat.coordinates(col).ok_or(Error::Invalid("boundary not in Λ".into()))?);
    }
    for j in 0..n {
        coords.push(lat.coordinates(&vec![(j, mi)]).ok_or(Error::Invalid("mZ^n not in Λ".into()))?);
    }
    let mut cm = IntMatrix::zeros(r, coords.len());
    for (j, c) in coords.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            if x != 0 {
                cm.set(i, j, BigInt::from(x));
            }
        }
    }
    let s = smith_normal_form(&cm);
    debug_assert_eq!(s.rank(), r);
    let orders: Vec<u64> = s.nonunit_divisors().iter().map(|d| d.to_u64().unwrap()).collect();
    Ok(AbelianGroup::from_cyclic(0, &orders))
}

pub fn homology(c: &Complex, i: usize, coeff: Coeff) -> Result<AbelianGroup, Error> {
    c.chain_complex().homology(i, coeff)
}

pub fn cohomology(c: &Complex, i: usize, coeff: Coeff) -> Result<AbelianGroup, Error> {
    c.chain_complex().cohomology(i, coeff)
}

/// Homology of a pair together with explicit representing relative cycles.
#[derive(Clone, Debug)]
pub struct RelativeHomology {
    pub dim: usize,
    pub group: AbelianGroup,
    /// One relative cycle per cyclic summand: (chain in the ambient complex,
    /// order of the summand, 0 meaning infinite). Torsion summands first.
    pub generators: Vec<(Chain, u64)>,
}

/// The relative chain complex of (c, sub): simplices outside `sub`, with the
/// induced boundary. Returns the complex and, per dimension, the ambient ids.
pub fn relative_chain_complex(c: &Complex, sub: &Subcomplex) -> Result<(ChainComplex, Vec<Vec<usize>>), Error> {
    c.check_subcomplex(sub)?;
    let top = c.dim().map_or(0, |d| d + 1);
    let ids: Vec<Vec<usize>> = (0..top).map(|i| (0..c.count(i)).filter(|&s| !sub.contains(i, s)).collect()).collect();
    let pos: Vec<BTreeMap<usize, usize>> =
        ids.iter().map(|l| l.iter().enumerate().map(|(k, &s)| (s, k)).collect()).collect();
    let mut bd = Vec::with_capacity(top);
    for i in 0..top {
        let nrows = if i == 0 { 0 } else { ids[i - 1].len() };
        let mut m = SparseMatrix::new(nrows, ids[i].len());
        if i > 0 {
            for (j, &s) in ids[i].iter().enumerate() {
                for (k, &f) in c.simplex(i, s).faces.iter().enumerate() {
                    if let Some(&r) = pos[i - 1].get(&f) {
                        let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
                        m.add_entry(r, j, sign);
                    }
                }
            }
        }
        bd.push(m);
    }
    let ranks = ids.iter().map(|l| l.len()).collect();
    Ok((ChainComplex::new(ranks, bd), ids))
}

pub fn relative_homology(c: &Complex, sub: &Subcomplex, i: usize) -> Result<RelativeHomology, Error> {
    let (cc, ids) = relative_chain_complex(c, sub)?;
    let n = cc.rank_at(i);
    let red = column_reduce(&cc.boundary(i))?;
    let z = red.kernel_basis();
    let r = z.len();
    if r == 0 {
        return Ok(RelativeHomology { dim: i, group: AbelianGroup::default(), generators: Vec::new() });
    }
    let lat = LatticeBasis::new(z.clone(), n)?;
    let incoming = cc.boundary(i + 1);
    let mut cm = IntMatrix::zeros(r, incoming.ncols());
    for (j, col) in incoming.cols.iter().enumerate() {
        let x = lat.coordinates(col).ok_or_else(|| Error::Invalid("boundary is not a cycle".into()))?;
        for (k, v) in x.into_iter().enumerate() {
            if v != 0 {
                cm.set(k, j, BigInt::from(v));
            }
        }
    }
    let s = smith_normal_form(&cm);
    let mut generators = Vec::new();
    let mut torsion = Vec::new();
    for k in 0..r {
        let order: u64 = if k < s.rank() { s.divisors[k].to_u64().unwrap_or(u64::MAX) } else { 0 };
        if order == 1 {
            continue;
        }
        if order > 1 {
            torsion.push(order);
        }
        // New basis vector k of Z: Σ_j z_j (U^{-1})_{jk}.
        let mut ch = Chain::zero(i);
        for (j, zj) in z.iter().enumerate() {
            let f = s.u_inv.get(j, k);
            if f.is_zero() {
                continue;
            }
            let f = f.to_i64().ok_or(Error::Overflow)?;
            for &(row, v) in zj {
                ch.add(ids[i][row], f * v);
            }
        }
        generators.push((ch, order));
    }
    let free = r - s.rank();
    Ok(RelativeHomology { dim: i, group: AbelianGroup { rank: free, torsion }, generators })
}

/// Both universal-coefficient sequences, every term computed independently.
#[derive(Clone, Debug)]
pub struct UctReport {
    pub coeff: Coeff,
    /// (i, H_i(C; M) direct, predicted from integral homology)
    pub homology: Vec<(usize, AbelianGroup, AbelianGroup)>,
    /// (i, H^i(C; M) direct, predicted)
    pub cohomology: Vec<(usize, AbelianGroup, AbelianGroup)>,
}

impl UctReport {
    pub fn ok(&self) -> bool {
        self.homology.iter().chain(&self.cohomology).all(|(_, a, b)| a == b)
    }
}

pub fn universal_coeff_check(c: &Complex, coeff: Coeff) -> Result<UctReport, Error> {
    let cc = c.chain_complex();
    let top = cc.ranks.len();
    let hz: Vec<AbelianGroup> = (0..top).map(|i| cc.homology(i, Coeff::Z)).collect::<Result<_, _>>()?;
    let mut homology = Vec::new();
    let mut cohomology = Vec::new();
    for i in 0..top {
        let prev = if i > 0 { hz[i - 1].clone() } else { AbelianGroup::default() };
        let (hom_pred, coh_pred) = match coeff {
            Coeff::Q => (AbelianGroup::free(hz[i].rank), AbelianGroup::free(hz[i].rank)),
            Coeff::Z => (hz[i].clone(), AbelianGroup::from_cyclic(hz[i].rank, &prev.torsion)),
            Coeff::Zn(n) => {
                let h = hz[i].tensor_zn(n).direct_sum(&prev.tor_zn(n));
                // Hom(H_i, Z/n) ⊕ Ext(H_{i−1}, Z/n).
                let c = hz[i].tensor_zn(n).direct_sum(&prev.tor_zn(n));
                (h, c)
            }
        };
        homology.push((i, cc.homology(i, coeff)?, hom_pred));
        cohomology.push((i, cc.cohomology(i, coeff)?, coh_pred));
    }
    Ok(UctReport { coeff, homology, cohomology })
}

#[allow(dead_code)]
fn big_one() -> BigInt {
    BigInt::one()
}
