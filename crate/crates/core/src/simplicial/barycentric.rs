use itertools::Itertools;

use super::{permutation_parity, Chain, Complex};

/// Proper nonempty subsets of {0..d−1} as bitmasks, ordered by (size, mask).
/// Index in this list is the vertex id in [`barycentric_sphere`].
pub fn proper_subsets(d: usize) -> Vec<u64> {
    let mut v: Vec<u64> = (1..(1u64 << d) - 1).collect();
    v.sort_by_key(|&m| (m.count_ones(), m));
    v
}

/// The flag complex of proper nonempty subsets of a d-element set, with its
/// fundamental (d−2)-cycle: coefficient sgn(g) on the chamber
/// {g(1)} ⊂ {g(1),g(2)} ⊂ … ordered increasingly.
pub fn barycentric_sphere(d: usize) -> (Complex, Chain) {
    assert!((2..=12).contains(&d), "d must be between 2 and 12");
    let subsets = proper_subsets(d);
    let id_of = |m: u64| subsets.binary_search_by_key(&(m.count_ones(), m), |&x| (x.count_ones(), x)).unwrap();
    let mut chambers: Vec<(Vec<usize>, bool)> = Vec::new();
    for g in (0..d).permutations(d) {
        let mut mask = 0u64;
        let mut verts = Vec::with_capacity(d - 1);
        for &x in &g[..d - 1] {
            mask |= 1 << x;
            verts.push(id_of(mask));
        }
        chambers.push((verts, permutation_parity(&g)));
    }
    let facets: Vec<Vec<usize>> = chambers.iter().map(|(v, _)| v.clone()).collect();
    let c = Complex::from_facets(subsets.len(), &facets).expect("flag complex");
    let top = d - 2;
    let mut fund = Chain::zero(top);
    for (verts, odd) in chambers {
        // Increasing inclusion order is increasing (size, mask), i.e. ascending ids.
        let id = if top == 0 { verts[0] } else { c.simplices(top).iter().position(|s| s.vertices == verts).unwrap() };
        fund.add(id, if odd { -1 } else { 1 });
    }
    (c, fund)
}
