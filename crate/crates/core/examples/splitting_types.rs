//! Vertices of the building as bundles on P^1: a Birkhoff factorization of
//! one matrix, then the splitting types met in a ball around the standard
//! vertex.
//!
//!     cargo run --release --example splitting_types -- 2 3 2

use std::collections::{BTreeMap, HashSet};

use btq::building::{neighbors, vertex_key, LatticeClassKey};
use btq::bundles::{birkhoff, splitting_type};
use btq::exactring::{KElem, Mat, Poly};

fn main() -> Result<(), btq::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let q: u32 = args.first().map_or(2, |s| s.parse().expect("q"));
    let d: usize = args.get(1).map_or(3, |s| s.parse().expect("d"));
    let radius: usize = args.get(2).map_or(2, |s| s.parse().expect("radius"));

    let k = |s: &str| Poly::parse(s, q).map(KElem::from_poly);
    let g = Mat::from_rows(vec![vec![k("t^2+1")?, k("t")?], vec![k("1")?, k("t+1")?]]);
    let w = birkhoff(&g)?;
    println!("g =\n{g}");
    println!("g = u·diag(π^a)·k with a = {:?}", w.a);
    println!("u =\n{}", w.u);

    let start = vertex_key(&Mat::identity(d, &KElem::one(q)))?;
    let mut seen: HashSet<LatticeClassKey> = HashSet::from([start.clone()]);
    let mut frontier = vec![start];
    let mut tally: BTreeMap<(usize, Vec<i64>), usize> = BTreeMap::new();
    for r in 0..=radius {
        let mut next = Vec::new();
        for v in &frontier {
            *tally.entry((r, splitting_type(v)?.0)).or_default() += 1;
            if r < radius {
                for n in neighbors(v)? {
                    if seen.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
        }
        frontier = next;
    }
    println!("\nsplitting types at distance r from O^{d} (q = {q}):");
    for ((r, ty), n) in tally {
        println!("  r = {r}  {ty:?}  × {n}");
    }
    Ok(())
}
