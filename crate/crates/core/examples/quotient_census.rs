//! Builds Γ\BT relative to its truncation and prints orbit counts, vertex
//! stabilizers and the rank of H_{d−1} of the pair.
//!
//!     cargo run --release --example quotient_census -- 2 2 t 4

use std::time::Instant;

use btq::quotient::{build_quotient, GroupSpec, QuotientOptions};

fn main() -> Result<(), btq::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let q: u32 = args.first().map_or(2, |s| s.parse().expect("q"));
    let d: usize = args.get(1).map_or(2, |s| s.parse().expect("d"));
    let ideal = args.get(2).map_or("1", |s| s.as_str());
    let alpha: i64 = args.get(3).map_or(d as i64 + 2, |s| s.parse().expect("alpha"));

    let group = GroupSpec::parse(q, d, ideal)?;
    let start = Instant::now();
    let quot = build_quotient(&group, alpha, &QuotientOptions::default())?;
    println!("q = {q}, d = {d}, ideal = ({}), α = {alpha}", group.m);
    println!("orbits per dimension: {:?}", quot.complex.counts());
    println!("core vertices: {}", quot.core_vertices().len());
    for v in quot.core_vertices().into_iter().take(12) {
        let rec = quot.record(0, v);
        println!("  v{v}: type {:?}, |Stab| = {}", rec.splitting_types[0].0, rec.stab_order);
    }
    let h = quot.top_homology()?;
    println!("rank H_{}(pair) = {}", d - 1, h.rank());
    println!("built in {:.2?}", start.elapsed());
    Ok(())
}
