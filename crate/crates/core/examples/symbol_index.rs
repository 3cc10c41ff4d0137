//! Accumulates unimodular modular symbols for Γ_I and reports the index and
//! exponent of their span inside H_{d−1} of the quotient pair.
//!
//!     cargo run --release --example symbol_index -- 2 3 t 3

use std::time::Instant;

use btq::quotient::{build_quotient, GroupSpec, QuotientOptions};
use btq::symbols::{bound_constants, index_and_exponent, ms_lattice, GeneratorStream, StreamBudget};

fn main() -> Result<(), btq::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let q: u32 = args.first().map_or(2, |s| s.parse().expect("q"));
    let d: usize = args.get(1).map_or(2, |s| s.parse().expect("d"));
    let ideal = args.get(2).map_or("t", |s| s.as_str());
    let alpha: i64 = args.get(3).map_or(d as i64 + 2, |s| s.parse().expect("alpha"));

    let start = Instant::now();
    let group = GroupSpec::parse(q, d, ideal)?;
    let quot = build_quotient(&group, alpha, &QuotientOptions::default())?;
    let ms = ms_lattice(&quot, &GeneratorStream::Unimodular, &StreamBudget::default())?;
    println!("{} bases, {}", ms.bases_used, ms.provenance);
    println!("rank MS = {}, rank H = {}", ms.rank(), ms.homology_rank);
    let rep = index_and_exponent(&ms)?;
    let b = bound_constants(d, q, q);
    println!("index = {}, exponent = {}, divisors = {:?}", rep.index, rep.exponent, rep.divisors);
    println!("bound p^e·N = {} (e = {}), within bound: {}", b.bound, b.e, rep.within(&b));
    println!("took {:.2?}", start.elapsed());
    Ok(())
}
