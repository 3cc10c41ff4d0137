//! Harvests the finite stabilizers of a congruence quotient and checks that
//! H_s(H, χ) is killed by p^{1+s(ℓ−1)} and by p^{1+s(d−2)} for every sign
//! character χ.
//!
//!     cargo run --release --example stabilizer_homology -- 2 3 t 3

use std::collections::BTreeMap;

use btq::grouphom::harvest;
use btq::quotient::{build_quotient, GroupSpec, QuotientOptions};

fn main() -> Result<(), btq::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let q: u32 = args.first().map_or(2, |s| s.parse().expect("q"));
    let d: usize = args.get(1).map_or(2, |s| s.parse().expect("d"));
    let ideal = args.get(2).map_or("t", |s| s.as_str());
    let alpha: i64 = args.get(3).map_or(d as i64 + 1, |s| s.parse().expect("alpha"));

    let group = GroupSpec::parse(q, d, ideal)?;
    let opts = QuotientOptions { stab_element_cap: 16, ..Default::default() };
    let quot = build_quotient(&group, alpha, &opts)?;
    let verdicts = harvest(&quot, 16, 2)?;

    // (order, ℓ, s) → (checks, failures, a sample homology group)
    let mut summary: BTreeMap<(usize, usize, usize), (usize, usize, String)> = BTreeMap::new();
    for v in &verdicts {
        let e = summary.entry((v.verdict.order, v.verdict.ell, v.verdict.s)).or_insert((
            0,
            0,
            v.verdict.homology.to_string(),
        ));
        e.0 += 1;
        if !v.passed() {
            e.1 += 1;
        }
    }
    println!("{} checks on stabilizers of order ≤ 16", verdicts.len());
    for ((order, ell, s), (n, bad, sample)) in summary {
        println!("  |H| = {order:>2}, ℓ = {ell}, s = {s}: {n} checks, {bad} failures (e.g. H_s = {sample})");
    }
    Ok(())
}
