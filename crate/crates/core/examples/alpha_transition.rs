//! Relative homology at consecutive truncation levels and the maps between
//! them.
//!
//!     cargo run --release --example alpha_transition -- 2 2 t^2+t+1

use btq::quotient::{build_quotient, transition_between, GroupSpec, QuotientOptions};

fn main() -> Result<(), btq::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let q: u32 = args.first().map_or(2, |s| s.parse().expect("q"));
    let d: usize = args.get(1).map_or(2, |s| s.parse().expect("d"));
    let ideal = args.get(2).map_or("t", |s| s.as_str());
    let top: i64 = args.get(3).map_or(d as i64 + 3, |s| s.parse().expect("max alpha"));

    let g = GroupSpec::parse(q, d, ideal)?;
    let opts = QuotientOptions::default();
    let mut lo = build_quotient(&g, d as i64, &opts)?;
    for a in d as i64..top {
        let hi = build_quotient(&g, a + 1, &opts)?;
        let t = transition_between(&hi, &lo)?;
        println!(
            "α = {} → {a}: orbits {:?} → {:?}, rank {} → {}, isomorphism: {}",
            a + 1,
            hi.complex.counts(),
            lo.complex.counts(),
            t.source_rank,
            t.target_rank,
            t.iso
        );
        if t.source_rank <= 4 {
            for col in &t.matrix {
                println!("    {col:?}");
            }
        }
        lo = hi;
    }
    Ok(())
}
