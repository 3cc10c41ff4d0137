//! The fundamental class of the standard apartment restricted to a box:
//! ±1 on each chamber, with boundary only on the edge of the box.
//!
//!     cargo run --release --example apartment_beta -- 3 4

use btq::building::{beta_window, CoordBox};

fn main() -> Result<(), btq::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let d: usize = args.first().map_or(3, |s| s.parse().expect("d"));
    let side: i64 = args.get(1).map_or(4, |s| s.parse().expect("side"));

    let window = CoordBox { lo: vec![0; d - 1], hi: vec![side; d - 1] };
    let (w, beta) = beta_window(d, &window)?;
    let plus = beta.entries.values().filter(|&&c| c > 0).count();
    println!("d = {d}, box [0, {side}]^{}: {} vertices, {} chambers", d - 1, w.coords.len(), w.chambers.len());
    println!("β: {plus} chambers with +1, {} with −1", beta.entries.len() - plus);

    let bd = w.complex.boundary(&beta);
    let interior = w.interior_faces();
    let on_interior = interior.iter().filter(|f| bd.entries.contains_key(f)).count();
    println!("∂β: {} faces in its support, {on_interior} of {} interior faces", bd.entries.len(), interior.len());

    if d == 3 {
        for (id, order) in w.chambers.iter().take(4) {
            let pts: Vec<&Vec<i64>> = order.iter().map(|&v| &w.coords[v]).collect();
            println!("  chamber {id}: [σ] = {pts:?}, β = {}", beta.entries[id]);
        }
    }
    Ok(())
}
