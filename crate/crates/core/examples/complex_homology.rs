//! Integral homology through Smith normal forms: the projective plane with
//! several coefficient rings, and the barycentric spheres.
//!
//!     cargo run --release --example complex_homology

use btq::simplicial::{barycentric_sphere, homology, universal_coeff_check, Coeff, Complex};

fn main() -> Result<(), btq::Error> {
    // six-vertex triangulation of RP^2
    let rp2 = Complex::from_facets(
        6,
        &[
            vec![0, 1, 2],
            vec![0, 2, 3],
            vec![0, 3, 4],
            vec![0, 4, 5],
            vec![0, 1, 5],
            vec![1, 2, 4],
            vec![2, 3, 5],
            vec![1, 3, 4],
            vec![2, 4, 5],
            vec![1, 3, 5],
        ],
    )?;
    println!("RP^2, counts {:?}", rp2.counts());
    for coeff in [Coeff::Z, Coeff::Q, Coeff::Zn(2), Coeff::Zn(3)] {
        let hs: Vec<String> =
            (0..3).map(|i| homology(&rp2, i, coeff).map(|h| h.to_string())).collect::<Result<_, _>>()?;
        let uct = universal_coeff_check(&rp2, coeff)?;
        println!(
            "  {coeff:?}: H_0..2 = {}  (universal coefficients {})",
            hs.join(", "),
            if uct.ok() { "agree" } else { "DISAGREE" }
        );
    }

    for d in 2..=5 {
        let (c, fund) = barycentric_sphere(d);
        let hs: Vec<String> =
            (0..=d - 2).map(|i| homology(&c, i, Coeff::Z).map(|h| h.to_string())).collect::<Result<_, _>>()?;
        println!(
            "barycentric sphere d = {d}: {} vertices, {} chambers, H = [{}], ∂(fundamental) = 0: {}",
            c.count(0),
            c.count(d - 2),
            hs.join(", "),
            d == 2 || c.boundary(&fund).is_zero()
        );
    }
    Ok(())
}
