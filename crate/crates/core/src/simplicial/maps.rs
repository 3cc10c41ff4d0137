use std::collections::HashMap;

use super::{permutation_parity, Chain, Complex};
use crate::Error;

/// A simplicial map between finite complexes.
///
/// `images[i][s]` is the image of the i-simplex `s`: `None` when its
/// vertices do not map injectively (the image is degenerate), otherwise the
/// id of an i-simplex of the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMap {
    pub vertex_map: Vec<usize>,
    pub images: Vec<Vec<Option<usize>>>,
}

impl FiniteMap {
    /// Checks vertex consistency and compatibility with face maps.
    pub fn new(source: &Complex, target: &Complex, images: Vec<Vec<Option<usize>>>) -> Result<Self, Error> {
        let bad = |m: String| Error::NotSimplicialMap(m);
        let top = source.counts().len();
        if images.len() < top || (0..top).any(|i| images[i].len() != source.count(i)) {
            return Err(bad("image table has the wrong shape".into()));
        }
        let vertex_map: Vec<usize> = images
            .first()
            .map(|l| l.iter().map(|v| v.ok_or_else(|| bad("vertices must have images".into()))).collect())
            .transpose()?
            .unwrap_or_default();
        if vertex_map.iter().any(|&v| v >= target.count(0)) {
            return Err(bad("vertex image out of range".into()));
        }
        for i in 1..top {
            for (s, img) in images[i].iter().enumerate() {
                let sx = source.simplex(i, s);
                let mut vs: Vec<usize> = sx.vertices.iter().map(|&v| vertex_map[v]).collect();
                let before = vs.len();
                vs.sort_unstable();
                vs.dedup();
                let injective = vs.len() == before;
                match (img, injective) {
                    (None, false) => {}
                    (None, true) => return Err(bad(format!("nondegenerate simplex {s} (dim {i}) has no image"))),
                    (Some(_), false) => return Err(bad(format!("degenerate simplex {s} (dim {i}) given an image"))),
                    (Some(t), true) => {
                        if *t >= target.count(i) || target.simplex(i, *t).vertices != vs {
                            return Err(bad(format!("image of simplex {s} (dim {i}) has the wrong vertices")));
                        }
                        // f(σ×V) = f(σ)×f(V).
                        let tx = target.simplex(i, *t);
                        for (k, &v) in sx.vertices.iter().enumerate() {
                            let fv = vertex_map[v];
                            let pos = tx.vertices.iter().position(|&w| w == fv).unwrap();
                            if images[i - 1][sx.faces[k]] != Some(tx.faces[pos]) {
                                return Err(bad(format!("simplex {s} (dim {i}) breaks face compatibility")));
                            }
                        }
                    }
                }
            }
        }
        Ok(FiniteMap { vertex_map, images })
    }

    /// The map determined by a vertex map into a strict target.
    pub fn from_vertex_map(source: &Complex, target: &Complex, vertex_map: &[usize]) -> Result<Self, Error> {
        if !target.is_strict() {
            return Err(Error::NotSimplicialMap("target must be strict to infer simplex images".into()));
        }
        let top = source.counts().len();
        let lookup: Vec<HashMap<&Vec<usize>, usize>> = (0..top)
            .map(|i| target.simplices(i).iter().enumerate().map(|(id, s)| (&s.vertices, id)).collect())
            .collect();
        let mut images = Vec::with_capacity(top);
        for i in 0..top {
            let mut layer = Vec::with_capacity(source.count(i));
            for s in source.simplices(i) {
                let mut vs: Vec<usize> = s.vertices.iter().map(|&v| vertex_map[v]).collect();
                vs.sort_unstable();
                vs.dedup();
                if vs.len() < s.vertices.len() {
                    layer.push(None);
                } else {
                    let id = lookup[i]
                        .get(&vs)
                        .ok_or_else(|| Error::NotSimplicialMap(format!("{vs:?} is not a simplex of the target")))?;
                    layer.push(Some(*id));
                }
            }
            images.push(layer);
        }
        FiniteMap::new(source, target, images)
    }

    /// Sign relating the reference orientation of `s` to that of its image.
    pub fn orientation_sign(&self, source: &Complex, i: usize, s: usize) -> Option<i64> {
        self.images[i][s]?;
        let imgs: Vec<usize> = source.simplex(i, s).vertices.iter().map(|&v| self.vertex_map[v]).collect();
        Some(if permutation_parity(&imgs) { -1 } else { 1 })
    }
}

/// f_* on chains. Degenerate images vanish.
pub fn pushforward_finite(source: &Complex, f: &FiniteMap, ch: &Chain) -> Chain {
    let mut out = Chain::zero(ch.dim);
    for (&s, &c) in &ch.entries {
        if let (Some(t), Some(sign)) = (f.images[ch.dim][s], f.orientation_sign(source, ch.dim, s)) {
            out.add(t, sign * c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_reverses_an_edge() {
        let c = Complex::from_facets(2, &[vec![0, 1]]).unwrap();
        let f = FiniteMap::from_vertex_map(&c, &c, &[1, 0]).unwrap();
        let mut e = Chain::zero(1);
        e.add(0, 1);
        assert_eq!(pushforward_finite(&c, &f, &e).entries[&0], -1);
    }

    #[test]
    fn collapse_kills_the_edge_and_commutes_with_boundary() {
        let tri = Complex::from_facets(3, &[vec![0, 1, 2]]).unwrap();
        let f = FiniteMap::from_vertex_map(&tri, &tri, &[0, 0, 2]).unwrap();
        let mut t = Chain::zero(2);
        t.add(0, 1);
        assert!(pushforward_finite(&tri, &f, &t).is_zero());
        for e in 0..3 {
            let mut ch = Chain::zero(1);
            ch.add(e, 1);
            let lhs = tri.boundary(&pushforward_finite(&tri, &f, &ch));
            let rhs = pushforward_finite(&tri, &f, &tri.boundary(&ch));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn non_map_rejected() {
        let edge = Complex::from_facets(2, &[vec![0, 1]]).unwrap();
        let two_points = Complex::from_facets(2, &[]).unwrap();
        assert!(FiniteMap::from_vertex_map(&edge, &two_points, &[0, 1]).is_err());
    }
}
