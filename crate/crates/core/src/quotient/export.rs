use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::QuotientComplex;
use crate::exactring::{Mat, MatA, Poly};
use crate::Error;

/// One simplex orbit. Polynomials are coefficient arrays, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexJson {
    pub id: usize,
    pub dim: usize,
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
    pub rep_keys: Vec<String>,
    pub splitting_types: Vec<Vec<i64>>,
    pub stab_order: u128,
    pub in_truncation: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer: Option<Vec<Vec<Vec<Vec<u32>>>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientJson {
    pub q: u32,
    pub d: usize,
    pub ideal: Vec<u32>,
    pub alpha: i64,
    pub counts: Vec<usize>,
    pub simplices: Vec<SimplexJson>,
}

pub fn matrix_to_json(g: &MatA) -> Vec<Vec<Vec<u32>>> {
    g.to_rows().iter().map(|r| r.iter().map(|x| x.coeffs().to_vec()).collect()).collect()
}

pub fn matrix_from_json(m: &[Vec<Vec<u32>>], p: u32) -> MatA {
    Mat::from_rows(m.iter().map(|r| r.iter().map(|c| Poly::from_raw(p, c.clone())).collect()).collect())
}

impl QuotientComplex {
    pub fn to_json(&self) -> Result<QuotientJson, Error> {
        let mut simplices = Vec::new();
        for (dim, layer) in self.orbits.iter().enumerate() {
            for (id, rec) in layer.iter().enumerate() {
                let s = self.complex.simplex(dim, id);
                simplices.push(SimplexJson {
                    id,
                    dim,
                    vertices: s.vertices.clone(),
                    faces: s.faces.clone(),
                    rep_keys: self.rep_keys(dim, id)?,
                    splitting_types: rec.splitting_types.iter().map(|t| t.0.clone()).collect(),
                    stab_order: rec.stab_order,
                    in_truncation: rec.truncated,
                    stabilizer: rec.stabilizer.as_ref().map(|v| v.iter().map(matrix_to_json).collect()),
                });
            }
        }
        Ok(QuotientJson {
            q: self.group.q,
            d: self.group.d,
            ideal: self.group.m.coeffs().to_vec(),
            alpha: self.alpha,
            counts: self.complex.counts(),
            simplices,
        })
    }
}

/// DOT graph of the 1-skeleton, vertices labelled by stabilizer order.
pub fn to_dot(q: &QuotientComplex) -> Result<String, Error> {
    Ok(q.to_json()?.to_dot())
}

impl QuotientJson {
    /// DOT graph of the 1-skeleton, vertices labelled by stabilizer order.
    /// Truncated simplices are dashed.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph quotient {\n");
        for v in self.simplices.iter().filter(|x| x.dim == 0) {
            let style = if v.in_truncation { ", style=dashed" } else { "" };
            let ty: Vec<String> = v.splitting_types[0].iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "  v{} [label=\"{}\", tooltip=\"({})\"{style}];", v.id, v.stab_order, ty.join(","));
        }
        for e in self.simplices.iter().filter(|x| x.dim == 1) {
            let style = if e.in_truncation { " [style=dashed]" } else { "" };
            let _ = writeln!(s, "  v{} -- v{}{style};", e.vertices[0], e.vertices[1]);
        }
        s.push_str("}\n");
        s
    }
}
