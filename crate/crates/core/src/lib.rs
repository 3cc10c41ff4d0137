//! Quotients of the Bruhat–Tits building of PGL_d over K = F_q((1/t)) by
//! congruence subgroups of GL_d(F_q[t]), their relative homology, modular
//! symbols coming from apartments, and the group homology of the finite
//! stabilizers that appear along the way.
//!
//! The modules build on each other in this order: [`exactring`],
//! [`simplicial`], [`building`], [`bundles`], [`quotient`], [`symbols`],
//! [`grouphom`].

pub mod building;
pub mod bundles;
pub mod error;
pub mod exactring;
pub mod grouphom;
pub mod quotient;
pub mod simplicial;
pub mod symbols;

pub use error::Error;
