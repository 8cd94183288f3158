//! Solvable subgroups of finite linear groups: exact field and matrix
//! arithmetic, semilinear group closure, coset actions, base sizes and
//! probabilistic bounds.

pub mod basesize;
pub mod bounds;
pub mod constructions;
pub mod families;
pub mod gf;
pub mod linalg;
pub mod scenarios;
pub mod semilinear;
