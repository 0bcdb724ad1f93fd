//! Numerical verification of the symbolic identities on random matrices.

pub mod catalog;
pub mod check;
pub mod fixtures;
pub mod funcs;
pub mod linalg;
pub mod oracles;
