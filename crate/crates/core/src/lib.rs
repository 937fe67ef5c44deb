//! Exact arithmetic for Gamma_0(p)-invariant modular symbols, Shintani cycles
//! of indefinite binary quadratic forms, and the rigid Shintani lift.

pub mod arith;
pub mod cocycle;
pub mod error;
pub mod linalg;
pub mod modsym;
pub mod oracle;
pub mod polyact;
pub mod qforms;
pub mod shintani;

pub use error::{Error, Result};
