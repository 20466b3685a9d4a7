//! End-to-end prove and verify for both schemes.

pub mod explicit;
pub mod symbolic;
