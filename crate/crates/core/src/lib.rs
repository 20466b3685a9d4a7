//! Zero-knowledge model checking.
//!
//! A prover holding a secret transition system convinces a verifier that the
//! system satisfies a public Büchi specification. Two schemes are provided:
//! an explicit-state scheme built on KZG vanishing proofs, and a symbolic scheme
//! for linear guarded-command programs where every proof obligation is discharged
//! by a Farkas witness proven in zero knowledge over Pedersen commitments.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds systems, automata, ranking functions and their plaintext checks.
//! * [`lang`] parses and prints the `.zkgc` certificate language and `.zkx.json` graphs.
//! * [`explicit`] and [`symbolic`] derive the public batches and obligations.
//! * [`lp`] decides rational feasibility and produces integer Farkas witnesses.
//! * [`crypto`], [`kzg`] and [`sigma`] are the cryptographic building blocks.
//! * [`protocol`] wires everything into provers and verifiers.
//! * [`oracle`] is a naive model checker used to cross-check the certifiers.

pub mod cli;
pub mod crypto;
pub mod explicit;
pub mod kzg;
pub mod lang;
pub mod lp;
pub mod model;
pub mod models;
pub mod oracle;
pub mod protocol;
pub mod sigma;
pub mod symbolic;

/// Default bound on coefficients and witness entries.
pub const DEFAULT_BOUND: u64 = 1 << 32;
